/**
 * @file wp_tensor.hpp
 * @brief Curvature tensor entries T[i,j,k,l] = int D(mu_i conj mu_j) mu_k conj mu_l dA
 *        and their persistent cache.
 */
#pragma once

#include <compare>
#include <filesystem>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpc/resolvent.hpp"

namespace wpc {

inline constexpr const char* kCodeVersion = "wpc-1.0.0";

struct TensorIndex {
    int i = 1, j = 1, k = 1, l = 1;
    auto operator<=>(const TensorIndex&) const = default;
    std::string str() const;
};

/// Net angular mode (p_i - p_j) + (p_k - p_l) vanishes.
bool selection_rule(int i, int j, int k, int l);
inline bool selection_rule(const TensorIndex& t) { return selection_rule(t.i, t.j, t.k, t.l); }

/// Lexicographic minimum over {(i,j,k,l), (k,l,i,j), (j,i,l,k), (l,k,j,i)}.
TensorIndex canonical_index(const TensorIndex& t);

/// Canonical tuples with all labels <= n that pass the selection rule, sorted.
std::vector<TensorIndex> canonical_tuples(int n);

struct EntryMeta {
    int quadrature_order = 0;
    double solver_tolerance = 0.0;
    std::string route;
    std::string code_version = kCodeVersion;
};

struct TensorEntry {
    TensorIndex index;
    double value = 0.0;
    EntryMeta meta;
};

class MissingEntryError : public std::out_of_range {
public:
    explicit MissingEntryError(const TensorIndex& t)
        : std::out_of_range("tensor cache has no entry for " + t.str()), index_(t) {}
    const TensorIndex& index() const { return index_; }

private:
    TensorIndex index_;
};

class TensorComputeError : public std::runtime_error {
public:
    TensorComputeError(const TensorIndex& t, const std::string& what)
        : std::runtime_error("tensor entry " + t.str() + ": " + what), index_(t) {}
    const TensorIndex& index() const { return index_; }

private:
    TensorIndex index_;
};

class CacheFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Canonically keyed store of tensor entries. Reads are shared, writes exclusive.
class TensorCache {
public:
    static constexpr int kFormatVersion = 1;

    explicit TensorCache(int truncation = 0) : truncation_(truncation) {}
    TensorCache(const TensorCache& other);
    TensorCache& operator=(const TensorCache& other);

    int truncation() const;
    void set_truncation(int n);

    /// Value for any index: 0 when the selection rule fails, nullopt if absent.
    std::optional<double> find(int i, int j, int k, int l) const;
    /// As find, but absent entries raise MissingEntryError.
    double at(int i, int j, int k, int l) const;
    double operator()(int i, int j, int k, int l) const { return at(i, j, k, l); }
    bool contains(const TensorIndex& t) const;

    void insert(const TensorEntry& e);
    void insert_batch(const std::vector<TensorEntry>& batch);

    std::size_t size() const;
    int max_label() const;
    std::vector<TensorEntry> entries() const;

    /// JSON-lines text: header line followed by entries in canonical order.
    std::string serialize() const;
    static TensorCache parse(std::istream& in);
    void save(const std::filesystem::path& path) const;
    static TensorCache load(const std::filesystem::path& path);

    /// Hex SHA-256 of serialize().
    std::string content_hash() const;

private:
    mutable std::shared_mutex mutex_;
    int truncation_ = 0;
    std::map<TensorIndex, TensorEntry> entries_;
};

std::string sha256_hex(const std::string& data);

struct BlockOutcome {
    std::size_t requested = 0;
    std::size_t computed = 0;
    std::size_t solves = 0;
};

/// Computes tensor entries with memoized resolvent profiles D(mu_i conj mu_j).
class TensorEngine {
public:
    explicit TensorEngine(int max_label, SolverConfig config = {});

    int max_label() const { return max_label_; }
    const QuadratureRule& rule() const { return *rule_; }
    std::shared_ptr<const QuadratureRule> rule_ptr() const { return rule_; }
    const SolverConfig& config() const { return config_; }
    EntryMeta meta() const;

    /// Direct evaluation; symmetries are not used. Selection-rule failures give 0.
    double compute_entry(const TensorIndex& t);
    /// Number of resolvent solves performed so far.
    std::size_t solve_count() const;

    /// Computes every missing tuple in `wanted` (canonicalized) into the cache.
    /// On failure the successful entries are kept; if `persist` is given the
    /// cache and a manifest `<persist>.missing.json` are written before the
    /// error is rethrown.
    BlockOutcome compute_entries(const std::vector<TensorIndex>& wanted, TensorCache& cache, int jobs,
                                 const std::optional<std::filesystem::path>& persist = std::nullopt);

    BlockOutcome compute_block(int n, TensorCache& cache, int jobs,
                               const std::optional<std::filesystem::path>& persist = std::nullopt);

private:
    std::shared_ptr<const SeparableFunction> profile(int i, int j);

    int max_label_;
    SolverConfig config_;
    std::shared_ptr<const QuadratureRule> rule_;
    Resolvent resolvent_;
    mutable std::mutex memo_mutex_;
    std::map<std::pair<int, int>, std::shared_ptr<const SeparableFunction>> memo_;
    std::size_t solves_ = 0;
};

/// Cached value, computing and storing it first if absent.
double tensor_entry(int i, int j, int k, int l, TensorCache& cache, TensorEngine& engine);

/// R_{i jbar k lbar} = T[i,j,k,l] + T[i,l,k,j].
double curvature_component(int i, int j, int k, int l, const TensorCache& cache);

/// Path of the conventional cache file for rank n inside `dir`.
std::filesystem::path cache_path(const std::filesystem::path& dir, int n);

}  // namespace wpc
