#include "wpc/wp_tensor.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "wpc/parallel.hpp"

namespace wpc {

std::string TensorIndex::str() const {
    return "(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + "," +
           std::to_string(l) + ")";
}

bool selection_rule(int i, int j, int k, int l) {
    if (i < 1 || j < 1 || k < 1 || l < 1) throw std::invalid_argument("tensor labels must be >= 1");
    return (i - j) + (k - l) == 0;
}

TensorIndex canonical_index(const TensorIndex& t) {
    const std::array<TensorIndex, 4> orbit = {
        t, TensorIndex{t.k, t.l, t.i, t.j}, TensorIndex{t.j, t.i, t.l, t.k}, TensorIndex{t.l, t.k, t.j, t.i}};
    return *std::min_element(orbit.begin(), orbit.end());
}

std::vector<TensorIndex> canonical_tuples(int n) {
    std::vector<TensorIndex> out;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k)
                for (int l = 1; l <= n; ++l) {
                    const TensorIndex t{i, j, k, l};
                    if (selection_rule(t) && canonical_index(t) == t) out.push_back(t);
                }
    return out;
}

TensorCache::TensorCache(const TensorCache& other) {
    std::shared_lock lock(other.mutex_);
    truncation_ = other.truncation_;
    entries_ = other.entries_;
}

TensorCache& TensorCache::operator=(const TensorCache& other) {
    if (this == &other) return *this;
    std::unique_lock lock(mutex_, std::defer_lock);
    std::shared_lock other_lock(other.mutex_, std::defer_lock);
    std::lock(lock, other_lock);
    truncation_ = other.truncation_;
    entries_ = other.entries_;
    return *this;
}

int TensorCache::truncation() const {
    std::shared_lock lock(mutex_);
    return truncation_;
}

void TensorCache::set_truncation(int n) {
    std::unique_lock lock(mutex_);
    truncation_ = n;
}

std::optional<double> TensorCache::find(int i, int j, int k, int l) const {
    if (!selection_rule(i, j, k, l)) return 0.0;
    const TensorIndex c = canonical_index({i, j, k, l});
    std::shared_lock lock(mutex_);
    auto it = entries_.find(c);
    if (it == entries_.end()) return std::nullopt;
    return it->second.value;
}

double TensorCache::at(int i, int j, int k, int l) const {
    const auto v = find(i, j, k, l);
    if (!v) throw MissingEntryError(TensorIndex{i, j, k, l});
    return *v;
}

bool TensorCache::contains(const TensorIndex& t) const {
    const TensorIndex c = canonical_index(t);
    std::shared_lock lock(mutex_);
    return entries_.count(c) > 0;
}

void TensorCache::insert(const TensorEntry& e) { insert_batch({e}); }

void TensorCache::insert_batch(const std::vector<TensorEntry>& batch) {
    std::unique_lock lock(mutex_);
    for (TensorEntry e : batch) {
        e.index = canonical_index(e.index);
        entries_[e.index] = e;
    }
}

std::size_t TensorCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

int TensorCache::max_label() const {
    std::shared_lock lock(mutex_);
    int m = 0;
    for (const auto& [t, e] : entries_) m = std::max({m, t.i, t.j, t.k, t.l});
    return m;
}

std::vector<TensorEntry> TensorCache::entries() const {
    std::shared_lock lock(mutex_);
    std::vector<TensorEntry> out;
    out.reserve(entries_.size());
    for (const auto& [t, e] : entries_) out.push_back(e);
    return out;
}

std::string TensorCache::serialize() const {
    std::shared_lock lock(mutex_);
    std::string out;
    nlohmann::json header = {{"format", "wp-tensor-cache"},
                             {"version", kFormatVersion},
                             {"truncation", truncation_},
                             {"entries", entries_.size()}};
    out += header.dump() + "\n";
    for (const auto& [t, e] : entries_) {
        nlohmann::json line = {{"index", {t.i, t.j, t.k, t.l}},
                               {"value", e.value},
                               {"meta",
                                {{"quadrature_order", e.meta.quadrature_order},
                                 {"solver_tolerance", e.meta.solver_tolerance},
                                 {"route", e.meta.route},
                                 {"code_version", e.meta.code_version}}}};
        out += line.dump() + "\n";
    }
    return out;
}

TensorCache TensorCache::parse(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw CacheFormatError("tensor cache: empty input");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw CacheFormatError(std::string("tensor cache: malformed header: ") + e.what());
    }
    if (header.value("format", "") != "wp-tensor-cache")
        throw CacheFormatError("tensor cache: unknown format in header");
    if (header.value("version", -1) != kFormatVersion)
        throw CacheFormatError("tensor cache: unsupported version " + header.value("version", nlohmann::json()).dump());
    TensorCache cache(header.value("truncation", 0));
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const nlohmann::json j = nlohmann::json::parse(line);
            const auto idx = j.at("index").get<std::array<int, 4>>();
            TensorEntry e;
            e.index = {idx[0], idx[1], idx[2], idx[3]};
            e.value = j.at("value").get<double>();
            const auto& m = j.at("meta");
            e.meta.quadrature_order = m.at("quadrature_order").get<int>();
            e.meta.solver_tolerance = m.at("solver_tolerance").get<double>();
            e.meta.route = m.at("route").get<std::string>();
            e.meta.code_version = m.at("code_version").get<std::string>();
            if (!selection_rule(e.index) || canonical_index(e.index) != e.index)
                throw CacheFormatError("non-canonical index " + e.index.str());
            cache.entries_[e.index] = e;
        } catch (const std::exception& e) {
            throw CacheFormatError("tensor cache line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (header.contains("entries") && header["entries"].get<std::size_t>() != cache.entries_.size())
        throw CacheFormatError("tensor cache: header entry count does not match body");
    return cache;
}

void TensorCache::save(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write tensor cache " + tmp.string());
        out << serialize();
        if (!out) throw std::runtime_error("failed writing tensor cache " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

TensorCache TensorCache::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read tensor cache " + path.string());
    return parse(in);
}

std::string TensorCache::content_hash() const { return sha256_hex(serialize()); }

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
        out += hex[digest[k] >> 4];
        out += hex[digest[k] & 15];
    }
    return out;
}

TensorEngine::TensorEngine(int max_label, SolverConfig config)
    : max_label_(max_label),
      config_(config),
      rule_(std::make_shared<const QuadratureRule>(
          gauss_jacobi(config.quadrature_order > 0 ? config.quadrature_order
                                                   : radial_order_for_power(std::max(max_label - 1, 0))))),
      resolvent_(rule_, config) {
    if (max_label < 1) throw std::invalid_argument("TensorEngine: max_label must be >= 1");
}

EntryMeta TensorEngine::meta() const {
    EntryMeta m;
    m.quadrature_order = rule_->order();
    m.solver_tolerance = config_.tolerance;
    m.route = to_string(config_.route);
    return m;
}

std::size_t TensorEngine::solve_count() const {
    std::lock_guard lock(memo_mutex_);
    return solves_;
}

std::shared_ptr<const SeparableFunction> TensorEngine::profile(int i, int j) {
    {
        std::lock_guard lock(memo_mutex_);
        auto it = memo_.find({i, j});
        if (it != memo_.end()) return it->second;
    }
    auto solved = std::make_shared<const SeparableFunction>(
        resolvent_.apply(SeparableFunction::basis_product(rule_, i, j)));
    std::lock_guard lock(memo_mutex_);
    auto [it, inserted] = memo_.emplace(std::make_pair(i, j), solved);
    if (inserted) ++solves_;
    return it->second;
}

double TensorEngine::compute_entry(const TensorIndex& t) {
    if (!selection_rule(t)) return 0.0;
    if (std::max({t.i, t.j, t.k, t.l}) > max_label_)
        throw std::invalid_argument("tensor entry " + t.str() + " exceeds engine capacity " +
                                    std::to_string(max_label_));
    try {
        const auto u = profile(t.i, t.j);
        const cplx v = integrate_product(*u, SeparableFunction::basis_product(rule_, t.k, t.l));
        if (std::abs(v.imag()) > 1e-12)
            throw std::runtime_error("imaginary residue " + std::to_string(std::abs(v.imag())));
        return v.real();
    } catch (const TensorComputeError&) {
        throw;
    } catch (const std::exception& e) {
        throw TensorComputeError(t, e.what());
    }
}

BlockOutcome TensorEngine::compute_entries(const std::vector<TensorIndex>& wanted, TensorCache& cache,
                                           int jobs, const std::optional<std::filesystem::path>& persist) {
    std::set<TensorIndex> unique;
    for (const TensorIndex& t : wanted)
        if (selection_rule(t)) unique.insert(canonical_index(t));
    std::vector<TensorIndex> todo;
    for (const TensorIndex& t : unique)
        if (!cache.contains(t)) todo.push_back(t);

    BlockOutcome outcome;
    outcome.requested = unique.size();
    const std::size_t solves_before = solve_count();

    std::set<std::pair<int, int>> pair_set;
    for (const TensorIndex& t : todo) pair_set.insert({t.i, t.j});
    const std::vector<std::pair<int, int>> pairs(pair_set.begin(), pair_set.end());
    parallel_for(pairs.size(), jobs, [&](std::size_t p) {
        try {
            profile(pairs[p].first, pairs[p].second);
        } catch (const std::exception&) {
            // reported per entry below
        }
    });

    std::vector<TensorEntry> done(todo.size());
    std::vector<std::string> errors(todo.size());
    std::vector<char> ok(todo.size(), 0);
    const EntryMeta m = meta();
    parallel_for(todo.size(), jobs, [&](std::size_t q) {
        try {
            done[q] = TensorEntry{todo[q], compute_entry(todo[q]), m};
            ok[q] = 1;
        } catch (const std::exception& e) {
            errors[q] = e.what();
        }
    });

    std::vector<TensorEntry> batch;
    std::vector<TensorIndex> missing;
    std::string first_error;
    for (std::size_t q = 0; q < todo.size(); ++q) {
        if (ok[q]) {
            batch.push_back(done[q]);
        } else {
            missing.push_back(todo[q]);
            if (first_error.empty()) first_error = errors[q];
        }
    }
    cache.insert_batch(batch);
    outcome.computed = batch.size();
    outcome.solves = solve_count() - solves_before;

    if (!missing.empty()) {
        if (persist) {
            cache.save(*persist);
            nlohmann::json manifest = {{"truncation", cache.truncation()},
                                       {"missing_count", missing.size()},
                                       {"first_error", first_error}};
            nlohmann::json list = nlohmann::json::array();
            for (const TensorIndex& t : missing) list.push_back({t.i, t.j, t.k, t.l});
            manifest["missing"] = list;
            std::ofstream out(persist->string() + ".missing.json");
            out << manifest.dump(2) << "\n";
        }
        throw TensorComputeError(missing.front(), first_error + " (" + std::to_string(missing.size()) +
                                                      " entries missing)");
    }
    return outcome;
}

BlockOutcome TensorEngine::compute_block(int n, TensorCache& cache, int jobs,
                                         const std::optional<std::filesystem::path>& persist) {
    if (n < 1) throw std::invalid_argument("compute_block: truncation must be >= 1");
    if (n > max_label_)
        throw std::invalid_argument("compute_block: truncation " + std::to_string(n) +
                                    " exceeds engine capacity " + std::to_string(max_label_));
    const BlockOutcome outcome = compute_entries(canonical_tuples(n), cache, jobs, persist);
    if (cache.truncation() < n) cache.set_truncation(n);
    if (persist) cache.save(*persist);
    return outcome;
}

double tensor_entry(int i, int j, int k, int l, TensorCache& cache, TensorEngine& engine) {
    if (const auto v = cache.find(i, j, k, l)) return *v;
    const TensorIndex c = canonical_index({i, j, k, l});
    const double value = engine.compute_entry(c);
    cache.insert(TensorEntry{c, value, engine.meta()});
    return value;
}

double curvature_component(int i, int j, int k, int l, const TensorCache& cache) {
    return cache.at(i, j, k, l) + cache.at(i, l, k, j);
}

std::filesystem::path cache_path(const std::filesystem::path& dir, int n) {
    return dir / ("tensor-N" + std::to_string(n) + ".jsonl");
}

}  // namespace wpc
