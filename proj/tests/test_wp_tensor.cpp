#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wpc/wp_tensor.hpp"

using namespace wpc;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("wpc-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("selection rule and canonical indices") {
    CHECK(selection_rule(1, 1, 1, 1));
    CHECK(selection_rule(2, 1, 1, 2));
    CHECK_FALSE(selection_rule(2, 1, 1, 1));
    CHECK_THROWS(selection_rule(0, 1, 1, 1));
    CHECK(canonical_index({2, 1, 1, 2}) == TensorIndex{1, 2, 2, 1});
    CHECK(canonical_index({3, 3, 1, 1}) == TensorIndex{1, 1, 3, 3});
    CHECK(canonical_tuples(1).size() == 1);
}

TEST_CASE("canonical tuple count matches brute-force enumeration") {
    for (int n = 1; n <= 5; ++n) {
        std::set<TensorIndex> orbits;
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    for (int l = 1; l <= n; ++l)
                        if ((i - j) + (k - l) == 0) {
                            std::vector<TensorIndex> orbit = {{i, j, k, l}, {k, l, i, j}, {j, i, l, k}, {l, k, j, i}};
                            orbits.insert(*std::min_element(orbit.begin(), orbit.end()));
                        }
        CHECK(canonical_tuples(n).size() == orbits.size());
    }
}

TEST_CASE("low entries match exact rational multiples of 1/pi") {
    TensorEngine engine(4);
    CHECK(engine.compute_entry({1, 1, 1, 1}) == doctest::Approx(11.0 / (60.0 * kPi)).epsilon(1e-12));
    CHECK(engine.compute_entry({2, 2, 2, 2}) == doctest::Approx(51.0 / (560.0 * kPi)).epsilon(1e-12));
    CHECK(engine.compute_entry({1, 1, 2, 2}) == doctest::Approx(4.0 / (35.0 * kPi)).epsilon(1e-12));
    CHECK(engine.compute_entry({1, 2, 2, 1}) == doctest::Approx(29.0 / (420.0 * kPi)).epsilon(1e-12));
    CHECK(engine.compute_entry({2, 1, 1, 2}) == doctest::Approx(29.0 / (420.0 * kPi)).epsilon(1e-12));
    CHECK(engine.compute_entry({2, 1, 1, 1}) == 0.0);
    CHECK(engine.compute_entry({1, 2, 1, 2}) == 0.0);
    CHECK_THROWS_AS(engine.compute_entry({5, 5, 5, 5}), std::invalid_argument);
}

TEST_CASE("independently computed entries obey the pair and conjugation symmetries") {
    const int n = 6;
    TensorEngine engine(n);
    double worst = 0.0;
    for (const TensorIndex& t : canonical_tuples(n)) {
        const double v = engine.compute_entry(t);
        worst = std::max(worst, std::abs(v - engine.compute_entry({t.k, t.l, t.i, t.j})));
        worst = std::max(worst, std::abs(v - engine.compute_entry({t.j, t.i, t.l, t.k})));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("diagonal-type entries are positive and T[n,n,n,n] decays") {
    const int n = 12;
    TensorEngine engine(n);
    TensorCache cache;
    for (int i = 1; i <= 6; ++i)
        for (int k = 1; k <= 6; ++k) CHECK(tensor_entry(i, i, k, k, cache, engine) > 0.0);
    double prev = tensor_entry(1, 1, 1, 1, cache, engine);
    for (int m = 2; m <= n; ++m) {
        const double v = tensor_entry(m, m, m, m, cache, engine);
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("curvature components") {
    TensorEngine engine(4);
    TensorCache cache;
    engine.compute_block(4, cache, 1);
    CHECK(curvature_component(1, 1, 1, 1, cache) == doctest::Approx(2.0 * 11.0 / (60.0 * kPi)).epsilon(1e-12));
    CHECK(curvature_component(2, 1, 1, 1, cache) == 0.0);
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j)
            for (int k = 1; k <= 4; ++k)
                for (int l = 1; l <= 4; ++l)
                    CHECK(std::abs(curvature_component(i, j, k, l, cache) -
                                   curvature_component(k, j, i, l, cache)) <= 1e-10);
}

TEST_CASE("block computation is memoized and schedule independent") {
    TensorEngine serial_engine(4);
    TensorCache serial;
    const BlockOutcome first = serial_engine.compute_block(4, serial, 1);
    CHECK(first.computed == canonical_tuples(4).size());
    CHECK(serial.size() == canonical_tuples(4).size());
    CHECK(serial.truncation() == 4);
    const BlockOutcome warm = serial_engine.compute_block(4, serial, 1);
    CHECK(warm.computed == 0);
    CHECK(warm.solves == 0);

    TensorEngine parallel_engine(4);
    TensorCache parallel;
    parallel_engine.compute_block(4, parallel, 3);
    CHECK(parallel.serialize() == serial.serialize());
    CHECK(parallel.content_hash() == serial.content_hash());

    TensorEngine fresh(4);
    TensorCache one;
    fresh.compute_block(1, one, 1);
    CHECK(one.size() == 1);
    CHECK(one.entries().front().index == TensorIndex{1, 1, 1, 1});
    CHECK_THROWS(fresh.compute_block(0, one, 1));
}

TEST_CASE("cache file round trip and lookups") {
    const fs::path dir = scratch_dir("roundtrip");
    TensorEngine engine(3);
    TensorCache cache;
    const fs::path path = cache_path(dir, 3);
    CHECK(path.filename() == "tensor-N3.jsonl");
    engine.compute_block(3, cache, 2, path);
    REQUIRE(fs::exists(path));
    const TensorCache back = TensorCache::load(path);
    CHECK(back.serialize() == cache.serialize());
    CHECK(back.at(2, 1, 1, 2) == cache.at(1, 2, 2, 1));
    CHECK(back.at(3, 1, 1, 1) == 0.0);
    CHECK(back.entries().front().meta.code_version == kCodeVersion);
    CHECK(back.entries().front().meta.route == "collocation");
    CHECK_THROWS_AS(back.at(4, 4, 4, 4), MissingEntryError);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    const auto h = nlohmann::json::parse(header);
    CHECK(h.at("format") == "wp-tensor-cache");
    CHECK(h.at("version") == TensorCache::kFormatVersion);
    CHECK(h.at("truncation") == 3);
}

TEST_CASE("malformed cache files are rejected") {
    std::istringstream empty("");
    CHECK_THROWS_AS(TensorCache::parse(empty), CacheFormatError);
    std::istringstream wrong("{\"format\":\"other\",\"version\":1}\n");
    CHECK_THROWS_AS(TensorCache::parse(wrong), CacheFormatError);
    std::istringstream noncanon(
        "{\"format\":\"wp-tensor-cache\",\"version\":1,\"truncation\":2}\n"
        "{\"index\":[2,1,1,2],\"value\":0.1,\"meta\":{\"quadrature_order\":32,\"solver_tolerance\":1e-9,"
        "\"route\":\"collocation\",\"code_version\":\"x\"}}\n");
    CHECK_THROWS_AS(TensorCache::parse(noncanon), CacheFormatError);
}

TEST_CASE("failed blocks persist a partial cache and a manifest") {
    const fs::path dir = scratch_dir("partial");
    const fs::path path = cache_path(dir, 2);
    TensorCache cache;
    TensorEngine good(2);
    good.compute_block(1, cache, 1);

    TensorEngine failing(2, SolverConfig{1e-300});
    try {
        failing.compute_block(2, cache, 1, path);
        FAIL("expected TensorComputeError");
    } catch (const TensorComputeError& e) {
        CHECK(std::string(e.what()).find("did not converge") != std::string::npos);
    }
    const TensorCache partial = TensorCache::load(path);
    CHECK(partial.size() == 1);
    std::ifstream in(path.string() + ".missing.json");
    REQUIRE(in);
    const auto manifest = nlohmann::json::parse(in);
    CHECK(manifest.at("missing_count").get<std::size_t>() == canonical_tuples(2).size() - 1);
}
