#include <doctest.h>

#include <random>

#include "cdag/errors.hpp"
#include "cdag/eval.hpp"

using namespace cdag;

namespace {

Dag random_dag(std::mt19937_64& rng, int p) {
    std::vector<int> order(p);
    for (int i = 0; i < p; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::uint64_t> masks(p, 0);
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b)
            if (rng() % 3 == 0) masks[order[b]] |= std::uint64_t{1} << order[a];
    return Dag::from_parent_masks(masks);
}

BenchmarkOptions small_options(int reps, int threads) {
    BenchmarkOptions o;
    o.replicates = reps;
    o.seed = 17;
    o.threads = threads;
    o.estimate.greedy.restarts = 3;
    return o;
}

}  // namespace

TEST_CASE("shd examples") {
    const std::vector<Edge> fwd{{0, 1}}, back{{1, 0}}, chain{{0, 1}, {1, 2}};
    CHECK(shd(Dag(3, chain), Dag(3, chain)).shd == 0);
    const auto rev = shd(Dag(2, back), Dag(2, fwd));
    CHECK(rev.shd == 1);
    CHECK(rev.reversed == 1);
    const auto miss = shd(Dag(3, fwd), Dag(3, chain));
    CHECK(miss.shd == 1);
    CHECK(miss.missing == 1);
    const auto extra = shd(Dag(3, chain), Dag(3, fwd));
    CHECK(extra.extra == 1);
    CHECK_THROWS_AS(shd(Dag(2), Dag(3)), InputError);
}

TEST_CASE("edge precision and recall") {
    const std::vector<Edge> truth{{0, 1}, {1, 2}}, est{{0, 1}, {2, 1}, {0, 2}};
    const auto r = edge_recovery(Dag(3, est), Dag(3, truth));
    CHECK(r.true_positive == 1);
    CHECK(r.precision() == doctest::Approx(1.0 / 3));
    CHECK(r.recall() == doctest::Approx(0.5));
    const auto empty = edge_recovery(Dag(3), Dag(3, truth));
    CHECK(empty.precision() == 1.0);
    CHECK(empty.recall() == 0.0);
    CHECK(edge_recovery(Dag(3, truth), Dag(3, truth)).recall() == 1.0);
    CHECK_THROWS_AS(edge_recovery(Dag(2), Dag(3)), InputError);
}

TEST_CASE("shd is a metric") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 500; ++trial) {
        const int p = 2 + static_cast<int>(rng() % 5);
        const Dag a = random_dag(rng, p), b = random_dag(rng, p), c = random_dag(rng, p);
        const auto ab = shd(a, b);
        CHECK(ab.shd == ab.missing + ab.extra + ab.reversed);
        CHECK(ab.shd == shd(b, a).shd);
        CHECK((ab.shd == 0) == (a == b));
        CHECK(shd(a, c).shd <= ab.shd + shd(b, c).shd);
    }
}

TEST_CASE("benchmark structure and determinism") {
    BenchmarkGrid grid;
    grid.thetas = {0.0, 0.5};
    grid.ps = {3};
    grid.ns = {30, 60};
    const auto a = run_benchmark(grid, small_options(3, 1));
    CHECK(a.rows.size() == 2 * 2 * 3);
    CHECK(a.rows[0].estimator == EstimatorMode::Dag);
    CHECK(a.rows[2].estimator == EstimatorMode::Cdag);
    CHECK(a.rows[3].n == 60);
    for (const auto& row : a.rows) {
        CHECK(row.replicates == 3);
        CHECK(row.shd_values.size() == 3);
        double mean = 0, ss = 0;
        for (int v : row.shd_values) mean += v / 3.0;
        for (int v : row.shd_values) ss += (v - mean) * (v - mean);
        CHECK(row.mean_shd == doctest::Approx(mean));
        REQUIRE(row.stderr_shd.has_value());
        CHECK(*row.stderr_shd == doctest::Approx(std::sqrt(ss / 2) / std::sqrt(3.0)));
    }

    const auto b = run_benchmark(grid, small_options(3, 4));
    REQUIRE(b.rows.size() == a.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].shd_values == b.rows[i].shd_values);

    CHECK(a.find(0.5, 3, 30, EstimatorMode::Dag2).theta == 0.5);
    CHECK_THROWS_AS((void)a.find(0.25, 3, 30, EstimatorMode::Dag2), InputError);
}

TEST_CASE("a single replicate has no standard error") {
    BenchmarkGrid grid;
    grid.thetas = {0.0};
    grid.ps = {3};
    grid.ns = {20};
    const auto r = run_benchmark(grid, small_options(1, 1));
    for (const auto& row : r.rows) CHECK_FALSE(row.stderr_shd.has_value());
    CHECK_THROWS_AS(run_benchmark(grid, small_options(0, 1)), InputError);
}

TEST_CASE("misspecification sweep at zero reproduces the benchmark cell") {
    BenchmarkGrid grid;
    grid.thetas = {0.0};
    grid.ps = {4};
    grid.ns = {80};
    const auto bench = run_benchmark(grid, small_options(4, 1));
    MisspecSweep sweep;
    sweep.p = 4;
    sweep.n = 80;
    sweep.misspec_probs = {0.0, 1.0};
    const auto sw = run_misspec_sweep(sweep, small_options(4, 1));
    CHECK(sw.rows.size() == 6);
    for (auto mode : {EstimatorMode::Dag, EstimatorMode::Dag2, EstimatorMode::Cdag})
        CHECK(sw.find(0.0, 4, 80, mode, 0.0).shd_values == bench.find(0.0, 4, 80, mode).shd_values);
}

TEST_CASE("replicate seeds depend on every coordinate") {
    const auto s = replicate_seed(1, 0.5, 5, 100, 0.0, 0);
    CHECK(s == replicate_seed(1, 0.5, 5, 100, 0.0, 0));
    CHECK(s != replicate_seed(2, 0.5, 5, 100, 0.0, 0));
    CHECK(s != replicate_seed(1, 0.0, 5, 100, 0.0, 0));
    CHECK(s != replicate_seed(1, 0.5, 6, 100, 0.0, 0));
    CHECK(s != replicate_seed(1, 0.5, 5, 101, 0.0, 0));
    CHECK(s != replicate_seed(1, 0.5, 5, 100, 0.25, 0));
    CHECK(s != replicate_seed(1, 0.5, 5, 100, 0.0, 1));
}

TEST_CASE("failing replicates report their cell") {
    BenchmarkGrid grid;
    grid.thetas = {0.0};
    grid.ps = {30};
    grid.ns = {100};
    CHECK_THROWS_AS(run_benchmark(grid, small_options(1, 1)), InputError);
    grid.ps = {4};
    grid.ns = {5};
    try {
        (void)run_benchmark(grid, small_options(1, 1));
        CHECK(false);
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("p=4 n=5") != std::string::npos);
    }
}
