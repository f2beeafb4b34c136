#include <doctest.h>

#include <cmath>
#include <random>

#include "cdag/errors.hpp"
#include "cdag/scoring.hpp"
#include "support/oracles.hpp"

using namespace cdag;

namespace {

Eigen::MatrixXd gaussian(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXd m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) m(r, c) = nd(rng);
    return m;
}

// y_j depends on x_j and on y_{j-1}; x independent.
Dataset chain_data(std::uint64_t seed, int n, int p) {
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd x = gaussian(rng, n, p);
    Eigen::MatrixXd e = gaussian(rng, n, p);
    Eigen::MatrixXd y(n, p);
    for (int j = 0; j < p; ++j) {
        y.col(j) = x.col(j) + e.col(j);
        if (j > 0) y.col(j) += 0.8 * y.col(j - 1);
    }
    return Dataset(y, x);
}

std::uint64_t mask_of(std::initializer_list<int> idx) {
    std::uint64_t m = 0;
    for (int i : idx) m |= std::uint64_t{1} << i;
    return m;
}

}  // namespace

TEST_CASE("parent prior") {
    CHECK(log_parent_prior(5, 0) == 0.0);
    CHECK(log_parent_prior(5, 2) == doctest::Approx(-std::log(10.0)).epsilon(1e-14));
    CHECK(log_parent_prior(15, 5) == doctest::Approx(-std::log(3003.0)).epsilon(1e-14));
}

TEST_CASE("dataset validation") {
    Eigen::MatrixXd y(4, 2);
    y.setRandom();
    CHECK_THROWS_AS(Dataset(y, Eigen::MatrixXd(3, 2)), InputError);
    Eigen::MatrixXd bad = y;
    bad(1, 1) = std::nan("");
    CHECK_THROWS_AS(Dataset{bad}, InputError);
    const Dataset no_x(y);
    CHECK_THROWS_AS(no_x.require_mode(EstimatorMode::Cdag), InputError);
    CHECK_THROWS_AS(score_table(no_x, EstimatorMode::Dag2), InputError);
    CHECK(parse_mode("dag2") == EstimatorMode::Dag2);
    CHECK(parse_mode("CDAG") == EstimatorMode::Cdag);
    CHECK_THROWS_AS(parse_mode("pc"), InputError);
}

TEST_CASE("design matrices") {
    std::mt19937_64 rng(1);
    const Dataset d(gaussian(rng, 10, 3), gaussian(rng, 10, 3));

    const auto empty = design_matrices(d, {0, {}, EstimatorMode::Cdag});
    CHECK(empty.base.cols() == 2);
    CHECK(empty.parents.cols() == 0);

    for (auto mode : {EstimatorMode::Cdag, EstimatorMode::Dag}) {
        const auto dm = design_matrices(d, {0, {1, 2}, mode});
        CHECK(dm.base.cols() == (mode == EstimatorMode::Cdag ? 2 : 1));
        const double scale = dm.base.norm() * dm.parents.norm();
        CHECK((dm.base.transpose() * dm.parents).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    }

    // Parent columns already orthogonal to [1, x_j] pass through unchanged.
    Eigen::MatrixXd y(4, 2), x(4, 2);
    y << 0, 1, 0, -1, 0, -1, 0, 1;
    x << 1, 0, 2, 0, 3, 0, 4, 0;
    const auto dm = design_matrices(Dataset(y, x), {0, {1}, EstimatorMode::Cdag});
    CHECK((dm.parents.col(0) - y.col(1)).norm() < 1e-12);

    Eigen::MatrixXd constant_x = x;
    constant_x.col(0).setConstant(2.0);
    CHECK_THROWS_AS(design_matrices(Dataset(y, constant_x), {0, {1}, EstimatorMode::Cdag}), NumericError);
}

TEST_CASE("closed form matches numerical integration") {
    struct Instance {
        std::uint64_t seed;
        int n;
        EstimatorMode mode;
        std::vector<int> parents;
        double g;
    };
    const std::vector<Instance> cases{
        {1, 8, EstimatorMode::Cdag, {1}, 8.0},
        {2, 10, EstimatorMode::Cdag, {1, 2}, 10.0},
        {3, 6, EstimatorMode::Cdag, {}, 6.0},
        {4, 9, EstimatorMode::Dag, {2}, 3.5},
        {5, 7, EstimatorMode::Dag, {1, 2}, 7.0},
    };
    for (const auto& c : cases) {
        CAPTURE(c.seed);
        std::mt19937_64 rng(c.seed);
        Eigen::MatrixXd x = gaussian(rng, c.n, 3);
        Eigen::MatrixXd y = gaussian(rng, c.n, 3);
        y.col(0) += 0.7 * x.col(0) + 0.5 * y.col(1);
        const Dataset d(y, x);
        GPriorConfig cfg;
        cfg.g = c.g;
        const double closed = log_marginal_likelihood(d, {0, c.parents, c.mode}, cfg);

        Eigen::MatrixXd base(c.n, c.mode == EstimatorMode::Cdag ? 2 : 1);
        base.col(0).setOnes();
        if (c.mode == EstimatorMode::Cdag) base.col(1) = x.col(0);
        Eigen::MatrixXd raw(c.n, static_cast<int>(c.parents.size()));
        for (std::size_t k = 0; k < c.parents.size(); ++k) raw.col(static_cast<int>(k)) = y.col(c.parents[k]);
        const double numeric = oracle::quadrature_log_ml(base, raw, y.col(0), c.g);
        CHECK(std::abs(closed - numeric) <= 1e-6 * std::abs(numeric));
    }
}

TEST_CASE("empty parent set reduces to the base residual sum of squares") {
    std::mt19937_64 rng(9);
    const int n = 12;
    const Dataset d(gaussian(rng, n, 2), gaussian(rng, n, 2));
    Eigen::MatrixXd base(n, 2);
    base.col(0).setOnes();
    base.col(1) = d.x().col(0);
    const Eigen::VectorXd y = d.y().col(0);
    const Eigen::VectorXd beta = (base.transpose() * base).ldlt().solve(base.transpose() * y);
    const double b = (y - base * beta).squaredNorm();
    const double m = n - 2;
    const double expected = std::log(0.5) + std::lgamma(m / 2) - m / 2 * std::log(M_PI) -
                            0.5 * std::log((base.transpose() * base).determinant()) - m / 2 * std::log(b);
    CHECK(log_marginal_likelihood(d, {0, {}, EstimatorMode::Cdag}, {}) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("scaling the child shifts every score by the same amount") {
    const Dataset d = chain_data(3, 40, 4);
    Eigen::MatrixXd y2 = d.y();
    y2.col(2) *= 2.0;
    const Dataset scaled(y2, d.x());
    const std::vector<std::vector<int>> sets{{}, {1}, {0, 1}, {1, 3}, {0, 1, 3}};
    for (auto mode : {EstimatorMode::Cdag, EstimatorMode::Dag}) {
        const int q = mode == EstimatorMode::Cdag ? 2 : 1;
        int best = -1, best_scaled = -1;
        double top = -INFINITY, top_scaled = -INFINITY;
        for (std::size_t s = 0; s < sets.size(); ++s) {
            const double a = log_marginal_likelihood(d, {2, sets[s], mode}, {});
            const double b = log_marginal_likelihood(scaled, {2, sets[s], mode}, {});
            CHECK(b - a == doctest::Approx(-(40 - q) * std::log(2.0)).epsilon(1e-9));
            if (a > top) top = a, best = static_cast<int>(s);
            if (b > top_scaled) top_scaled = b, best_scaled = static_cast<int>(s);
        }
        CHECK(best == best_scaled);
    }
}

TEST_CASE("Bayes factors") {
    const Dataset d = chain_data(4, 1000, 3);
    const std::vector<int> none, one{0}, two{0, 2};
    CHECK(log_bayes_factor(d, 1, one, one, EstimatorMode::Cdag, {}) == 0.0);
    const double ab = log_bayes_factor(d, 1, one, two, EstimatorMode::Cdag, {});
    const double ba = log_bayes_factor(d, 1, two, one, EstimatorMode::Cdag, {});
    CHECK(ab == doctest::Approx(-ba).epsilon(1e-14));
    CHECK(log_bayes_factor(d, 1, one, none, EstimatorMode::Cdag, {}) > 0.0);
}

TEST_CASE("rescaling a parent column leaves Bayes factors unchanged") {
    const Dataset d = chain_data(5, 60, 4);
    Eigen::MatrixXd y2 = d.y();
    y2.col(1) *= 7.5;
    const Dataset scaled(y2, d.x());
    const std::vector<int> h{1, 3}, g{1}, h2{0, 1, 3};
    for (auto mode : {EstimatorMode::Cdag, EstimatorMode::Dag}) {
        const double a = log_bayes_factor(d, 2, h, g, mode, {});
        const double b = log_bayes_factor(scaled, 2, h, g, mode, {});
        CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a)));
        const double c = log_bayes_factor(d, 2, h2, g, mode, {});
        const double e = log_bayes_factor(scaled, 2, h2, g, mode, {});
        CHECK(std::abs(c - e) <= 1e-8 * std::max(1.0, std::abs(c)));
    }
}

TEST_CASE("an irrelevant parent is rejected at large n") {
    int negative = 0;
    for (int rep = 0; rep < 20; ++rep) {
        std::mt19937_64 rng(100 + rep);
        const int n = 2000;
        Eigen::MatrixXd x = gaussian(rng, n, 2);
        Eigen::MatrixXd y = gaussian(rng, n, 2);
        y.col(0) += x.col(0);
        const Dataset d(y, x);
        const std::vector<int> null_parent{1}, none;
        if (log_bayes_factor(d, 0, null_parent, none, EstimatorMode::Cdag, {}) < 0) ++negative;
    }
    CHECK(negative >= 18);
}

TEST_CASE("collinear parents") {
    std::mt19937_64 rng(6);
    Eigen::MatrixXd y = gaussian(rng, 20, 3);
    y.col(2) = (2.0 * y.col(1)).array() - 1.0;
    const Dataset d(y, gaussian(rng, 20, 3));
    CHECK_THROWS_AS(log_marginal_likelihood(d, {0, {1, 2}, EstimatorMode::Cdag}, {}), CollinearityError);
    try {
        (void)log_marginal_likelihood(d, {0, {1, 2}, EstimatorMode::Cdag}, {});
    } catch (const CollinearityError& e) {
        CHECK(std::string(e.what()).find("[1,2]") != std::string::npos);
    }
    const ScoreTable t = score_table(d, EstimatorMode::Cdag);
    CHECK(std::isinf(t.score(0, mask_of({1, 2}))));
    CHECK(std::isfinite(t.score(0, mask_of({1}))));
}

TEST_CASE("score table sizes") {
    CHECK(ScoreTable(5, 5).entries_per_child() == 16);
    CHECK(ScoreTable(15, 5).entries_per_child() == 3473);
    CHECK(ScoreTable(4, 0).entries_per_child() == 1);
    CHECK(ScoreTable(1, 5).entries_per_child() == 1);
}

TEST_CASE("score table storage round trip") {
    ScoreTable t(6, 3);
    double v = 0;
    for (int j = 0; j < 6; ++j) t.for_each(j, [&](std::uint64_t m, double) { t.set(j, m, v++); });
    double expect = 0;
    std::size_t count = 0;
    for (int j = 0; j < 6; ++j)
        t.for_each(j, [&](std::uint64_t m, double s) {
            CHECK(s == expect++);
            CHECK(t.score(j, m) == s);
            CHECK(((m >> j) & 1) == 0);
            CHECK(std::popcount(m) <= 3);
            ++count;
        });
    CHECK(count == 6 * t.entries_per_child());
    CHECK_THROWS_AS((void)t.score(0, mask_of({0})), InputError);
    CHECK_THROWS_AS((void)t.score(0, mask_of({1, 2, 3, 4})), InputError);
}

TEST_CASE("score table entries equal independently computed local scores") {
    const Dataset d = chain_data(7, 50, 4);
    for (auto mode : {EstimatorMode::Cdag, EstimatorMode::Dag, EstimatorMode::Dag2}) {
        CAPTURE(to_string(mode));
        GPriorConfig prior;
        prior.max_parents = 3;
        const ScoreTable t = score_table(d, mode, {prior, 2});
        const int m = d.universe_size(mode);
        CHECK(t.node_count() == m);
        for (int j = 0; j < m; ++j) {
            t.for_each(j, [&](std::uint64_t mask, double s) {
                std::vector<int> parents;
                for (int k = 0; k < m; ++k)
                    if ((mask >> k) & 1) parents.push_back(k);
                const double ref = log_marginal_likelihood(d, {j, parents, mode}, prior) +
                                   log_parent_prior(m, static_cast<int>(parents.size()));
                REQUIRE(std::isfinite(s));
                CHECK(std::abs(s - ref) <= 1e-8 * std::abs(ref));
            });
        }
    }
}

TEST_CASE("score table is independent of the thread count") {
    const Dataset d = chain_data(8, 80, 6);
    const ScoreTable a = score_table(d, EstimatorMode::Dag2, {{}, 1});
    const ScoreTable b = score_table(d, EstimatorMode::Dag2, {{}, 4});
    for (int j = 0; j < a.node_count(); ++j)
        a.for_each(j, [&](std::uint64_t m, double s) { CHECK(b.score(j, m) == s); });
}

TEST_CASE("prior configuration validation") {
    GPriorConfig bad;
    bad.g = -1.0;
    CHECK_THROWS_AS(bad.validate(), InputError);
    GPriorConfig neg;
    neg.max_parents = -1;
    CHECK_THROWS_AS(neg.validate(), InputError);
    const Dataset tiny = chain_data(9, 5, 4);
    CHECK_THROWS_AS(score_table(tiny, EstimatorMode::Cdag), InputError);
}
