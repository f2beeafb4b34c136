#include "cdag/simulate.hpp"

#include <algorithm>
#include <cmath>

#include <boost/random/normal_distribution.hpp>

#include "cdag/errors.hpp"

namespace cdag {

namespace {

double signed_coefficient(const SimConfig& cfg, Rng& rng) {
    const double magnitude = cfg.coef_low + (cfg.coef_high - cfg.coef_low) * uniform01(rng);
    return uniform01(rng) < 0.5 ? -magnitude : magnitude;
}

}  // namespace

double SimConfig::resolved_edge_prob() const {
    if (edge_prob) return *edge_prob;
    return p > 1 ? std::min(1.0, 2.0 / (p - 1)) : 0.0;
}

void SimConfig::validate() const {
    if (p < 1 || p > kMaxPrimary) throw InputError("p must lie in [1, 64]");
    if (n < 1) throw InputError("n must be positive");
    if (!(theta >= 0.0 && theta <= 1.0)) throw InputError("theta must lie in [0, 1]");
    if (!(misspec_prob >= 0.0 && misspec_prob <= 1.0)) throw InputError("misspec_prob must lie in [0, 1]");
    const double ep = resolved_edge_prob();
    if (!(ep >= 0.0 && ep <= 1.0)) throw InputError("edge_prob must lie in [0, 1]");
    if (!(coef_low > 0.0) || !(coef_low <= coef_high) || !std::isfinite(coef_high))
        throw InputError("coefficient range must satisfy 0 < coef_low <= coef_high");
    if (!(noise_sd > 0.0) || !std::isfinite(noise_sd)) throw InputError("noise_sd must be positive");
}

Dag sample_dag(int p, double edge_prob, Rng& rng) {
    if (p < 1 || p > kMaxPrimary) throw InputError("p must lie in [1, 64]");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) throw InputError("edge_prob must lie in [0, 1]");
    const std::vector<int> order = random_permutation(rng, p);
    std::vector<std::uint64_t> parents(p, 0);
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b)
            if (uniform01(rng) < edge_prob) parents[order[b]] |= std::uint64_t{1} << order[a];
    return Dag::from_parent_masks(std::move(parents));
}

Simulation simulate(const SimConfig& cfg) {
    cfg.validate();
    Rng rng = make_rng(cfg.seed);
    const int p = cfg.p;
    const int n = cfg.n;
    const double ep = cfg.resolved_edge_prob();

    GroundTruth truth;
    truth.g = sample_dag(p, ep, rng);
    truth.g_prime = sample_dag(p, ep, rng);

    // Coefficients, drawn in a fixed order.
    Eigen::MatrixXd sec_coef = Eigen::MatrixXd::Zero(p, p);  // (child, parent)
    for (auto [from, to] : truth.g_prime.edges()) sec_coef(to, from) = signed_coefficient(cfg, rng);
    Eigen::VectorXd own(p);
    for (int j = 0; j < p; ++j) own(j) = std::abs(signed_coefficient(cfg, rng));
    Eigen::MatrixXd prim_coef = Eigen::MatrixXd::Zero(p, p);
    for (auto [from, to] : truth.g.edges()) prim_coef(to, from) = signed_coefficient(cfg, rng);
    Eigen::MatrixXd misspec_coef = Eigen::MatrixXd::Zero(p, p);
    for (auto [from, to] : truth.g.edges()) {
        if (uniform01(rng) < cfg.misspec_prob) {
            truth.misspec.emplace_back(from, to);
            misspec_coef(to, from) = signed_coefficient(cfg, rng);
        }
    }

    boost::random::normal_distribution<double> noise(0.0, cfg.noise_sd);
    const double keep = std::sqrt(std::max(0.0, 1.0 - cfg.theta * cfg.theta));

    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, p);
    for (int i : truth.g_prime.topological_order()) {
        Eigen::VectorXd eps(n);
        for (int r = 0; r < n; ++r) eps(r) = noise(rng);
        if (truth.g_prime.parent_mask(i) == 0) {
            x.col(i) = eps;
            continue;
        }
        Eigen::VectorXd signal = Eigen::VectorXd::Zero(n);
        for (int k : truth.g_prime.parents(i)) signal += sec_coef(i, k) * x.col(k);
        x.col(i) = cfg.theta * signal + keep * eps;
    }

    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, p);
    for (int j : truth.g.topological_order()) {
        Eigen::VectorXd col(n);
        for (int r = 0; r < n; ++r) col(r) = noise(rng);
        col += own(j) * x.col(j);
        for (int k : truth.g.parents(j)) col += prim_coef(j, k) * y.col(k);
        for (int i = 0; i < p; ++i)
            if (misspec_coef(j, i) != 0.0) col += misspec_coef(j, i) * x.col(i);
        y.col(j) = col;
    }

    return {Dataset(std::move(y), std::move(x)), std::move(truth)};
}

}  // namespace cdag
