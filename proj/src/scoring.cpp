#include "cdag/scoring.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cdag/errors.hpp"
#include "cdag/parallel.hpp"

namespace cdag {

namespace {

constexpr double kRankTolerance = 1e-10;      // relative pivot size treated as zero
constexpr double kResidualTolerance = 1e-12;  // relative residual treated as exact fit
constexpr std::size_t kMaxTableEntries = std::size_t{1} << 27;

std::string set_string(std::span<const int> s) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << "]";
    return os.str();
}

// Everything in the log marginal likelihood except the parent-set terms.
double log_ml_constant(int n, int q, double log_det_base) {
    const double dof = 0.5 * (n - q);
    return std::log(0.5) + std::lgamma(dof) - dof * std::log(std::numbers::pi) - 0.5 * log_det_base;
}

double log_ml_from_rss(int n, int q, double log_det_base, double g, int k, double rss_base, double rss_full) {
    const double b = (g * std::max(rss_full, 0.0) + rss_base) / (g + 1.0);
    return log_ml_constant(n, q, log_det_base) - 0.5 * k * std::log1p(g) - 0.5 * (n - q) * std::log(b);
}

void check_degrees_of_freedom(int n, int q, int k) {
    if (n - q - k < 1)
        throw InputError("n = " + std::to_string(n) + " observations leave no residual degrees of freedom for " +
                         std::to_string(q) + " base and " + std::to_string(k) + " parent columns");
}

}  // namespace

std::string to_string(EstimatorMode mode) {
    switch (mode) {
        case EstimatorMode::Cdag: return "CDAG";
        case EstimatorMode::Dag: return "DAG";
        case EstimatorMode::Dag2: return "DAG2";
    }
    return "?";
}

EstimatorMode parse_mode(const std::string& text) {
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "cdag") return EstimatorMode::Cdag;
    if (lower == "dag") return EstimatorMode::Dag;
    if (lower == "dag2") return EstimatorMode::Dag2;
    throw InputError("unknown estimator mode '" + text + "' (expected cdag, dag or dag2)");
}

Dataset::Dataset(Eigen::MatrixXd y, std::optional<Eigen::MatrixXd> x) : y_(std::move(y)), x_(std::move(x)) {
    if (y_.cols() < 1) throw InputError("dataset needs at least one primary column");
    if (!y_.allFinite()) throw InputError("primary data contain non-finite values");
    if (x_) {
        if (x_->rows() != y_.rows() || x_->cols() != y_.cols())
            throw InputError("secondary data must have the same shape as primary data");
        if (!x_->allFinite()) throw InputError("secondary data contain non-finite values");
    }
}

const Eigen::MatrixXd& Dataset::x() const {
    if (!x_) throw InputError("dataset has no secondary columns");
    return *x_;
}

int Dataset::universe_size(EstimatorMode mode) const { return mode == EstimatorMode::Dag2 ? 2 * p() : p(); }

void Dataset::require_mode(EstimatorMode mode) const {
    if (mode != EstimatorMode::Dag && !x_)
        throw InputError(to_string(mode) + " estimation needs secondary (x) columns");
}

Eigen::VectorXd Dataset::column(EstimatorMode mode, int index) const {
    require_mode(mode);
    if (index < 0 || index >= universe_size(mode)) throw InputError("column index out of range");
    if (index < p()) return y_.col(index);
    return x_->col(index - p());
}

void GPriorConfig::validate() const {
    if (g && !(*g > 0.0 && std::isfinite(*g))) throw InputError("g must be a positive finite number");
    if (max_parents < 0) throw InputError("max_parents must be >= 0");
}

DesignMatrices design_matrices(const Dataset& d, const LocalModel& m) {
    d.require_mode(m.mode);
    const int universe = d.universe_size(m.mode);
    if (m.child < 0 || m.child >= universe) throw InputError("child index out of range");
    std::vector<int> sorted = m.parents;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw InputError("duplicate parent index");
    for (int k : sorted) {
        if (k < 0 || k >= universe) throw InputError("parent index out of range");
        if (k == m.child) throw InputError("child cannot be its own parent");
    }

    const int n = d.n();
    const int q = m.mode == EstimatorMode::Cdag ? 2 : 1;
    DesignMatrices out;
    out.base.resize(n, q);
    out.base.col(0).setOnes();
    if (m.mode == EstimatorMode::Cdag) out.base.col(1) = d.x().col(m.child);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(out.base);
    qr.setThreshold(kRankTolerance);
    if (qr.rank() < q)
        throw NumericError("base design for child " + std::to_string(m.child) +
                           " is rank deficient (constant secondary column?)");
    const Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(n, q);

    Eigen::MatrixXd raw(n, static_cast<Eigen::Index>(m.parents.size()));
    for (std::size_t i = 0; i < m.parents.size(); ++i) raw.col(static_cast<Eigen::Index>(i)) = d.column(m.mode, m.parents[i]);
    out.parents = raw - basis * (basis.transpose() * raw);
    return out;
}

double log_marginal_likelihood(const Dataset& d, const LocalModel& m, const GPriorConfig& cfg) {
    cfg.validate();
    const DesignMatrices dm = design_matrices(d, m);
    const int n = d.n();
    const int q = static_cast<int>(dm.base.cols());
    const int k = static_cast<int>(dm.parents.cols());
    check_degrees_of_freedom(n, q, k);
    const double g = cfg.g_for(n);

    Eigen::HouseholderQR<Eigen::MatrixXd> base_qr(dm.base);
    const Eigen::MatrixXd& packed = base_qr.matrixQR();
    double log_det_base = 0.0;
    for (int i = 0; i < q; ++i) log_det_base += 2.0 * std::log(std::abs(packed(i, i)));

    const Eigen::VectorXd y = d.column(m.mode, m.child);
    const Eigen::MatrixXd base_basis = base_qr.householderQ() * Eigen::MatrixXd::Identity(n, q);
    const Eigen::VectorXd r0 = y - base_basis * (base_basis.transpose() * y);
    const double rss_base = r0.squaredNorm();

    double projected = 0.0;
    if (k > 0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dm.parents);
        qr.setThreshold(kRankTolerance);
        if (qr.rank() < k)
            throw CollinearityError("parent set " + set_string(m.parents) + " of child " + std::to_string(m.child) +
                                    " is collinear after removing the base design");
        const Eigen::VectorXd rotated = qr.householderQ().transpose() * r0;
        projected = rotated.head(k).squaredNorm();
    }

    const double b = rss_base - g / (g + 1.0) * projected;
    if (!(b > kResidualTolerance * y.squaredNorm()) || !std::isfinite(b))
        throw NumericError("residual quadratic form is not positive for child " + std::to_string(m.child));
    return log_ml_constant(n, q, log_det_base) - 0.5 * k * std::log1p(g) - 0.5 * (n - q) * std::log(b);
}

double log_parent_prior(int p, int size) {
    if (p < 0 || size < 0 || size > p) throw InputError("parent set size must lie in [0, p]");
    double binom = 1.0;
    for (int i = 1; i <= size; ++i) binom = binom * (p - size + i) / i;
    return -std::log(binom);
}

double log_bayes_factor(const Dataset& d, int child, std::span<const int> pi_h, std::span<const int> pi_g,
                        EstimatorMode mode, const GPriorConfig& cfg) {
    const LocalModel h{child, {pi_h.begin(), pi_h.end()}, mode};
    const LocalModel g{child, {pi_g.begin(), pi_g.end()}, mode};
    return log_marginal_likelihood(d, h, cfg) - log_marginal_likelihood(d, g, cfg);
}

ScoreTable::ScoreTable(int node_count, int max_parents) : node_count_(node_count) {
    if (node_count < 1 || node_count > 64) throw InputError("score table node count must lie in [1, 64]");
    if (max_parents < 0) throw InputError("max_parents must be >= 0");
    max_parents_ = std::min(max_parents, node_count - 1);

    binom_.assign(65, std::vector<std::uint64_t>(66, 0));
    for (int a = 0; a <= 64; ++a) {
        binom_[a][0] = 1;
        for (int b = 1; b <= a; ++b) binom_[a][b] = binom_[a - 1][b - 1] + (b <= a - 1 ? binom_[a - 1][b] : 0);
    }
    const int candidates = node_count - 1;
    size_offset_.assign(max_parents_ + 2, 0);
    for (int k = 0; k <= max_parents_; ++k) size_offset_[k + 1] = size_offset_[k] + binom_[candidates][k];
    per_child_ = size_offset_[max_parents_ + 1];
    if (per_child_ * static_cast<std::size_t>(node_count) > kMaxTableEntries)
        throw InputError("score table would hold " + std::to_string(per_child_ * node_count) +
                         " entries; lower max_parents");
    scores_.assign(node_count, std::vector<double>(per_child_, -std::numeric_limits<double>::infinity()));
}

std::uint64_t ScoreTable::to_local(int child, std::uint64_t global) {
    const std::uint64_t low = (std::uint64_t{1} << child) - 1;
    return (global & low) | ((global >> 1) & ~low);
}

std::uint64_t ScoreTable::to_global(int child, std::uint64_t local) {
    const std::uint64_t low = (std::uint64_t{1} << child) - 1;
    return (local & low) | ((local & ~low) << 1);
}

std::size_t ScoreTable::rank_local(std::uint64_t local) const {
    const int k = std::popcount(local);
    std::size_t pos = size_offset_[k];
    int t = 1;
    for (auto m = local; m; m &= m - 1, ++t) pos += binom_[std::countr_zero(m)][t];
    return pos;
}

bool ScoreTable::admissible(int child, std::uint64_t parents) const {
    if (child < 0 || child >= node_count_) return false;
    if ((parents >> child) & 1U) return false;
    if (node_count_ < 64 && (parents >> node_count_) != 0) return false;
    return std::popcount(parents) <= max_parents_;
}

double ScoreTable::score(int child, std::uint64_t parents) const {
    if (!admissible(child, parents)) throw InputError("parent set is not admissible for child " + std::to_string(child));
    return scores_[child][rank_local(to_local(child, parents))];
}

void ScoreTable::set(int child, std::uint64_t parents, double value) {
    if (!admissible(child, parents)) throw InputError("parent set is not admissible for child " + std::to_string(child));
    scores_[child][rank_local(to_local(child, parents))] = value;
}

double ScoreTable::total(std::span<const std::uint64_t> parent_masks) const {
    if (static_cast<int>(parent_masks.size()) != node_count_) throw InputError("graph size does not match score table");
    double sum = 0.0;
    for (int j = 0; j < node_count_; ++j) sum += score(j, parent_masks[j]);
    return sum;
}

namespace {

// Depth-first walk over parent sets of one child, extending a Cholesky factor
// of the centered cross-product matrix one column at a time.
class ChildScorer {
public:
    ChildScorer(const Eigen::MatrixXd& gram, int child_col, std::vector<int> candidate_cols, int base_col,
                int max_parents, int n, double g, int universe)
        : gram_(gram), child_(child_col), candidates_(std::move(candidate_cols)), max_parents_(max_parents), n_(n),
          g_(g), universe_(universe), q_(base_col >= 0 ? 2 : 1) {
        const int width = max_parents + 1;
        factor_.assign(static_cast<std::size_t>(width) * width, 0.0);
        cols_.assign(width, -1);
        proj_.assign(width, 0.0);
        log_det_base_ = std::log(static_cast<double>(n));
        rss_base_ = gram_(child_, child_);
        if (base_col >= 0) {
            const double sxx = gram_(base_col, base_col);
            if (!(sxx > 0.0)) throw NumericError("secondary column of child has no variation");
            log_det_base_ += std::log(sxx);
            push_base(base_col);
        }
    }

    // Emits (candidate-index mask, log marginal likelihood) pairs.
    template <class Emit>
    void run(double raw_norm, Emit&& emit) {
        if (!(rss_base_ > kResidualTolerance * raw_norm))
            throw NumericError("child column is fully explained by its base design");
        emit(std::uint64_t{0}, score(0, rss_base_));
        descend(0, 0, rss_base_, std::uint64_t{0}, emit);
    }

private:
    void push_base(int col) {
        const double d = std::sqrt(gram_(col, col));
        factor_[0] = d;
        cols_[0] = col;
        proj_[0] = gram_(col, child_) / d;
        rss_base_ -= proj_[0] * proj_[0];
        depth0_ = 1;
    }

    double score(int k, double rss_full) const {
        return log_ml_from_rss(n_, q_, log_det_base_, g_, k, rss_base_, rss_full) + log_parent_prior(universe_, k);
    }

    template <class Emit>
    void descend(std::size_t start, int k, double rss, std::uint64_t mask, Emit& emit) {
        if (k == max_parents_) return;
        const int row = depth0_ + k;
        const int width = max_parents_ + 1;
        for (std::size_t idx = start; idx < candidates_.size(); ++idx) {
            const int col = candidates_[idx];
            double* l = &factor_[static_cast<std::size_t>(row) * width];
            double sumsq = 0.0;
            for (int t = 0; t < row; ++t) {
                double v = gram_(cols_[t], col);
                const double* lt = &factor_[static_cast<std::size_t>(t) * width];
                for (int s = 0; s < t; ++s) v -= lt[s] * l[s];
                l[t] = v / lt[t];
                sumsq += l[t] * l[t];
            }
            const double diag_sq = gram_(col, col) - sumsq;
            if (!(diag_sq > kRankTolerance * gram_(col, col))) continue;  // collinear: subtree stays -inf
            const double diag = std::sqrt(diag_sq);
            l[row] = diag;
            double w = gram_(col, child_);
            for (int s = 0; s < row; ++s) w -= l[s] * proj_[s];
            w /= diag;
            cols_[row] = col;
            proj_[row] = w;
            const double next_rss = rss - w * w;
            const std::uint64_t next_mask = mask | (std::uint64_t{1} << idx);
            emit(next_mask, score(k + 1, next_rss));
            descend(idx + 1, k + 1, next_rss, next_mask, emit);
        }
    }

    const Eigen::MatrixXd& gram_;
    int child_;
    std::vector<int> candidates_;
    int max_parents_;
    int n_;
    double g_;
    int universe_;
    int q_;
    int depth0_ = 0;
    double log_det_base_ = 0.0;
    double rss_base_ = 0.0;
    std::vector<double> factor_;
    std::vector<int> cols_;
    std::vector<double> proj_;
};

}  // namespace

ScoreTable score_table(const Dataset& d, EstimatorMode mode, const ScoreTableOptions& options) {
    options.prior.validate();
    d.require_mode(mode);
    const int universe = d.universe_size(mode);
    if (universe > 64) throw InputError("score tables support at most 64 variables");
    ScoreTable table(universe, options.prior.max_parents);
    const int cap = table.max_parents();
    const int n = d.n();
    const int q = mode == EstimatorMode::Cdag ? 2 : 1;
    if (n < 3 + cap)
        throw InputError("n = " + std::to_string(n) + " is too small for parent sets of size " + std::to_string(cap) +
                         " (need n >= " + std::to_string(3 + cap) + ")");
    check_degrees_of_freedom(n, q, cap);
    const double g = options.prior.g_for(n);

    // Columns: y_0..y_{p-1}, then x_0..x_{p-1} when present.
    const int p = d.p();
    const int width = d.has_secondary() ? 2 * p : p;
    Eigen::MatrixXd z(n, width);
    z.leftCols(p) = d.y();
    if (d.has_secondary()) z.rightCols(p) = d.x();
    const Eigen::VectorXd raw_norms = z.colwise().squaredNorm().transpose();
    z.rowwise() -= z.colwise().mean();
    const Eigen::MatrixXd gram = z.transpose() * z;

    parallel_for(static_cast<std::size_t>(universe), options.threads, [&](std::size_t j_) {
        const int j = static_cast<int>(j_);
        std::vector<int> candidates;
        for (int c = 0; c < universe; ++c)
            if (c != j) candidates.push_back(c);
        const int base_col = mode == EstimatorMode::Cdag ? p + j : -1;
        ChildScorer scorer(gram, j, candidates, base_col, cap, n, g, universe);
        scorer.run(raw_norms(j), [&](std::uint64_t local, double value) { table.set(j, ScoreTable::to_global(j, local), value); });
    });
    return table;
}

}  // namespace cdag
