#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cdag {

// Which variables an estimator models and what every local regression always
// includes.
//   Cdag: children and candidates are the p primary columns; base design [1, x_j].
//   Dag:  same universe, base design [1] (secondary data ignored).
//   Dag2: all 2p columns (y_0..y_{p-1}, x_0..x_{p-1}) treated alike; base design [1].
enum class EstimatorMode { Cdag, Dag, Dag2 };

std::string to_string(EstimatorMode mode);
EstimatorMode parse_mode(const std::string& text);

// n observations of the primary matrix y (n x p) and optionally the secondary
// matrix x (n x p); column i of x is the known cause of column i of y.
class Dataset {
public:
    // Throws InputError on shape mismatch or non-finite entries.
    explicit Dataset(Eigen::MatrixXd y, std::optional<Eigen::MatrixXd> x = std::nullopt);

    [[nodiscard]] int n() const { return static_cast<int>(y_.rows()); }
    [[nodiscard]] int p() const { return static_cast<int>(y_.cols()); }
    [[nodiscard]] bool has_secondary() const { return x_.has_value(); }
    [[nodiscard]] const Eigen::MatrixXd& y() const { return y_; }
    [[nodiscard]] const Eigen::MatrixXd& x() const;

    // Number of candidate variables for `mode` (p, or 2p for Dag2).
    [[nodiscard]] int universe_size(EstimatorMode mode) const;
    // Column `index` of the mode's variable universe.
    [[nodiscard]] Eigen::VectorXd column(EstimatorMode mode, int index) const;
    // Throws InputError when the mode needs secondary data that is absent.
    void require_mode(EstimatorMode mode) const;

private:
    Eigen::MatrixXd y_;
    std::optional<Eigen::MatrixXd> x_;
};

// Regression of one child column on a candidate parent set.
struct LocalModel {
    int child = 0;
    std::vector<int> parents;  // indices into the mode's universe
    EstimatorMode mode = EstimatorMode::Cdag;
};

struct GPriorConfig {
    std::optional<double> g;  // unset means g = n
    int max_parents = 5;

    [[nodiscard]] double g_for(int n) const { return g.value_or(static_cast<double>(n)); }
    // Throws InputError for g <= 0 or max_parents < 0.
    void validate() const;
};

struct DesignMatrices {
    Eigen::MatrixXd base;     // n x q, always-included columns
    Eigen::MatrixXd parents;  // n x |pi|, parent columns with the base projected out
};

// Base design and orthogonalized parent design. Throws NumericError when the
// base design is rank deficient (for instance a constant x_j).
DesignMatrices design_matrices(const Dataset& d, const LocalModel& m);

// Log marginal likelihood of the child column under the g-prior with the
// reference prior on the base coefficients and noise scale. Computed by
// orthogonal projections; throws CollinearityError for collinear parents and
// NumericError when the residual quadratic form is not positive.
double log_marginal_likelihood(const Dataset& d, const LocalModel& m, const GPriorConfig& cfg);

// -log C(p, size): the multiplicity prior, unnormalized.
double log_parent_prior(int p, int size);

// log ML(pi_h) - log ML(pi_g) for the same child.
double log_bayes_factor(const Dataset& d, int child, std::span<const int> pi_h, std::span<const int> pi_g,
                        EstimatorMode mode, const GPriorConfig& cfg);

// Per-child table of log local scores (log marginal likelihood + log parent
// prior) for every parent set of size <= max_parents drawn from the other
// nodes. Parent sets are bitmasks over the universe, so node_count <= 64.
class ScoreTable {
public:
    ScoreTable(int node_count, int max_parents);

    [[nodiscard]] int node_count() const { return node_count_; }
    [[nodiscard]] int max_parents() const { return max_parents_; }
    [[nodiscard]] std::size_t entries_per_child() const { return per_child_; }

    // True when `parents` excludes the child and respects the size cap.
    [[nodiscard]] bool admissible(int child, std::uint64_t parents) const;
    // Throws InputError for inadmissible sets. Collinear sets hold -inf.
    [[nodiscard]] double score(int child, std::uint64_t parents) const;
    void set(int child, std::uint64_t parents, double value);

    // Visits every admissible parent set of `child` by size, then in
    // increasing mask order: fn(std::uint64_t mask, double score).
    template <class Fn>
    void for_each(int child, Fn&& fn) const;

    // Sum of the graph's local scores.
    [[nodiscard]] double total(std::span<const std::uint64_t> parent_masks) const;

    // Storage position of a candidate-local mask (child's bit removed).
    [[nodiscard]] std::size_t rank_local(std::uint64_t local) const;
    [[nodiscard]] static std::uint64_t to_local(int child, std::uint64_t global);
    [[nodiscard]] static std::uint64_t to_global(int child, std::uint64_t local);

private:
    int node_count_;
    int max_parents_;
    std::size_t per_child_;
    std::vector<std::size_t> size_offset_;
    std::vector<std::vector<std::uint64_t>> binom_;
    std::vector<std::vector<double>> scores_;
};

template <class Fn>
void ScoreTable::for_each(int child, Fn&& fn) const {
    const int candidates = node_count_ - 1;
    const auto& row = scores_.at(child);
    std::size_t pos = 0;
    for (int k = 0; k <= max_parents_; ++k) {
        if (k == 0) {
            fn(std::uint64_t{0}, row[pos++]);
            continue;
        }
        // Gosper's hack enumerates k-subsets in increasing numeric order.
        std::uint64_t local = (k == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
        const std::uint64_t limit = candidates == 64 ? 0 : (std::uint64_t{1} << candidates);
        while (true) {
            fn(to_global(child, local), row[pos++]);
            const std::uint64_t low = local & (~local + 1);
            const std::uint64_t ripple = local + low;
            if (ripple == 0 || (limit != 0 && ripple >= limit)) break;
            const std::uint64_t next = (((ripple ^ local) >> 2) / low) | ripple;
            if (limit != 0 && next >= limit) break;
            local = next;
        }
    }
}

struct ScoreTableOptions {
    GPriorConfig prior;
    int threads = 0;
};

// Tabulates every admissible local score for `mode`. Uses centered
// cross-product matrices with incremental Cholesky updates along a
// depth-first walk of the parent sets; collinear sets score -inf.
ScoreTable score_table(const Dataset& d, EstimatorMode mode, const ScoreTableOptions& options = {});

}  // namespace cdag
