#pragma once

#include "dcbnet/ctmc.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <vector>

namespace dcb {

/// Infinitesimal generator of a chain. Off-diagonal entries are the summed
/// parallel transition rates; the diagonal closes every row to zero.
class RateMatrix {
public:
    using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    RateMatrix() = default;
    explicit RateMatrix(Sparse q) : q_(std::move(q)) {}

    std::size_t dim() const { return static_cast<std::size_t>(q_.rows()); }
    double operator()(std::size_t from, std::size_t to) const {
        return q_.coeff(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to));
    }
    /// Largest |q(s,s)|, the uniformization constant.
    double max_exit_rate() const;
    const Sparse& sparse() const { return q_; }
    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(q_); }

private:
    Sparse q_;
};

RateMatrix rate_matrix(const Ctmc& ctmc);

/// Builds a generator directly from off-diagonal (from, to, rate) triplets.
RateMatrix rate_matrix(std::size_t dim, const std::vector<Eigen::Triplet<double>>& offdiag);

struct StationaryDistribution {
    std::vector<double> pi;

    double operator[](std::size_t i) const { return pi[i]; }
    std::size_t size() const { return pi.size(); }
};

/// ||pi Q||_inf.
double balance_residual(const RateMatrix& q, const std::vector<double>& pi);

/// Systems up to this dimension use a dense LU factorization.
inline constexpr std::size_t kDenseSolveLimit = 2000;

/// Unique pi with pi Q = 0 and sum(pi) = 1, one balance equation replaced by
/// the normalization row. Throws InternalError when the system is singular.
StationaryDistribution steady_state(const RateMatrix& q);

/// pi0 * exp(Q t) by uniformization; truncation error <= tv_tolerance in
/// total variation.
std::vector<double> transient(const RateMatrix& q,
                              const std::vector<double>& pi0,
                              double t,
                              double tv_tolerance = 1e-10);

double l2_distance(const std::vector<double>& a, const std::vector<double>& b);
double tv_distance(const std::vector<double>& a, const std::vector<double>& b);

inline constexpr double kMixingGridFactor = 1.1;

/// Smallest t on the grid {0} u {t0 * 1.1^k} with ||start exp(Qt) - pi||_2 <=
/// epsilon, where t0 = 1e-3 / max_exit_rate. `start` defaults to the point
/// mass on state 0.
double mixing_time(const RateMatrix& q, double epsilon, std::vector<double> start = {});

struct ReversibilityReport {
    bool reversible = false;
    /// Transitions whose reverse has zero rate.
    std::size_t one_way_transitions = 0;
    /// max |pi_i q_ij - pi_j q_ji| / max(pi_i q_ij, pi_j q_ji) over pairs.
    double max_detailed_balance_error = 0.0;
};

/// Detailed-balance test under pi. A one-way pair alone makes the chain
/// non-reversible (Kolmogorov's criterion fails on the 2-cycle).
ReversibilityReport check_reversibility(const RateMatrix& q,
                                        const StationaryDistribution& pi,
                                        double tolerance = 1e-9);

}  // namespace dcb
