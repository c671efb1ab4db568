#include "dcbnet/solver.hpp"

#include "dcbnet/error.hpp"

#include <Eigen/SparseLU>
#include <boost/math/distributions/poisson.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dcb {

double RateMatrix::max_exit_rate() const {
    double m = 0.0;
    for (Eigen::Index i = 0; i < q_.rows(); ++i) m = std::max(m, -q_.coeff(i, i));
    return m;
}

RateMatrix rate_matrix(std::size_t dim, const std::vector<Eigen::Triplet<double>>& offdiag) {
    std::vector<double> exit(dim, 0.0);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(offdiag.size() + dim);
    for (const auto& t : offdiag) {
        if (t.row() == t.col()) continue;
        if (t.value() < 0.0) throw InternalError("negative off-diagonal rate");
        triplets.push_back(t);
        exit[static_cast<std::size_t>(t.row())] += t.value();
    }
    for (std::size_t i = 0; i < dim; ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        triplets.emplace_back(idx, idx, -exit[i]);
    }
    RateMatrix::Sparse q(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    // Duplicates (parallel transitions between one pair) are summed.
    q.setFromTriplets(triplets.begin(), triplets.end());
    q.makeCompressed();
    return RateMatrix(std::move(q));
}

RateMatrix rate_matrix(const Ctmc& ctmc) {
    std::vector<Eigen::Triplet<double>> offdiag;
    offdiag.reserve(ctmc.transitions.size());
    for (const auto& t : ctmc.transitions)
        offdiag.emplace_back(static_cast<Eigen::Index>(t.from), static_cast<Eigen::Index>(t.to), t.rate);
    return rate_matrix(ctmc.size(), offdiag);
}

double balance_residual(const RateMatrix& q, const std::vector<double>& pi) {
    const Eigen::Map<const Eigen::VectorXd> p(pi.data(), static_cast<Eigen::Index>(pi.size()));
    const Eigen::VectorXd r = q.sparse().transpose() * p;
    return r.cwiseAbs().maxCoeff();
}

namespace {

std::vector<double> finish(const Eigen::VectorXd& x) {
    if (!x.allFinite()) throw InternalError("singular balance system");
    std::vector<double> pi(x.data(), x.data() + x.size());
    const double scale = std::accumulate(pi.begin(), pi.end(), 0.0, [](double acc, double v) {
        return acc + std::max(v, 0.0);
    });
    for (auto& v : pi) {
        if (v < -1e-9) throw InternalError("balance solve produced a negative probability");
        v = std::max(v, 0.0) / scale;
    }
    return pi;
}

Eigen::VectorXd solve_dense(const RateMatrix& q) {
    const auto n = static_cast<Eigen::Index>(q.dim());
    Eigen::MatrixXd a = q.dense().transpose();
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    return a.partialPivLu().solve(b);
}

Eigen::VectorXd solve_sparse(const RateMatrix& q) {
    const auto n = static_cast<Eigen::Index>(q.dim());
    std::vector<Eigen::Triplet<double>> triplets;
    const auto& s = q.sparse();
    for (Eigen::Index i = 0; i < s.outerSize(); ++i)
        for (RateMatrix::Sparse::InnerIterator it(s, i); it; ++it)
            if (it.col() != n - 1) triplets.emplace_back(it.col(), it.row(), it.value());
    for (Eigen::Index j = 0; j < n; ++j) triplets.emplace_back(n - 1, j, 1.0);
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw InternalError("singular balance system");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success) throw InternalError("sparse balance solve failed");
    return x;
}

}  // namespace

StationaryDistribution steady_state(const RateMatrix& q) {
    if (q.dim() == 0) throw InternalError("empty generator");
    if (q.dim() == 1) return {{1.0}};
    const Eigen::VectorXd x = q.dim() <= kDenseSolveLimit ? solve_dense(q) : solve_sparse(q);
    StationaryDistribution out{finish(x)};
    const double scale = std::max(q.max_exit_rate(), 1.0);
    if (balance_residual(q, out.pi) > 1e-8 * scale)
        throw InternalError("stationary solve did not satisfy the balance equations");
    return out;
}

std::vector<double> transient(const RateMatrix& q,
                              const std::vector<double>& pi0,
                              double t,
                              double tv_tolerance) {
    if (pi0.size() != q.dim()) throw ConfigError("initial distribution has the wrong dimension");
    if (t < 0.0) throw ConfigError("transient time must be >= 0");
    const double uniform = q.max_exit_rate();
    if (t == 0.0 || uniform == 0.0) return pi0;

    const auto n = static_cast<Eigen::Index>(q.dim());
    const double a = uniform * t;
    const double log_a = std::log(a);
    const RateMatrix::Sparse qt = q.sparse().transpose();

    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(pi0.data(), n);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    // Truncate where the Poisson(a) upper tail drops below the tolerance;
    // summing weights until they reach 1 can stall on rounding.
    const double tol = std::clamp(tv_tolerance, 1e-300, 0.5);
    const auto last = static_cast<long>(
        boost::math::quantile(boost::math::complement(boost::math::poisson_distribution<double>(a), tol)));
    double mass = 0.0;
    for (long k = 0; k <= last; ++k) {
        const double w = std::exp(-a + static_cast<double>(k) * log_a - std::lgamma(static_cast<double>(k) + 1.0));
        acc += w * v;
        mass += w;
        if (k == last) break;
        // v <- v P with P = I + Q / uniform
        v += (qt * v) / uniform;
    }
    std::vector<double> out(acc.data(), acc.data() + n);
    for (auto& x : out) x = std::max(x, 0.0) / mass;
    return out;
}

double l2_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

double mixing_time(const RateMatrix& q, double epsilon, std::vector<double> start) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must be in (0, 1)");
    if (start.empty()) {
        start.assign(q.dim(), 0.0);
        start[0] = 1.0;
    }
    const auto pi = steady_state(q).pi;
    if (l2_distance(start, pi) <= epsilon) return 0.0;

    const double uniform = q.max_exit_rate();
    double t = 1e-3 / uniform;
    double t_prev = 0.0;
    auto v = std::move(start);
    for (int step = 0; step < 5000; ++step, t *= kMixingGridFactor) {
        // Semigroup property: advance from the previous grid point.
        v = transient(q, v, t - t_prev, 1e-12);
        t_prev = t;
        if (l2_distance(v, pi) <= epsilon) return t;
    }
    throw InternalError("mixing time grid exhausted");
}

ReversibilityReport check_reversibility(const RateMatrix& q,
                                        const StationaryDistribution& pi,
                                        double tolerance) {
    ReversibilityReport r;
    const auto& s = q.sparse();
    for (Eigen::Index i = 0; i < s.outerSize(); ++i) {
        for (RateMatrix::Sparse::InnerIterator it(s, i); it; ++it) {
            const auto j = it.col();
            if (j == i || it.value() == 0.0) continue;
            const double back = s.coeff(j, i);
            if (back == 0.0) {
                ++r.one_way_transitions;
                continue;
            }
            const double f = pi.pi[static_cast<std::size_t>(i)] * it.value();
            const double g = pi.pi[static_cast<std::size_t>(j)] * back;
            const double denom = std::max(f, g);
            if (denom > 0.0) r.max_detailed_balance_error = std::max(r.max_detailed_balance_error, std::abs(f - g) / denom);
        }
    }
    r.reversible = r.one_way_transitions == 0 && r.max_detailed_balance_error <= tolerance;
    return r;
}

}  // namespace dcb
