#pragma once

// Sparse leading-eigenvalue solvers.
//
// The R-sparse leading eigenvalue of a symmetric A is
//     max { v^T A v : ||v||_2 = 1, ||v||_0 <= R }.
// Two L1 relaxations are provided: Constrained-PMD (alternating rank-one
// updates on a diagonally shifted matrix, the default) and FPS (a convex
// program over the one-dimensional Fantope solved by ADMM). An exhaustive
// L0 solver is included for small instances and serves as a test oracle.

#include "sled/matrix.hpp"

#include <cstddef>
#include <vector>

namespace sled {

/// L1 budget sqrt(R) = c * sqrt(p).
class SparsityBudget {
public:
    /// Strict constructor: requires c in (0, 1] and c * sqrt(p) >= 1.
    static SparsityBudget from_c(double c, Index p);
    /// As from_c, but raises sqrt(R) to 1 when c * sqrt(p) < 1. `clamped()`
    /// reports whether that happened.
    static SparsityBudget from_c_clamped(double c, Index p);
    /// Budget with R = r (so sqrt(R) = sqrt(r)); requires 1 <= r <= p.
    static SparsityBudget from_r(double r, Index p);

    double c() const noexcept { return c_; }
    Index p() const noexcept { return p_; }
    double sqrt_r() const noexcept { return sqrt_r_; }
    double r() const noexcept { return sqrt_r_ * sqrt_r_; }
    bool clamped() const noexcept { return clamped_; }

private:
    SparsityBudget(double c, Index p, double sqrt_r, bool clamped)
        : c_(c), p_(p), sqrt_r_(sqrt_r), clamped_(clamped) {}

    double c_;
    Index p_;
    double sqrt_r_;
    bool clamped_;
};

struct SparseEigenResult {
    double value = 0.0;
    Eigen::VectorXd vector;
    bool negated = false;
    Eigen::VectorXd leverage;
    int iterations = 0;
    bool converged = true;
};

struct PmdSettings {
    double tol = 1e-6;
    int max_iter = 100;
    int power_iterations = 200;
};

struct FpsSettings {
    double rho = 1.0;  // initial penalty
    double tol = 1e-6;
    int max_iter = 500;
    bool adaptive_rho = true;  // residual balancing every 10 iterations
};

/// sign(x_i) * max(|x_i| - delta, 0).
Eigen::VectorXd soft_threshold(const Eigen::Ref<const Eigen::VectorXd>& x, double delta);

/// argmax_v x^T v over ||v||_2 <= 1, ||v||_1 <= sqrt_r; returns a unit vector
/// (the zero vector only when x == 0). Ties among the largest |x_i| that
/// would otherwise leave the L1 ball are broken toward the lowest indices.
Eigen::VectorXd l1_constrained_unit(const Eigen::Ref<const Eigen::VectorXd>& x, double sqrt_r);

/// Gershgorin shift d = max(0, -min_i(A_ii - sum_{j != i} |A_ij|)); A + dI is PSD.
double psd_shift(const SymmetricMatrix& a);

struct PmdResult {
    Eigen::VectorXd u;
    Eigen::VectorXd v;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Rank-one penalized matrix decomposition of a PSD matrix with both factors
/// in the L1-capped unit ball. With sqrt(R) = 1 the feasible unit vectors are
/// the signed basis vectors and the largest diagonal entry is returned
/// directly (lowest index on ties).
PmdResult pmd_rank_one(const SymmetricMatrix& a, const SparsityBudget& budget, const PmdSettings& settings = {});

/// Constrained-PMD on an arbitrary symmetric matrix via the diagonal shift
/// identity lambda_cpmd(A) = lambda_pmd(A + dI) - d.
SparseEigenResult constrained_pmd(const SymmetricMatrix& a, const SparsityBudget& budget,
                                  const PmdSettings& settings = {});

/// Frobenius projection onto {H : 0 <= H <= I, tr(H) = 1}.
SymmetricMatrix fantope_projection(const SymmetricMatrix& m);

struct FpsResult {
    double value = 0.0;
    SymmetricMatrix h;
    int iterations = 0;
    bool converged = false;
};

/// max tr(AH) over the one-dimensional Fantope with ||H||_1 <= R, by ADMM.
/// `l1_radius` is R (not sqrt R).
FpsResult fps_admm(const SymmetricMatrix& a, double l1_radius, const FpsSettings& settings = {});

/// FPS wrapped into a SparseEigenResult: the vector is the leading
/// eigenvector of H.
SparseEigenResult fps_sparse_eig(const SymmetricMatrix& a, const SparsityBudget& budget,
                                 const FpsSettings& settings = {});

struct ExactSparseEig {
    double value = 0.0;
    std::vector<Index> support;
    Eigen::VectorXd vector;
};

/// Exhaustive L0 solver: max over supports of size <= r of the top
/// eigenvalue of the principal submatrix. Throws InstanceTooLarge when
/// p > 20 or C(p, r) > 200000.
ExactSparseEig sparse_eig_exact(const SymmetricMatrix& a, Index r);

SparseEigenResult exact_sparse_eig_result(const SymmetricMatrix& a, Index r);

}  // namespace sled
