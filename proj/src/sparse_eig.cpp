#include "sled/sparse_eig.hpp"

#include "sled/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sled {

// ---------------------------------------------------------------------------
// SparsityBudget

SparsityBudget SparsityBudget::from_c(double c, Index p) {
    if (!(c > 0.0 && c <= 1.0)) throw InvalidArgument("sparsity c must lie in (0, 1], got " + std::to_string(c));
    if (p < 1) throw InvalidArgument("sparsity budget needs p >= 1");
    const double sqrt_r = c * std::sqrt(static_cast<double>(p));
    if (sqrt_r < 1.0) {
        throw InvalidArgument("sparsity c = " + std::to_string(c) + " gives sqrt(R) = " + std::to_string(sqrt_r) +
                              " < 1 at p = " + std::to_string(p) + "; need c >= 1/sqrt(p)");
    }
    return {c, p, sqrt_r, false};
}

SparsityBudget SparsityBudget::from_c_clamped(double c, Index p) {
    if (!(c > 0.0 && c <= 1.0)) throw InvalidArgument("sparsity c must lie in (0, 1], got " + std::to_string(c));
    if (p < 1) throw InvalidArgument("sparsity budget needs p >= 1");
    const double sqrt_r = c * std::sqrt(static_cast<double>(p));
    if (sqrt_r < 1.0) return {c, p, 1.0, true};
    return {c, p, sqrt_r, false};
}

SparsityBudget SparsityBudget::from_r(double r, Index p) {
    if (p < 1) throw InvalidArgument("sparsity budget needs p >= 1");
    if (!(r >= 1.0 && r <= static_cast<double>(p))) {
        throw InvalidArgument("sparsity R must lie in [1, p], got " + std::to_string(r));
    }
    return {std::sqrt(r / static_cast<double>(p)), p, std::sqrt(r), false};
}

// ---------------------------------------------------------------------------
// Kernels

Eigen::VectorXd soft_threshold(const Eigen::Ref<const Eigen::VectorXd>& x, double delta) {
    if (!(delta >= 0.0)) throw InvalidArgument("soft_threshold: delta must be nonnegative");
    Eigen::VectorXd out(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        const double mag = std::abs(x[i]) - delta;
        out[i] = mag > 0.0 ? std::copysign(mag, x[i]) : 0.0;
    }
    return out;
}

namespace {

double l1_l2_ratio(const Eigen::VectorXd& y) { return y.lpNorm<1>() / y.norm(); }

Eigen::VectorXd basis(Index p, Index i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
    e[i] = 1.0;
    return e;
}

/// Flip the sign so that the first entry of largest magnitude is positive.
void canonical_sign(Eigen::VectorXd& v) {
    if (v.size() == 0) return;
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
}

Eigen::VectorXd power_iteration(const Eigen::MatrixXd& m, int iterations) {
    const Index p = m.rows();
    Eigen::VectorXd v = Eigen::VectorXd::Constant(p, 1.0 / std::sqrt(static_cast<double>(p)));
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXd w = m * v;
        const double norm = w.norm();
        if (norm == 0.0) break;
        v = w / norm;
    }
    return v;
}

}  // namespace

Eigen::VectorXd l1_constrained_unit(const Eigen::Ref<const Eigen::VectorXd>& x, double sqrt_r) {
    const Index p = x.size();
    const double amax = p == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
    if (amax == 0.0) return Eigen::VectorXd::Zero(p);

    Eigen::VectorXd v = x / x.norm();
    if (v.lpNorm<1>() <= sqrt_r) return v;

    // As the threshold approaches max|x_i| only the tied maxima survive and the
    // L1/L2 ratio tends to sqrt(#ties). If that limit is still outside the
    // ball no threshold works; keep the lowest-indexed ties instead.
    std::vector<Index> tied;
    for (Index i = 0; i < p; ++i) {
        if (std::abs(x[i]) >= amax * (1.0 - 1e-14)) tied.push_back(i);
    }
    const double limit_ratio = std::sqrt(static_cast<double>(tied.size()));
    auto uniform_on = [&](std::size_t keep) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(p);
        const double mag = 1.0 / std::sqrt(static_cast<double>(keep));
        for (std::size_t k = 0; k < keep; ++k) out[tied[k]] = std::copysign(mag, x[tied[k]]);
        return out;
    };
    if (limit_ratio > sqrt_r) {
        const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(sqrt_r * sqrt_r + 1e-9)));
        return uniform_on(std::min(keep, tied.size()));
    }

    double lo = 0.0;
    double hi = amax;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Eigen::VectorXd y = soft_threshold(x, mid);
        if (y.isZero(0.0) || l1_l2_ratio(y) <= sqrt_r) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    const Eigen::VectorXd y = soft_threshold(x, hi);
    if (y.isZero(0.0)) return uniform_on(tied.size());
    return y / y.norm();
}

double psd_shift(const SymmetricMatrix& a) {
    const Eigen::MatrixXd& m = a.mat();
    double lower = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m.rows(); ++i) {
        const double off = m.col(i).cwiseAbs().sum() - std::abs(m(i, i));
        lower = std::min(lower, m(i, i) - off);
    }
    return m.rows() == 0 ? 0.0 : std::max(0.0, -lower);
}

// ---------------------------------------------------------------------------
// PMD

PmdResult pmd_rank_one(const SymmetricMatrix& a, const SparsityBudget& budget, const PmdSettings& settings) {
    const Index p = a.dim();
    if (budget.p() != p) throw DimensionMismatch(static_cast<std::size_t>(budget.p()), static_cast<std::size_t>(p));
    const Eigen::MatrixXd& m = a.mat();
    const double s = budget.sqrt_r();

    auto update = [&](const Eigen::VectorXd& other) {
        Eigen::VectorXd next = l1_constrained_unit(m * other, s);
        if (next.isZero(0.0)) next = basis(p, 0);
        return next;
    };

    PmdResult res;
    if (s <= 1.0 + 1e-12) {
        // The feasible set is {+-e_i}: the largest diagonal entry is optimal.
        Index best = 0;
        for (Index i = 1; i < p; ++i)
            if (m(i, i) > m(best, best)) best = i;
        res.u = res.v = basis(p, best);
        res.value = m(best, best);
        res.converged = true;
        return res;
    }
    res.v = power_iteration(m, settings.power_iterations);
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (int it = 1; it <= settings.max_iter; ++it) {
        res.u = update(res.v);
        res.v = update(res.u);
        res.value = res.u.dot(m * res.v);
        res.iterations = it;
        if (!std::isnan(previous) && std::abs(res.value - previous) <= settings.tol * (1.0 + std::abs(res.value))) {
            res.converged = true;
            break;
        }
        previous = res.value;
    }
    if (settings.max_iter < 1) {
        res.u = res.v = update(res.v);
        res.value = res.u.dot(m * res.v);
    }
    return res;
}

SparseEigenResult constrained_pmd(const SymmetricMatrix& a, const SparsityBudget& budget,
                                  const PmdSettings& settings) {
    const Index p = a.dim();
    if (budget.p() != p) throw DimensionMismatch(static_cast<std::size_t>(budget.p()), static_cast<std::size_t>(p));

    SparseEigenResult out;
    // Solve on A / max|A_ij| so the convergence tolerance is scale-free.
    const double scale = a.max_abs();
    if (scale == 0.0) {
        out.vector = basis(p, 0);
    } else {
        const SymmetricMatrix normalized = a.scaled(1.0 / scale);
        const double d = psd_shift(normalized);
        const PmdResult r = pmd_rank_one(normalized.shifted(d), budget, settings);
        out.value = (r.value - d) * scale;
        out.vector = r.v;
        out.iterations = r.iterations;
        out.converged = r.converged;
    }
    canonical_sign(out.vector);
    out.leverage = out.vector.array().square();
    return out;
}

// ---------------------------------------------------------------------------
// FPS

SymmetricMatrix fantope_projection(const SymmetricMatrix& m) {
    const Index p = m.dim();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.mat());
    const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending

    auto clipped_sum = [&](double theta) {
        double total = 0.0;
        for (Index i = 0; i < p; ++i) total += std::clamp(lambda[i] - theta, 0.0, 1.0);
        return total;
    };

    // clipped_sum is continuous and nonincreasing, equal to p at lambda_min - 1
    // and 0 at lambda_max.
    double lo = lambda[0] - 1.0;
    double hi = lambda[p - 1];
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (clipped_sum(mid) > 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double theta = 0.5 * (lo + hi);

    // On the linear piece containing theta the root is closed form.
    double free_sum = 0.0;
    Index free_count = 0, saturated = 0;
    for (Index i = 0; i < p; ++i) {
        const double g = lambda[i] - theta;
        if (g >= 1.0) {
            ++saturated;
        } else if (g > 0.0) {
            free_sum += lambda[i];
            ++free_count;
        }
    }
    if (free_count > 0) {
        const double exact = (free_sum + static_cast<double>(saturated) - 1.0) / static_cast<double>(free_count);
        if (std::abs(clipped_sum(exact) - 1.0) <= std::abs(clipped_sum(theta) - 1.0)) theta = exact;
    }

    Eigen::VectorXd gamma(p);
    for (Index i = 0; i < p; ++i) gamma[i] = std::clamp(lambda[i] - theta, 0.0, 1.0);
    const Eigen::MatrixXd& q = eig.eigenvectors();
    return SymmetricMatrix(Eigen::MatrixXd(q * gamma.asDiagonal() * q.transpose()));
}

namespace {

/// Euclidean projection of the entries of z onto the L1 ball of the given radius.
Eigen::MatrixXd project_l1_ball(const Eigen::MatrixXd& z, double radius) {
    const double total = z.cwiseAbs().sum();
    if (total <= radius) return z;
    std::vector<double> mags(static_cast<std::size_t>(z.size()));
    for (Index i = 0; i < z.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(z.data()[i]);
    std::sort(mags.begin(), mags.end(), std::greater<>());
    double cumulative = 0.0;
    double tau = 0.0;
    for (std::size_t j = 0; j < mags.size(); ++j) {
        cumulative += mags[j];
        const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
        if (mags[j] - candidate > 0.0) tau = candidate;
        else break;
    }
    return z.unaryExpr([tau](double x) {
        const double mag = std::abs(x) - tau;
        return mag > 0.0 ? std::copysign(mag, x) : 0.0;
    });
}

}  // namespace

FpsResult fps_admm(const SymmetricMatrix& a, double l1_radius, const FpsSettings& settings) {
    const Index p = a.dim();
    if (!(settings.rho > 0.0)) throw InvalidArgument("fps_admm: rho must be positive");
    if (!(l1_radius >= 1.0)) throw InvalidArgument("fps_admm: L1 radius must be at least 1");

    FpsResult res;
    const double scale = a.max_abs();
    if (scale == 0.0) {
        res.h = SymmetricMatrix(Eigen::MatrixXd(Eigen::MatrixXd::Identity(p, p) / static_cast<double>(p)));
        res.converged = true;
        return res;
    }
    // Same scale normalization as constrained_pmd, so rho is dimensionless.

    const Eigen::MatrixXd normalized = a.mat() / scale;
    double rho = settings.rho;

    Eigen::MatrixXd y = Eigen::MatrixXd::Identity(p, p) / static_cast<double>(p);
    Eigen::MatrixXd dual = Eigen::MatrixXd::Zero(p, p);  // scaled by 1 / rho
    SymmetricMatrix x = SymmetricMatrix(y);
    for (int it = 1; it <= settings.max_iter; ++it) {
        x = fantope_projection(SymmetricMatrix(Eigen::MatrixXd(y - dual + normalized / rho)));
        const Eigen::MatrixXd y_prev = y;
        y = project_l1_ball(x.mat() + dual, l1_radius);
        dual += x.mat() - y;
        res.iterations = it;
        const double primal = (x.mat() - y).norm();
        const double dual_res = rho * (y - y_prev).norm();
        if (primal <= settings.tol && dual_res <= settings.tol) {
            res.converged = true;
            break;
        }
        // residual balancing
        if (settings.adaptive_rho && it % 10 == 0) {
            if (primal > 10.0 * dual_res) {
                rho *= 2.0;
                dual /= 2.0;
            } else if (dual_res > 10.0 * primal) {
                rho /= 2.0;
                dual *= 2.0;
            }
        }
    }
    res.h = x;
    res.value = (a.mat().cwiseProduct(x.mat())).sum();
    return res;
}

SparseEigenResult fps_sparse_eig(const SymmetricMatrix& a, const SparsityBudget& budget, const FpsSettings& settings) {
    if (budget.p() != a.dim()) {
        throw DimensionMismatch(static_cast<std::size_t>(budget.p()), static_cast<std::size_t>(a.dim()));
    }
    const FpsResult fps = fps_admm(a, budget.r(), settings);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fps.h.mat());
    SparseEigenResult out;
    out.value = fps.value;
    out.vector = eig.eigenvectors().col(a.dim() - 1);
    canonical_sign(out.vector);
    out.leverage = out.vector.array().square();
    out.iterations = fps.iterations;
    out.converged = fps.converged;
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive L0 solver

namespace {

double binomial(Index n, Index k) {
    double out = 1.0;
    for (Index i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(out);
}

}  // namespace

ExactSparseEig sparse_eig_exact(const SymmetricMatrix& a, Index r) {
    const Index p = a.dim();
    if (r < 1) throw InvalidArgument("sparse_eig_exact: R must be a positive integer");
    if (p > 20) throw InstanceTooLarge("sparse_eig_exact: p = " + std::to_string(p) + " exceeds 20");
    const Index k_max = std::min(r, p);
    if (binomial(p, k_max) > 200000.0) {
        throw InstanceTooLarge("sparse_eig_exact: C(" + std::to_string(p) + ", " + std::to_string(k_max) +
                               ") exceeds 200000 supports");
    }

    ExactSparseEig best;
    best.value = -std::numeric_limits<double>::infinity();
    const Eigen::MatrixXd& m = a.mat();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    for (Index k = 1; k <= k_max; ++k) {
        std::vector<Index> idx(static_cast<std::size_t>(k));
        std::iota(idx.begin(), idx.end(), Index{0});
        while (true) {
            const Eigen::MatrixXd sub = m(idx, idx);
            double top;
            Eigen::VectorXd local;
            if (k == 1) {
                top = sub(0, 0);
                local = Eigen::VectorXd::Ones(1);
            } else {
                eig.compute(sub);
                top = eig.eigenvalues()[k - 1];
                local = eig.eigenvectors().col(k - 1);
            }
            if (top > best.value) {
                best.value = top;
                best.support = idx;
                best.vector = Eigen::VectorXd::Zero(p);
                for (Index t = 0; t < k; ++t) best.vector[idx[static_cast<std::size_t>(t)]] = local[t];
            }
            // next combination in lexicographic order
            Index pos = k - 1;
            while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == p - k + pos) --pos;
            if (pos < 0) break;
            ++idx[static_cast<std::size_t>(pos)];
            for (Index t = pos + 1; t < k; ++t) idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
        }
    }
    canonical_sign(best.vector);
    return best;
}

SparseEigenResult exact_sparse_eig_result(const SymmetricMatrix& a, Index r) {
    const ExactSparseEig exact = sparse_eig_exact(a, r);
    SparseEigenResult out;
    out.value = exact.value;
    out.vector = exact.vector;
    out.leverage = out.vector.array().square();
    return out;
}

}  // namespace sled
