#include "sled/simgen.hpp"

#include "sled/errors.hpp"

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/negative_binomial_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace sled {
namespace {

constexpr std::uint32_t kDomainBase = 1;
constexpr std::uint32_t kDomainPermutation = 2;

double max_diagonal(const SymmetricMatrix& s) { return s.mat().diagonal().maxCoeff(); }

}  // namespace

SymmetricMatrix base_covariance(BaseKind kind, Index p, Philox4x32& rng, const BaseOptions& options) {
    if (p < 1) throw InvalidArgument("base_covariance: p must be positive");
    Eigen::MatrixXd delta = Eigen::MatrixXd::Identity(p, p);
    switch (kind) {
        case BaseKind::NoisyDiagonal: {
            boost::random::bernoulli_distribution<double> coin(0.05);
            for (Index j = 1; j < p; ++j) {
                for (Index i = 0; i < j; ++i) {
                    const double v = coin(rng) ? 1.0 : 0.0;
                    delta(i, j) = v;
                    delta(j, i) = v;
                }
            }
            break;
        }
        case BaseKind::BlockDiagonal: {
            if (p < 10) throw InvalidArgument("block-diagonal base needs p >= 10, got " + std::to_string(p));
            const Index blocks = p / 10;
            for (Index k = 0; k < blocks; ++k) {
                delta.block(10 * k, 10 * k, 10, 10).setConstant(0.55);
            }
            delta.diagonal().setOnes();
            break;
        }
        case BaseKind::ExpDecay:
            for (Index i = 0; i < p; ++i) {
                for (Index j = 0; j < p; ++j) delta(i, j) = std::pow(0.5, static_cast<double>(std::abs(i - j)));
            }
            break;
    }
    if (options.unit_lambda) return SymmetricMatrix(delta);

    boost::random::uniform_real_distribution<double> unif(0.5, 2.5);
    Eigen::VectorXd root(p);
    for (Index i = 0; i < p; ++i) root[i] = std::sqrt(unif(rng));
    return SymmetricMatrix(Eigen::MatrixXd(root.asDiagonal() * delta * root.asDiagonal()));
}

double signal_level(DiffKind kind, const SymmetricMatrix& base) {
    const double p = static_cast<double>(base.dim());
    const double scale = std::sqrt(max_diagonal(base) * std::log(p));
    switch (kind) {
        case DiffKind::None: return 0.0;
        case DiffKind::SparseBlock: return 0.5 * scale;
        case DiffKind::SoftSparseSpiked: return 4.0 * scale;
    }
    return 0.0;
}

SymmetricMatrix differential(DiffKind kind, const SymmetricMatrix& base, Philox4x32& rng) {
    const Index p = base.dim();
    if (kind == DiffKind::None) return SymmetricMatrix::zero(p);
    if (p < 10) throw InvalidArgument("differential matrices need p >= 10, got " + std::to_string(p));
    const double d = signal_level(kind, base);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, p);

    if (kind == DiffKind::SparseBlock) {
        const Index s = p / 10;
        boost::random::uniform_real_distribution<double> unif(d / 2.0, 2.0 * d);
        for (Index j = 0; j < s; ++j) {
            for (Index i = 0; i <= j; ++i) {
                const double v = unif(rng);
                out(i, j) = v;
                out(j, i) = v;
            }
        }
        return SymmetricMatrix(out);
    }

    // Soft-sparse spike: support of size floor(0.2 p) sampled without
    // replacement; the first floor(0.1 p) drawn get N(1, 0.1^2), the rest
    // N(0.1, 0.1^2).
    const Index support = p / 5;
    const Index strong = p / 10;
    std::vector<Index> idx(static_cast<std::size_t>(p));
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index k = 0; k < support; ++k) {
        boost::random::uniform_int_distribution<Index> pick(k, p - 1);
        std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    boost::random::normal_distribution<double> big(1.0, 0.1);
    boost::random::normal_distribution<double> small(0.1, 0.1);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
    for (Index k = 0; k < support; ++k) v[idx[static_cast<std::size_t>(k)]] = k < strong ? big(rng) : small(rng);
    v.normalize();
    out = d * v * v.transpose();
    return SymmetricMatrix(out);
}

Eigen::MatrixXd symmetric_sqrt(const SymmetricMatrix& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.mat());
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd& q = eig.eigenvectors();
    Eigen::MatrixXd out = q * root.asDiagonal() * q.transpose();
    return 0.5 * (out + out.transpose());
}

ScenarioMatrices enforce_pd(const SymmetricMatrix& base, const SymmetricMatrix& d, PdShiftRule rule) {
    if (base.dim() != d.dim()) throw DimensionMismatch(static_cast<std::size_t>(base.dim()), static_cast<std::size_t>(d.dim()));
    const SymmetricMatrix perturbed = base + d;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.compute(base.mat(), Eigen::EigenvaluesOnly);
    const double min_base = eig.eigenvalues()[0];
    eig.compute(perturbed.mat(), Eigen::EigenvaluesOnly);
    const double min_perturbed = eig.eigenvalues()[0];
    const double lowest = std::min(min_base, min_perturbed);

    ScenarioMatrices out;
    out.shift = (rule == PdShiftRule::Literal ? std::abs(lowest) : std::max(0.0, -lowest)) + 0.05;
    out.sigma1 = base.shifted(out.shift);
    out.sigma2 = perturbed.shifted(out.shift);
    out.d = d;
    out.sqrt1 = symmetric_sqrt(out.sigma1);
    out.sqrt2 = symmetric_sqrt(out.sigma2);
    return out;
}

double draw_noise(Noise noise, Philox4x32& rng) {
    switch (noise) {
        case Noise::Normal: return boost::random::normal_distribution<double>(0.0, 1.0)(rng);
        case Noise::CenteredGamma: return boost::random::gamma_distribution<double>(4.0, 0.5)(rng) - 2.0;
        case Noise::StudentT12: return boost::random::student_t_distribution<double>(12.0)(rng);
        case Noise::CenteredNegBinomial:
            // mean-dispersion (mu = 2, phi = 2): size phi, success probability phi / (phi + mu)
            return static_cast<double>(boost::random::negative_binomial_distribution<int, double>(2, 0.5)(rng)) - 2.0;
    }
    return 0.0;
}

DataMatrix sample(const Eigen::MatrixXd& sqrt_sigma, Index n, Noise noise, Philox4x32& rng) {
    const Index p = sqrt_sigma.rows();
    Eigen::MatrixXd z(n, p);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < p; ++j) z(i, j) = draw_noise(noise, rng);
    }
    return DataMatrix(Eigen::MatrixXd(z * sqrt_sigma.transpose()));
}

// ---------------------------------------------------------------------------
// Power study

void validate(const Scenario& s) {
    if (s.n < 2 || s.m < 2) throw InvalidArgument("scenario: n and m must be at least 2");
    if (s.p < 1) throw InvalidArgument("scenario: p must be positive");
    if (!(s.c > 0.0 && s.c <= 1.0)) throw InvalidArgument("scenario: c must lie in (0, 1]");
    if (s.permutations < 1 || s.reps < 1) throw InvalidArgument("scenario: B and reps must be at least 1");
    if (s.base == BaseKind::BlockDiagonal && s.p < 10) {
        throw InvalidArgument("scenario: block-diagonal base needs p >= 10");
    }
    if (s.diff != DiffKind::None && s.p < 10) throw InvalidArgument("scenario: differential matrices need p >= 10");
}

RepetitionDraw draw_repetition(const Scenario& scenario, int rep, const PowerStudyOptions& options) {
    Philox4x32 rng = stream(scenario.seed, static_cast<std::uint64_t>(rep));
    SymmetricMatrix base;
    if (options.base_override) {
        base = *options.base_override;
    } else if (options.fixed_lambda) {
        Philox4x32 base_rng = stream(derive_seed(scenario.seed, 0, kDomainBase), 0);
        base = base_covariance(scenario.base, scenario.p, base_rng);
    } else {
        base = base_covariance(scenario.base, scenario.p, rng);
    }
    if (base.dim() != scenario.p) {
        throw DimensionMismatch(static_cast<std::size_t>(base.dim()), static_cast<std::size_t>(scenario.p));
    }
    const SymmetricMatrix d = differential(scenario.diff, base, rng);
    ScenarioMatrices matrices = enforce_pd(base, d, options.pd_rule);
    DataMatrix x = sample(matrices.sqrt1, scenario.n, scenario.noise, rng);
    DataMatrix y = sample(matrices.sqrt2, scenario.m, scenario.noise, rng);
    return {std::move(matrices), std::move(x), std::move(y)};
}

Interval wilson_interval(int successes, int trials) {
    if (trials <= 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;
    const double n = trials;
    const double phat = successes / n;
    const double denom = 1.0 + z * z / n;
    const double centre = (phat + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

PowerTable power_study(const Scenario& scenario, const PowerStudyOptions& options) {
    validate(scenario);
    if (options.methods.empty()) throw InvalidArgument("power_study: no methods selected");
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw InvalidArgument("power_study: alpha must lie in (0, 1)");

    const std::size_t methods = options.methods.size();
    const auto reps = static_cast<std::size_t>(scenario.reps);
    // outcome[r][k]: 1 reject, 0 accept, -1 failed
    std::vector<std::vector<int>> outcome(reps, std::vector<int>(methods, -1));
    std::vector<std::vector<int>> nonconverged(reps, std::vector<int>(methods, 0));

    TestConfig base_config;
    base_config.kind = options.kind;
    base_config.budget = SparsityBudget::from_c_clamped(scenario.c, scenario.p);
    base_config.solver = options.solver;
    base_config.permutations = scenario.permutations;
    base_config.threads = 1;

    auto run_rep = [&](std::size_t r) {
        RepetitionDraw draw;
        try {
            draw = draw_repetition(scenario, static_cast<int>(r), options);
        } catch (const Error&) {
            return;
        }
        for (std::size_t k = 0; k < methods; ++k) {
            TestConfig config = base_config;
            config.method = options.methods[k];
            config.seed = derive_seed(scenario.seed, r, kDomainPermutation);
            try {
                const PermutationTestResult res = permutation_test(draw.x, draw.y, config);
                outcome[r][k] = res.p_value < options.alpha ? 1 : 0;
                nonconverged[r][k] = res.nonconverged + (res.observed_converged ? 0 : 1);
            } catch (const Error&) {
                outcome[r][k] = -1;
            }
        }
    };

    const int workers = std::clamp(options.threads, 1, scenario.reps);
    if (workers == 1) {
        for (std::size_t r = 0; r < reps; ++r) run_rep(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < reps; r = next++) run_rep(r);
            });
        }
    }

    PowerTable table;
    table.scenario = scenario;
    table.kind = options.kind;
    table.alpha = options.alpha;
    for (std::size_t k = 0; k < methods; ++k) {
        MethodPower row;
        row.method = options.methods[k];
        for (std::size_t r = 0; r < reps; ++r) {
            if (outcome[r][k] < 0) {
                ++row.failures;
                continue;
            }
            ++row.completed;
            row.rejections += outcome[r][k];
            row.nonconverged += nonconverged[r][k];
        }
        row.power = row.completed > 0 ? static_cast<double>(row.rejections) / row.completed : 0.0;
        const Interval ci = wilson_interval(row.rejections, row.completed);
        row.ci_low = ci.low;
        row.ci_high = ci.high;
        table.rows.push_back(row);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(BaseKind k) {
    switch (k) {
        case BaseKind::NoisyDiagonal: return "noisy_diagonal";
        case BaseKind::BlockDiagonal: return "block_diagonal";
        case BaseKind::ExpDecay: return "exp_decay";
    }
    return "unknown";
}

std::string_view to_string(DiffKind k) {
    switch (k) {
        case DiffKind::None: return "none";
        case DiffKind::SparseBlock: return "sparse_block";
        case DiffKind::SoftSparseSpiked: return "spiked";
    }
    return "unknown";
}

std::string_view to_string(Noise k) {
    switch (k) {
        case Noise::Normal: return "normal";
        case Noise::CenteredGamma: return "gamma";
        case Noise::StudentT12: return "t12";
        case Noise::CenteredNegBinomial: return "negbin";
    }
    return "unknown";
}

BaseKind parse_base_kind(std::string_view s) {
    if (s == "noisy_diagonal") return BaseKind::NoisyDiagonal;
    if (s == "block_diagonal") return BaseKind::BlockDiagonal;
    if (s == "exp_decay") return BaseKind::ExpDecay;
    throw InvalidArgument("unknown base covariance '" + std::string(s) + "'");
}

DiffKind parse_diff_kind(std::string_view s) {
    if (s == "none") return DiffKind::None;
    if (s == "sparse_block") return DiffKind::SparseBlock;
    if (s == "spiked") return DiffKind::SoftSparseSpiked;
    throw InvalidArgument("unknown differential '" + std::string(s) + "'");
}

Noise parse_noise(std::string_view s) {
    if (s == "normal") return Noise::Normal;
    if (s == "gamma") return Noise::CenteredGamma;
    if (s == "t12") return Noise::StudentT12;
    if (s == "negbin") return Noise::CenteredNegBinomial;
    throw InvalidArgument("unknown noise distribution '" + std::string(s) + "'");
}

}  // namespace sled
