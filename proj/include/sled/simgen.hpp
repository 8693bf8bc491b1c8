#pragma once

// Simulation scenarios for power studies: base covariance structures,
// differential matrices, positive-definiteness enforcement, non-Gaussian
// samplers and the repetition harness.

#include "sled/matrix.hpp"
#include "sled/rng.hpp"
#include "sled/test_engine.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sled {

enum class BaseKind { NoisyDiagonal, BlockDiagonal, ExpDecay };
enum class DiffKind { None, SparseBlock, SoftSparseSpiked };
enum class Noise { Normal, CenteredGamma, StudentT12, CenteredNegBinomial };

/// Literal: delta = |min(lambda_min(S*), lambda_min(S* + D))| + 0.05.
/// OnlyIfNeeded: delta = max(0, -min(...)) + 0.05.
enum class PdShiftRule { Literal, OnlyIfNeeded };

struct BaseOptions {
    bool unit_lambda = false;  // force Lambda = I (test hook)
};

/// Lambda^{1/2} Delta Lambda^{1/2}, Lambda_ii ~ Unif(0.5, 2.5).
SymmetricMatrix base_covariance(BaseKind kind, Index p, Philox4x32& rng, const BaseOptions& options = {});

/// Signal level d of the differential family (natural log).
double signal_level(DiffKind kind, const SymmetricMatrix& base);

/// SparseBlock puts its floor(0.1 p) block on the leading indices.
SymmetricMatrix differential(DiffKind kind, const SymmetricMatrix& base, Philox4x32& rng);

struct ScenarioMatrices {
    SymmetricMatrix sigma1;
    SymmetricMatrix sigma2;
    SymmetricMatrix d;
    Eigen::MatrixXd sqrt1;
    Eigen::MatrixXd sqrt2;
    double shift = 0.0;
};

ScenarioMatrices enforce_pd(const SymmetricMatrix& base, const SymmetricMatrix& d,
                            PdShiftRule rule = PdShiftRule::Literal);

/// Symmetric square root through the eigendecomposition; eigenvalues below
/// zero (round-off) are clipped.
Eigen::MatrixXd symmetric_sqrt(const SymmetricMatrix& s);

/// One standardized noise coordinate: N(0,1), Gamma(shape 4, scale 0.5) - 2,
/// t(12), or NB(mean 2, dispersion 2) - 2.
double draw_noise(Noise noise, Philox4x32& rng);

/// n rows of sqrt_sigma * z with i.i.d. noise coordinates.
DataMatrix sample(const Eigen::MatrixXd& sqrt_sigma, Index n, Noise noise, Philox4x32& rng);

struct Scenario {
    BaseKind base = BaseKind::BlockDiagonal;
    DiffKind diff = DiffKind::SparseBlock;
    Noise noise = Noise::Normal;
    Index n = 100;
    Index m = 100;
    Index p = 100;
    double c = 0.3;
    int permutations = 100;
    int reps = 100;
    std::uint64_t seed = 1;
};

void validate(const Scenario& scenario);

struct PowerStudyOptions {
    std::vector<Method> methods = {Method::Sled, Method::Frobenius, Method::MaxEntry};
    double alpha = 0.05;
    int threads = 1;
    RelationshipKind kind = RelationshipKind::covariance();
    SolverSettings solver;
    PdShiftRule pd_rule = PdShiftRule::Literal;
    bool fixed_lambda = false;                    // draw the base once per scenario
    std::optional<SymmetricMatrix> base_override;  // user-supplied base covariance
};

struct MethodPower {
    Method method = Method::Sled;
    int rejections = 0;
    int completed = 0;
    int failures = 0;
    int nonconverged = 0;  // permutation replicates that hit max_iter, summed
    double power = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct PowerTable {
    Scenario scenario;
    RelationshipKind kind = RelationshipKind::covariance();
    double alpha = 0.05;
    std::vector<MethodPower> rows;
};

/// Data drawn in repetition r for a scenario (exposed for the CLI and tests).
struct RepetitionDraw {
    ScenarioMatrices matrices;
    DataMatrix x;
    DataMatrix y;
};

RepetitionDraw draw_repetition(const Scenario& scenario, int rep, const PowerStudyOptions& options);

/// Rejection rate at level alpha (reject when p < alpha) over scenario.reps
/// repetitions. Repetition r uses its own streams, so results do not depend
/// on options.threads.
PowerTable power_study(const Scenario& scenario, const PowerStudyOptions& options);

struct Interval {
    double low;
    double high;
};

/// Wilson score interval at 95%.
Interval wilson_interval(int successes, int trials);

std::string_view to_string(BaseKind k);
std::string_view to_string(DiffKind k);
std::string_view to_string(Noise k);
BaseKind parse_base_kind(std::string_view s);
DiffKind parse_diff_kind(std::string_view s);
Noise parse_noise(std::string_view s);

}  // namespace sled
