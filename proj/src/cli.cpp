#include "sled/cli.hpp"

#include "sled/errors.hpp"
#include "sled/io.hpp"
#include "sled/rng.hpp"
#include "sled/simgen.hpp"
#include "sled/test_engine.hpp"
#include "sled/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <thread>

namespace sled::cli {
namespace {

int default_threads() {
    if (const char* env = std::getenv("SLED_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string version_string() {
    return "sled " + std::string(kToolVersion) + " (rng: " + std::string(kRngId) + ")";
}

struct InputOptions {
    std::string delimiter = "auto";
    bool no_header = false;
    bool row_names = false;
    bool features_by_samples = false;
};

MatrixFileSpec file_spec(const std::string& path, const InputOptions& in) {
    MatrixFileSpec spec;
    spec.path = path;
    spec.delimiter = in.delimiter == "csv" ? Delimiter::Csv : in.delimiter == "tsv" ? Delimiter::Tsv : Delimiter::Auto;
    spec.has_header = !in.no_header;
    spec.row_names = in.row_names;
    spec.orientation = in.features_by_samples ? Orientation::FeaturesBySamples : Orientation::SamplesByFeatures;
    return spec;
}

struct SolverOptions {
    std::string solver = "pmd";
    double pmd_tol = 1e-6;
    int pmd_max_iter = 100;
    double fps_rho = 1.0;
    double fps_tol = 1e-6;
    int fps_max_iter = 500;

    SolverSettings resolve() const {
        SolverSettings s;
        s.solver = parse_solver(solver);
        s.pmd.tol = pmd_tol;
        s.pmd.max_iter = pmd_max_iter;
        s.fps.rho = fps_rho;
        s.fps.tol = fps_tol;
        s.fps.max_iter = fps_max_iter;
        return s;
    }

    ordered_json echo() const {
        return {{"solver", solver},     {"pmd_tol", pmd_tol}, {"pmd_max_iter", pmd_max_iter},
                {"fps_rho", fps_rho},   {"fps_tol", fps_tol}, {"fps_max_iter", fps_max_iter}};
    }
};

void add_solver_options(CLI::App* app, SolverOptions& s) {
    app->add_option("--solver", s.solver, "Sparse eigenvalue solver")
        ->check(CLI::IsMember({"pmd", "fps", "exact"}))
        ->capture_default_str();
    app->add_option("--pmd-tol", s.pmd_tol, "PMD relative convergence tolerance")->capture_default_str();
    app->add_option("--pmd-max-iter", s.pmd_max_iter, "PMD alternation cap")->capture_default_str();
    app->add_option("--fps-rho", s.fps_rho, "FPS ADMM penalty")->capture_default_str();
    app->add_option("--fps-tol", s.fps_tol, "FPS residual tolerance")->capture_default_str();
    app->add_option("--fps-max-iter", s.fps_max_iter, "FPS iteration cap")->capture_default_str();
}

RelationshipKind resolve_kind(const std::string& kind, const CLI::Option* beta_opt, double beta) {
    if (kind == "adjacency") {
        if (beta_opt->count() == 0) throw InvalidArgument("--kind adjacency requires --beta");
        return RelationshipKind::adjacency(beta);
    }
    if (beta_opt->count() > 0) throw InvalidArgument("--beta is only valid with --kind adjacency");
    return kind == "covariance" ? RelationshipKind::covariance() : RelationshipKind::correlation();
}

SparsityBudget resolve_budget(double c, Index p, std::ostream& err) {
    const SparsityBudget budget = SparsityBudget::from_c_clamped(c, p);
    if (budget.clamped()) {
        err << "warning: c = " << c << " gives sqrt(R) < 1 at p = " << p << "; using sqrt(R) = 1\n";
    }
    return budget;
}

// ---------------------------------------------------------------------------
// test

struct TestOptions {
    std::string x_path, y_path;
    InputOptions input;
    bool align_by_name = false;
    std::string method = "sled";
    std::string kind = "correlation";
    double beta = 0.0;
    CLI::Option* beta_opt = nullptr;
    double c = 0.1;
    int permutations = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    SolverOptions solver;
    double alpha = 0.05;
    bool add_one = false;
    std::string centering = "group";
    double cut = 0.999;
    int top = 10;
    std::string out;
    bool include_null_stats = false;
    bool reproducible = false;
};

int cmd_test(const TestOptions& o, std::ostream& out, std::ostream& err) {
    const auto started = std::chrono::steady_clock::now();

    TestConfig config;
    config.method = parse_method(o.method);
    config.kind = resolve_kind(o.kind, o.beta_opt, o.beta);
    config.solver = o.solver.resolve();
    config.permutations = o.permutations;
    config.seed = o.seed;
    config.threads = o.threads;
    config.centering = o.centering == "pooled" ? Centering::Pooled : Centering::WithinGroup;
    config.p_value_rule = o.add_one ? PValueRule::AddOne : PValueRule::Strict;
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw InvalidArgument("--alpha must lie in (0, 1)");
    if (!(o.cut > 0.0 && o.cut <= 1.0)) throw InvalidArgument("--cut must lie in (0, 1]");
    if (o.permutations < 1) throw InvalidArgument("--B must be at least 1");
    if (!(o.c > 0.0 && o.c <= 1.0)) throw InvalidArgument("--c must lie in (0, 1]");

    DataMatrix x = read_matrix(file_spec(o.x_path, o.input));
    DataMatrix y = read_matrix(file_spec(o.y_path, o.input));
    if (o.align_by_name) std::tie(x, y) = align_by_name(x, y);
    if (x.p() != y.p()) throw DimensionMismatch(static_cast<std::size_t>(x.p()), static_cast<std::size_t>(y.p()));
    if (config.method == Method::Sled) config.budget = resolve_budget(o.c, x.p(), err);

    const PermutationTestResult result = permutation_test(x, y, config);

    ResultDocument doc;
    doc.tool_version = std::string(kToolVersion);
    doc.rng = std::string(kRngId);
    doc.result = result;
    doc.include_null_stats = o.include_null_stats;
    ordered_json cfg;
    cfg["subcommand"] = "test";
    cfg["x"] = o.x_path;
    cfg["y"] = o.y_path;
    cfg["delimiter"] = o.input.delimiter;
    cfg["header"] = !o.input.no_header;
    cfg["row_names"] = o.input.row_names;
    cfg["orientation"] = o.input.features_by_samples ? "features_by_samples" : "samples_by_features";
    cfg["align_by_name"] = o.align_by_name;
    cfg["n"] = x.n();
    cfg["m"] = y.n();
    cfg["p"] = x.p();
    cfg["method"] = o.method;
    cfg["kind"] = config.kind.name();
    if (config.kind.type() == RelationshipKind::Type::Adjacency) cfg["beta"] = config.kind.beta();
    cfg["c"] = o.c;
    if (config.budget) {
        cfg["sqrt_r"] = config.budget->sqrt_r();
        cfg["budget_clamped"] = config.budget->clamped();
    }
    cfg["B"] = o.permutations;
    cfg["seed"] = o.seed;
    cfg["solver"] = o.solver.echo();
    cfg["alpha"] = o.alpha;
    cfg["p_value_rule"] = std::string(to_string(config.p_value_rule));
    cfg["centering"] = std::string(to_string(config.centering));
    cfg["cumulative_cut"] = o.cut;
    doc.config = std::move(cfg);

    std::vector<Index> top;
    if (result.leverage.size() > 0) {
        const FeatureRanking ranking = rank_features(result.leverage, o.cut);
        for (Index i : ranking.primary) doc.primary.push_back(x.feature_label(i));
        for (Index i : ranking.secondary) doc.secondary.push_back(x.feature_label(i));
        top = ranking.primary;
        top.insert(top.end(), ranking.secondary.begin(), ranking.secondary.end());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (!o.reproducible) {
        doc.runtime = ordered_json{{"threads", o.threads}, {"wall_seconds", seconds}, {"out", o.out}};
    }
    if (!o.out.empty()) write_result(doc, o.out);

    out << "method      " << o.method << "\n";
    out << "statistic   " << format_double(result.statistic) << "\n";
    out << "p-value     " << format_double(result.p_value) << " (B = " << result.permutations << ")\n";
    out << "decision    " << (result.p_value < o.alpha ? "reject" : "do not reject") << " at alpha = " << o.alpha
        << "\n";
    if (result.nonconverged > 0 || !result.observed_converged) {
        out << "warning     " << result.nonconverged << " permutation replicates hit the iteration cap\n";
    }
    if (!top.empty()) {
        out << "top features by leverage" << (result.negated ? " (from -D)" : "") << ":\n";
        for (std::size_t k = 0; k < top.size() && static_cast<int>(k) < o.top; ++k) {
            out << "  " << std::setw(4) << k + 1 << "  " << x.feature_label(top[k]) << "  "
                << format_double(result.leverage[top[k]]) << "\n";
        }
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
    std::string base = "block_diagonal";
    std::string diff = "sparse_block";
    std::string noise = "normal";
    Index n = 100, m = 100, p = 100;
    std::uint64_t seed = 1;
    int rep = 0;
    std::string out_dir;
    bool unit_lambda = false;
    bool pd_only_if_needed = false;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    Scenario s;
    s.base = parse_base_kind(o.base);
    s.diff = parse_diff_kind(o.diff);
    s.noise = parse_noise(o.noise);
    s.n = o.n;
    s.m = o.m;
    s.p = o.p;
    s.seed = o.seed;
    s.reps = 1;
    validate(s);
    if (o.rep < 0) throw InvalidArgument("--rep must be nonnegative");

    PowerStudyOptions options;
    options.pd_rule = o.pd_only_if_needed ? PdShiftRule::OnlyIfNeeded : PdShiftRule::Literal;
    if (o.unit_lambda) {
        Philox4x32 rng = stream(s.seed, static_cast<std::uint64_t>(o.rep));
        options.base_override = base_covariance(s.base, s.p, rng, BaseOptions{true});
    }
    const RepetitionDraw draw = draw_repetition(s, o.rep, options);
    const SymmetricMatrix base = draw.matrices.sigma1.shifted(-draw.matrices.shift);

    std::filesystem::create_directories(o.out_dir);
    const auto path = [&](const char* name) { return (std::filesystem::path(o.out_dir) / name).string(); };
    std::vector<std::string> names;
    for (Index j = 0; j < s.p; ++j) names.push_back("g" + std::to_string(j + 1));
    write_matrix(path("base.csv"), base.mat());
    write_matrix(path("D.csv"), draw.matrices.d.mat());
    write_matrix(path("sigma1.csv"), draw.matrices.sigma1.mat());
    write_matrix(path("sigma2.csv"), draw.matrices.sigma2.mat());
    write_matrix(path("X.csv"), draw.x.values(), names);
    write_matrix(path("Y.csv"), draw.y.values(), names);
    ordered_json meta = scenario_to_json(s);
    meta.erase("c");
    meta.erase("B");
    meta.erase("reps");
    meta["rep"] = o.rep;
    meta["unit_lambda"] = o.unit_lambda;
    meta["pd_rule"] = o.pd_only_if_needed ? "only_if_needed" : "literal";
    meta["pd_shift"] = draw.matrices.shift;
    meta["tool_version"] = std::string(kToolVersion);
    meta["rng"] = std::string(kRngId);
    write_text_file(path("scenario.json"), meta.dump(2) + "\n");
    out << "wrote base.csv D.csv sigma1.csv sigma2.csv X.csv Y.csv scenario.json to " << o.out_dir << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// power

struct PowerOptions {
    std::string grid;
    std::string preset;
    bool full = false;
    std::vector<std::string> methods = {"sled", "frobenius", "max"};
    double alpha = 0.05;
    int threads = 1;
    std::string kind = "covariance";
    double beta = 0.0;
    CLI::Option* beta_opt = nullptr;
    SolverOptions solver;
    std::string out_csv;
    std::string out_json;
    bool pd_only_if_needed = false;
    bool fixed_lambda = false;
    std::string base_file;
};

std::vector<Scenario> standard_grid(bool full) {
    std::vector<Scenario> cells;
    const std::vector<Index> dims = full ? std::vector<Index>{100, 200, 500} : std::vector<Index>{100};
    std::uint64_t seed = 1;
    for (Noise noise : {Noise::Normal, Noise::CenteredGamma}) {
        for (DiffKind diff : {DiffKind::SparseBlock, DiffKind::SoftSparseSpiked}) {
            for (BaseKind base : {BaseKind::NoisyDiagonal, BaseKind::BlockDiagonal, BaseKind::ExpDecay}) {
                for (Index p : dims) {
                    Scenario s;
                    s.base = base;
                    s.diff = diff;
                    s.noise = noise;
                    s.p = p;
                    s.reps = 100;
                    s.seed = seed++;
                    cells.push_back(s);
                }
            }
        }
    }
    return cells;
}

int cmd_power(const PowerOptions& o, std::ostream& out, std::ostream& err) {
    std::vector<Scenario> cells;
    if (!o.preset.empty()) {
        cells = standard_grid(o.full);
    } else {
        if (o.grid.empty()) throw InvalidArgument("power: give --grid or --preset");
        ordered_json grid;
        try {
            grid = ordered_json::parse(read_text_file(o.grid));
        } catch (const nlohmann::json::parse_error& e) {
            throw InvalidArgument(o.grid + ": " + e.what());
        }
        cells = parse_grid(grid);
    }
    if (cells.empty()) throw InvalidArgument("power: the scenario grid is empty");

    PowerStudyOptions options;
    options.methods.clear();
    for (const auto& m : o.methods) options.methods.push_back(parse_method(m));
    options.alpha = o.alpha;
    options.threads = o.threads;
    options.kind = resolve_kind(o.kind, o.beta_opt, o.beta);
    options.solver = o.solver.resolve();
    options.pd_rule = o.pd_only_if_needed ? PdShiftRule::OnlyIfNeeded : PdShiftRule::Literal;
    options.fixed_lambda = o.fixed_lambda;
    if (!o.base_file.empty()) {
        MatrixFileSpec spec;
        spec.path = o.base_file;
        spec.has_header = false;
        options.base_override = SymmetricMatrix(read_matrix(spec).values());
    }

    std::vector<PowerTable> tables;
    int failed_cells = 0;
    for (const Scenario& s : cells) {
        PowerTable t = power_study(s, options);
        const bool all_failed =
            std::all_of(t.rows.begin(), t.rows.end(), [](const MethodPower& r) { return r.completed == 0; });
        if (all_failed) {
            ++failed_cells;
            err << "cell " << to_string(s.base) << "/" << to_string(s.diff) << "/" << to_string(s.noise)
                << " p=" << s.p << ": every repetition failed\n";
        }
        for (const auto& row : t.rows) {
            out << std::left << std::setw(15) << to_string(s.base) << std::setw(13) << to_string(s.diff)
                << std::setw(7) << to_string(s.noise) << " p=" << std::setw(4) << s.p << " " << std::setw(10)
                << to_string(row.method) << " power " << std::fixed << std::setprecision(2) << row.power << " ["
                << row.ci_low << ", " << row.ci_high << "]" << std::defaultfloat;
            if (row.failures > 0) out << " failures " << row.failures;
            out << "\n";
        }
        tables.push_back(std::move(t));
    }
    if (!o.out_csv.empty()) write_power_csv(tables, o.out_csv);
    if (!o.out_json.empty()) {
        ordered_json j = power_to_json(tables);
        j["tool_version"] = std::string(kToolVersion);
        j["rng"] = std::string(kRngId);
        write_text_file(o.out_json, j.dump(2) + "\n");
    }
    return failed_cells == static_cast<int>(cells.size()) ? kDataError : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"sLED: sparse leading-eigenvalue-driven two-sample test for covariance and relationship matrices.\n"
                 "Exit codes: 0 success, 1 unexpected failure, 2 invalid usage or arguments (including\n"
                 "dimension mismatches), 3 data errors (unreadable or malformed input, degenerate features).",
                 "sled"};
    app.require_subcommand(0, 1);
    bool show_version = false;
    app.add_flag("--version", show_version, "Print version and RNG identifier");

    const int threads_default = default_threads();

    TestOptions t;
    t.threads = threads_default;
    CLI::App* test = app.add_subcommand("test", "Two-sample permutation test on two sample matrices");
    test->add_option("--x", t.x_path, "First group (n x p)")->required();
    test->add_option("--y", t.y_path, "Second group (m x p)")->required();
    test->add_option("--delimiter", t.input.delimiter, "auto | csv | tsv")
        ->check(CLI::IsMember({"auto", "csv", "tsv"}))
        ->capture_default_str();
    test->add_flag("--no-header", t.input.no_header, "Inputs have no header row");
    test->add_flag("--row-names", t.input.row_names, "First column holds row labels");
    test->add_flag("--features-by-samples", t.input.features_by_samples, "Inputs are p x n; transpose on load");
    test->add_flag("--align-by-name", t.align_by_name, "Intersect features by header name");
    test->add_option("--method", t.method, "sled | frobenius | max")
        ->check(CLI::IsMember({"sled", "frobenius", "max"}))
        ->capture_default_str();
    test->add_option("--kind", t.kind, "covariance | correlation | adjacency")
        ->check(CLI::IsMember({"covariance", "correlation", "adjacency"}))
        ->capture_default_str();
    t.beta_opt = test->add_option("--beta", t.beta, "Adjacency power (adjacency only)");
    test->add_option("--c", t.c, "Sparsity: sqrt(R) = c sqrt(p)")->capture_default_str();
    test->add_option("--B", t.permutations, "Permutations")->capture_default_str();
    test->add_option("--seed", t.seed, "RNG seed")->capture_default_str();
    test->add_option("--threads", t.threads, "Worker threads (default: $SLED_THREADS or all cores)");
    add_solver_options(test, t.solver);
    test->add_option("--alpha", t.alpha, "Significance level")->capture_default_str();
    test->add_flag("--add-one", t.add_one, "Use (1 + #{T* >= T}) / (B + 1) instead of #{T* > T} / B");
    test->add_option("--centering", t.centering, "group: center within (pseudo-)groups; pooled: center once")
        ->check(CLI::IsMember({"group", "pooled"}))
        ->capture_default_str();
    test->add_option("--cut", t.cut, "Cumulative leverage defining primary features")->capture_default_str();
    test->add_option("--top", t.top, "Features to print")->capture_default_str();
    test->add_option("--out", t.out, "Write the JSON result document here");
    test->add_flag("--include-null-stats", t.include_null_stats, "Include the permutation statistics in --out");
    test->add_flag("--reproducible", t.reproducible, "Omit the runtime block (threads, timing) from --out");

    SimulateOptions s;
    CLI::App* simulate = app.add_subcommand("simulate", "Draw one scenario (covariances and samples) to files");
    simulate->add_option("--base", s.base, "noisy_diagonal | block_diagonal | exp_decay")
        ->check(CLI::IsMember({"noisy_diagonal", "block_diagonal", "exp_decay"}))
        ->capture_default_str();
    simulate->add_option("--diff", s.diff, "none | sparse_block | spiked")
        ->check(CLI::IsMember({"none", "sparse_block", "spiked"}))
        ->capture_default_str();
    simulate->add_option("--noise", s.noise, "normal | gamma | t12 | negbin")
        ->check(CLI::IsMember({"normal", "gamma", "t12", "negbin"}))
        ->capture_default_str();
    simulate->add_option("--n", s.n, "Samples in group 1")->capture_default_str();
    simulate->add_option("--m", s.m, "Samples in group 2")->capture_default_str();
    simulate->add_option("--p", s.p, "Features")->capture_default_str();
    simulate->add_option("--seed", s.seed, "RNG seed")->capture_default_str();
    simulate->add_option("--rep", s.rep, "Repetition stream to draw")->capture_default_str();
    simulate->add_option("--out-dir", s.out_dir, "Output directory")->required();
    simulate->add_flag("--unit-lambda", s.unit_lambda, "Use Lambda = I in the base covariance");
    simulate->add_flag("--pd-shift-only-if-needed", s.pd_only_if_needed,
                       "Shift by max(0, -lambda_min) + 0.05 instead of |lambda_min| + 0.05");

    PowerOptions pw;
    pw.threads = threads_default;
    CLI::App* power = app.add_subcommand("power", "Empirical power over a grid of simulation scenarios");
    power->add_option("--grid", pw.grid, "JSON scenario grid");
    power->add_option("--preset", pw.preset, "Built-in grid")->check(CLI::IsMember({"standard"}));
    power->add_flag("--full", pw.full, "With --preset standard: include p = 200 and 500");
    power->add_option("--methods", pw.methods, "Methods to compare")
        ->delimiter(',')
        ->check(CLI::IsMember({"sled", "frobenius", "max"}))
        ->capture_default_str();
    power->add_option("--alpha", pw.alpha, "Nominal level")->capture_default_str();
    power->add_option("--threads", pw.threads, "Worker threads (default: $SLED_THREADS or all cores)");
    power->add_option("--kind", pw.kind, "covariance | correlation | adjacency")
        ->check(CLI::IsMember({"covariance", "correlation", "adjacency"}))
        ->capture_default_str();
    pw.beta_opt = power->add_option("--beta", pw.beta, "Adjacency power (adjacency only)");
    add_solver_options(power, pw.solver);
    power->add_option("--out-csv", pw.out_csv, "Power table CSV");
    power->add_option("--out-json", pw.out_json, "Power table JSON");
    power->add_flag("--pd-shift-only-if-needed", pw.pd_only_if_needed,
                    "Shift by max(0, -lambda_min) + 0.05 instead of |lambda_min| + 0.05");
    power->add_flag("--fixed-lambda", pw.fixed_lambda, "Draw the base covariance once per scenario");
    power->add_option("--base-file", pw.base_file, "Headerless CSV base covariance replacing the generator");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidationError;
    }

    try {
        if (show_version) {
            out << version_string() << "\n";
            return kOk;
        }
        if (*test) return cmd_test(t, out, err);
        if (*simulate) return cmd_simulate(s, out);
        if (*power) return cmd_power(pw, out, err);
        out << app.help();
        return kValidationError;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUnexpected;
    }
}

}  // namespace sled::cli
