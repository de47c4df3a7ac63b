#include "vrsg/experiment.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "vrsg/rng.hpp"

namespace vrsg::experiment {

namespace {

std::optional<double> parse_double(const std::string& s) {
    double v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
    return v;
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_theta(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace

Problem parse_problem(const std::string& name) {
    if (name == "ridge") return Problem::Ridge;
    if (name == "lasso") return Problem::Lasso;
    if (name == "nnpca") return Problem::NnPca;
    throw ConfigError("unknown problem '" + name + "' (expected ridge, lasso or nnpca)");
}

std::string problem_name(Problem p) {
    switch (p) {
    case Problem::Ridge: return "ridge";
    case Problem::Lasso: return "lasso";
    case Problem::NnPca: return "nnpca";
    }
    return "?";
}

Regime default_regime(Problem p) {
    switch (p) {
    case Problem::Ridge: return Regime::StronglyConvex;
    case Problem::Lasso: return Regime::Convex;
    case Problem::NnPca: return Regime::NonConvex;
    }
    return Regime::Convex;
}

Regime parse_regime(const std::string& name) {
    if (name == "convex") return Regime::Convex;
    if (name == "strongly-convex") return Regime::StronglyConvex;
    if (name == "nonconvex") return Regime::NonConvex;
    throw ConfigError("unknown regime '" + name + "' (expected convex, strongly-convex or nonconvex)");
}

LoadedProblem load_problem(Problem problem, LabeledDataset<double> data, const std::string& beta_spec) {
    LoadedProblem lp;
    lp.problem = problem;
    lp.data = std::make_unique<LabeledDataset<double>>(std::move(data));
    const auto n = static_cast<double>(lp.data->n_samples());
    lp.objective = std::make_unique<FiniteSumObjective<double>>(
        problem == Problem::NnPca ? LossKind::NegSquare : LossKind::LeastSquares, *lp.data);

    double beta = 1.0 / n;
    if (beta_spec != "auto") {
        const auto v = parse_double(beta_spec);
        if (!v || !(*v >= 0)) throw ConfigError("--beta must be 'auto' or a nonnegative number");
        beta = *v;
    }
    switch (problem) {
    case Problem::Ridge: lp.regularizer = Regularizer<double>::l2_squared(beta); break;
    case Problem::Lasso: lp.regularizer = Regularizer<double>::l1(beta); break;
    case Problem::NnPca: lp.regularizer = Regularizer<double>::nonneg_ball(); break;
    }
    return lp;
}

LoadedProblem load_problem(const ExperimentSpec& spec) {
    if (spec.data_path.empty()) throw ConfigError("--data is required");
    auto data = rescale_features(load_libsvm<double>(spec.data_path));
    return load_problem(spec.problem, std::move(data), spec.beta);
}

Vector<double> starting_point(const LoadedProblem& lp, std::uint64_t seed) {
    const Index p = lp.objective->dim();
    if (lp.problem != Problem::NnPca) return Vector<double>::Zero(p);
    Sampler s(seed ^ 0x9e3779b97f4a7c15ULL);
    // projected so that F(x0) is finite
    return prox(lp.regularizer, s.normal_vector<double>(p), 1.0);
}

double resolve_theta(const std::string& token, Index n) {
    if (token == "n") return static_cast<double>(n);
    const auto v = parse_double(token);
    if (!v || !(*v > 0)) throw ConfigError("theta must be positive (got '" + token + "')");
    return *v;
}

EstimatorKind make_estimator(const std::string& name, std::optional<double> theta, Index epoch_len,
                             bool cold_start) {
    if (epoch_len < 0) throw ConfigError("--epoch-len must be >= 1");
    if (theta && !(*theta > 0)) throw ConfigError("theta must be positive");
    if (name == "sgd") return Sgd{};
    if (name == "bsaga") return BSaga{theta.value_or(1.0)};
    if (name == "bsvrg") return BSvrg{theta.value_or(1.0), epoch_len};
    if (name == "sarah") return Sarah{epoch_len};
    if (name == "sarge") return Sarge{cold_start};
    throw ConfigError("unknown estimator '" + name + "'");
}

StepSizePolicy resolve_step(const ExperimentSpec& spec, const LoadedProblem& lp) {
    const double L = lp.objective->lipschitz_bound();
    const auto n = static_cast<double>(lp.objective->n());
    if (spec.step == "theory") return TheoryStep{spec.regime.value_or(default_regime(spec.problem))};
    if (spec.step == "paper") {
        return FixedStep{spec.problem == Problem::NnPca ? 1.0 / (5.0 * L * n) : 1.0 / (5.0 * L)};
    }
    if (spec.step == "unscaled") return FixedStep{1.0 / (5.0 * n)};
    const auto v = parse_double(spec.step);
    if (!v || !(*v > 0) || !std::isfinite(*v)) {
        throw ConfigError("--step must be theory, paper, unscaled or a positive number");
    }
    return FixedStep{*v};
}

void write_reference(std::ostream& out, const ReferenceSolution<double>& ref) {
    out << "f_star=" << format_real(ref.f_star) << '\n';
    out << "residual=" << format_real(ref.residual) << '\n';
    out << "x=";
    for (Index j = 0; j < ref.x_star.size(); ++j) out << ' ' << format_real(ref.x_star[j]);
    out << '\n';
}

ReferenceSolution<double> read_reference(std::istream& in) {
    ReferenceSolution<double> ref;
    bool have_f = false, have_x = false;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string rest = line.substr(eq + 1);
        if (key == "f_star" || key == "residual") {
            const auto v = parse_double(rest);
            if (!v) throw ConfigError("reference file: malformed " + key);
            (key == "f_star" ? ref.f_star : ref.residual) = *v;
            have_f = have_f || key == "f_star";
        } else if (key == "x") {
            std::istringstream tokens(rest);
            std::vector<double> xs;
            std::string tok;
            while (tokens >> tok) {
                const auto v = parse_double(tok);
                if (!v) throw ConfigError("reference file: malformed x entry '" + tok + "'");
                xs.push_back(*v);
            }
            ref.x_star = Eigen::Map<Vector<double>>(xs.data(), static_cast<Index>(xs.size()));
            have_x = true;
        }
    }
    if (!have_f || !have_x) throw ConfigError("reference file: missing f_star or x");
    ref.converged = true;
    return ref;
}

ReferenceSolution<double> read_reference_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open reference file '" + path + "'");
    return read_reference(in);
}

void write_csv(std::ostream& out, const RunTrajectory<double>& traj) {
    auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
    out << csv_header << '\n';
    for (const auto& c : traj.checkpoints) {
        out << c.iteration << ',' << c.oracle_calls << ',' << format_real(c.objective) << ',' << opt(c.gap) << ','
            << opt(c.avg_gap) << ',' << opt(c.dist_sq) << ',' << format_real(c.gen_grad_norm) << '\n';
    }
}

void write_file_atomically(const std::string& path, const std::string& contents) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << contents;
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, target);
}

std::vector<RunPlan> plan_runs(const ExperimentSpec& spec, Mode mode, Index n) {
    if (spec.estimators.empty()) throw ConfigError("--estimator is required");
    if (spec.seeds.empty()) throw ConfigError("at least one seed is required");
    if (mode != Mode::Compare && spec.estimators.size() != 1) {
        throw ConfigError("run and sweep take exactly one --estimator (use compare for several)");
    }

    struct Choice {
        std::string name;
        std::optional<double> theta;
    };
    std::vector<Choice> choices;
    for (const auto& e : spec.estimators) {
        const auto colon = e.find(':');
        if (colon == std::string::npos) {
            const bool biased = e == "bsaga" || e == "bsvrg";
            if (biased && !spec.thetas.empty()) {
                for (const auto& t : spec.thetas) choices.push_back({e, resolve_theta(t, n)});
            } else {
                choices.push_back({e, std::nullopt});
            }
        } else {
            choices.push_back({e.substr(0, colon), resolve_theta(e.substr(colon + 1), n)});
        }
    }
    if (mode == Mode::Sweep) {
        const auto& name = choices.front().name;
        if (name != "bsaga" && name != "bsvrg") throw ConfigError("sweep needs --estimator bsaga or bsvrg");
        if (spec.thetas.empty()) throw ConfigError("sweep needs a non-empty --theta list");
    }
    if (mode == Mode::Run && choices.size() != 1) {
        throw ConfigError("run takes a single theta (use sweep for a theta list)");
    }

    std::vector<RunPlan> plans;
    for (const auto& c : choices) {
        const EstimatorKind kind = make_estimator(c.name, c.theta, spec.epoch_len, spec.sarge_cold_start);
        for (const auto seed : spec.seeds) {
            std::string file = problem_name(spec.problem) + "-" + c.name;
            if (c.theta) file += "-theta" + format_theta(*c.theta);
            file += "-seed" + std::to_string(seed) + ".csv";
            plans.push_back({kind, seed, (std::filesystem::path(spec.out) / file).string()});
        }
    }
    return plans;
}

std::vector<std::string> execute(const ExperimentSpec& spec, Mode mode, std::ostream& log) {
    if (spec.epochs < 1) throw ConfigError("--epochs must be >= 1");
    const LoadedProblem lp = load_problem(spec);
    const auto& f = *lp.objective;
    const auto plans = plan_runs(spec, mode, f.n());

    std::optional<ReferenceSolution<double>> ref;
    if (!spec.ref_path.empty()) {
        ref = read_reference_file(spec.ref_path);
        if (ref->x_star.size() != f.dim()) throw ConfigError("reference dimension does not match the data");
        log << "reference residual " << format_real(ref->residual) << '\n';
    }
    const StepSizePolicy step = resolve_step(spec, lp);

    // Validate every combination (e.g. theory + sgd) before starting work.
    for (const auto& plan : plans) {
        SolverConfig<double> cfg;
        cfg.estimator = plan.kind;
        cfg.step = step;
        try {
            (void)resolve_step_size(f, lp.regularizer, cfg);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(estimator_name(plan.kind) + ": " + e.what());
        }
    }

    std::vector<std::future<RunTrajectory<double>>> jobs;
    for (const auto& plan : plans) {
        jobs.push_back(std::async(std::launch::async, [&, plan] {
            SolverConfig<double> cfg;
            cfg.estimator = plan.kind;
            cfg.step = step;
            cfg.max_iterations = spec.epochs * f.n();
            cfg.record_every = spec.record_every;
            cfg.seed = plan.seed;
            cfg.x0 = starting_point(lp, plan.seed);
            auto traj = run(f, lp.regularizer, cfg, ref ? &*ref : nullptr);
            std::ostringstream csv;
            write_csv(csv, traj);
            write_file_atomically(plan.output_path, csv.str());
            return traj;
        }));
    }
    std::vector<std::string> written;
    std::exception_ptr first_error;
    for (std::size_t r = 0; r < jobs.size(); ++r) {
        try {
            const auto traj = jobs[r].get();
            log << plans[r].output_path << ": eta " << format_real(traj.step_size) << '\n';
            written.push_back(plans[r].output_path);
        } catch (...) {
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return written;
}

ReferenceSolution<double> compute_reference(const ExperimentSpec& spec, double tol, Index max_iters,
                                            std::ostream& log) {
    if (!(tol > 0)) throw ConfigError("--tol must be positive");
    const LoadedProblem lp = load_problem(spec);
    const auto& f = *lp.objective;
    std::optional<double> eta;
    std::optional<Vector<double>> x0;
    if (spec.problem == Problem::NnPca) {
        eta = 1.0 / (10.0 * f.lipschitz_bound() * static_cast<double>(f.n()));
        x0 = starting_point(lp, spec.seeds.empty() ? 0 : spec.seeds.front());
    }
    auto ref = reference_solution(f, lp.regularizer, tol, max_iters, eta, x0);
    if (!ref.converged) {
        log << "warning: reference did not reach tolerance " << format_real(tol) << " (residual "
            << format_real(ref.residual) << ")\n";
    }
    log << "reference residual " << format_real(ref.residual) << " after " << ref.iterations << " iterations\n";
    std::ostringstream body;
    write_reference(body, ref);
    write_file_atomically(spec.out, body.str());
    return ref;
}

} // namespace vrsg::experiment
