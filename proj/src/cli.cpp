#include "vrsg/cli.hpp"

#include <CLI11.hpp>
#include <ostream>

#include "vrsg/experiment.hpp"

namespace vrsg::cli {

namespace ex = vrsg::experiment;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Proximal stochastic gradient methods with variance-reduced estimators"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "flat `key = value` file; command-line flags take precedence");

    std::string problem = "ridge";
    std::string regime;
    ex::ExperimentSpec spec;
    double tol = 1e-12;
    long long max_iters = 1000000;
    long long epoch_len = 0, epochs = 10, record_every = 0;

    app.add_option("--problem", problem, "ridge | lasso | nnpca")->capture_default_str();
    app.add_option("--data", spec.data_path, "LIBSVM data file");
    app.add_option("--estimator", spec.estimators, "sgd | bsaga | bsvrg | sarah | sarge, optionally name:theta");
    app.add_option("--theta", spec.thetas, "bias parameter(s); 'n' means the sample count")->delimiter(',');
    app.add_option("--epoch-len", epoch_len, "epoch length m for bsvrg/sarah (default n)");
    app.add_option("--step", spec.step, "theory | paper | unscaled | <positive real>")->capture_default_str();
    app.add_option("--regime", regime, "convex | strongly-convex | nonconvex (default from problem)");
    app.add_option("--seed", spec.seeds, "sampling seed(s)")->delimiter(',');
    app.add_option("--epochs", epochs, "passes over the data; iterations = epochs * n")->capture_default_str();
    app.add_option("--beta", spec.beta, "regularization weight, 'auto' = 1/n")->capture_default_str();
    app.add_option("--ref", spec.ref_path, "reference file produced by `reference`");
    app.add_option("--out", spec.out, "output directory (run/sweep/compare) or reference file path");
    app.add_option("--record-every", record_every, "checkpoint stride in iterations (default n)");
    app.add_flag("--sarge-cold-start", spec.sarge_cold_start, "seed SARGE without a full gradient");
    app.add_option("--tol", tol, "reference: generalized-gradient tolerance")->capture_default_str();
    app.add_option("--max-iters", max_iters, "reference: iteration cap")->capture_default_str();

    auto* run_cmd = app.add_subcommand("run", "single estimator, one CSV per seed");
    auto* sweep_cmd = app.add_subcommand("sweep", "theta sweep for bsaga/bsvrg, one CSV per theta and seed");
    auto* compare_cmd = app.add_subcommand("compare", "several estimators on the same seeds");
    auto* ref_cmd = app.add_subcommand("reference", "high-accuracy reference solution");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Error& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config_error;
    }

    try {
        spec.problem = ex::parse_problem(problem);
        if (!regime.empty()) spec.regime = ex::parse_regime(regime);
        spec.epoch_len = epoch_len;
        spec.epochs = epochs;
        spec.record_every = record_every;
        if (spec.seeds.empty()) spec.seeds = {0};

        if (*ref_cmd) {
            if (spec.out == ".") throw ex::ConfigError("reference needs --out <file>");
            const auto ref = ex::compute_reference(spec, tol, max_iters, err);
            out << "f_star=" << ref.f_star << '\n';
            return exit_ok;
        }
        const ex::Mode mode = *run_cmd ? ex::Mode::Run : *sweep_cmd ? ex::Mode::Sweep : ex::Mode::Compare;
        (void)compare_cmd;
        for (const auto& path : ex::execute(spec, mode, err)) out << path << '\n';
        return exit_ok;
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << '\n';
        return exit_divergence;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_config_error;
    }
}

} // namespace vrsg::cli
