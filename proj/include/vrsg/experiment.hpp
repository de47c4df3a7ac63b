#pragma once
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "estimator.hpp"
#include "objective.hpp"
#include "regularizer.hpp"
#include "solver.hpp"

namespace vrsg::experiment {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Problem { Ridge, Lasso, NnPca };

Problem parse_problem(const std::string& name);
std::string problem_name(Problem p);
Regime default_regime(Problem p);
Regime parse_regime(const std::string& name);

struct ExperimentSpec {
    Problem problem = Problem::Ridge;
    std::string data_path;
    // "sgd", "bsaga", "bsvrg", "sarah", "sarge"; an optional ":<theta>"
    // suffix pins theta for that estimator (used by compare).
    std::vector<std::string> estimators;
    // Decimal values or "n" (the sample count).
    std::vector<std::string> thetas;
    Index epoch_len = 0;        // 0: n
    std::string step = "paper"; // "theory" | "paper" | "unscaled" | positive real
    std::optional<Regime> regime;
    std::vector<std::uint64_t> seeds{0};
    Index epochs = 10;
    std::string beta = "auto"; // "auto" is 1/n
    std::string ref_path;
    std::string out = ".";
    Index record_every = 0; // 0: n
    bool sarge_cold_start = false;
};

// Rescaled dataset with the objective and regularizer of one problem.
struct LoadedProblem {
    Problem problem;
    std::unique_ptr<LabeledDataset<double>> data;
    std::unique_ptr<FiniteSumObjective<double>> objective;
    Regularizer<double> regularizer;
};

LoadedProblem load_problem(Problem problem, LabeledDataset<double> data, const std::string& beta = "auto");
LoadedProblem load_problem(const ExperimentSpec& spec);

// Starting point for a seed: zero for ridge/lasso; for nnpca, i.i.d.
// standard normal entries drawn from Sampler(seed ^ 0x9e3779b97f4a7c15)
// and projected onto the feasible set.
Vector<double> starting_point(const LoadedProblem& lp, std::uint64_t seed);

struct RunPlan {
    EstimatorKind kind;
    std::uint64_t seed = 0;
    std::string output_path;
};

double resolve_theta(const std::string& token, Index n);
EstimatorKind make_estimator(const std::string& name, std::optional<double> theta, Index epoch_len, bool cold_start);
StepSizePolicy resolve_step(const ExperimentSpec& spec, const LoadedProblem& lp);

// Reference file: "f_star=<v>\nresidual=<v>\nx= <v1> <v2> ...\n"
void write_reference(std::ostream& out, const ReferenceSolution<double>& ref);
ReferenceSolution<double> read_reference(std::istream& in);
ReferenceSolution<double> read_reference_file(const std::string& path);

inline constexpr const char* csv_header = "iter,oracle_calls,objective,gap,avg_gap,dist_sq,gen_grad_norm";
void write_csv(std::ostream& out, const RunTrajectory<double>& traj);

// Writes to a temporary sibling and renames it into place.
void write_file_atomically(const std::string& path, const std::string& contents);

enum class Mode { Run, Sweep, Compare };

// Expands the spec into runs; names are <problem>-<estimator>[-theta<t>]-seed<s>.csv under spec.out.
std::vector<RunPlan> plan_runs(const ExperimentSpec& spec, Mode mode, Index n);

// Executes every planned run (concurrently) and writes one CSV each.
// Progress (resolved step size, reference residual) goes to `log`.
std::vector<std::string> execute(const ExperimentSpec& spec, Mode mode, std::ostream& log);

// Computes x* by proximal gradient descent and writes the reference file to spec.out.
ReferenceSolution<double> compute_reference(const ExperimentSpec& spec, double tol, Index max_iters,
                                            std::ostream& log);

} // namespace vrsg::experiment
