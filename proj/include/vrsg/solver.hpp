#pragma once
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "estimator.hpp"
#include "objective.hpp"
#include "regularizer.hpp"
#include "rng.hpp"
#include "step_size.hpp"
#include "types.hpp"

namespace vrsg {

struct FixedStep {
    double eta = 0;
};
struct TheoryStep {
    Regime regime = Regime::Convex;
};
using StepSizePolicy = std::variant<FixedStep, TheoryStep>;

template <class Scalar = double>
struct SolverConfig {
    EstimatorKind estimator = Sgd{};
    StepSizePolicy step = FixedStep{};
    Index max_iterations = 0;
    Index record_every = 0; // 0: every n iterations
    std::uint64_t seed = 0;
    std::optional<Vector<Scalar>> x0; // zero when absent
};

template <class Scalar = double>
struct Checkpoint {
    Index iteration = 0;
    std::uint64_t oracle_calls = 0;
    Scalar objective = 0;
    std::optional<Scalar> gap;     // F(x_k) - F*
    std::optional<Scalar> avg_gap; // F(xbar_k) - F*
    std::optional<Scalar> dist_sq; // ||x_k - x*||^2
    Scalar gen_grad_norm = 0;      // ||G_{eta/2}(x_k)||
};

template <class Scalar = double>
struct RunTrajectory {
    std::vector<Checkpoint<Scalar>> checkpoints;
    Vector<Scalar> final_x;
    Vector<Scalar> final_average;
    Scalar step_size = 0;

    Scalar min_gen_grad_norm() const {
        Scalar best = std::numeric_limits<Scalar>::infinity();
        for (const auto& c : checkpoints) best = std::min(best, c.gen_grad_norm);
        return best;
    }

    // Value at a checkpoint drawn uniformly at random (the randomized output
    // rule for non-convex guarantees). Always >= min_gen_grad_norm().
    Scalar sampled_gen_grad_norm(std::uint64_t seed) const {
        Sampler s(seed);
        return checkpoints[static_cast<std::size_t>(s.uniform_index(static_cast<Index>(checkpoints.size())))]
            .gen_grad_norm;
    }
};

template <class Scalar = double>
struct ReferenceSolution {
    Vector<Scalar> x_star;
    Scalar f_star = 0;
    Scalar residual = 0;
    bool converged = false;
    Index iterations = 0;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(Index iteration, const std::string& what)
        : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration) {}
    Index iteration() const { return iteration_; }

private:
    Index iteration_;
};

inline constexpr double divergence_norm = 1e12;

template <class Scalar>
Scalar composite_value(const FiniteSumObjective<Scalar>& f, const Regularizer<Scalar>& g, const Vector<Scalar>& x) {
    return f.value(x) + reg_value(g, x);
}

// G_eta(x) = (x - prox_{eta g}(x - eta grad f(x))) / eta
template <class Scalar>
Vector<Scalar> generalized_gradient(const FiniteSumObjective<Scalar>& f, const Regularizer<Scalar>& g,
                                    const Vector<Scalar>& x, Scalar eta) {
    if (!(eta > 0)) throw std::invalid_argument("generalized_gradient: eta must be positive");
    const Vector<Scalar> grad = f.full_gradient(x);
    return (x - prox(g, (x - eta * grad).eval(), eta)) / eta;
}

template <class Scalar>
Scalar resolve_step_size(const FiniteSumObjective<Scalar>& f, const Regularizer<Scalar>& g,
                         const SolverConfig<Scalar>& config) {
    if (const auto* fixed = std::get_if<FixedStep>(&config.step)) {
        if (!(fixed->eta > 0) || !std::isfinite(fixed->eta)) {
            throw std::invalid_argument("step size must be a positive finite number");
        }
        return static_cast<Scalar>(fixed->eta);
    }
    const auto& theory = std::get<TheoryStep>(config.step);
    return theory_step_size<Scalar>(config.estimator, theory.regime, f.n(), f.lipschitz_bound(),
                                    strong_convexity(g));
}

// One iteration x_{k+1} = prox_{eta g}(x_k - eta * estimate). The estimate is
// written to `estimate` when given.
template <class Scalar>
Vector<Scalar> proximal_step(EstimatorState<Scalar>& state, const Regularizer<Scalar>& g, const Vector<Scalar>& x,
                             Index j, Scalar eta, Vector<Scalar>* estimate = nullptr) {
    Vector<Scalar> v = next_estimate(state, x, j);
    Vector<Scalar> next = prox(g, (x - eta * v).eval(), eta);
    if (estimate) *estimate = std::move(v);
    return next;
}

template <class Scalar>
RunTrajectory<Scalar> run(const FiniteSumObjective<Scalar>& f, const Regularizer<Scalar>& g,
                          const SolverConfig<Scalar>& config, const ReferenceSolution<Scalar>* reference = nullptr) {
    using vec_t = Vector<Scalar>;
    if (config.max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
    const Scalar eta = resolve_step_size(f, g, config);
    const Index stride = config.record_every > 0 ? config.record_every : f.n();

    vec_t x = config.x0 ? *config.x0 : vec_t::Zero(f.dim());
    if (x.size() != f.dim()) throw std::invalid_argument("x0 has the wrong dimension");
    if (reference && reference->x_star.size() != f.dim()) {
        throw std::invalid_argument("reference solution has the wrong dimension");
    }

    EstimatorState<Scalar> state = init_estimator(config.estimator, f, x);
    Sampler sampler(config.seed);

    RunTrajectory<Scalar> traj;
    traj.step_size = eta;
    vec_t average = x;

    auto record = [&](Index k) {
        Checkpoint<Scalar> c;
        c.iteration = k;
        c.oracle_calls = state.oracle_calls;
        c.objective = composite_value(f, g, x);
        if (reference) {
            c.gap = c.objective - reference->f_star;
            c.avg_gap = composite_value(f, g, average) - reference->f_star;
            c.dist_sq = (x - reference->x_star).squaredNorm();
        }
        c.gen_grad_norm = generalized_gradient(f, g, x, eta / Scalar(2)).norm();
        traj.checkpoints.push_back(c);
    };

    record(0);
    for (Index k = 0; k < config.max_iterations; ++k) {
        const Index j = sampler.uniform_index(f.n());
        x = proximal_step(state, g, x, j, eta);
        if (!x.allFinite() || x.norm() > Scalar(divergence_norm)) {
            throw DivergenceError(k + 1, "iterate diverged (step size " + std::to_string(static_cast<double>(eta)) +
                                             " too large?)");
        }
        // mean of x_1..x_{k+1}
        average += (x - average) / static_cast<Scalar>(k + 1);
        if ((k + 1) % stride == 0 || k + 1 == config.max_iterations) record(k + 1);
    }
    traj.final_x = x;
    traj.final_average = average;
    return traj;
}

/*
 * Deterministic proximal gradient descent to high accuracy. Stops once
 * ||G_eta(x)|| <= tol; `eta` defaults to 1/L. A run that exhausts
 * `max_iters` is returned with converged = false.
 */
template <class Scalar>
ReferenceSolution<Scalar> reference_solution(const FiniteSumObjective<Scalar>& f, const Regularizer<Scalar>& g,
                                             Scalar tol, Index max_iters, std::optional<Scalar> eta_opt = {},
                                             std::optional<Vector<Scalar>> x0 = {}) {
    using vec_t = Vector<Scalar>;
    if (!(tol > 0)) throw std::invalid_argument("reference_solution: tol must be positive");
    const Scalar eta = eta_opt ? *eta_opt : Scalar(1) / f.lipschitz_bound();
    if (!(eta > 0)) throw std::invalid_argument("reference_solution: eta must be positive");

    vec_t x = x0 ? *x0 : vec_t::Zero(f.dim());
    if (g.kind == RegularizerKind::NonnegBall) x = prox(g, x, eta);

    ReferenceSolution<Scalar> out;
    for (Index it = 0;; ++it) {
        const vec_t next = prox(g, (x - eta * f.full_gradient(x)).eval(), eta);
        out.residual = (x - next).norm() / eta;
        out.iterations = it;
        if (out.residual <= tol) {
            out.converged = true;
            break;
        }
        if (it >= max_iters) break;
        x = next;
    }
    out.x_star = x;
    out.f_star = composite_value(f, g, x);
    return out;
}

} // namespace vrsg
