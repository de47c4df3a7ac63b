#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <variant>
#include <vector>

#include "estimator.hpp"
#include "objective.hpp"
#include "regularizer.hpp"
#include "rng.hpp"
#include "solver.hpp"
#include "types.hpp"

namespace vrsg {

// Constants of the bounded-MSE and bias properties for each estimator.
// `rho_b` and `nu` only apply to recursively biased estimators, `b1` only to
// memory-biased ones. Entries without a value for a kind stay NaN.
struct BmseConstants {
    static constexpr double unset = std::numeric_limits<double>::quiet_NaN();

    double m1 = unset;
    double m2 = unset;
    double rho_m = unset;
    double rho_f = unset;
    Index m = 1;
    double rho_b = unset;
    double b1 = unset;
    double nu = unset; // infinity for Sarge
};

inline BmseConstants bmse_constants(const EstimatorKind& kind, Index n) {
    const double nn = static_cast<double>(n);
    BmseConstants c;
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Sgd>) {
                throw std::invalid_argument("SGD does not satisfy the bounded-MSE property");
            } else if constexpr (std::is_same_v<K, BSaga>) {
                const double t = k.theta;
                c.m1 = t <= 2 ? (2 * nn + 1) / (t * t) : (2 * nn + 1) * (1 - 1 / t) * (1 - 1 / t);
                c.m2 = 0;
                c.rho_m = 1 / (2 * nn);
                c.rho_f = 1;
                c.m = 1;
                c.b1 = 2 * nn * (2 * nn + 1);
            } else if constexpr (std::is_same_v<K, BSvrg>) {
                const double t = k.theta;
                const double m = static_cast<double>(estimator_epoch_len(kind, n));
                c.m1 = t <= 2 ? 3 * m * (m + 1) / (t * t) : 3 * m * (m + 1) * (1 - 1 / t) * (1 - 1 / t);
                c.m2 = 0;
                c.rho_m = 1;
                c.rho_f = 1;
                c.m = static_cast<Index>(m);
                c.b1 = 3 * m * (m + 1);
            } else if constexpr (std::is_same_v<K, Sarah>) {
                const Index m = estimator_epoch_len(kind, n);
                c.m1 = static_cast<double>(m);
                c.m2 = 0;
                c.rho_m = 1;
                c.rho_f = 1;
                c.m = m;
                c.rho_b = 0;
                c.nu = static_cast<double>(m);
            } else {
                c.m1 = 12;
                c.m2 = 39 / nn;
                c.rho_m = 1 / (4 * nn);
                c.rho_f = 1 / (2 * nn);
                c.m = 1;
                c.rho_b = 1 / nn;
                c.nu = std::numeric_limits<double>::infinity();
            }
        },
        kind);
    return c;
}

// Largest error of central differences against component_gradient over all
// components and coordinates, relative to max(1, |derivative|).
template <class Scalar>
Scalar fd_gradient_check(const FiniteSumObjective<Scalar>& f, const Vector<Scalar>& x, Scalar h) {
    if (!(h > 0)) throw std::invalid_argument("fd_gradient_check: h must be positive");
    Scalar worst(0);
    Vector<Scalar> probe = x;
    for (Index i = 0; i < f.n(); ++i) {
        const Vector<Scalar> grad = f.component_gradient(i, x);
        for (Index c = 0; c < f.dim(); ++c) {
            probe[c] = x[c] + h;
            const Scalar up = f.component_value(i, probe);
            probe[c] = x[c] - h;
            const Scalar down = f.component_value(i, probe);
            probe[c] = x[c];
            const Scalar fd = (up - down) / (Scalar(2) * h);
            worst = std::max(worst, std::abs(fd - grad[c]) / std::max(Scalar(1), std::abs(grad[c])));
        }
    }
    return worst;
}

namespace detail {

template <class Scalar>
bool at_epoch_boundary(const EstimatorState<Scalar>& s) {
    if (!std::holds_alternative<BSvrg>(s.kind) && !std::holds_alternative<Sarah>(s.kind)) return false;
    return s.step_index % estimator_epoch_len(s.kind, s.n()) == 0;
}

} // namespace detail

/*
 * Bias grad f(x_k) - E_k[estimate] predicted from the estimator structure:
 *   memory-biased  (1 - 1/theta)(grad f(x_k) - mean of stored gradients)
 *   Sarah          grad f(x_{k-1}) - v_{k-1}           inside an epoch
 *   Sarge          (1 - 1/n)(grad f(x_{k-1}) - v_{k-1})
 * and zero for SGD and at full-gradient epoch boundaries.
 */
template <class Scalar>
Vector<Scalar> predicted_bias(const EstimatorState<Scalar>& s, const Vector<Scalar>& x_k,
                              const Vector<Scalar>& x_prev, const Vector<Scalar>& est_prev) {
    const auto& f = *s.objective;
    const Vector<Scalar> zero = Vector<Scalar>::Zero(x_k.size());
    if (detail::at_epoch_boundary(s)) return zero;
    return std::visit(
        [&](const auto& k) -> Vector<Scalar> {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Sgd>) {
                return zero;
            } else if constexpr (std::is_same_v<K, BSaga>) {
                return (Scalar(1) - Scalar(1) / static_cast<Scalar>(k.theta)) * (f.full_gradient(x_k) - s.table_mean);
            } else if constexpr (std::is_same_v<K, BSvrg>) {
                return (Scalar(1) - Scalar(1) / static_cast<Scalar>(k.theta)) *
                       (f.full_gradient(x_k) - s.snapshot_full_grad);
            } else if constexpr (std::is_same_v<K, Sarah>) {
                return f.full_gradient(x_prev) - est_prev;
            } else {
                if (!s.anchored) return zero;
                return (Scalar(1) - Scalar(1) / static_cast<Scalar>(s.n())) * (f.full_gradient(x_prev) - est_prev);
            }
        },
        s.kind);
}

// || predicted bias - enumerated bias ||
template <class Scalar>
Scalar bias_identity_residual(const EstimatorState<Scalar>& s, const Vector<Scalar>& x_k,
                              const Vector<Scalar>& x_prev, const Vector<Scalar>& est_prev) {
    const Vector<Scalar> enumerated = s.objective->full_gradient(x_k) - conditional_mean(s, x_k);
    return (predicted_bias(s, x_k, x_prev, est_prev) - enumerated).norm();
}

/*
 * Closed form of the conditional MSE for the memory-biased estimators:
 *   (1/(n theta^2)) sum_i ||grad f_i(x) - stored_i||^2
 *     + (1 - 2/theta) ||grad f(x) - mean_i stored_i||^2
 * stored_i is the table row (BSaga) or grad f_i(snapshot) (BSvrg; the
 * current point at an epoch boundary).
 */
template <class Scalar>
Scalar memory_mse_closed_form(const EstimatorState<Scalar>& s, const Vector<Scalar>& x) {
    const auto& f = *s.objective;
    const Index n = f.n();
    Scalar theta;
    if (const auto* k = std::get_if<BSaga>(&s.kind)) theta = static_cast<Scalar>(k->theta);
    else if (const auto* k = std::get_if<BSvrg>(&s.kind)) theta = static_cast<Scalar>(k->theta);
    else throw std::invalid_argument("memory_mse_closed_form: needs a B-SAGA or B-SVRG state");

    const bool svrg = std::holds_alternative<BSvrg>(s.kind);
    const Vector<Scalar>& anchor = detail::at_epoch_boundary(s) ? x : s.snapshot_point;
    Scalar spread(0);
    Vector<Scalar> stored_mean = Vector<Scalar>::Zero(x.size());
    for (Index i = 0; i < n; ++i) {
        const Vector<Scalar> stored =
            svrg ? f.component_gradient(i, anchor) : Vector<Scalar>(s.grad_table.row(i).transpose());
        spread += (f.component_gradient(i, x) - stored).squaredNorm();
        stored_mean += stored;
    }
    stored_mean /= static_cast<Scalar>(n);
    const Scalar nn = static_cast<Scalar>(n);
    return spread / (nn * theta * theta) +
           (Scalar(1) - Scalar(2) / theta) * (f.full_gradient(x) - stored_mean).squaredNorm();
}

// (1/n) sum_i ||grad f_i(x) - stored_i||^2 for the memory-biased estimators.
template <class Scalar>
Scalar memory_spread(const EstimatorState<Scalar>& s, const Vector<Scalar>& x) {
    const auto& f = *s.objective;
    const bool svrg = std::holds_alternative<BSvrg>(s.kind);
    const Vector<Scalar>& anchor = detail::at_epoch_boundary(s) ? x : s.snapshot_point;
    Scalar spread(0);
    for (Index i = 0; i < f.n(); ++i) {
        const Vector<Scalar> stored =
            svrg ? f.component_gradient(i, anchor) : Vector<Scalar>(s.grad_table.row(i).transpose());
        spread += (f.component_gradient(i, x) - stored).squaredNorm();
    }
    return spread / static_cast<Scalar>(f.n());
}

/*
 * Residual of y - prox(y) in eta * subdifferential of g at prox(y).
 *   Zero        ||y - y+||
 *   L2Squared   ||(y - y+) - eta beta y+||
 *   L1          per coordinate: y+_j != 0 needs (y - y+)_j = eta beta sign(y+_j),
 *               y+_j == 0 needs |(y - y+)_j| <= eta beta; worst violation
 *   NonnegBall  infeasibility of y+ plus the largest positive
 *               <y - y+, z - y+> over `samples` feasible z (corners, 0, and
 *               random points of the set)
 */
template <class Scalar>
Scalar prox_optimality_residual(const Regularizer<Scalar>& g, const Vector<Scalar>& y, Scalar eta,
                                std::uint64_t seed = 0, int samples = 100) {
    const Vector<Scalar> yp = prox(g, y, eta);
    const Vector<Scalar> d = y - yp;
    switch (g.kind) {
    case RegularizerKind::Zero:
        return d.norm();
    case RegularizerKind::L2Squared:
        return (d - eta * g.beta * yp).norm();
    case RegularizerKind::L1: {
        const Scalar t = eta * g.beta;
        Scalar worst(0);
        for (Index j = 0; j < y.size(); ++j) {
            if (yp[j] != Scalar(0)) {
                worst = std::max(worst, std::abs(d[j] - std::copysign(t, yp[j])));
            } else {
                worst = std::max(worst, std::abs(d[j]) - t);
            }
        }
        return std::max(worst, Scalar(0));
    }
    case RegularizerKind::NonnegBall: {
        Scalar worst = std::max(Scalar(0), yp.norm() - Scalar(1));
        if (yp.size() > 0) worst = std::max(worst, -yp.minCoeff());
        Sampler sampler(seed);
        auto check = [&](const Vector<Scalar>& z) { worst = std::max(worst, d.dot(z - yp)); };
        check(Vector<Scalar>::Zero(y.size()));
        for (Index j = 0; j < y.size(); ++j) check(Vector<Scalar>::Unit(y.size(), j));
        for (int s = 0; s < samples; ++s) {
            Vector<Scalar> z(y.size());
            for (Index j = 0; j < z.size(); ++j) z[j] = static_cast<Scalar>(std::abs(sampler.standard_normal()));
            const Scalar r = z.norm();
            if (r > 0) z *= static_cast<Scalar>(sampler.uniform01()) / r;
            check(z);
        }
        return worst;
    }
    }
    return Scalar(0);
}

// Exhaustive enumeration of a short run over every index sequence.
template <class Scalar = double>
struct EnumerationConfig {
    EstimatorKind estimator = Sgd{};
    Regularizer<Scalar> regularizer = Regularizer<Scalar>::zero();
    Scalar eta = 0;
    Index steps = 0;
    Vector<Scalar> x0;
    std::int64_t branch_budget = 1024;
};

/*
 * Exact expectations over the index sequence j_0..j_{T-1}, per step k:
 *   mse           E||v_k - grad f(x_k)||^2
 *   bias_sq       E||E_k v_k - grad f(x_k)||^2
 *   variance      E||v_k - E_k v_k||^2
 *   step_sq       E||x_{k+1} - x_k||^2
 *   drift         E sum_i ||grad f_i(x_{k+1}) - grad f_i(x_k)||^2
 *   memory_spread E (1/n) sum_i ||grad f_i(x_k) - stored_i||^2  (B-SAGA/B-SVRG)
 * together with the largest residual, over every visited node, of the MSE
 * decomposition, the bias identity and (B-SAGA/B-SVRG) the closed-form MSE.
 * Residuals are relative to max(1, magnitude).
 */
template <class Scalar = double>
struct TrajectoryExpectation {
    std::vector<Scalar> mse, bias_sq, variance, step_sq, drift, memory_spread;
    Scalar decomposition_residual = 0;
    Scalar bias_residual = 0;
    Scalar closed_form_residual = 0;
    std::int64_t branches = 0;
};

template <class Scalar>
TrajectoryExpectation<Scalar> trajectory_expectation(const FiniteSumObjective<Scalar>& f,
                                                     const EnumerationConfig<Scalar>& cfg) {
    using vec_t = Vector<Scalar>;
    const Index n = f.n();
    const Index T = cfg.steps;
    if (T < 0) throw std::invalid_argument("trajectory_expectation: steps must be >= 0");
    if (!(cfg.eta > 0)) throw std::invalid_argument("trajectory_expectation: eta must be positive");
    std::int64_t branches = 1;
    for (Index k = 0; k < T; ++k) {
        branches *= n;
        if (branches > cfg.branch_budget) {
            throw std::length_error("trajectory_expectation: n^T exceeds the branch budget");
        }
    }
    const bool memory_biased = std::holds_alternative<BSaga>(cfg.estimator) || std::holds_alternative<BSvrg>(cfg.estimator);

    TrajectoryExpectation<Scalar> out;
    out.branches = branches;
    for (auto* v : {&out.mse, &out.bias_sq, &out.variance, &out.step_sq, &out.drift, &out.memory_spread}) {
        v->assign(static_cast<std::size_t>(T), Scalar(0));
    }
    auto rel = [](Scalar a, Scalar b) { return std::abs(a - b) / std::max(Scalar(1), std::abs(a)); };

    struct Node {
        EstimatorState<Scalar> state;
        vec_t x, x_prev, est_prev;
    };

    const vec_t x0 = cfg.x0.size() ? cfg.x0 : vec_t::Zero(f.dim());
    Node root{init_estimator(cfg.estimator, f, x0), x0, x0, vec_t::Zero(f.dim())};
    if (root.state.prev_estimate.size() == f.dim()) root.est_prev = root.state.prev_estimate;

    const Scalar inv_n = Scalar(1) / static_cast<Scalar>(n);

    auto visit = [&](auto&& self, const Node& node, Index k, Scalar weight) -> void {
        if (k == T) return;
        const vec_t grad = f.full_gradient(node.x);
        const auto k_ = static_cast<std::size_t>(k);

        std::vector<Node> children;
        children.reserve(static_cast<std::size_t>(n));
        vec_t mean = vec_t::Zero(f.dim());
        std::vector<vec_t> estimates;
        for (Index j = 0; j < n; ++j) {
            Node child{node.state, {}, node.x, {}};
            vec_t v;
            child.x = proximal_step(child.state, cfg.regularizer, node.x, j, cfg.eta, &v);
            child.est_prev = v;
            mean += v;
            estimates.push_back(std::move(v));
            children.push_back(std::move(child));
        }
        mean *= inv_n;

        Scalar cond_mse(0), cond_var(0), cond_step(0), cond_drift(0);
        for (Index j = 0; j < n; ++j) {
            const auto& v = estimates[static_cast<std::size_t>(j)];
            cond_mse += (v - grad).squaredNorm();
            cond_var += (v - mean).squaredNorm();
            const auto& xn = children[static_cast<std::size_t>(j)].x;
            cond_step += (xn - node.x).squaredNorm();
            for (Index i = 0; i < n; ++i) {
                cond_drift += (f.component_gradient(i, xn) - f.component_gradient(i, node.x)).squaredNorm();
            }
        }
        cond_mse *= inv_n;
        cond_var *= inv_n;
        cond_step *= inv_n;
        cond_drift *= inv_n;
        const Scalar cond_bias_sq = (mean - grad).squaredNorm();

        out.mse[k_] += weight * cond_mse;
        out.bias_sq[k_] += weight * cond_bias_sq;
        out.variance[k_] += weight * cond_var;
        out.step_sq[k_] += weight * cond_step;
        out.drift[k_] += weight * cond_drift;

        out.decomposition_residual =
            std::max(out.decomposition_residual, rel(cond_mse, cond_bias_sq + cond_var));
        const vec_t enumerated_bias = grad - mean;
        const vec_t predicted = predicted_bias(node.state, node.x, node.x_prev, node.est_prev);
        out.bias_residual = std::max(out.bias_residual,
                                     (predicted - enumerated_bias).norm() / std::max(Scalar(1), enumerated_bias.norm()));
        if (memory_biased) {
            out.memory_spread[k_] += weight * memory_spread(node.state, node.x);
            out.closed_form_residual =
                std::max(out.closed_form_residual, rel(cond_mse, memory_mse_closed_form(node.state, node.x)));
        }
        for (const auto& child : children) self(self, child, k + 1, weight * inv_n);
    };
    visit(visit, root, 0, Scalar(1));
    return out;
}

/*
 * Slack of the SARAH within-epoch bound, minimized over (possibly truncated)
 * epochs:
 *   (m/n) sum_epoch drift_k - sum_epoch mse_k
 * Nonnegative when the bound holds.
 */
template <class Scalar>
Scalar sarah_epoch_bound_slack(const TrajectoryExpectation<Scalar>& e, Index n, Index m) {
    Scalar worst = std::numeric_limits<Scalar>::infinity();
    const auto T = static_cast<Index>(e.mse.size());
    for (Index start = 0; start < T; start += m) {
        Scalar lhs(0), rhs(0);
        for (Index k = start; k < std::min(T, start + m); ++k) {
            lhs += e.mse[static_cast<std::size_t>(k)];
            rhs += e.drift[static_cast<std::size_t>(k)];
        }
        worst = std::min(worst, static_cast<Scalar>(m) / static_cast<Scalar>(n) * rhs - lhs);
    }
    return worst;
}

/*
 * One-step recursion behind the B-SAGA bounded-MSE constants, with
 *   M_k = c * memory_spread_k,  c = 1/theta^2 (theta <= 2) or (1 - 1/theta)^2:
 *   mse_k <= M_k
 *   M_k   <= (1 - rho_M) M_{k-1} + (M_1/n) drift_{k-1}   for k >= 1
 * Returns the smallest slack over both inequalities and all steps.
 */
template <class Scalar>
Scalar saga_bmse_slack(const TrajectoryExpectation<Scalar>& e, Index n, double theta) {
    const BmseConstants c = bmse_constants(BSaga{theta}, n);
    const Scalar scale = theta <= 2 ? Scalar(1 / (theta * theta)) : Scalar((1 - 1 / theta) * (1 - 1 / theta));
    Scalar worst = std::numeric_limits<Scalar>::infinity();
    for (std::size_t k = 0; k < e.mse.size(); ++k) {
        const Scalar mk = scale * e.memory_spread[k];
        worst = std::min(worst, mk - e.mse[k]);
        if (k > 0) {
            const Scalar prev = scale * e.memory_spread[k - 1];
            const Scalar bound = Scalar(1 - c.rho_m) * prev + Scalar(c.m1) / static_cast<Scalar>(n) * e.drift[k - 1];
            worst = std::min(worst, bound - mk);
        }
    }
    return worst;
}

} // namespace vrsg
