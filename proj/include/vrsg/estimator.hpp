#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "objective.hpp"
#include "types.hpp"

namespace vrsg {

/*
 * Gradient estimators for the proximal stochastic gradient iteration.
 *
 *   Sgd    grad f_j(x_k)
 *   BSaga  (1/theta)(grad f_j(x_k) - T[j]) + mean(T), then T[j] <- grad f_j(x_k)
 *          theta = 1 is SAGA, theta = n is SAG.
 *   BSvrg  (1/theta)(grad f_j(x_k) - grad f_j(snap)) + grad f(snap),
 *          snapshot refreshed to the current iterate every `epoch_len` steps.
 *   Sarah  v_k = grad f_j(x_k) - grad f_j(x_{k-1}) + v_{k-1}, restarted from a
 *          full gradient every `epoch_len` steps.
 *   Sarge  v_k = grad f_j(x_k) - psi[j] + mean(psi)
 *                - (1 - 1/n)(grad f_j(x_{k-1}) - v_{k-1}),
 *          then psi[j] <- grad f_j(x_k) - (1 - 1/n) grad f_j(x_{k-1}).
 *
 * An epoch length of 0 means "use n".
 */
struct Sgd {};
struct BSaga {
    double theta = 1.0;
};
struct BSvrg {
    double theta = 1.0;
    Index epoch_len = 0;
};
struct Sarah {
    Index epoch_len = 0;
};
struct Sarge {
    // Seed v_{-1} with grad f_{j_0}(x_0) instead of a full gradient.
    bool cold_start = false;
};

using EstimatorKind = std::variant<Sgd, BSaga, BSvrg, Sarah, Sarge>;

inline std::string estimator_name(const EstimatorKind& kind) {
    return std::visit(
        [](const auto& k) -> std::string {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Sgd>) return "sgd";
            else if constexpr (std::is_same_v<K, BSaga>) return "bsaga";
            else if constexpr (std::is_same_v<K, BSvrg>) return "bsvrg";
            else if constexpr (std::is_same_v<K, Sarah>) return "sarah";
            else return "sarge";
        },
        kind);
}

// Bias parameter, 1 for estimators without one.
inline double estimator_theta(const EstimatorKind& kind) {
    if (const auto* k = std::get_if<BSaga>(&kind)) return k->theta;
    if (const auto* k = std::get_if<BSvrg>(&kind)) return k->theta;
    return 1.0;
}

// Resolved epoch length for BSvrg/Sarah, 1 otherwise.
inline Index estimator_epoch_len(const EstimatorKind& kind, Index n) {
    Index m = 1;
    if (const auto* k = std::get_if<BSvrg>(&kind)) m = k->epoch_len > 0 ? k->epoch_len : n;
    if (const auto* k = std::get_if<Sarah>(&kind)) m = k->epoch_len > 0 ? k->epoch_len : n;
    return m;
}

template <class Scalar = double>
struct EstimatorState {
    using vec_t = Vector<Scalar>;

    EstimatorKind kind;
    const FiniteSumObjective<Scalar>* objective = nullptr;

    // BSaga: stored component gradients. Sarge: the psi table.
    RowMatrix<Scalar> grad_table;
    vec_t table_mean;

    vec_t snapshot_point;
    vec_t snapshot_full_grad;

    vec_t prev_point;
    vec_t prev_estimate;
    bool anchored = false; // Sarge: prev_estimate holds v_{-1}

    std::int64_t step_index = 0;
    std::uint64_t oracle_calls = 0;

    Index n() const { return objective->n(); }

    // Recomputes the running mean from the table rows.
    void refresh_table_mean() {
        table_mean = grad_table.colwise().mean().transpose();
    }
};

namespace detail {

template <class Scalar>
void validate_kind(const EstimatorKind& kind) {
    std::visit(
        [](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, BSaga> || std::is_same_v<K, BSvrg>) {
                if (!(k.theta > 0)) throw std::invalid_argument("theta must be positive");
            }
            if constexpr (std::is_same_v<K, BSvrg> || std::is_same_v<K, Sarah>) {
                if (k.epoch_len < 0) throw std::invalid_argument("epoch length must be >= 1");
            }
        },
        kind);
}

} // namespace detail

template <class Scalar>
EstimatorState<Scalar> init_estimator(const EstimatorKind& kind, const FiniteSumObjective<Scalar>& obj,
                                      const Vector<Scalar>& x0) {
    using vec_t = Vector<Scalar>;
    detail::validate_kind<Scalar>(kind);
    if (x0.size() != obj.dim()) throw std::invalid_argument("init_estimator: dimension mismatch");

    EstimatorState<Scalar> s;
    s.kind = kind;
    s.objective = &obj;
    const Index n = obj.n();
    const Index p = obj.dim();
    const auto full_pass = static_cast<std::uint64_t>(n);

    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, BSaga>) {
                s.grad_table = RowMatrix<Scalar>::Zero(n, p);
                s.table_mean = vec_t::Zero(p);
            } else if constexpr (std::is_same_v<K, BSvrg> || std::is_same_v<K, Sarah>) {
                s.snapshot_point = x0;
                s.snapshot_full_grad = obj.full_gradient(x0);
                s.oracle_calls = full_pass;
                s.prev_point = x0;
                s.prev_estimate = s.snapshot_full_grad;
            } else if constexpr (std::is_same_v<K, Sarge>) {
                s.grad_table = RowMatrix<Scalar>::Zero(n, p);
                s.table_mean = vec_t::Zero(p);
                s.prev_point = x0;
                if (!k.cold_start) {
                    s.prev_estimate = obj.full_gradient(x0);
                    s.oracle_calls = full_pass;
                    s.anchored = true;
                } else {
                    s.prev_estimate = vec_t::Zero(p);
                }
            }
        },
        kind);
    return s;
}

/*
 * Produces the estimate at x_k for sampled index j and advances the state.
 * Oracle calls charged: Sgd/BSaga 1; BSvrg/Sarah 2 inside an epoch and n at
 * each epoch boundary after the first (init already paid for step 0); Sarge
 * 2 (1 on a cold-start step 0).
 */
template <class Scalar>
Vector<Scalar> next_estimate(EstimatorState<Scalar>& s, const Vector<Scalar>& x, Index j) {
    using vec_t = Vector<Scalar>;
    const auto& obj = *s.objective;
    const Index n = obj.n();
    if (j < 0 || j >= n) throw std::out_of_range("sample index outside [0, n)");
    if (x.size() != obj.dim()) throw std::invalid_argument("next_estimate: dimension mismatch");

    vec_t v = std::visit(
        [&](const auto& k) -> vec_t {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Sgd>) {
                s.oracle_calls += 1;
                return obj.component_gradient(j, x);
            } else if constexpr (std::is_same_v<K, BSaga>) {
                vec_t g = obj.component_gradient(j, x);
                s.oracle_calls += 1;
                const vec_t delta = g - s.grad_table.row(j).transpose();
                vec_t out = delta / static_cast<Scalar>(k.theta) + s.table_mean;
                s.table_mean += delta / static_cast<Scalar>(n);
                s.grad_table.row(j) = g.transpose();
                return out;
            } else if constexpr (std::is_same_v<K, BSvrg>) {
                const Index m = estimator_epoch_len(s.kind, n);
                if (s.step_index % m == 0) {
                    if (!(s.step_index == 0 && s.snapshot_point == x)) {
                        s.snapshot_point = x;
                        s.snapshot_full_grad = obj.full_gradient(x);
                        s.oracle_calls += static_cast<std::uint64_t>(n);
                    }
                    return s.snapshot_full_grad;
                }
                vec_t out = s.snapshot_full_grad;
                const auto w = Scalar(1) / static_cast<Scalar>(k.theta);
                obj.add_component_gradient(j, x, w, out);
                obj.add_component_gradient(j, s.snapshot_point, -w, out);
                s.oracle_calls += 2;
                return out;
            } else if constexpr (std::is_same_v<K, Sarah>) {
                const Index m = estimator_epoch_len(s.kind, n);
                if (s.step_index % m == 0) {
                    if (!(s.step_index == 0 && s.snapshot_point == x)) {
                        s.snapshot_full_grad = obj.full_gradient(x);
                        s.oracle_calls += static_cast<std::uint64_t>(n);
                    }
                    s.snapshot_point = x;
                    s.prev_point = x;
                    s.prev_estimate = s.snapshot_full_grad;
                    return s.prev_estimate;
                }
                vec_t out = s.prev_estimate;
                obj.add_component_gradient(j, x, Scalar(1), out);
                obj.add_component_gradient(j, s.prev_point, Scalar(-1), out);
                s.oracle_calls += 2;
                s.prev_estimate = out;
                s.prev_point = x;
                return out;
            } else {
                const Scalar c = Scalar(1) - Scalar(1) / static_cast<Scalar>(n);
                vec_t cur = obj.component_gradient(j, x);
                vec_t prev;
                if (!s.anchored) {
                    // Cold start: v_{-1} = grad f_{j_0}(x_0) and x_{-1} = x_0.
                    s.prev_point = x;
                    s.prev_estimate = cur;
                    s.anchored = true;
                    prev = cur;
                    s.oracle_calls += 1;
                } else {
                    prev = obj.component_gradient(j, s.prev_point);
                    s.oracle_calls += 2;
                }
                vec_t out = cur - s.grad_table.row(j).transpose() + s.table_mean -
                            c * (prev - s.prev_estimate);
                const vec_t psi_new = cur - c * prev;
                s.table_mean += (psi_new - s.grad_table.row(j).transpose()) / static_cast<Scalar>(n);
                s.grad_table.row(j) = psi_new.transpose();
                s.prev_estimate = out;
                s.prev_point = x;
                return out;
            }
        },
        s.kind);
    ++s.step_index;
    return v;
}

// All n equally likely estimates at x, each from its own copy of the state.
template <class Scalar>
std::vector<Vector<Scalar>> enumerate_estimates(const EstimatorState<Scalar>& s, const Vector<Scalar>& x) {
    std::vector<Vector<Scalar>> out;
    out.reserve(static_cast<std::size_t>(s.n()));
    for (Index j = 0; j < s.n(); ++j) {
        EstimatorState<Scalar> copy = s;
        out.push_back(next_estimate(copy, x, j));
    }
    return out;
}

template <class Scalar>
Vector<Scalar> conditional_mean(const EstimatorState<Scalar>& s, const Vector<Scalar>& x) {
    Vector<Scalar> acc = Vector<Scalar>::Zero(x.size());
    for (const auto& v : enumerate_estimates(s, x)) acc += v;
    return acc / static_cast<Scalar>(s.n());
}

template <class Scalar>
Scalar conditional_mse(const EstimatorState<Scalar>& s, const Vector<Scalar>& x) {
    const Vector<Scalar> grad = s.objective->full_gradient(x);
    Scalar acc(0);
    for (const auto& v : enumerate_estimates(s, x)) acc += (v - grad).squaredNorm();
    return acc / static_cast<Scalar>(s.n());
}

} // namespace vrsg
