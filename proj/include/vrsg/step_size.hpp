#pragma once
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>

#include "estimator.hpp"

namespace vrsg {

enum class Regime { Convex, StronglyConvex, NonConvex };

/*
 * Closed-form step sizes that carry convergence guarantees for each
 * estimator. `mu` is the strong-convexity constant (used only in the
 * StronglyConvex regime); epoch length and theta are read from `kind`.
 *
 * The convex and strongly convex B-SAGA/B-SVRG rules require theta >= 1;
 * the non-convex ones accept any theta > 0. Plain SGD has no rule.
 */
template <class Scalar = double>
Scalar theory_step_size(const EstimatorKind& kind, Regime regime, Index n, Scalar L, Scalar mu = 0) {
    using std::sqrt;
    if (!(L > 0)) throw std::invalid_argument("theory_step_size: L must be positive");
    if (n < 1) throw std::invalid_argument("theory_step_size: n must be >= 1");
    if (regime == Regime::StronglyConvex && !(mu > 0)) {
        throw std::invalid_argument("theory_step_size: strongly convex regime needs mu > 0");
    }
    const auto nn = static_cast<Scalar>(n);
    const auto m = static_cast<Scalar>(estimator_epoch_len(kind, n));
    const auto theta = static_cast<Scalar>(estimator_theta(kind));

    auto require_theta_ge_one = [&] {
        if (theta < Scalar(1)) {
            throw std::invalid_argument("theory step sizes for convex problems need theta >= 1");
        }
    };

    return std::visit(
        [&](const auto& k) -> Scalar {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Sgd>) {
                throw std::invalid_argument("no theory step size for plain SGD");
            } else if constexpr (std::is_same_v<K, BSaga>) {
                const Scalar root = sqrt(nn * (Scalar(2) * nn + Scalar(1)));
                const Scalar weight = theta <= Scalar(2) ? Scalar(6) / theta : Scalar(6) * (Scalar(1) - Scalar(1) / theta);
                if (regime == Regime::NonConvex) {
                    if (!(theta > 0)) throw std::invalid_argument("theta must be positive");
                    return theta <= Scalar(2) ? theta / (Scalar(2) * L * root)
                                              : Scalar(1) / (Scalar(2) * L * (Scalar(1) - Scalar(1) / theta) * root);
                }
                require_theta_ge_one();
                const Scalar eta = Scalar(1) / (L * (Scalar(1) + weight * root));
                if (regime == Regime::Convex) return eta;
                return std::min(eta, Scalar(1) / (Scalar(4) * mu * nn));
            } else if constexpr (std::is_same_v<K, BSvrg>) {
                if (regime == Regime::NonConvex) {
                    if (!(theta > 0)) throw std::invalid_argument("theta must be positive");
                    const Scalar root = sqrt(Scalar(3) * m * (m + Scalar(1)));
                    const Scalar base = sqrt(Scalar(2)) * theta / (Scalar(2) * L * root);
                    return theta <= Scalar(2) ? base : base / (Scalar(1) - Scalar(1) / theta);
                }
                require_theta_ge_one();
                const Scalar root = sqrt(Scalar(6) * m * (m + Scalar(1)));
                const Scalar weight = theta <= Scalar(2) ? Scalar(3) / theta : Scalar(3) * (Scalar(1) - Scalar(1) / theta);
                const Scalar eta = Scalar(1) / (L * (Scalar(1) + weight * root));
                if (regime == Regime::Convex) return eta;
                return std::min(eta, Scalar(1) / (Scalar(2) * mu));
            } else if constexpr (std::is_same_v<K, Sarah>) {
                const Scalar c = Scalar(4) * sqrt(Scalar(2) * m) + Scalar(1);
                switch (regime) {
                case Regime::Convex: return Scalar(1) / (L * c);
                case Regime::StronglyConvex: return std::min(Scalar(1) / (Scalar(3) * L * c), Scalar(1) / (mu * m));
                case Regime::NonConvex: return Scalar(1) / (L * sqrt(Scalar(2) * m));
                }
            } else {
                const Scalar root = sqrt(Scalar(3) * (nn + Scalar(13)));
                const Scalar c = Scalar(16) * root + Scalar(1);
                switch (regime) {
                case Regime::Convex: return Scalar(1) / (L * c);
                case Regime::StronglyConvex: return std::min(Scalar(1) / (Scalar(3) * L * c), Scalar(1) / (Scalar(4) * mu * nn));
                case Regime::NonConvex: return Scalar(1) / (Scalar(4) * L * root);
                }
            }
            throw std::invalid_argument("unsupported regime");
        },
        kind);
}

} // namespace vrsg
