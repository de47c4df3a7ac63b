#pragma once
#include <cmath>
#include <limits>
#include <stdexcept>

#include "types.hpp"

namespace vrsg {

enum class RegularizerKind {
    Zero,
    L2Squared,  // (beta/2) ||x||^2
    L1,         // beta ||x||_1
    NonnegBall, // indicator of {x : ||x|| <= 1, x >= 0}
};

template <class Scalar = double>
struct Regularizer {
    RegularizerKind kind = RegularizerKind::Zero;
    Scalar beta = 0;

    static Regularizer zero() { return {RegularizerKind::Zero, 0}; }
    static Regularizer l2_squared(Scalar beta) { return {RegularizerKind::L2Squared, checked(beta)}; }
    static Regularizer l1(Scalar beta) { return {RegularizerKind::L1, checked(beta)}; }
    static Regularizer nonneg_ball() { return {RegularizerKind::NonnegBall, 0}; }

private:
    static Scalar checked(Scalar beta) {
        if (!(beta >= Scalar(0))) throw std::invalid_argument("regularizer weight must be >= 0");
        return beta;
    }
};

// Slack on the indicator so reprojected iterates stay feasible.
template <class Scalar>
inline constexpr Scalar feasibility_tolerance = Scalar(1e-12);

template <class Scalar, class Derived>
Scalar reg_value(const Regularizer<Scalar>& g, const Eigen::MatrixBase<Derived>& x) {
    switch (g.kind) {
    case RegularizerKind::Zero:
        return Scalar(0);
    case RegularizerKind::L2Squared:
        return g.beta / Scalar(2) * x.squaredNorm();
    case RegularizerKind::L1:
        return g.beta * x.template lpNorm<1>();
    case RegularizerKind::NonnegBall: {
        const bool inside = x.norm() <= Scalar(1) + feasibility_tolerance<Scalar> &&
                            (x.size() == 0 || x.minCoeff() >= -feasibility_tolerance<Scalar>);
        return inside ? Scalar(0) : std::numeric_limits<Scalar>::infinity();
    }
    }
    return Scalar(0);
}

// argmin_x eta*g(x) + 0.5 ||x - y||^2
template <class Scalar, class Derived>
Vector<Scalar> prox(const Regularizer<Scalar>& g, const Eigen::MatrixBase<Derived>& y, Scalar eta) {
    if (!(eta > Scalar(0))) throw std::invalid_argument("prox: step must be positive");
    switch (g.kind) {
    case RegularizerKind::Zero:
        return y;
    case RegularizerKind::L2Squared:
        return y / (Scalar(1) + eta * g.beta);
    case RegularizerKind::L1: {
        const Scalar t = eta * g.beta;
        return y.unaryExpr([t](Scalar v) {
            const Scalar mag = std::abs(v) - t;
            return mag > Scalar(0) ? std::copysign(mag, v) : Scalar(0);
        });
    }
    case RegularizerKind::NonnegBall: {
        // Clipping to the orthant never increases the norm, so the radial
        // step that follows lands on the exact projection onto the
        // intersection.
        Vector<Scalar> z = y.cwiseMax(Scalar(0));
        const Scalar r = z.norm();
        if (r > Scalar(1)) z /= r;
        return z;
    }
    }
    return y;
}

template <class Scalar>
Scalar strong_convexity(const Regularizer<Scalar>& g) {
    return g.kind == RegularizerKind::L2Squared ? g.beta : Scalar(0);
}

} // namespace vrsg
