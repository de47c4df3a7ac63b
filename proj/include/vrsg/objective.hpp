#pragma once
#include <algorithm>
#include <stdexcept>
#include <string>

#include "dataset.hpp"
#include "types.hpp"

namespace vrsg {

enum class LossKind {
    LeastSquares, // f_i(x) = (h_i^T x - l_i)^2
    NegSquare,    // f_i(x) = -(h_i^T x)^2
};

/*
 * Smooth part f(x) = (1/n) sum_i f_i(x) over a dataset the caller keeps
 * alive. Both losses have rank-one component Hessians +-2 h_i h_i^T, so the
 * per-component Lipschitz constant is max_i 2 ||h_i||^2.
 *
 * Gradients come back dense; the sparse row only limits which coordinates
 * are touched.
 */
template <class Scalar = double>
class FiniteSumObjective {
public:
    using vec_t = Vector<Scalar>;

    FiniteSumObjective(LossKind kind, const LabeledDataset<Scalar>& data)
        : kind_(kind), data_(&data) {
        for (Index i = 0; i < n(); ++i) {
            lipschitz_ = std::max(lipschitz_, Scalar(2) * data.features.row(i).squaredNorm());
        }
    }
    // The dataset is referenced, not copied.
    FiniteSumObjective(LossKind, const LabeledDataset<Scalar>&&) = delete;

    LossKind kind() const { return kind_; }
    const LabeledDataset<Scalar>& data() const { return *data_; }
    Index n() const { return data_->n_samples(); }
    Index dim() const { return data_->n_features(); }

    Scalar margin(Index i, const vec_t& x) const {
        check_index(i);
        check_dim(x);
        Scalar acc(0);
        for (typename SparseRows<Scalar>::InnerIterator it(data_->features, i); it; ++it) {
            acc += it.value() * x[it.col()];
        }
        return acc;
    }

    Scalar component_value(Index i, const vec_t& x) const {
        const Scalar a = margin(i, x);
        if (kind_ == LossKind::LeastSquares) {
            const Scalar r = a - data_->labels[i];
            return r * r;
        }
        return -a * a;
    }

    // d f_i / d (h_i^T x)
    Scalar component_slope(Index i, const vec_t& x) const {
        const Scalar a = margin(i, x);
        return kind_ == LossKind::LeastSquares ? Scalar(2) * (a - data_->labels[i])
                                               : Scalar(-2) * a;
    }

    // out += scale * grad f_i(x)
    void add_component_gradient(Index i, const vec_t& x, Scalar scale, vec_t& out) const {
        const Scalar s = scale * component_slope(i, x);
        for (typename SparseRows<Scalar>::InnerIterator it(data_->features, i); it; ++it) {
            out[it.col()] += s * it.value();
        }
    }

    vec_t component_gradient(Index i, const vec_t& x) const {
        vec_t g = vec_t::Zero(dim());
        add_component_gradient(i, x, Scalar(1), g);
        return g;
    }

    vec_t full_gradient(const vec_t& x) const {
        vec_t g = vec_t::Zero(dim());
        const Scalar w = Scalar(1) / static_cast<Scalar>(n());
        for (Index i = 0; i < n(); ++i) add_component_gradient(i, x, w, g);
        return g;
    }

    Scalar value(const vec_t& x) const {
        Scalar acc(0);
        for (Index i = 0; i < n(); ++i) acc += component_value(i, x);
        return acc / static_cast<Scalar>(n());
    }

    Scalar lipschitz_bound() const {
        if (!(lipschitz_ > Scalar(0))) {
            throw std::domain_error("lipschitz_bound: dataset has no nonzero feature");
        }
        return lipschitz_;
    }

private:
    void check_index(Index i) const {
        if (i < 0 || i >= n()) {
            throw std::out_of_range("component index " + std::to_string(i) + " outside [0, " +
                                    std::to_string(n()) + ")");
        }
    }
    void check_dim(const vec_t& x) const {
        if (x.size() != dim()) {
            throw std::invalid_argument("point has dimension " + std::to_string(x.size()) +
                                        ", expected " + std::to_string(dim()));
        }
    }

    LossKind kind_;
    const LabeledDataset<Scalar>* data_;
    Scalar lipschitz_{0};
};

} // namespace vrsg
