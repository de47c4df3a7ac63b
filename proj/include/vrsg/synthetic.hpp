#pragma once
#include <cstdint>
#include <vector>

#include "dataset.hpp"
#include "rng.hpp"

namespace vrsg {

/*
 * Dense synthetic classification data: features i.i.d. uniform on
 * [-scale, scale], labels sign(h_i^T w) for a hidden standard-normal w,
 * with each label flipped with probability `flip`.
 */
template <class Scalar = double>
LabeledDataset<Scalar> make_synthetic(Index n, Index p, std::uint64_t seed, double scale = 1.0, double flip = 0.1) {
    Sampler s(seed);
    const Vector<double> w = s.normal_vector<double>(p);
    std::vector<Eigen::Triplet<Scalar>> triplets;
    LabeledDataset<Scalar> d;
    d.labels.resize(n);
    for (Index i = 0; i < n; ++i) {
        double margin = 0;
        for (Index j = 0; j < p; ++j) {
            const double v = scale * (2.0 * s.uniform01() - 1.0);
            margin += v * w[j];
            if (v != 0.0) triplets.emplace_back(i, j, static_cast<Scalar>(v));
        }
        double label = margin >= 0 ? 1.0 : -1.0;
        if (s.uniform01() < flip) label = -label;
        d.labels[i] = static_cast<Scalar>(label);
    }
    d.features.resize(n, p);
    d.features.setFromTriplets(triplets.begin(), triplets.end());
    d.features.makeCompressed();
    return d;
}

} // namespace vrsg
