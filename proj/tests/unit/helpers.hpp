#pragma once
#include <initializer_list>
#include <vector>

#include "vrsg/dataset.hpp"
#include "vrsg/rng.hpp"

namespace vrsg::test {

// Dense rows -> sparse dataset (zeros dropped).
inline LabeledDataset<double> dataset_from(std::initializer_list<std::initializer_list<double>> rows,
                                           std::initializer_list<double> labels) {
    std::vector<Eigen::Triplet<double>> t;
    Index r = 0, p = 0;
    for (const auto& row : rows) {
        Index c = 0;
        for (double v : row) {
            if (v != 0.0) t.emplace_back(r, c, v);
            ++c;
        }
        p = std::max(p, c);
        ++r;
    }
    LabeledDataset<double> d;
    d.features.resize(r, p);
    d.features.setFromTriplets(t.begin(), t.end());
    d.labels.resize(static_cast<Index>(labels.size()));
    Index i = 0;
    for (double l : labels) d.labels[i++] = l;
    return d;
}

inline Vector<double> vec(std::initializer_list<double> xs) {
    Vector<double> v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

// Dense Gaussian rows with Gaussian labels (not binarized); small audits use
// generic least-squares components.
inline LabeledDataset<double> random_least_squares(Index n, Index p, Sampler& s) {
    std::vector<Eigen::Triplet<double>> t;
    LabeledDataset<double> d;
    d.labels.resize(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < p; ++j) t.emplace_back(i, j, s.standard_normal());
        d.labels[i] = s.standard_normal();
    }
    d.features.resize(n, p);
    d.features.setFromTriplets(t.begin(), t.end());
    return d;
}

} // namespace vrsg::test
