#pragma once
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "types.hpp"

namespace vrsg {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Sparse samples h_i (rows of `features`) with binary labels l_i in {-1,+1}.
template <class Scalar = double>
struct LabeledDataset {
    SparseRows<Scalar> features;
    Vector<Scalar> labels;

    Index n_samples() const { return features.rows(); }
    Index n_features() const { return features.cols(); }
};

// {0,1}- and {1,2}-labeled files map onto {-1,+1}.
template <class Scalar>
constexpr Scalar binarize_label(Scalar raw) {
    return raw > Scalar(0) ? Scalar(1) : Scalar(-1);
}

namespace detail {

inline bool parse_real(std::string_view tok, double& out) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    if (tok.empty()) return false;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

inline bool parse_index(std::string_view tok, long long& out) {
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, out);
    return ec == std::errc{} && ptr == end && !tok.empty();
}

} // namespace detail

// Reads `<label> <idx>:<val> ...` lines; indices are 1-based in the file and
// 0-based in memory. Blank lines are skipped.
template <class Scalar = double>
LabeledDataset<Scalar> parse_libsvm(std::istream& in) {
    using Triplet = Eigen::Triplet<Scalar>;
    std::vector<Triplet> triplets;
    std::vector<Scalar> labels;
    long long max_index = 0;

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::pair<long long, double>> row;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream tokens(line);
        std::string tok;
        if (!(tokens >> tok)) continue;

        double raw_label = 0;
        if (!detail::parse_real(tok, raw_label)) {
            throw ParseError(line_no, "malformed label '" + tok + "'");
        }
        row.clear();
        while (tokens >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) {
                throw ParseError(line_no, "expected <index>:<value>, got '" + tok + "'");
            }
            long long idx = 0;
            double val = 0;
            const std::string_view view(tok);
            if (!detail::parse_index(view.substr(0, colon), idx) || idx < 1) {
                throw ParseError(line_no, "malformed feature index in '" + tok + "'");
            }
            if (!detail::parse_real(view.substr(colon + 1), val)) {
                throw ParseError(line_no, "malformed feature value in '" + tok + "'");
            }
            row.emplace_back(idx, val);
        }
        std::sort(row.begin(), row.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t k = 1; k < row.size(); ++k) {
            if (row[k].first == row[k - 1].first) {
                throw ParseError(line_no, "duplicate feature index " + std::to_string(row[k].first));
            }
        }
        const auto r = static_cast<Index>(labels.size());
        for (const auto& [idx, val] : row) {
            max_index = std::max(max_index, idx);
            if (val != 0.0) triplets.emplace_back(r, static_cast<Index>(idx - 1), static_cast<Scalar>(val));
        }
        labels.push_back(binarize_label(static_cast<Scalar>(raw_label)));
    }
    if (labels.empty()) throw ParseError(line_no, "no samples in input");

    LabeledDataset<Scalar> d;
    d.features.resize(static_cast<Index>(labels.size()), static_cast<Index>(max_index));
    d.features.setFromTriplets(triplets.begin(), triplets.end());
    d.features.makeCompressed();
    d.labels = Eigen::Map<const Vector<Scalar>>(labels.data(), static_cast<Index>(labels.size()));
    return d;
}

template <class Scalar = double>
LabeledDataset<Scalar> parse_libsvm(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_libsvm<Scalar>(in);
}

template <class Scalar = double>
LabeledDataset<Scalar> load_libsvm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open data file '" + path + "'");
    return parse_libsvm<Scalar>(in);
}

// Full precision, so that write -> parse reproduces every stored value.
template <class Scalar>
void write_libsvm(std::ostream& out, const LabeledDataset<Scalar>& d) {
    char buf[64];
    for (Index i = 0; i < d.n_samples(); ++i) {
        out << (d.labels[i] > 0 ? "+1" : "-1");
        for (typename SparseRows<Scalar>::InnerIterator it(d.features, i); it; ++it) {
            std::snprintf(buf, sizeof buf, " %lld:%.17g",
                          static_cast<long long>(it.col() + 1), static_cast<double>(it.value()));
            out << buf;
        }
        out << '\n';
    }
}

// Divides each feature column by its largest magnitude; all-zero columns are
// left alone. Sparsity is preserved.
template <class Scalar>
LabeledDataset<Scalar> rescale_features(LabeledDataset<Scalar> d) {
    Vector<Scalar> col_max = Vector<Scalar>::Zero(d.n_features());
    for (Index i = 0; i < d.features.outerSize(); ++i) {
        for (typename SparseRows<Scalar>::InnerIterator it(d.features, i); it; ++it) {
            col_max[it.col()] = std::max(col_max[it.col()], std::abs(it.value()));
        }
    }
    for (Index i = 0; i < d.features.outerSize(); ++i) {
        for (typename SparseRows<Scalar>::InnerIterator it(d.features, i); it; ++it) {
            if (col_max[it.col()] > Scalar(0)) it.valueRef() /= col_max[it.col()];
        }
    }
    return d;
}

} // namespace vrsg
