#pragma once
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>

#include "types.hpp"

namespace vrsg {

/*
 * Portable sampling stream.
 *
 * Every draw is derived from std::mt19937_64, whose output sequence is fixed
 * by the C++ standard. The std:: distributions are implementation-defined, so
 * they are not used:
 *
 *   uniform_index(n): Lemire's multiply-shift with rejection. Draw a 64-bit
 *       word w, form the 128-bit product w*n, reject while the low word is
 *       below (2^64 - n) mod n, return the high word.
 *   uniform01():      (w >> 11) * 2^-53, in [0, 1).
 *   standard_normal(): Box-Muller cosine branch from two consecutive uniforms
 *       u1, u2: sqrt(-2 log(1 - u1)) * cos(2 pi u2). One normal per two words.
 *
 * Any implementation of these three rules reproduces the same index stream
 * and starting points bit-for-bit.
 */
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : engine_(seed) {}

    Index uniform_index(Index n) {
        if (n <= 0) throw std::invalid_argument("uniform_index: n must be positive");
        const auto range = static_cast<std::uint64_t>(n);
        auto product = static_cast<unsigned __int128>(engine_()) * range;
        auto low = static_cast<std::uint64_t>(product);
        if (low < range) {
            const std::uint64_t threshold = (0 - range) % range;
            while (low < threshold) {
                product = static_cast<unsigned __int128>(engine_()) * range;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<Index>(product >> 64);
    }

    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double standard_normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <class Scalar>
    Vector<Scalar> normal_vector(Index p) {
        Vector<Scalar> v(p);
        for (Index j = 0; j < p; ++j) v[j] = static_cast<Scalar>(standard_normal());
        return v;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace vrsg
