// SPDX-License-Identifier: Apache-2.0
#include "onebit/rng.hpp"

#include <cmath>
#include <numbers>

namespace onebit {

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

double RandomSource::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomSource::gaussian() {
    // u1 in (0, 1] keeps the log finite; u2 in [0, 1).
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

Complex RandomSource::complex_gaussian(double variance) {
    const double scale = std::sqrt(variance / 2.0);
    const double re = gaussian();
    const double im = gaussian();
    return Complex(scale * re, scale * im);
}

Complex RandomSource::unit_circle() {
    const double phase = 2.0 * std::numbers::pi * uniform();
    return Complex(std::cos(phase), std::sin(phase));
}

Complex RandomSource::qpsk_symbol() {
    static constexpr double kInvSqrt2 = 0.7071067811865475244;
    const int idx = uniform_int(4);
    const double re = (idx & 1) ? -kInvSqrt2 : kInvSqrt2;
    const double im = (idx & 2) ? -kInvSqrt2 : kInvSqrt2;
    return Complex(re, im);
}

int RandomSource::uniform_int(int bound) {
    if (bound <= 0) throw InvalidArgumentError("uniform_int: bound must be positive");
    return static_cast<int>(uniform() * static_cast<double>(bound));
}

std::vector<int> RandomSource::sample_without_replacement(int n, int k) {
    if (k < 0 || n < 0 || k > n)
        throw InvalidArgumentError("sample_without_replacement: need 0 <= k <= n");
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const int j = i + uniform_int(n - i);
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        out.push_back(pool[static_cast<std::size_t>(i)]);
    }
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sweep_index,
                          std::uint64_t run_index) {
    std::uint64_t h = splitmix64(master ^ 0xA0761D6478BD642FULL);
    h = splitmix64(h ^ (sweep_index + 1));
    h = splitmix64(h ^ ((run_index + 1) << 1));
    return h;
}

}  // namespace onebit
