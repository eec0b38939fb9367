// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "onebit/types.hpp"

namespace onebit {

/// Deterministic random stream. The same seed yields a bit-identical draw
/// sequence on every platform: the engine is mt19937_64 (fully specified by
/// the standard) and all distributions are derived from it with explicit
/// arithmetic rather than std::*_distribution, whose output is
/// implementation-defined.
///
/// Instances are single-owner: one stream per Monte-Carlo worker.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    /// Uniform draw in [0, 1) with 53-bit resolution.
    double uniform();

    /// Standard real Gaussian via Box-Muller; consumes two uniforms per call.
    double gaussian();

    /// Circularly-symmetric complex Gaussian CN(0, variance):
    /// variance/2 per real dimension.
    Complex complex_gaussian(double variance = 1.0);

    /// Uniform point on the unit circle.
    Complex unit_circle();

    /// QPSK symbol from {(+-1 +-1j)/sqrt(2)}, unit power.
    Complex qpsk_symbol();

    /// Uniform integer in [0, bound).
    int uniform_int(int bound);

    /// k distinct indices drawn uniformly from {0, ..., n-1}, in draw order.
    std::vector<int> sample_without_replacement(int n, int k);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer; the building block of the seed-splitting scheme.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives the per-run stream seed from (master seed, sweep index, run index).
/// The mix is fixed so parallel and serial schedules consume identical
/// randomness per run.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sweep_index,
                          std::uint64_t run_index);

}  // namespace onebit
