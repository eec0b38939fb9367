// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "onebit/measurement.hpp"

namespace onebit {

/// Hermitian matrix made of a K x K grid of diagonal blocks, each stored as
/// one length-(M N) complex vector. The posterior system of the elementwise
/// estimator takes this form under the structured phase design with square
/// dictionaries, and the form is closed under the recursive inversion below.
struct DiagBlockMatrix {
    int users = 0;         // K
    int bs_antennas = 0;   // M
    int irs_elements = 0;  // N

    std::vector<CVector> blocks;  // K*K vectors, row-major grid order

    DiagBlockMatrix() = default;
    DiagBlockMatrix(int k, int m, int n);

    Index block_length() const { return static_cast<Index>(bs_antennas) * irs_elements; }
    CVector& block(int i, int j);
    const CVector& block(int i, int j) const;

    CMatrix to_dense() const;
    /// Largest |entry| over the diagonal blocks' diagonals.
    double max_diagonal_magnitude() const;
};

/// Builds Diag(alpha)^-1 + sigma^-2 Op^H Op directly from the pilot
/// sequences, without forming the dense operator. Requires a structured
/// frame with G_r = M and G_t = N.
DiagBlockMatrix assemble_structured_e(const RVector& alpha, const PilotFrame& frame,
                                      double noise_var, const SystemConfig& cfg);

/// Recursive inversion: the base case reciprocates the single diagonal
/// block; the recursive case splits off the last user block and applies the
/// blockwise inversion formula, with every product elementwise on the
/// diagonal vectors. Throws SingularMatrixError when a Schur-complement
/// pivot falls below 1e-14 of the largest diagonal entry.
DiagBlockMatrix diag_blk_inv(const DiagBlockMatrix& e);

struct ProbeRow {
    int users;
    int bs_antennas;
    int irs_elements;
    std::int64_t elapsed_ns;
    std::string route;  // "structured" or "dense"
};

/// Wall-time of the structured inversion (and optionally the dense route)
/// across user counts at fixed M, N. Each measurement inverts a freshly
/// assembled system `repeats` times.
std::vector<ProbeRow> complexity_probe(const std::vector<int>& user_counts,
                                       int bs_antennas, int irs_elements,
                                       int repeats = 20, bool include_dense = false,
                                       std::uint64_t seed = 1);

/// Emits probe rows as CSV with header K,M,N,elapsed_ns,route.
std::string probe_csv(const std::vector<ProbeRow>& rows);

}  // namespace onebit
