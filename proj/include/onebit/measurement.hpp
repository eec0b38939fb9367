// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "onebit/channel.hpp"

namespace onebit {

enum class PhaseMode { Random, Structured };

/// One training frame: pilot symbols, the IRS phase schedule and the two
/// sensing operators assembled from them. Frames are immutable after
/// assembly.
struct PilotFrame {
    PhaseMode phase_mode = PhaseMode::Random;
    CMatrix pilots;          // S: Q x K, unit-modulus QPSK
    CMatrix phases;          // Theta: N x Q, unit-modulus entries
    CMatrix effective_pilots;// Phi: (K G_t) x Q, column q = s_q kron (U_T^H theta_q)
    CMatrix block_pilots;    // Delta: (K N) x Q, column q = s_q kron theta_q
    CMatrix smv_operator;    // Xi = Phi^T kron U_R: (Q M) x (K G_r G_t)
    CMatrix block_operator;  // Upsilon = U_R kron Delta^T: (Q M) x (K G_r N)
};

/// Quantized observation plus the unquantized signals kept for oracles.
/// `hard_block` is the fixed slot/antenna reindexing of `hard`.
struct QuantizedObservation {
    CVector hard;        // r  in {+-1 +-j}^(QM), slot-major
    CVector hard_block;  // rbar, antenna-major
    CVector soft;        // y (pre-quantization)
    CVector soft_block;  // ybar
    double noise_var = 1.0;
};

/// Assembles a pilot frame. Structured mode requires G_t = N and sets
/// theta_q to dictionary column ((q-1) mod N) + 1 so every column is
/// exercised once per N slots; random mode draws phases uniformly from the
/// unit circle.
PilotFrame build_pilot_frame(const SystemConfig& cfg, const VadDictionaries& dicts,
                             RandomSource& rng, PhaseMode mode = PhaseMode::Random);

/// Simulates the uplink training slots and quantizes: y_q = sum_k H_k
/// theta_q s_{q,k} (+ direct-link terms when `direct` is nonempty) + noise.
QuantizedObservation observe(const ChannelRealization& real, const PilotFrame& frame,
                             const SystemConfig& cfg, RandomSource& rng,
                             const std::vector<CVector>& direct = {});

/// Augmented sensing operator [Xi, Xi_d] covering direct user-BS links;
/// Xi_d = S kron U_R has K G_r extra columns.
CMatrix extend_with_direct_link(const PilotFrame& frame, const VadDictionaries& dicts,
                                const SystemConfig& cfg);

/// Reindexes a slot-major stacked vector (length Q*M) into the antenna-major
/// order used by the block path, and back.
CVector to_block_order(const CVector& v, int bs_antennas, int pilot_slots);
CVector from_block_order(const CVector& v, int bs_antennas, int pilot_slots);

/// Compact Gram factors of the Kronecker-structured sensing operators:
/// C with C^H C = Op^H Op and rank-bounded row count
/// min(Q, K G_t) * min(M, G_r) (resp. with N for the block operator).
/// Obtained from thin QR factors of the two Kronecker terms; the estimators
/// accept them to shrink the covariance algebra.
CMatrix smv_gram_factor(const PilotFrame& frame, const VadDictionaries& dicts);
CMatrix block_gram_factor(const PilotFrame& frame, const VadDictionaries& dicts);
/// Same for a row-restricted receive dictionary (stage-2 operator).
CMatrix reduced_gram_factor(const PilotFrame& frame, const CMatrix& bs_columns);

}  // namespace onebit
