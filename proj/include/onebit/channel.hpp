// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "onebit/rng.hpp"
#include "onebit/types.hpp"

namespace onebit {

/// Scenario dimensions, grid resolutions, noise level and iteration controls.
/// Config files mirror these fields under the keys listed in the README
/// (M, Nx, Ny, K, Q, G_r, G_tx, G_ty, L_G, L_r, snr_db, sigma2, on_grid,
/// gamma_th, p_max, max_em_iters, em_tol, eta, seed).
struct SystemConfig {
    int bs_antennas = 16;   // M
    int irs_x = 2;          // Nx
    int irs_y = 4;          // Ny
    int users = 2;          // K
    int pilot_slots = 64;   // Q
    int grid_rx = 32;       // G_r
    int grid_tx_x = 4;      // G_tx
    int grid_tx_y = 4;      // G_ty
    int paths_irs_bs = 2;   // L_G
    int paths_user_irs = 3; // L_r, shared across users

    double noise_var = 1.0; // sigma^2; pilots have unit power, so SNR = 1/sigma^2
    double snr_db = 0.0;

    bool on_grid = true;
    double gamma_th = 1e-3;   // row-support detection threshold
    int p_max = 5;            // inner posterior-mean alternations
    int max_em_iters = 150;
    double em_tol = 1e-3;
    double eta = 0.6;         // l1 weight of the EM-BPDN baseline
    std::uint64_t seed = 1;

    int irs_elements() const { return irs_x * irs_y; }   // N
    int grid_tx() const { return grid_tx_x * grid_tx_y; } // G_t

    /// Sets snr_db and the matching noise variance (unit pilot power).
    void set_snr_db(double db);
    /// Sets noise_var and the matching snr_db.
    void set_noise_var(double variance);

    /// Throws ConfigError when any invariant is violated
    /// (G_r >= M, G_t >= N, L_G <= min(M, N), L_r <= N, all dims >= 1, ...).
    void validate() const;
};

/// Angular transformation dictionaries. Columns are steering vectors on the
/// uniform grid -1 + 2g/G, g = 0..G-1, scaled to unit norm; square
/// dictionaries are unitary.
struct VadDictionaries {
    CMatrix bs;      // U_R:  M x G_r
    CMatrix irs_x;   // U_Tx: Nx x G_tx
    CMatrix irs_y;   // U_Ty: Ny x G_ty
    CMatrix irs;     // U_T = U_Tx kron U_Ty: N x G_t
};

VadDictionaries build_dictionaries(const SystemConfig& cfg);

/// Ground-truth channels for one Monte-Carlo run. On-grid realizations are
/// defined directly in the angular domain (exact sparsity pattern); off-grid
/// realizations are defined geometrically through irs_bs and user_irs.
struct ChannelRealization {
    bool on_grid = true;

    std::vector<CMatrix> cascaded;  // H_k: M x N per user
    std::vector<CMatrix> angular;   // sparse G_r x G_t per user (on-grid only)

    CMatrix irs_bs;                 // G: M x N (off-grid only)
    std::vector<CVector> user_irs;  // h_{r,k}: N per user (off-grid only)

    std::vector<int> row_support;   // shared nonzero angular rows (on-grid)
    // col_supports[k][l]: sorted nonzero columns of user k in the l-th
    // support row (on-grid only).
    std::vector<std::vector<std::vector<int>>> col_supports;

    CVector gains_irs_bs;  // path gains of the IRS-BS link, length L_G
    CMatrix gains_user;    // per-user path gains, L_r x K
};

/// Draws a channel realization. Gains are CN(0,1). On-grid mode draws the
/// shared row indices without replacement from the G_r grid and, per
/// (row, user), the cascaded column indices without replacement from the
/// G_t grid. Off-grid mode draws physical angles uniformly from
/// [-pi/2, pi/2] and maps them through u = sin(theta) sin(gamma),
/// v = cos(theta) with half-wavelength spacing.
ChannelRealization generate_channels(const SystemConfig& cfg, RandomSource& rng);

/// Stacked angular ground truth [Htilde_1, ..., Htilde_K]: G_r x (K G_t).
/// Throws ModeError on an off-grid realization.
CMatrix angular_ground_truth(const ChannelRealization& real, const SystemConfig& cfg);

/// Debug dump: dims header plus complex entries as "re,im" CSV rows.
void dump_realization(const ChannelRealization& real, std::ostream& os);

}  // namespace onebit
