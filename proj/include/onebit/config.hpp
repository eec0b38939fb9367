// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "onebit/channel.hpp"

namespace onebit {

/// Desk-scale default profile used by the shipped experiments:
/// M=16, N=8 (2x4), K=2, G_r=32, G_t=16, L_G=2, L_r=3.
SystemConfig desk_profile();

/// Full-scale profile (M=32, N=16 (4x4), K=3, G_r=64, G_t=32, L_G=2, L_r=6);
/// multi-hour at meaningful run counts, kept out of routine test runs.
SystemConfig paper_scale_profile();

/// Applies `key=value` lines to a config. Keys mirror the scenario fields:
/// M, Nx, Ny, K, Q, G_r, G_tx, G_ty, L_G, L_r, snr_db, sigma2, on_grid,
/// gamma_th, p_max, max_em_iters, em_tol, eta, seed. '#' starts a comment.
/// Unknown keys or malformed values raise ConfigError.
void apply_config_text(SystemConfig& cfg, std::istream& is);

/// Loads a config file over the given base profile. Throws ConfigError with
/// the path in the message when the file cannot be opened.
SystemConfig load_config_file(const std::string& path, SystemConfig base = desk_profile());

}  // namespace onebit
