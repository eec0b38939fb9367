// SPDX-License-Identifier: Apache-2.0
#include "onebit/channel.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "onebit/numerics.hpp"

namespace onebit {

void SystemConfig::set_snr_db(double db) {
    snr_db = db;
    noise_var = std::pow(10.0, -db / 10.0);
}

void SystemConfig::set_noise_var(double variance) {
    noise_var = variance;
    snr_db = -10.0 * std::log10(variance);
}

void SystemConfig::validate() const {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(bs_antennas >= 1 && irs_x >= 1 && irs_y >= 1 && users >= 1 &&
                pilot_slots >= 1,
            "config: all dimensions must be >= 1");
    require(grid_rx >= bs_antennas, "config: G_r must be >= M");
    require(grid_tx_x >= 1 && grid_tx_y >= 1, "config: grid sizes must be >= 1");
    require(grid_tx() >= irs_elements(), "config: G_t must be >= N");
    require(paths_irs_bs >= 1 &&
                paths_irs_bs <= std::min(bs_antennas, irs_elements()),
            "config: L_G must satisfy 1 <= L_G <= min(M, N)");
    require(paths_user_irs >= 1 && paths_user_irs <= irs_elements(),
            "config: L_r must satisfy 1 <= L_r <= N");
    require(noise_var > 0.0, "config: noise variance must be positive");
    if (on_grid) {
        require(paths_irs_bs <= grid_rx, "config: L_G exceeds the G_r grid");
        require(paths_user_irs <= grid_tx(), "config: L_r exceeds the G_t grid");
    }
    require(gamma_th > 0.0, "config: gamma_th must be positive");
    require(p_max >= 1 && max_em_iters >= 1, "config: iteration caps must be >= 1");
    require(em_tol > 0.0, "config: em_tol must be positive");
    require(eta > 0.0, "config: eta must be positive");
}

namespace {

CMatrix grid_dictionary(int rows, int grid) {
    CMatrix d(rows, grid);
    const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
    for (int g = 0; g < grid; ++g) {
        const double freq = -1.0 + 2.0 * g / grid;
        d.col(g) = scale * steering_vector(rows, freq);
    }
    return d;
}

}  // namespace

VadDictionaries build_dictionaries(const SystemConfig& cfg) {
    cfg.validate();
    VadDictionaries d;
    d.bs = grid_dictionary(cfg.bs_antennas, cfg.grid_rx);
    d.irs_x = grid_dictionary(cfg.irs_x, cfg.grid_tx_x);
    d.irs_y = grid_dictionary(cfg.irs_y, cfg.grid_tx_y);
    d.irs = kron(d.irs_x, d.irs_y);
    return d;
}

ChannelRealization generate_channels(const SystemConfig& cfg, RandomSource& rng) {
    cfg.validate();
    const int users = cfg.users;
    const int l_g = cfg.paths_irs_bs;
    const int l_r = cfg.paths_user_irs;

    ChannelRealization real;
    real.on_grid = cfg.on_grid;

    real.gains_irs_bs = CVector(l_g);
    for (int l = 0; l < l_g; ++l) real.gains_irs_bs(l) = rng.complex_gaussian(1.0);
    real.gains_user = CMatrix(l_r, users);
    for (int k = 0; k < users; ++k)
        for (int l = 0; l < l_r; ++l) real.gains_user(l, k) = rng.complex_gaussian(1.0);

    const double path_scale = 1.0 / std::sqrt(static_cast<double>(l_g) * l_r);
    const VadDictionaries dicts = build_dictionaries(cfg);

    if (cfg.on_grid) {
        real.row_support = rng.sample_without_replacement(cfg.grid_rx, l_g);
        std::sort(real.row_support.begin(), real.row_support.end());

        // Angular magnitudes carry sqrt(M N) so the reconstruction through the
        // unit-norm dictionary columns reproduces raw steering-vector gains.
        const double angular_scale =
            path_scale * std::sqrt(static_cast<double>(cfg.bs_antennas) *
                                   cfg.irs_elements());

        real.col_supports.assign(users, {});
        real.angular.reserve(users);
        real.cascaded.reserve(users);
        for (int k = 0; k < users; ++k) {
            CMatrix ang = CMatrix::Zero(cfg.grid_rx, cfg.grid_tx());
            real.col_supports[k].resize(l_g);
            for (int l = 0; l < l_g; ++l) {
                const int row = real.row_support[static_cast<std::size_t>(l)];
                std::vector<int> cols = rng.sample_without_replacement(cfg.grid_tx(), l_r);
                for (int p = 0; p < l_r; ++p) {
                    ang(row, cols[static_cast<std::size_t>(p)]) =
                        angular_scale * real.gains_irs_bs(l) * real.gains_user(p, k);
                }
                std::sort(cols.begin(), cols.end());
                real.col_supports[k][static_cast<std::size_t>(l)] = std::move(cols);
            }
            real.cascaded.push_back(dicts.bs * ang * dicts.irs.adjoint());
            real.angular.push_back(std::move(ang));
        }
        return real;
    }

    // Off-grid: geometric factors with physical angles uniform on
    // [-pi/2, pi/2] and half-wavelength element spacing.
    auto angle = [&rng]() { return (rng.uniform() - 0.5) * std::numbers::pi; };

    std::vector<double> bs_freq(static_cast<std::size_t>(l_g));
    std::vector<double> aod_u(static_cast<std::size_t>(l_g));
    std::vector<double> aod_v(static_cast<std::size_t>(l_g));
    for (int l = 0; l < l_g; ++l) {
        bs_freq[static_cast<std::size_t>(l)] = std::sin(angle());
        const double elevation = angle();
        const double azimuth = angle();
        aod_u[static_cast<std::size_t>(l)] = std::sin(elevation) * std::sin(azimuth);
        aod_v[static_cast<std::size_t>(l)] = std::cos(elevation);
    }

    real.irs_bs = CMatrix::Zero(cfg.bs_antennas, cfg.irs_elements());
    const double g_scale = 1.0 / std::sqrt(static_cast<double>(l_g));
    for (int l = 0; l < l_g; ++l) {
        real.irs_bs += g_scale * real.gains_irs_bs(l) *
                       steering_vector(cfg.bs_antennas, bs_freq[static_cast<std::size_t>(l)]) *
                       upa_response(cfg.irs_x, cfg.irs_y, aod_u[static_cast<std::size_t>(l)],
                                    aod_v[static_cast<std::size_t>(l)])
                           .adjoint();
    }

    const double r_scale = 1.0 / std::sqrt(static_cast<double>(l_r));
    real.user_irs.reserve(users);
    real.cascaded.reserve(users);
    for (int k = 0; k < users; ++k) {
        CVector h = CVector::Zero(cfg.irs_elements());
        for (int l = 0; l < l_r; ++l) {
            const double elevation = angle();
            const double azimuth = angle();
            h += r_scale * real.gains_user(l, k) *
                 upa_response(cfg.irs_x, cfg.irs_y, std::sin(elevation) * std::sin(azimuth),
                              std::cos(elevation));
        }
        real.cascaded.push_back(real.irs_bs * h.asDiagonal());
        real.user_irs.push_back(std::move(h));
    }
    return real;
}

CMatrix angular_ground_truth(const ChannelRealization& real, const SystemConfig& cfg) {
    if (!real.on_grid)
        throw ModeError("angular_ground_truth: realization has no on-grid angular form");
    CMatrix stacked(cfg.grid_rx, static_cast<Index>(cfg.users) * cfg.grid_tx());
    for (int k = 0; k < cfg.users; ++k)
        stacked.middleCols(static_cast<Index>(k) * cfg.grid_tx(), cfg.grid_tx()) =
            real.angular[static_cast<std::size_t>(k)];
    return stacked;
}

namespace {

void dump_matrix(std::ostream& os, const char* name, int user, const CMatrix& m) {
    os << "matrix," << name << ",user=" << user << ",rows=" << m.rows()
       << ",cols=" << m.cols() << "\n";
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) os << ";";
            os << m(i, j).real() << "," << m(i, j).imag();
        }
        os << "\n";
    }
}

}  // namespace

void dump_realization(const ChannelRealization& real, std::ostream& os) {
    os << "# channel realization\n";
    os << "on_grid," << (real.on_grid ? 1 : 0) << "\n";
    os << "users," << real.cascaded.size() << "\n";
    for (std::size_t k = 0; k < real.cascaded.size(); ++k)
        dump_matrix(os, "cascaded", static_cast<int>(k), real.cascaded[k]);
    for (std::size_t k = 0; k < real.angular.size(); ++k)
        dump_matrix(os, "angular", static_cast<int>(k), real.angular[k]);
    if (real.irs_bs.size() > 0) dump_matrix(os, "irs_bs", -1, real.irs_bs);
    if (!real.row_support.empty()) {
        os << "row_support";
        for (int r : real.row_support) os << "," << r;
        os << "\n";
    }
}

}  // namespace onebit
