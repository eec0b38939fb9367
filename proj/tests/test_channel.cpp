// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "onebit/channel.hpp"
#include "onebit/numerics.hpp"

using namespace onebit;

namespace {

SystemConfig small_config() {
    SystemConfig cfg;
    cfg.bs_antennas = 8;
    cfg.irs_x = 2;
    cfg.irs_y = 2;
    cfg.users = 2;
    cfg.pilot_slots = 16;
    cfg.grid_rx = 16;
    cfg.grid_tx_x = 2;
    cfg.grid_tx_y = 4;
    cfg.paths_irs_bs = 2;
    cfg.paths_user_irs = 3;
    return cfg;
}

}  // namespace

TEST_CASE("dictionary columns are unit-norm scaled steering vectors") {
    SystemConfig cfg = small_config();
    const VadDictionaries dicts = build_dictionaries(cfg);
    CHECK(dicts.bs.rows() == cfg.bs_antennas);
    CHECK(dicts.bs.cols() == cfg.grid_rx);
    CHECK(dicts.irs.rows() == cfg.irs_elements());
    CHECK(dicts.irs.cols() == cfg.grid_tx());
    for (Index c = 0; c < dicts.bs.cols(); ++c)
        CHECK(dicts.bs.col(c).norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (Index c = 0; c < dicts.irs.cols(); ++c)
        CHECK(dicts.irs.col(c).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two-point dictionary evaluates the grid {-1, 0}") {
    SystemConfig cfg = small_config();
    cfg.bs_antennas = 2;
    cfg.grid_rx = 2;
    const VadDictionaries dicts = build_dictionaries(cfg);
    const double s = 1.0 / std::sqrt(2.0);
    // column 0 sits at frequency -1 (second entry e^{j pi} = -1), column 1 at 0
    CHECK(std::abs(dicts.bs(0, 0) - Complex(s, 0)) < 1e-12);
    CHECK(std::abs(dicts.bs(1, 0) - Complex(-s, 0)) < 1e-12);
    CHECK(std::abs(dicts.bs(0, 1) - Complex(s, 0)) < 1e-12);
    CHECK(std::abs(dicts.bs(1, 1) - Complex(s, 0)) < 1e-12);
}

TEST_CASE("square dictionaries are unitary") {
    SystemConfig cfg = small_config();
    cfg.grid_rx = cfg.bs_antennas;
    cfg.grid_tx_x = cfg.irs_x;
    cfg.grid_tx_y = cfg.irs_y;
    const VadDictionaries dicts = build_dictionaries(cfg);
    const CMatrix gram_bs = dicts.bs.adjoint() * dicts.bs;
    CHECK((gram_bs - CMatrix::Identity(gram_bs.rows(), gram_bs.cols())).norm() < 1e-10);
    const CMatrix gram_irs = dicts.irs.adjoint() * dicts.irs;
    CHECK((gram_irs - CMatrix::Identity(gram_irs.rows(), gram_irs.cols())).norm() < 1e-10);
}

TEST_CASE("on-grid realizations reconstruct through the dictionaries") {
    SystemConfig cfg = small_config();
    RandomSource rng(cfg.seed);
    const VadDictionaries dicts = build_dictionaries(cfg);
    const ChannelRealization real = generate_channels(cfg, rng);

    REQUIRE(real.cascaded.size() == 2);
    for (const CMatrix& h : real.cascaded) {
        CHECK(h.rows() == cfg.bs_antennas);
        CHECK(h.cols() == cfg.irs_elements());
    }
    for (int k = 0; k < cfg.users; ++k) {
        const CMatrix rebuilt = dicts.bs *
                                real.angular[static_cast<std::size_t>(k)] *
                                dicts.irs.adjoint();
        const double rel = (real.cascaded[static_cast<std::size_t>(k)] - rebuilt).norm() /
                           real.cascaded[static_cast<std::size_t>(k)].norm();
        CHECK(rel < 1e-10);
    }
}

TEST_CASE("all users share the row support with exact per-row column counts") {
    SystemConfig cfg = small_config();
    RandomSource rng(7);
    const ChannelRealization real = generate_channels(cfg, rng);

    CHECK(static_cast<int>(real.row_support.size()) == cfg.paths_irs_bs);
    for (int k = 0; k < cfg.users; ++k) {
        const CMatrix& ang = real.angular[static_cast<std::size_t>(k)];
        std::set<int> nonzero_rows;
        int nonzeros = 0;
        for (Index r = 0; r < ang.rows(); ++r)
            for (Index c = 0; c < ang.cols(); ++c)
                if (std::abs(ang(r, c)) > 0.0) {
                    nonzero_rows.insert(static_cast<int>(r));
                    ++nonzeros;
                }
        CHECK(nonzeros == cfg.paths_irs_bs * cfg.paths_user_irs);
        CHECK(nonzero_rows ==
              std::set<int>(real.row_support.begin(), real.row_support.end()));
        // recorded column sets match the constructed matrix
        for (std::size_t l = 0; l < real.row_support.size(); ++l) {
            const int row = real.row_support[l];
            for (int col : real.col_supports[static_cast<std::size_t>(k)][l])
                CHECK(std::abs(ang(row, col)) > 0.0);
        }
    }
}

TEST_CASE("stacked angular ground truth concatenates users in order") {
    SystemConfig cfg = small_config();
    RandomSource rng(21);
    const ChannelRealization real = generate_channels(cfg, rng);
    const CMatrix stacked = angular_ground_truth(real, cfg);
    CHECK(stacked.rows() == cfg.grid_rx);
    CHECK(stacked.cols() == cfg.users * cfg.grid_tx());
    CHECK((stacked.middleCols(0, cfg.grid_tx()) - real.angular[0]).norm() == 0.0);
    CHECK((stacked.middleCols(cfg.grid_tx(), cfg.grid_tx()) - real.angular[1]).norm() == 0.0);

    SystemConfig single = cfg;
    single.users = 1;
    RandomSource rng2(3);
    const ChannelRealization one = generate_channels(single, rng2);
    CHECK((angular_ground_truth(one, single) - one.angular[0]).norm() == 0.0);
}

TEST_CASE("off-grid realizations are geometric and refuse the angular view") {
    SystemConfig cfg = small_config();
    cfg.on_grid = false;
    RandomSource rng(4);
    const ChannelRealization real = generate_channels(cfg, rng);
    CHECK(real.angular.empty());
    CHECK(real.irs_bs.rows() == cfg.bs_antennas);
    CHECK(real.irs_bs.cols() == cfg.irs_elements());
    for (int k = 0; k < cfg.users; ++k) {
        const CMatrix product =
            real.irs_bs *
            CMatrix(real.user_irs[static_cast<std::size_t>(k)].asDiagonal());
        CHECK((product - real.cascaded[static_cast<std::size_t>(k)]).norm() /
                  product.norm() <
              1e-12);
    }
    CHECK_THROWS_AS(angular_ground_truth(real, cfg), ModeError);
}

TEST_CASE("path gains have unit second moment") {
    SystemConfig cfg = small_config();
    cfg.users = 1;
    cfg.paths_user_irs = 4;
    double acc = 0.0;
    int count = 0;
    RandomSource rng(1);
    for (int trial = 0; trial < 1250; ++trial) {
        const ChannelRealization real = generate_channels(cfg, rng);
        acc += real.gains_irs_bs.squaredNorm() + real.gains_user.squaredNorm();
        count += static_cast<int>(real.gains_irs_bs.size() + real.gains_user.size());
    }
    CHECK(acc / count == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("invalid configurations are rejected") {
    SystemConfig cfg = small_config();
    cfg.grid_rx = cfg.bs_antennas - 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = small_config();
    cfg.paths_irs_bs = cfg.irs_elements() + 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = small_config();
    cfg.noise_var = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("realization dump carries a dims header and re,im entries") {
    SystemConfig cfg = small_config();
    RandomSource rng(2);
    const ChannelRealization real = generate_channels(cfg, rng);
    std::ostringstream os;
    dump_realization(real, os);
    const std::string text = os.str();
    CHECK(text.find("# channel realization") == 0);
    CHECK(text.find("matrix,cascaded,user=0,rows=8,cols=4") != std::string::npos);
    CHECK(text.find("row_support") != std::string::npos);
}
