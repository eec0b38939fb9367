// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "onebit/measurement.hpp"
#include "onebit/numerics.hpp"

using namespace onebit;

namespace {

SystemConfig tiny_config() {
    SystemConfig cfg;
    cfg.bs_antennas = 4;
    cfg.irs_x = 2;
    cfg.irs_y = 2;
    cfg.users = 2;
    cfg.pilot_slots = 12;
    cfg.grid_rx = 8;
    cfg.grid_tx_x = 2;
    cfg.grid_tx_y = 2;
    cfg.paths_irs_bs = 2;
    cfg.paths_user_irs = 2;
    return cfg;
}

CVector vec(const CMatrix& m) {
    return CVector(Eigen::Map<const CVector>(m.data(), m.size()));
}

}  // namespace

TEST_CASE("frame matrices have the documented shapes and unit-modulus entries") {
    SystemConfig cfg = tiny_config();
    RandomSource rng(cfg.seed);
    const VadDictionaries dicts = build_dictionaries(cfg);
    const PilotFrame frame = build_pilot_frame(cfg, dicts, rng);

    CHECK(frame.pilots.rows() == cfg.pilot_slots);
    CHECK(frame.pilots.cols() == cfg.users);
    CHECK(frame.phases.rows() == cfg.irs_elements());
    CHECK(frame.phases.cols() == cfg.pilot_slots);
    CHECK(frame.smv_operator.rows() == cfg.pilot_slots * cfg.bs_antennas);
    CHECK(frame.smv_operator.cols() == cfg.users * cfg.grid_rx * cfg.grid_tx());
    CHECK(frame.block_operator.rows() == cfg.pilot_slots * cfg.bs_antennas);
    CHECK(frame.block_operator.cols() == cfg.users * cfg.grid_rx * cfg.irs_elements());

    for (Index i = 0; i < frame.pilots.size(); ++i)
        CHECK(std::abs(std::abs(frame.pilots(i / cfg.users, i % cfg.users)) - 1.0) < 1e-12);
    for (Index q = 0; q < frame.phases.cols(); ++q)
        for (Index n = 0; n < frame.phases.rows(); ++n)
            CHECK(std::abs(std::abs(frame.phases(n, q)) - 1.0) < 1e-12);
}

TEST_CASE("structured phases cycle the dictionary columns") {
    SystemConfig cfg = tiny_config();
    cfg.grid_tx_x = cfg.irs_x;
    cfg.grid_tx_y = cfg.irs_y;
    cfg.pilot_slots = cfg.irs_elements();
    RandomSource rng(1);
    const VadDictionaries dicts = build_dictionaries(cfg);
    const PilotFrame frame = build_pilot_frame(cfg, dicts, rng, PhaseMode::Structured);
    CHECK((frame.phases - dicts.irs).norm() == 0.0);

    SystemConfig bad = tiny_config();
    bad.grid_tx_x = 4;  // G_t = 8 over N = 4
    RandomSource rng2(1);
    const VadDictionaries dicts2 = build_dictionaries(bad);
    CHECK_THROWS_AS(build_pilot_frame(bad, dicts2, rng2, PhaseMode::Structured),
                    ConfigError);
}

TEST_CASE("frames with equal seeds are identical") {
    SystemConfig cfg = tiny_config();
    const VadDictionaries dicts = build_dictionaries(cfg);
    RandomSource a(42), b(42);
    const PilotFrame fa = build_pilot_frame(cfg, dicts, a);
    const PilotFrame fb = build_pilot_frame(cfg, dicts, b);
    CHECK((fa.pilots - fb.pilots).norm() == 0.0);
    CHECK((fa.phases - fb.phases).norm() == 0.0);
    CHECK((fa.smv_operator - fb.smv_operator).norm() == 0.0);
}

TEST_CASE("noiseless observation equals the vectorized operator product") {
    SystemConfig cfg = tiny_config();
    cfg.users = 1;
    cfg.noise_var = 1e-30;
    RandomSource rng(5);
    const VadDictionaries dicts = build_dictionaries(cfg);
    const ChannelRealization real = generate_channels(cfg, rng);
    const PilotFrame frame = build_pilot_frame(cfg, dicts, rng);
    const QuantizedObservation obs = observe(real, frame, cfg, rng);

    const CVector h = vec(angular_ground_truth(real, cfg));
    const CVector predicted = frame.smv_operator * h;
    CHECK((obs.soft - predicted).norm() / predicted.norm() < 1e-10);

    // block path: ybar = Upsilon * vec((Htilde U_T^H)^T)
    const CMatrix wide = real.angular[0] * dicts.irs.adjoint();
    const CVector h_bar = vec(CMatrix(wide.transpose()));
    const CVector predicted_block = frame.block_operator * h_bar;
    CHECK((obs.soft_block - predicted_block).norm() / predicted_block.norm() < 1e-10);
}

TEST_CASE("quantized entries stay in the four-symbol alphabet") {
    SystemConfig cfg = tiny_config();
    RandomSource rng(9);
    const VadDictionaries dicts = build_dictionaries(cfg);
    const ChannelRealization real = generate_channels(cfg, rng);
    const PilotFrame frame = build_pilot_frame(cfg, dicts, rng);
    const QuantizedObservation obs = observe(real, frame, cfg, rng);
    for (Index i = 0; i < obs.hard.size(); ++i) {
        CHECK(std::abs(obs.hard(i).real()) == 1.0);
        CHECK(std::abs(obs.hard(i).imag()) == 1.0);
    }
}

TEST_CASE("block reordering is the documented permutation and involutive") {
    SystemConfig cfg = tiny_config();
    RandomSource rng(13);
    const VadDictionaries dicts = build_dictionaries(cfg);
    const ChannelRealization real = generate_channels(cfg, rng);
    const PilotFrame frame = build_pilot_frame(cfg, dicts, rng);
    const QuantizedObservation obs = observe(real, frame, cfg, rng);

    const CVector reordered = to_block_order(obs.hard, cfg.bs_antennas, cfg.pilot_slots);
    CHECK((reordered - obs.hard_block).norm() == 0.0);
    const CVector back = from_block_order(reordered, cfg.bs_antennas, cfg.pilot_slots);
    CHECK((back - obs.hard).norm() == 0.0);

    // the two operator views describe the same linear map up to that
    // permutation: h_bar = vec(Hbar^T) with Hbar_k = Htilde_k U_T^H
    const CVector h = vec(angular_ground_truth(real, cfg));
    CMatrix bar(cfg.grid_rx, static_cast<Index>(cfg.users) * cfg.irs_elements());
    for (int k = 0; k < cfg.users; ++k)
        bar.middleCols(static_cast<Index>(k) * cfg.irs_elements(), cfg.irs_elements()) =
            real.angular[static_cast<std::size_t>(k)] * dicts.irs.adjoint();
    const CVector h_bar = vec(CMatrix(bar.transpose()));

    const CVector smv = frame.smv_operator * h;
    const CVector block = frame.block_operator * h_bar;
    CHECK((to_block_order(smv, cfg.bs_antennas, cfg.pilot_slots) - block).norm() /
              block.norm() <
          1e-10);
}

TEST_CASE("noise energy matches Q M sigma^2") {
    SystemConfig cfg = tiny_config();
    cfg.users = 1;
    cfg.set_noise_var(2.5);
    RandomSource rng(31);
    const VadDictionaries dicts = build_dictionaries(cfg);
    ChannelRealization zero = generate_channels(cfg, rng);
    for (CMatrix& h : zero.cascaded) h.setZero();
    const PilotFrame frame = build_pilot_frame(cfg, dicts, rng);

    double energy = 0.0;
    const int trials = 220;  // 220 * QM > 1e4 noise draws
    for (int t = 0; t < trials; ++t)
        energy += observe(zero, frame, cfg, rng).soft.squaredNorm();
    energy /= trials;
    const double expected = cfg.pilot_slots * cfg.bs_antennas * cfg.noise_var;
    CHECK(energy == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("direct-link extension widens the operator and explains the signal") {
    SystemConfig cfg = tiny_config();
    cfg.users = 1;
    cfg.noise_var = 1e-30;
    RandomSource rng(8);
    const VadDictionaries dicts = build_dictionaries(cfg);
    const ChannelRealization real = generate_channels(cfg, rng);
    const PilotFrame frame = build_pilot_frame(cfg, dicts, rng);

    const CMatrix extended = extend_with_direct_link(frame, dicts, cfg);
    CHECK(extended.rows() == frame.smv_operator.rows());
    CHECK(extended.cols() ==
          frame.smv_operator.cols() + cfg.users * cfg.grid_rx);

    // zero direct channel: observation unchanged
    const std::vector<CVector> none;
    RandomSource rng_a(77), rng_b(77);
    const QuantizedObservation plain = observe(real, frame, cfg, rng_a);
    const QuantizedObservation with_zero = observe(
        real, frame, cfg, rng_b,
        std::vector<CVector>{CVector::Zero(cfg.bs_antennas)});
    CHECK((plain.soft - with_zero.soft).norm() == 0.0);

    // sparse on-grid direct channel: y = [Xi, Xi_d] [h; h_d]
    CVector h_d = CVector::Zero(cfg.grid_rx);
    h_d(3) = Complex(0.8, -0.2);
    const CVector direct_channel = dicts.bs * h_d;
    RandomSource rng_c(78);
    const QuantizedObservation obs =
        observe(real, frame, cfg, rng_c, std::vector<CVector>{direct_channel});
    CVector full(extended.cols());
    full.head(frame.smv_operator.cols()) =
        vec(angular_ground_truth(real, cfg));
    full.tail(cfg.grid_rx) = h_d;
    const CVector predicted = extended * full;
    CHECK((obs.soft - predicted).norm() / predicted.norm() < 1e-10);
}
