// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "onebit/measurement.hpp"
#include "onebit/sbl.hpp"
#include "support/oracles.hpp"

using namespace onebit;

namespace {

// strong-signal single-user scenario small enough for exhaustive checks
struct DeskScenario {
    SystemConfig cfg;
    VadDictionaries dicts;
    ChannelRealization real;
    PilotFrame frame;
    QuantizedObservation obs;
    CVector truth;

    explicit DeskScenario(std::uint64_t seed = 11, double snr_db = 40.0) {
        cfg.bs_antennas = 8;
        cfg.irs_x = 2;
        cfg.irs_y = 2;
        cfg.users = 1;
        cfg.pilot_slots = 32;
        cfg.grid_rx = 8;
        cfg.grid_tx_x = 2;
        cfg.grid_tx_y = 2;
        cfg.paths_irs_bs = 2;
        cfg.paths_user_irs = 2;
        cfg.set_snr_db(snr_db);
        RandomSource rng(seed);
        dicts = build_dictionaries(cfg);
        real = generate_channels(cfg, rng);
        frame = build_pilot_frame(cfg, dicts, rng);
        obs = observe(real, frame, cfg, rng);
        const CMatrix stacked = angular_ground_truth(real, cfg);
        truth = CVector(Eigen::Map<const CVector>(stacked.data(), stacked.size()));
    }
};

std::vector<Index> top_indices(const CVector& v, std::size_t count) {
    std::vector<Index> idx(static_cast<std::size_t>(v.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(count), idx.end(),
                      [&](Index a, Index b) { return std::abs(v(a)) > std::abs(v(b)); });
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::vector<Index> support_of(const CVector& v) {
    std::vector<Index> out;
    for (Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > 0.0) out.push_back(i);
    return out;
}

}  // namespace

TEST_CASE("posterior covariance degenerates to the prior for a zero operator") {
    const CMatrix op = CMatrix::Zero(6, 4);
    RVector alpha(4);
    alpha << 0.5, 1.0, 2.0, 4.0;
    for (CovarianceRoute route : {CovarianceRoute::Direct, CovarianceRoute::Lemma}) {
        const CMatrix sigma = e_step_covariance(op, alpha, 1.3, route);
        CHECK((sigma - CMatrix(alpha.cast<Complex>().asDiagonal())).norm() < 1e-12);
    }
}

TEST_CASE("posterior covariance approaches the scaled Gram inverse for flat priors") {
    RandomSource rng(3);
    CMatrix op(12, 6);
    for (Index i = 0; i < op.size(); ++i)
        op(i / op.cols(), i % op.cols()) = rng.complex_gaussian(1.0);
    const double noise_var = 0.7;
    const RVector alpha = RVector::Constant(6, 1e12);
    const CMatrix sigma = e_step_covariance(op, alpha, noise_var);
    const CMatrix reference = noise_var * (op.adjoint() * op).inverse();
    CHECK((sigma - reference).norm() / reference.norm() < 1e-6);
}

TEST_CASE("direct and lemma covariance routes agree") {
    RandomSource rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        CMatrix op(10, 14);  // underdetermined, the lemma's home turf
        for (Index i = 0; i < op.size(); ++i)
            op(i / op.cols(), i % op.cols()) = rng.complex_gaussian(1.0);
        RVector alpha(14);
        for (Index i = 0; i < 14; ++i) alpha(i) = 0.05 + rng.uniform();
        const CMatrix direct = e_step_covariance(op, alpha, 0.9, CovarianceRoute::Direct);
        const CMatrix lemma = e_step_covariance(op, alpha, 0.9, CovarianceRoute::Lemma);
        CHECK((direct - lemma).norm() / direct.norm() < 1e-10);
    }
}

TEST_CASE("covariance diagonal stays real and nonnegative") {
    RandomSource rng(6);
    CMatrix op(9, 7);
    for (Index i = 0; i < op.size(); ++i)
        op(i / op.cols(), i % op.cols()) = rng.complex_gaussian(1.0);
    RVector alpha(7);
    for (Index i = 0; i < 7; ++i) alpha(i) = 0.01 + rng.uniform();
    const CMatrix sigma = e_step_covariance(op, alpha, 0.4);
    for (Index i = 0; i < 7; ++i) {
        CHECK(sigma(i, i).real() >= 0.0);
        CHECK(std::abs(sigma(i, i).imag()) < 1e-12);
    }
}

TEST_CASE("quantized posterior mean at the symmetric point") {
    CVector hard(2), z(2);
    hard << Complex(1, 1), Complex(-1, -1);
    z.setZero();
    const CVector mean = posterior_y_mean(hard, z, 2.0);
    CHECK(std::abs(mean(0) - 0.7978845608 * Complex(1, 1)) < 1e-9);
    CHECK(std::abs(mean(1) + 0.7978845608 * Complex(1, 1)) < 1e-9);
}

TEST_CASE("quantized posterior mean matches quadrature off the origin") {
    CVector hard(1), z(1);
    hard(0) = Complex(1, 1);
    z(0) = Complex(0.5, 0.5);
    const CVector mean = posterior_y_mean(hard, z, 2.0);
    CHECK(std::abs(mean(0) - 1.00917 * Complex(1, 1)) < 1e-4 * std::abs(mean(0)));
    const Complex reference = oracles::quantized_posterior_mean(hard(0), z(0), 2.0);
    CHECK(std::abs(mean(0) - reference) < 1e-8);
}

TEST_CASE("quantized posterior mean stays finite for huge predictors") {
    CVector hard(4), z(4);
    hard << Complex(1, 1), Complex(-1, 1), Complex(1, -1), Complex(-1, -1);
    z << Complex(1e6, -1e6), Complex(-1e6, 1e6), Complex(1e6, 1e6), Complex(-1e6, -1e6);
    const CVector mean = posterior_y_mean(hard, z, 2.0);
    for (Index i = 0; i < 4; ++i) {
        CHECK(std::isfinite(mean(i).real()));
        CHECK(std::isfinite(mean(i).imag()));
    }
}

TEST_CASE("hyperparameter update adds moment and covariance, with a floor") {
    CVector mu(3);
    mu << Complex(0, 0), Complex(1, 1), Complex(0, 0);
    CMatrix sigma = CMatrix::Zero(3, 3);
    sigma(0, 0) = 0.5;
    sigma(1, 1) = 0.1;
    const RVector alpha = m_step_alpha(mu, sigma);
    CHECK(alpha(0) == doctest::Approx(0.5));
    CHECK(alpha(1) == doctest::Approx(2.1));
    CHECK(alpha(2) == doctest::Approx(1e-12));
}

TEST_CASE("estimator recovers the support of a strong on-grid signal") {
    DeskScenario desk;
    const SblResult result = sbl_estimate(desk.frame.smv_operator, desk.obs.hard,
                                          desk.cfg.noise_var,
                                          SblControls::from_config(desk.cfg));
    const auto truth_support = support_of(desk.truth);
    const auto estimated = top_indices(result.coefficients, truth_support.size());
    CHECK(estimated == truth_support);

    // prior variances remain floored, finite, and separate the support
    double off_support_max = 0.0;
    double on_support_min = 1e300;
    for (Index i = 0; i < result.alpha.size(); ++i) {
        CHECK(result.alpha(i) >= 1e-12);
        CHECK(std::isfinite(result.alpha(i)));
        const bool on = std::binary_search(truth_support.begin(), truth_support.end(), i);
        if (on)
            on_support_min = std::min(on_support_min, result.alpha(i));
        else
            off_support_max = std::max(off_support_max, result.alpha(i));
    }
    CHECK(off_support_max < 1e-6);
    CHECK(off_support_max * 1e3 < on_support_min);
}

TEST_CASE("estimator is deterministic for a fixed seed") {
    DeskScenario a(77), b(77);
    const SblResult ra = sbl_estimate(a.frame.smv_operator, a.obs.hard, a.cfg.noise_var,
                                      SblControls::from_config(a.cfg));
    const SblResult rb = sbl_estimate(b.frame.smv_operator, b.obs.hard, b.cfg.noise_var,
                                      SblControls::from_config(b.cfg));
    CHECK((ra.coefficients - rb.coefficients).norm() == 0.0);
    CHECK((ra.alpha - rb.alpha).norm() == 0.0);
}

TEST_CASE("compact gram factor reproduces the plain estimate") {
    DeskScenario desk(31, 10.0);
    const SblControls controls = SblControls::from_config(desk.cfg);
    const SblResult plain =
        sbl_estimate(desk.frame.smv_operator, desk.obs.hard, desk.cfg.noise_var, controls);
    const CMatrix factor = smv_gram_factor(desk.frame, desk.dicts);
    CHECK((factor.adjoint() * factor - desk.frame.smv_operator.adjoint() *
                                           desk.frame.smv_operator)
              .norm() /
              factor.squaredNorm() <
          1e-12);
    const SblResult fast = sbl_estimate(desk.frame.smv_operator, desk.obs.hard,
                                        desk.cfg.noise_var, controls, &factor);
    CHECK((plain.coefficients - fast.coefficients).norm() /
              plain.coefficients.norm() <
          1e-8);
}

TEST_CASE("converged hyperparameters are a fixed point of one more sweep") {
    DeskScenario desk(19, 20.0);
    SblControls controls = SblControls::from_config(desk.cfg);
    const SblResult result = sbl_estimate(desk.frame.smv_operator, desk.obs.hard,
                                          desk.cfg.noise_var, controls);
    REQUIRE(result.diagnostics.converged);
    // replay a single outer iteration from the converged state
    const CMatrix sigma =
        e_step_covariance(desk.frame.smv_operator, result.alpha, desk.cfg.noise_var);
    CVector mu = result.coefficients;
    for (int p = 0; p < controls.p_max; ++p) {
        const CVector z = desk.frame.smv_operator * mu;
        const CVector mean_y = posterior_y_mean(desk.obs.hard, z, desk.cfg.noise_var);
        mu = (sigma * (desk.frame.smv_operator.adjoint() * mean_y)) / desk.cfg.noise_var;
    }
    const RVector replayed = m_step_alpha(mu, sigma);
    const double change = (replayed - result.alpha).lpNorm<Eigen::Infinity>() /
                          result.alpha.lpNorm<Eigen::Infinity>();
    CHECK(change < controls.em_tol);
}

TEST_CASE("ridge seed stays close to the least-squares fit") {
    RandomSource rng(4);
    CMatrix op(16, 6);
    for (Index i = 0; i < op.size(); ++i)
        op(i / op.cols(), i % op.cols()) = rng.complex_gaussian(1.0);
    CVector target(16);
    for (Index i = 0; i < 16; ++i) target(i) = rng.complex_gaussian(1.0);
    const CVector ridge = ridge_least_squares(op, target);
    const CVector exact = op.colPivHouseholderQr().solve(target);
    CHECK((ridge - exact).norm() / exact.norm() < 1e-4);
}

TEST_CASE("cascaded recovery inverts the angular stacking") {
    DeskScenario desk;
    const auto channels = recover_cascaded(desk.truth, desk.dicts, desk.cfg);
    REQUIRE(channels.size() == 1);
    CHECK((channels[0] - desk.real.cascaded[0]).norm() /
              desk.real.cascaded[0].norm() <
          1e-12);

    const CVector zero = CVector::Zero(desk.truth.size());
    const auto zeros = recover_cascaded(zero, desk.dicts, desk.cfg);
    CHECK(zeros[0].norm() == 0.0);

    RandomSource rng(15);
    CVector arbitrary(desk.truth.size());
    for (Index i = 0; i < arbitrary.size(); ++i)
        arbitrary(i) = rng.complex_gaussian(1.0);
    const auto recovered = recover_cascaded(arbitrary, desk.dicts, desk.cfg);
    Eigen::Map<const CMatrix> angular(arbitrary.data(), desk.cfg.grid_rx,
                                      desk.cfg.grid_tx());
    const CMatrix direct = desk.dicts.bs * angular * desk.dicts.irs.adjoint();
    CHECK((recovered[0] - direct).norm() / direct.norm() < 1e-12);

    CHECK_THROWS_AS(recover_cascaded(arbitrary.head(3), desk.dicts, desk.cfg),
                    InvalidArgumentError);
}
