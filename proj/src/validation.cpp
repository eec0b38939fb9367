// SPDX-License-Identifier: Apache-2.0
#include "onebit/validation.hpp"

#include <cmath>
#include <functional>
#include <ostream>

#include "onebit/baselines.hpp"
#include "onebit/fast_inverse.hpp"
#include "onebit/numerics.hpp"
#include "onebit/sbl.hpp"
#include "onebit/two_stage.hpp"

namespace onebit {

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fm, double fb, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double refined = left + right;
    const double scale = std::abs(refined) + 1e-300;
    if (depth <= 0 || std::abs(refined - whole) < 15.0 * tol * scale)
        return refined + (refined - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, tol, depth - 1) +
           simpson(f, m, b, fm, frm, fb, tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    return simpson(f, a, b, f(a), f(m), f(b), tol, 52);
}

double normal_pdf(double x) {
    return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

// E[y | sign constraint] for y ~ N(mean, sd^2), evaluated by quadrature.
double truncated_mean_quadrature(double sign, double mean, double sd) {
    const double lo_raw = sign > 0 ? -mean / sd : -100.0;
    const double hi_raw = sign > 0 ? 100.0 : -mean / sd;
    const double lo = std::max(lo_raw, -42.0);
    const double hi = std::min(hi_raw, 42.0);
    const auto numerator = [&](double u) { return (mean + sd * u) * normal_pdf(u); };
    const auto denominator = [&](double u) { return normal_pdf(u); };
    const double den = integrate(denominator, lo, hi, 1e-13);
    return integrate(numerator, lo, hi, 1e-13) / den;
}

}  // namespace

bool run_validation(std::ostream& os) {
    bool all_ok = true;
    const auto check = [&](const char* name, bool ok) {
        os << (ok ? "ok   " : "FAIL ") << name << "\n";
        all_ok = all_ok && ok;
    };

    {
        const CVector v = steering_vector(4, 0.5);
        bool ok = true;
        for (Index i = 0; i < v.size(); ++i)
            ok = ok && std::abs(std::abs(v(i)) - 1.0) < 1e-12;
        ok = ok && std::abs(v(1) - Complex(0, -1)) < 1e-12 &&
             std::abs(v(2) - Complex(-1, 0)) < 1e-12;
        check("steering vector unit modulus and quarter-grid values", ok);
    }

    {
        bool ok = std::abs(gauss_ratio(0.0) - 0.7978845608028654) < 1e-12;
        for (double x = -30.0; x <= 8.0; x += 2.5) {
            const double cdf = integrate(normal_pdf, -42.0, x, 1e-13);
            ok = ok && std::abs(gauss_ratio(x) - normal_pdf(x) / cdf) < 1e-8;
        }
        double previous = gauss_ratio(-50.0);
        for (double x = -49.0; x <= 38.0; x += 1.0) {
            const double current = gauss_ratio(x);
            ok = ok && current < previous;
            previous = current;
        }
        check("gaussian density/CDF ratio against quadrature, decreasing", ok);
    }

    {
        RandomSource rng(7);
        bool ok = true;
        for (int i = 0; i < 64; ++i) {
            const Complex q = sign_quantize(rng.complex_gaussian(1.0));
            ok = ok && sign_quantize(q) == q && std::abs(q.real()) == 1.0 &&
                 std::abs(q.imag()) == 1.0;
        }
        check("one-bit quantizer idempotent over alphabet", ok);
    }

    {
        RandomSource rng(11);
        CMatrix x(8, 8);
        for (Index i = 0; i < 64; ++i) x(i / 8, i % 8) = rng.complex_gaussian(1.0);
        const CMatrix a = x * x.adjoint() + 8.0 * CMatrix::Identity(8, 8);
        const CMatrix inv = hermitian_inverse(a);
        check("hermitian inverse residual",
              (a * inv - CMatrix::Identity(8, 8)).norm() / std::sqrt(8.0) < 1e-10);
    }

    {
        bool ok = true;
        for (double zr : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
            for (double var : {0.5, 2.0}) {
                const double sd = std::sqrt(var / 2.0);
                CVector hard(1), z(1);
                hard(0) = Complex(1.0, -1.0);
                z(0) = Complex(zr, 0.3);
                const CVector mean = posterior_y_mean(hard, z, var);
                const double want_re = truncated_mean_quadrature(1.0, zr, sd);
                const double want_im = truncated_mean_quadrature(-1.0, 0.3, sd);
                ok = ok && std::abs(mean(0).real() - want_re) < 1e-8 &&
                     std::abs(mean(0).imag() - want_im) < 1e-8;
            }
        }
        check("truncated-gaussian posterior mean against quadrature", ok);
    }

    {
        SystemConfig cfg;
        cfg.bs_antennas = 4;
        cfg.grid_rx = 8;
        cfg.irs_x = 1;
        cfg.irs_y = 4;
        cfg.grid_tx_x = 1;
        cfg.grid_tx_y = 4;
        cfg.users = 2;
        cfg.pilot_slots = 12;
        cfg.paths_irs_bs = 2;
        cfg.paths_user_irs = 2;
        cfg.set_snr_db(40.0);
        RandomSource rng(23);
        const VadDictionaries dicts = build_dictionaries(cfg);
        const ChannelRealization real = generate_channels(cfg, rng);
        const PilotFrame frame = build_pilot_frame(cfg, dicts, rng);
        SystemConfig noiseless = cfg;
        noiseless.noise_var = 1e-30;
        const QuantizedObservation obs = observe(real, frame, noiseless, rng);

        const CVector h = CVector(Eigen::Map<const CVector>(
            angular_ground_truth(real, cfg).data(),
            static_cast<Index>(cfg.grid_rx) * cfg.users * cfg.grid_tx()));
        const CVector direct = frame.smv_operator * h;
        check("noiseless vectorization identity",
              (obs.soft - direct).norm() / direct.norm() < 1e-8);
        check("block reindexing consistency",
              (to_block_order(obs.hard, cfg.bs_antennas, cfg.pilot_slots) - obs.hard_block)
                      .norm() == 0.0);

        RVector alpha(frame.smv_operator.cols());
        for (Index i = 0; i < alpha.size(); ++i) alpha(i) = 0.05 + 0.01 * (i % 7);
        const CMatrix left =
            e_step_covariance(frame.smv_operator, alpha, 1.0, CovarianceRoute::Direct);
        const CMatrix right =
            e_step_covariance(frame.smv_operator, alpha, 1.0, CovarianceRoute::Lemma);
        check("posterior covariance route agreement",
              (left - right).norm() / left.norm() < 1e-10);
    }

    {
        SystemConfig cfg;
        cfg.bs_antennas = 4;
        cfg.grid_rx = 4;
        cfg.irs_x = 1;
        cfg.irs_y = 4;
        cfg.grid_tx_x = 1;
        cfg.grid_tx_y = 4;
        cfg.users = 2;
        cfg.pilot_slots = 10;
        cfg.paths_irs_bs = 1;
        cfg.paths_user_irs = 1;
        RandomSource rng(37);
        const VadDictionaries dicts = build_dictionaries(cfg);
        const PilotFrame frame = build_pilot_frame(cfg, dicts, rng, PhaseMode::Structured);
        RVector alpha(static_cast<Index>(cfg.users) * 16);
        for (Index i = 0; i < alpha.size(); ++i) alpha(i) = 0.2 + 0.03 * (i % 5);
        const DiagBlockMatrix e = assemble_structured_e(alpha, frame, 1.0, cfg);
        const CMatrix dense =
            (frame.smv_operator.adjoint() * frame.smv_operator) +
            CMatrix(alpha.cwiseInverse().cast<Complex>().asDiagonal());
        bool ok = (e.to_dense() - dense).norm() / dense.norm() < 1e-12;
        const DiagBlockMatrix inv = diag_blk_inv(e);
        ok = ok && (e.to_dense() * inv.to_dense() - CMatrix::Identity(dense.rows(), dense.cols()))
                           .norm() < 1e-8;
        check("structured posterior system assembly and recursive inverse", ok);
    }

    return all_ok;
}

}  // namespace onebit
