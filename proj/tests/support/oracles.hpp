// SPDX-License-Identifier: Apache-2.0
//
// Test-only reference computations. Everything here is independent of the
// library's evaluation paths: plain adaptive quadrature, truncated series
// and dense linear algebra, used to freeze expected values in the tests.
#pragma once

#include <cmath>
#include <functional>

#include "onebit/types.hpp"

namespace onebit::oracles {

inline double normal_pdf(double x) {
    return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

namespace detail {

// Refinement is relative to the local panel so integrands spanning many
// decades (normal tails) are resolved instead of being absorbed by an
// absolute tolerance.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb, double tol, int depth) {
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

}  // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
    const double m = 0.5 * (a + b);
    return detail::simpson(f, a, b, f(a), f(m), f(b), tol, 52);
}

/// Standard normal CDF by quadrature; accurate for moderate x.
inline double normal_cdf_quadrature(double x) {
    return integrate(normal_pdf, -42.0, x);
}

/// Density-over-CDF ratio by quadrature (left tail clipped at -42 where the
/// density has decayed past representability of the results of interest).
inline double gauss_ratio_quadrature(double x) {
    return normal_pdf(x) / normal_cdf_quadrature(x);
}

/// Far-tail asymptotic for psi(x)/Psi(x) at x = -t, one order deeper than
/// any production expansion would need: t / (1 - t^-2 + 3 t^-4 - 15 t^-6
/// + 105 t^-8 - 945 t^-10).
inline double gauss_ratio_series(double x) {
    const double t = -x;
    const double r = 1.0 / (t * t);
    const double series =
        1.0 + r * (-1.0 + r * (3.0 + r * (-15.0 + r * (105.0 - r * 945.0))));
    return t / series;
}

/// Mean of y ~ N(mean, sd^2) truncated to y > 0 (sign = +1) or y <= 0
/// (sign = -1), by adaptive quadrature in the standardized variable.
inline double truncated_gaussian_mean(double sign, double mean, double sd) {
    const double boundary = -mean / sd;
    const double lo = sign > 0 ? std::max(boundary, -42.0) : -42.0;
    const double hi = sign > 0 ? 42.0 : std::min(boundary, 42.0);
    const auto numerator = [&](double u) { return (mean + sd * u) * normal_pdf(u); };
    const double den = integrate(normal_pdf, lo, hi);
    return integrate(numerator, lo, hi) / den;
}

/// Complex counterpart for a one-bit symbol: independent truncation of the
/// real and imaginary parts around the linear predictor z.
inline Complex quantized_posterior_mean(Complex hard, Complex z, double noise_var) {
    const double sd = std::sqrt(noise_var / 2.0);
    return Complex(truncated_gaussian_mean(hard.real(), z.real(), sd),
                   truncated_gaussian_mean(hard.imag(), z.imag(), sd));
}

}  // namespace onebit::oracles
