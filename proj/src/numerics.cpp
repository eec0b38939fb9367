// SPDX-License-Identifier: Apache-2.0
#include "onebit/numerics.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

namespace onebit {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2 pi)
constexpr double kInvSqrt2 = 0.7071067811865475244;

// Index of the first non-positive pivot of a Hermitian matrix, found by an
// unblocked Cholesky sweep. Only called on the failure path.
Index locate_failing_pivot(CMatrix h) {
    const Index n = h.rows();
    for (Index j = 0; j < n; ++j) {
        const double pivot = h(j, j).real();
        if (!(pivot > 0.0) || !std::isfinite(pivot)) return j;
        const double root = std::sqrt(pivot);
        h(j, j) = root;
        if (j + 1 < n) {
            h.col(j).tail(n - j - 1) /= root;
            for (Index k = j + 1; k < n; ++k) {
                h.col(k).tail(n - k) -=
                    h.col(j).tail(n - k) * std::conj(h(k, j));
            }
        }
    }
    return n - 1;
}

}  // namespace

CVector steering_vector(int size, double freq) {
    if (size < 1) throw InvalidArgumentError("steering_vector: size must be >= 1");
    if (!std::isfinite(freq))
        throw InvalidArgumentError("steering_vector: frequency must be finite");
    CVector v(size);
    for (int m = 0; m < size; ++m) {
        const double phase = -std::numbers::pi * freq * m;
        v(m) = Complex(std::cos(phase), std::sin(phase));
    }
    return v;
}

CVector upa_response(int nx, int ny, double u, double v) {
    if (nx < 1 || ny < 1)
        throw InvalidArgumentError("upa_response: array sizes must be >= 1");
    const CVector ax = steering_vector(nx, u);
    const CVector ay = steering_vector(ny, v);
    CVector out(static_cast<Index>(nx) * ny);
    for (int i = 0; i < nx; ++i) out.segment(static_cast<Index>(i) * ny, ny) = ax(i) * ay;
    return out;
}

double gauss_ratio(double x) {
    if (std::isnan(x)) throw InvalidArgumentError("gauss_ratio: NaN input");
    if (x >= -36.0) {
        // Both psi and Psi stay inside the representable range down to -36.
        const double psi = kInvSqrt2Pi * std::exp(-0.5 * x * x);
        const double cdf = 0.5 * std::erfc(-x * kInvSqrt2);
        return psi / cdf;
    }
    // Far left tail: Psi(x) = psi(t)/t * (1 - 1/t^2 + 3/t^4 - 15/t^6 + ...)
    // with t = -x, so the quotient reduces to t over the truncated series.
    const double t = -x;
    const double r = 1.0 / (t * t);
    const double series = 1.0 + r * (-1.0 + r * (3.0 + r * (-15.0 + r * 105.0)));
    return t / series;
}

Complex sign_quantize(Complex z) {
    const double re = z.real() > 0.0 ? 1.0 : -1.0;
    const double im = z.imag() > 0.0 ? 1.0 : -1.0;
    return Complex(re, im);
}

CVector sign_quantize(const CVector& z) {
    CVector out(z.size());
    for (Index i = 0; i < z.size(); ++i) out(i) = sign_quantize(z(i));
    return out;
}

CMatrix hermitian_inverse(const CMatrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw InvalidArgumentError("hermitian_inverse: matrix must be square and nonempty");
    const CMatrix h = 0.5 * (a + a.adjoint());
    Eigen::LLT<CMatrix> llt(h);
    if (llt.info() != Eigen::Success) {
        throw SingularMatrixError("hermitian_inverse: non-positive-definite pivot",
                                  locate_failing_pivot(h));
    }
    return llt.solve(CMatrix::Identity(h.rows(), h.cols()));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace onebit
