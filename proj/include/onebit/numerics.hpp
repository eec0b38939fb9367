// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "onebit/types.hpp"

namespace onebit {

/// Array steering vector of length `size` at normalized spatial frequency
/// `freq`; entry m equals exp(-j pi freq m). All entries have unit modulus.
CVector steering_vector(int size, double freq);

/// Planar-array response: kron(steering(nx, u), steering(ny, v)).
CVector upa_response(int nx, int ny, double u, double v);

/// psi(x)/Psi(x): standard normal density over its CDF. Stable over
/// [-1e8, 1e8]; the far-left tail switches to an asymptotic expansion
/// instead of the naive quotient, which would return 0/0 below x ~ -37.
/// Underflows to 0 above x ~ +38.6 where psi(x) itself leaves the
/// representable range.
double gauss_ratio(double x);

/// One-bit quantizer: sgn(Re z) + j sgn(Im z) with sgn(x) = -1 for x <= 0,
/// +1 for x > 0. Output alphabet {1+j, -1+j, -1-j, 1-j}.
Complex sign_quantize(Complex z);

/// Elementwise sign_quantize.
CVector sign_quantize(const CVector& z);

/// Inverse of a Hermitian positive definite matrix. The input is
/// symmetrized as (A + A^H)/2 before factorization. Throws
/// SingularMatrixError carrying the failing pivot index when a
/// non-positive-definite pivot is met.
CMatrix hermitian_inverse(const CMatrix& a);

/// Kronecker product of dense complex matrices.
CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace onebit
