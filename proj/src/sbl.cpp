// SPDX-License-Identifier: Apache-2.0
#include "onebit/sbl.hpp"

#include <cmath>
#include <memory>
#include <string>

#include <Eigen/Cholesky>

#include "onebit/numerics.hpp"

namespace onebit {

namespace {

bool use_lemma(CovarianceRoute route, Index rows, Index cols) {
    switch (route) {
        case CovarianceRoute::Direct: return false;
        case CovarianceRoute::Lemma: return true;
        case CovarianceRoute::Auto: break;
    }
    return static_cast<double>(rows) < 0.8 * static_cast<double>(cols);
}

CMatrix covariance_direct(const CMatrix& gram, const RVector& alpha, double noise_var) {
    CMatrix e = gram / noise_var;
    for (Index i = 0; i < alpha.size(); ++i) e(i, i) += 1.0 / alpha(i);
    return hermitian_inverse(e);
}

CMatrix covariance_lemma(const CMatrix& op, const RVector& alpha, double noise_var) {
    const CMatrix scaled = op * alpha.asDiagonal();  // Op * A
    CMatrix inner = scaled * op.adjoint();
    inner.diagonal().array() += noise_var;
    Eigen::LLT<CMatrix> llt(0.5 * (inner + inner.adjoint()));
    if (llt.info() != Eigen::Success)
        throw NumericalError("covariance lemma route: inner system not positive definite");
    const CMatrix solved = llt.solve(scaled);  // (sigma^2 I + Op A Op^H)^-1 Op A
    CMatrix sigma = -scaled.adjoint() * solved;
    sigma.diagonal() += alpha.cast<Complex>();
    return 0.5 * (sigma + sigma.adjoint());
}

// Exact posterior algebra for E = Diag(alpha)^-1 + s^-2 C^H C, materializing
// only a factorization, the covariance diagonal and solves against it.
// `factor` is either the operator itself (lemma shape) or a compact C with
// C^H C equal to the operator Gram.
class PosteriorEngine {
public:
    // direct path over the precomputed Gram
    PosteriorEngine(const CMatrix& gram, const RVector& alpha, double noise_var)
        : compact_(false) {
        CMatrix e = gram / noise_var;
        for (Index i = 0; i < alpha.size(); ++i) e(i, i) += 1.0 / alpha(i);
        llt_.compute(e);
        if (llt_.info() != Eigen::Success)
            throw NumericalError("posterior system not positive definite");
        const Index n = gram.rows();
        const CMatrix l = llt_.matrixL();
        const CMatrix inv_l =
            l.triangularView<Eigen::Lower>().solve(CMatrix::Identity(n, n));
        diagonal_ = inv_l.cwiseAbs2().colwise().sum().transpose();
        noise_var_ = noise_var;
    }

    // compact Woodbury path through C (rows < cols); works with the
    // symmetrically scaled X = C sqrt(A) so the inner system is a clean
    // rank update and Sigma = sqrt(A)(I - X^H W^-1 X) sqrt(A).
    PosteriorEngine(const CMatrix& factor, const RVector& alpha, double noise_var,
                    bool /*compact_tag*/)
        : compact_(true), root_alpha_(alpha.cwiseSqrt()) {
        scaled_ = factor * root_alpha_.asDiagonal();  // X
        CMatrix inner = CMatrix::Zero(factor.rows(), factor.rows());
        inner.selfadjointView<Eigen::Lower>().rankUpdate(scaled_);
        inner.diagonal().array() += noise_var;
        llt_.compute(CMatrix(inner.selfadjointView<Eigen::Lower>()));
        if (llt_.info() != Eigen::Success)
            throw NumericalError("posterior inner system not positive definite");
        const CMatrix l = llt_.matrixL();
        const CMatrix t = l.triangularView<Eigen::Lower>().solve(scaled_);
        diagonal_ =
            (alpha.array() * (1.0 - t.cwiseAbs2().colwise().sum().transpose().array()))
                .cwiseMax(0.0);
        noise_var_ = noise_var;
    }

    const RVector& covariance_diagonal() const { return diagonal_; }

    // mu = s^-2 Sigma v
    CVector mean_from(const CVector& v) const {
        if (!compact_) return llt_.solve(v) / noise_var_;
        const CVector w = root_alpha_.asDiagonal() * v;
        const CVector inner = w - scaled_.adjoint() * llt_.solve(scaled_ * w);
        return (root_alpha_.asDiagonal() * inner) / noise_var_;
    }

private:
    bool compact_;
    double noise_var_ = 1.0;
    RVector root_alpha_;
    CMatrix scaled_;
    Eigen::LLT<CMatrix> llt_;
    RVector diagonal_;
};

}  // namespace

CMatrix e_step_covariance(const CMatrix& op, const RVector& alpha, double noise_var,
                          CovarianceRoute route) {
    if (op.cols() != alpha.size())
        throw InvalidArgumentError("e_step_covariance: alpha/operator size mismatch");
    if ((alpha.array() <= 0.0).any())
        throw InvalidArgumentError("e_step_covariance: alpha must be positive");
    if (use_lemma(route, op.rows(), op.cols()))
        return covariance_lemma(op, alpha, noise_var);
    return covariance_direct(op.adjoint() * op, alpha, noise_var);
}

CVector posterior_y_mean(const CVector& hard, const CVector& z, double noise_var) {
    if (hard.size() != z.size())
        throw InvalidArgumentError("posterior_y_mean: size mismatch");
    const double s = std::sqrt(noise_var / 2.0);
    CVector mean(hard.size());
    for (Index i = 0; i < hard.size(); ++i) {
        const double rr = hard(i).real();
        const double ri = hard(i).imag();
        const double zr = z(i).real();
        const double zi = z(i).imag();
        const double re = s * rr * gauss_ratio(rr * zr / s) + zr;
        const double im = s * ri * gauss_ratio(ri * zi / s) + zi;
        mean(i) = Complex(re, im);
    }
    return mean;
}

RVector m_step_alpha(const CVector& mu, const CMatrix& sigma, double floor) {
    RVector alpha(mu.size());
    for (Index i = 0; i < mu.size(); ++i)
        alpha(i) = std::max(std::norm(mu(i)) + sigma(i, i).real(), floor);
    return alpha;
}

CVector ridge_least_squares(const CMatrix& op, const CVector& target, double scale,
                            const CMatrix* gram_factor) {
    const Index n = op.cols();
    const CVector rhs = op.adjoint() * target;
    if (gram_factor && gram_factor->rows() < n) {
        const CMatrix& c = *gram_factor;
        const double ridge =
            std::max(scale * c.squaredNorm() / static_cast<double>(n), 1e-300);
        CMatrix inner = c * c.adjoint();
        inner.diagonal().array() += ridge;
        Eigen::LLT<CMatrix> llt(0.5 * (inner + inner.adjoint()));
        if (llt.info() != Eigen::Success)
            throw NumericalError("ridge_least_squares: factorization failed");
        // (C^H C + r I)^-1 b = (b - C^H (r I + C C^H)^-1 C b) / r
        return (rhs - c.adjoint() * llt.solve(c * rhs)) / ridge;
    }
    CMatrix gram = op.adjoint() * op;
    const double ridge = scale * gram.trace().real() / static_cast<double>(n);
    gram.diagonal().array() += std::max(ridge, 1e-300);
    Eigen::LLT<CMatrix> llt(gram);
    if (llt.info() != Eigen::Success)
        throw NumericalError("ridge_least_squares: factorization failed");
    return llt.solve(rhs);
}

SblResult sbl_estimate(const CMatrix& op, const CVector& hard, double noise_var,
                       const SblControls& controls, const CMatrix* gram_factor) {
    const Index rows = op.rows();
    const Index n = op.cols();
    if (hard.size() != rows)
        throw InvalidArgumentError("sbl_estimate: observation/operator size mismatch");
    if (gram_factor && gram_factor->cols() != n)
        throw InvalidArgumentError("sbl_estimate: gram factor width mismatch");

    const bool compact = gram_factor && gram_factor->rows() < n;
    CMatrix gram;
    if (!compact) gram = op.adjoint() * op;

    RVector alpha = RVector::Constant(n, 1e-3);
    CVector mu = ridge_least_squares(op, hard, controls.ridge_scale, gram_factor);

    SblResult result;
    result.diagnostics.hyper_change.reserve(static_cast<std::size_t>(controls.max_em_iters));

    for (int iter = 0; iter < controls.max_em_iters; ++iter) {
        // Covariance refresh. The compact factor and the lemma route are
        // algebraically identical; the direct route factors the full system.
        std::unique_ptr<PosteriorEngine> engine;
        try {
            if (compact) {
                engine = std::make_unique<PosteriorEngine>(*gram_factor, alpha,
                                                           noise_var, true);
            } else if (use_lemma(controls.route, rows, n)) {
                engine = std::make_unique<PosteriorEngine>(op, alpha, noise_var, true);
            } else {
                engine = std::make_unique<PosteriorEngine>(gram, alpha, noise_var);
            }
        } catch (const std::exception& e) {
            throw NumericalError("sbl_estimate: iteration " + std::to_string(iter) +
                                 ": " + e.what());
        }

        for (int p = 0; p < controls.p_max; ++p) {
            const CVector z = op * mu;
            const CVector mean_y = posterior_y_mean(hard, z, noise_var);
            mu = engine->mean_from(op.adjoint() * mean_y);
        }

        const RVector& diag = engine->covariance_diagonal();
        double change = 0.0;
        const double scale = std::max(alpha.lpNorm<Eigen::Infinity>(), 1e-300);
        for (Index i = 0; i < n; ++i) {
            const double updated =
                std::max(std::norm(mu(i)) + diag(i), controls.alpha_floor);
            change = std::max(change, std::abs(updated - alpha(i)));
            alpha(i) = updated;
        }
        const double relative = change / scale;
        result.diagnostics.hyper_change.push_back(relative);
        result.diagnostics.iterations = iter + 1;
        if (controls.record_trace) result.diagnostics.trace.push_back(mu);
        if (relative < controls.em_tol) {
            result.diagnostics.converged = true;
            break;
        }
    }

    result.coefficients = std::move(mu);
    result.alpha = std::move(alpha);
    return result;
}

std::vector<CMatrix> recover_cascaded(const CVector& coefficients,
                                      const VadDictionaries& dicts,
                                      const SystemConfig& cfg) {
    const Index expected =
        static_cast<Index>(cfg.users) * cfg.grid_rx * cfg.grid_tx();
    if (coefficients.size() != expected)
        throw InvalidArgumentError("recover_cascaded: coefficient length mismatch");
    Eigen::Map<const CMatrix> angular(coefficients.data(), cfg.grid_rx,
                                      static_cast<Index>(cfg.users) * cfg.grid_tx());
    std::vector<CMatrix> channels;
    channels.reserve(static_cast<std::size_t>(cfg.users));
    for (int k = 0; k < cfg.users; ++k) {
        channels.push_back(dicts.bs *
                           angular.middleCols(static_cast<Index>(k) * cfg.grid_tx(),
                                              cfg.grid_tx()) *
                           dicts.irs.adjoint());
    }
    return channels;
}

}  // namespace onebit
