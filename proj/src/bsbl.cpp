// SPDX-License-Identifier: Apache-2.0
#include "onebit/bsbl.hpp"

#include <cmath>
#include <memory>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "onebit/numerics.hpp"

namespace onebit {

namespace {

void check_block_dims(Index total, Index block) {
    if (block < 1 || total % block != 0)
        throw InvalidArgumentError("block coefficient length must be a multiple of the block size");
}

// Eigenvalue floor and conditioning cap; keeps B Hermitian positive definite
// without perturbing already well-conditioned inputs.
CMatrix stabilize_correlation(CMatrix corr, const BsblControls& controls) {
    corr = 0.5 * (corr + corr.adjoint());
    const Index d = corr.rows();
    const double mean_diag = corr.diagonal().real().sum() / static_cast<double>(d);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(corr, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const double jitter = controls.jitter_scale * std::max(mean_diag, 1e-300);
    if (lo < jitter) {
        corr.diagonal().array() += Complex(jitter - lo, 0.0);
    }
    const double lo2 = std::max(lo, jitter);
    if (hi / lo2 > controls.condition_cap) {
        corr = (1.0 - controls.shrink_rho) * corr;
        corr.diagonal().array() += Complex(controls.shrink_rho * mean_diag, 0.0);
    }
    return corr;
}

CMatrix covariance_direct_block(const CMatrix& gram, const RVector& gamma,
                                const CMatrix& corr_inv, double noise_var) {
    const Index block = corr_inv.rows();
    CMatrix e = gram / noise_var;
    for (Index b = 0; b < gamma.size(); ++b)
        e.block(b * block, b * block, block, block) += corr_inv / gamma(b);
    Eigen::LLT<CMatrix> llt(0.5 * (e + e.adjoint()));
    if (llt.info() != Eigen::Success) {
        // jitter-and-retry once
        e.diagonal().array() += Complex(1e-10 * e.diagonal().real().mean(), 0.0);
        llt.compute(0.5 * (e + e.adjoint()));
        if (llt.info() != Eigen::Success)
            throw NumericalError("bsbl e-step: posterior system not positive definite");
    }
    return llt.solve(CMatrix::Identity(e.rows(), e.cols()));
}

CMatrix covariance_lemma_block(const CMatrix& op, const RVector& gamma,
                               const CMatrix& corr, double noise_var) {
    const Index block = corr.rows();
    CMatrix scaled(op.rows(), op.cols());  // Op * Sigma_0, block column scaling
    for (Index b = 0; b < gamma.size(); ++b)
        scaled.middleCols(b * block, block) =
            op.middleCols(b * block, block) * (gamma(b) * corr);
    CMatrix inner = scaled * op.adjoint();
    inner.diagonal().array() += noise_var;
    Eigen::LLT<CMatrix> llt(0.5 * (inner + inner.adjoint()));
    if (llt.info() != Eigen::Success) {
        inner.diagonal().array() += Complex(1e-10 * inner.diagonal().real().mean(), 0.0);
        llt.compute(0.5 * (inner + inner.adjoint()));
        if (llt.info() != Eigen::Success)
            throw NumericalError("bsbl e-step: lemma inner system not positive definite");
    }
    const CMatrix solved = llt.solve(scaled);
    CMatrix sigma = -scaled.adjoint() * solved;
    for (Index b = 0; b < gamma.size(); ++b)
        sigma.block(b * block, b * block, block, block) += gamma(b) * corr;
    return 0.5 * (sigma + sigma.adjoint());
}

bool use_lemma(CovarianceRoute route, Index rows, Index cols) {
    switch (route) {
        case CovarianceRoute::Direct: return false;
        case CovarianceRoute::Lemma: return true;
        case CovarianceRoute::Auto: break;
    }
    return static_cast<double>(rows) < 0.8 * static_cast<double>(cols);
}

}  // namespace

CMatrix block_prior_covariance(const RVector& gamma, const CMatrix& corr) {
    const Index block = corr.rows();
    CMatrix out = CMatrix::Zero(gamma.size() * block, gamma.size() * block);
    for (Index b = 0; b < gamma.size(); ++b)
        out.block(b * block, b * block, block, block) = gamma(b) * corr;
    return out;
}

CMatrix block_prior_covariance_inverse(const RVector& gamma, const CMatrix& corr) {
    const CMatrix corr_inv = hermitian_inverse(corr);
    const Index block = corr.rows();
    CMatrix out = CMatrix::Zero(gamma.size() * block, gamma.size() * block);
    for (Index b = 0; b < gamma.size(); ++b)
        out.block(b * block, b * block, block, block) = corr_inv / gamma(b);
    return out;
}

BsblEStep bsbl_e_step(const CMatrix& op, const RVector& gamma, const CMatrix& corr,
                      double noise_var, const CVector& hard, int p_max,
                      const CVector& mu_init, CovarianceRoute route) {
    check_block_dims(op.cols(), corr.rows());
    if (gamma.size() * corr.rows() != op.cols())
        throw InvalidArgumentError("bsbl_e_step: gamma/operator size mismatch");
    if ((gamma.array() <= 0.0).any())
        throw InvalidArgumentError("bsbl_e_step: gamma must be positive");

    BsblEStep out;
    out.covariance = use_lemma(route, op.rows(), op.cols())
                         ? covariance_lemma_block(op, gamma, corr, noise_var)
                         : covariance_direct_block(op.adjoint() * op, gamma,
                                                   hermitian_inverse(corr), noise_var);
    out.mean = mu_init;
    for (int p = 0; p < p_max; ++p) {
        const CVector z = op * out.mean;
        out.soft_mean = posterior_y_mean(hard, z, noise_var);
        out.mean = (out.covariance * (op.adjoint() * out.soft_mean)) / noise_var;
    }
    return out;
}

std::pair<RVector, CMatrix> bsbl_m_step(const CVector& mu, const CMatrix& sigma,
                                        const CMatrix& corr_prev,
                                        const BsblControls& controls) {
    const Index block = corr_prev.rows();
    check_block_dims(mu.size(), block);
    const Index blocks = mu.size() / block;
    const CMatrix prev_inv = hermitian_inverse(corr_prev);

    RVector gamma(blocks);
    std::vector<CMatrix> moments(static_cast<std::size_t>(blocks));
    for (Index b = 0; b < blocks; ++b) {
        const CVector mu_b = mu.segment(b * block, block);
        CMatrix m = sigma.block(b * block, b * block, block, block);
        m += mu_b * mu_b.adjoint();
        gamma(b) = std::max((prev_inv * m).trace().real() / static_cast<double>(block),
                            controls.gamma_floor);
        moments[static_cast<std::size_t>(b)] = std::move(m);
    }

    CMatrix corr = CMatrix::Zero(block, block);
    for (Index b = 0; b < blocks; ++b)
        corr += moments[static_cast<std::size_t>(b)] / gamma(b);
    corr /= static_cast<double>(blocks);
    return {std::move(gamma), stabilize_correlation(std::move(corr), controls)};
}

namespace {

// Block analog of the posterior engine: keeps the covariance in factored
// form and exposes its KN x KN diagonal blocks plus solves.
class BlockPosteriorEngine {
public:
    // direct: factor Sigma0^-1 + s^-2 Gram and invert the triangle once
    BlockPosteriorEngine(const CMatrix& gram, const RVector& gamma,
                         const CMatrix& corr_inv, double noise_var)
        : compact_(false), block_(corr_inv.rows()) {
        CMatrix e = gram / noise_var;
        for (Index b = 0; b < gamma.size(); ++b)
            e.block(b * block_, b * block_, block_, block_) += corr_inv / gamma(b);
        llt_.compute(0.5 * (e + e.adjoint()));
        if (llt_.info() != Eigen::Success) {
            e.diagonal().array() += Complex(1e-10 * e.diagonal().real().mean(), 0.0);
            llt_.compute(0.5 * (e + e.adjoint()));
            if (llt_.info() != Eigen::Success)
                throw NumericalError("block posterior system not positive definite");
        }
        const CMatrix l = llt_.matrixL();
        inv_l_ = l.triangularView<Eigen::Lower>().solve(
            CMatrix::Identity(e.rows(), e.cols()));
        noise_var_ = noise_var;
    }

    // compact: Woodbury through C with C^H C = Gram
    BlockPosteriorEngine(const CMatrix& factor, const RVector& gamma,
                         const CMatrix& corr, double noise_var, bool /*compact_tag*/)
        : compact_(true), block_(corr.rows()), gamma_(gamma), corr_(corr) {
        scaled_ = CMatrix(factor.rows(), factor.cols());  // C Sigma0
        for (Index b = 0; b < gamma.size(); ++b)
            scaled_.middleCols(b * block_, block_) =
                factor.middleCols(b * block_, block_) * (gamma(b) * corr);
        CMatrix inner = scaled_ * factor.adjoint();
        inner.diagonal().array() += noise_var;
        llt_.compute(0.5 * (inner + inner.adjoint()));
        if (llt_.info() != Eigen::Success) {
            inner.diagonal().array() +=
                Complex(1e-10 * inner.diagonal().real().mean(), 0.0);
            llt_.compute(0.5 * (inner + inner.adjoint()));
            if (llt_.info() != Eigen::Success)
                throw NumericalError("block posterior inner system not positive definite");
        }
        const CMatrix l = llt_.matrixL();
        t_ = l.triangularView<Eigen::Lower>().solve(scaled_);
        noise_var_ = noise_var;
    }

    CMatrix covariance_block(Index b) const {
        if (!compact_) {
            // Sigma = L^-H L^-1: block (b,b) = (cols of inv_l)^H (cols of inv_l)
            const auto cols = inv_l_.middleCols(b * block_, block_);
            return cols.adjoint() * cols;
        }
        const auto cols = t_.middleCols(b * block_, block_);
        return gamma_(b) * corr_ - cols.adjoint() * cols;
    }

    CVector mean_from(const CVector& v) const {
        if (!compact_) return llt_.solve(v) / noise_var_;
        // Sigma v = Sigma0 v - (C Sigma0)^H W^-1 (C Sigma0) v
        CVector sv(v.size());
        for (Index b = 0; b < gamma_.size(); ++b)
            sv.segment(b * block_, block_) =
                (gamma_(b) * corr_) * v.segment(b * block_, block_);
        return (sv - scaled_.adjoint() * llt_.solve(scaled_ * v)) / noise_var_;
    }

private:
    bool compact_;
    Index block_;
    double noise_var_ = 1.0;
    RVector gamma_;
    CMatrix corr_;
    CMatrix scaled_;
    CMatrix t_;
    CMatrix inv_l_;
    Eigen::LLT<CMatrix> llt_;
};

}  // namespace

BsblResult bsbl_estimate(const CMatrix& op, const CVector& hard, double noise_var,
                         int block_size, const BsblControls& controls,
                         const CMatrix* gram_factor) {
    const Index rows = op.rows();
    const Index n = op.cols();
    check_block_dims(n, block_size);
    if (hard.size() != rows)
        throw InvalidArgumentError("bsbl_estimate: observation/operator size mismatch");
    if (gram_factor && gram_factor->cols() != n)
        throw InvalidArgumentError("bsbl_estimate: gram factor width mismatch");
    const Index blocks = n / block_size;

    const bool compact = gram_factor && gram_factor->rows() < n;
    CMatrix gram;
    if (!compact) gram = op.adjoint() * op;

    RVector gamma = RVector::Constant(blocks, 1e-3);
    CMatrix corr = CMatrix::Identity(block_size, block_size);
    CVector mu = ridge_least_squares(op, hard, controls.ridge_scale, gram_factor);

    BsblResult result;
    result.diagnostics.hyper_change.reserve(static_cast<std::size_t>(controls.max_em_iters));

    for (int iter = 0; iter < controls.max_em_iters; ++iter) {
        std::unique_ptr<BlockPosteriorEngine> engine;
        try {
            if (compact) {
                engine = std::make_unique<BlockPosteriorEngine>(*gram_factor, gamma,
                                                                corr, noise_var, true);
            } else if (use_lemma(controls.route, rows, n)) {
                engine = std::make_unique<BlockPosteriorEngine>(op, gamma, corr,
                                                                noise_var, true);
            } else {
                engine = std::make_unique<BlockPosteriorEngine>(
                    gram, gamma, hermitian_inverse(corr), noise_var);
            }
        } catch (const std::exception& e) {
            throw NumericalError("bsbl_estimate: iteration " + std::to_string(iter) +
                                 ": " + e.what());
        }

        for (int p = 0; p < controls.p_max; ++p) {
            const CVector z = op * mu;
            const CVector mean_y = posterior_y_mean(hard, z, noise_var);
            mu = engine->mean_from(op.adjoint() * mean_y);
        }

        // Per-block variances against the previous correlation, then the
        // refreshed correlation against the new variances.
        const CMatrix prev_inv = hermitian_inverse(corr);
        CMatrix corr_sum = CMatrix::Zero(block_size, block_size);
        double change = 0.0;
        const double scale = std::max(gamma.lpNorm<Eigen::Infinity>(), 1e-300);
        for (Index b = 0; b < blocks; ++b) {
            const CVector mu_b = mu.segment(b * block_size, block_size);
            CMatrix m = engine->covariance_block(b);
            m += mu_b * mu_b.adjoint();
            const double updated =
                std::max((prev_inv * m).trace().real() / static_cast<double>(block_size),
                         controls.gamma_floor);
            change = std::max(change, std::abs(updated - gamma(b)));
            gamma(b) = updated;
            corr_sum += m / updated;
        }
        corr = stabilize_correlation(corr_sum / static_cast<double>(blocks), controls);

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
    result.gamma = std::move(gamma);
    result.correlation = std::move(corr);
    return result;
}

std::vector<CMatrix> recover_cascaded_block(const CVector& coefficients,
                                            const VadDictionaries& dicts,
                                            const SystemConfig& cfg) {
    const Index block = static_cast<Index>(cfg.users) * cfg.irs_elements();
    const Index expected = block * cfg.grid_rx;
    if (coefficients.size() != expected)
        throw InvalidArgumentError("recover_cascaded_block: coefficient length mismatch");
    Eigen::Map<const CMatrix> transposed(coefficients.data(), block, cfg.grid_rx);
    const CMatrix wide = transposed.transpose();  // G_r x (K N)
    std::vector<CMatrix> channels;
    channels.reserve(static_cast<std::size_t>(cfg.users));
    for (int k = 0; k < cfg.users; ++k)
        channels.push_back(dicts.bs * wide.middleCols(static_cast<Index>(k) * cfg.irs_elements(),
                                                      cfg.irs_elements()));
    return channels;
}

}  // namespace onebit
