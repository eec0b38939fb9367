// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "onebit/sbl.hpp"

namespace onebit {

struct BsblControls {
    double gamma_floor = 1e-12;
    double jitter_scale = 1e-10;   // floor on eigenvalues of B, relative to mean diag
    double condition_cap = 1e12;   // shrink B toward identity above this
    double shrink_rho = 0.01;
    int p_max = 5;
    int max_em_iters = 150;
    double em_tol = 1e-3;
    CovarianceRoute route = CovarianceRoute::Auto;
    double ridge_scale = 1e-6;
    bool record_trace = false;

    static BsblControls from_config(const SystemConfig& cfg) {
        BsblControls c;
        c.p_max = cfg.p_max;
        c.max_em_iters = cfg.max_em_iters;
        c.em_tol = cfg.em_tol;
        return c;
    }
};

struct BsblEStep {
    CVector mean;       // mu for the block coefficient vector
    CMatrix covariance; // its posterior covariance
    CVector soft_mean;  // posterior mean of the unquantized block observation
};

struct BsblResult {
    CVector coefficients;  // block-sparse coefficient estimate
    RVector gamma;         // per-block variances (support statistic)
    CMatrix correlation;   // shared intra-block correlation B
    SblDiagnostics diagnostics;
};

/// Dense prior covariance Diag(gamma_1 B, ..., gamma_Gr B) and its inverse,
/// both assembled block-by-block.
CMatrix block_prior_covariance(const RVector& gamma, const CMatrix& corr);
CMatrix block_prior_covariance_inverse(const RVector& gamma, const CMatrix& corr);

/// One variational E-step for the block model: covariance
/// (Sigma_0^-1 + sigma^-2 Op^H Op)^-1 followed by p_max alternations of the
/// signal mean and coefficient mean starting from `mu_init`. A positive
/// definiteness failure is retried once with a jittered system before
/// raising.
BsblEStep bsbl_e_step(const CMatrix& op, const RVector& gamma, const CMatrix& corr,
                      double noise_var, const CVector& hard, int p_max,
                      const CVector& mu_init,
                      CovarianceRoute route = CovarianceRoute::Auto);

/// M-step: per-block variances against the previous correlation matrix,
/// then the refreshed correlation against the new variances. The returned
/// B is symmetrized, eigenvalue-floored and condition-capped.
std::pair<RVector, CMatrix> bsbl_m_step(const CVector& mu, const CMatrix& sigma,
                                        const CMatrix& corr_prev,
                                        const BsblControls& controls = {});

/// Variational-EM estimator with a block-sparse prior sharing one intra-block
/// correlation matrix across blocks. `gram_factor` is the optional compact
/// C with C^H C = Op^H Op, as in sbl_estimate.
BsblResult bsbl_estimate(const CMatrix& op, const CVector& hard, double noise_var,
                         int block_size, const BsblControls& controls = {},
                         const CMatrix* gram_factor = nullptr);

/// Folds a block-domain estimate of length K G_r N back into per-user
/// cascaded channels (receive-side dictionary only).
std::vector<CMatrix> recover_cascaded_block(const CVector& coefficients,
                                            const VadDictionaries& dicts,
                                            const SystemConfig& cfg);

}  // namespace onebit
