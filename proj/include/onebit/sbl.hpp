// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "onebit/channel.hpp"
#include "onebit/types.hpp"

namespace onebit {

enum class CovarianceRoute {
    Auto,    // lemma when rows < 0.8 * active columns, direct otherwise
    Direct,  // invert (Diag(alpha)^-1 + sigma^-2 Op^H Op)
    Lemma    // A - A Op^H (sigma^2 I + Op A Op^H)^-1 Op A
};

struct SblControls {
    double alpha_floor = 1e-12;
    int p_max = 5;
    int max_em_iters = 150;
    double em_tol = 1e-3;
    CovarianceRoute route = CovarianceRoute::Auto;
    double ridge_scale = 1e-6;  // scaling of the trace-relative ridge init
    bool record_trace = false;  // keep per-iteration coefficient snapshots

    static SblControls from_config(const SystemConfig& cfg) {
        SblControls c;
        c.p_max = cfg.p_max;
        c.max_em_iters = cfg.max_em_iters;
        c.em_tol = cfg.em_tol;
        return c;
    }
};

struct SblDiagnostics {
    int iterations = 0;
    std::vector<double> hyper_change;      // relative change per outer iteration
    std::vector<CVector> trace;            // per-iteration estimates (optional)
    bool converged = false;
};

struct SblResult {
    CVector coefficients;  // posterior mean of the angular channel vector
    RVector alpha;         // learned prior variances
    SblDiagnostics diagnostics;
};

/// Posterior covariance of the coefficient factor:
/// (Diag(alpha)^-1 + sigma^-2 Op^H Op)^-1, via the requested route.
CMatrix e_step_covariance(const CMatrix& op, const RVector& alpha, double noise_var,
                          CovarianceRoute route = CovarianceRoute::Auto);

/// Elementwise posterior mean of the unquantized signal given one-bit
/// observations `hard` and the current linear predictor z = Op * mu.
CVector posterior_y_mean(const CVector& hard, const CVector& z, double noise_var);

/// Hyperparameter update: alpha_n = |mu_n|^2 + Sigma_nn, clamped at `floor`.
RVector m_step_alpha(const CVector& mu, const CMatrix& sigma, double floor = 1e-12);

/// Ridge-regularized least squares Op^dagger * target used to seed the
/// variational iterations; ridge = scale * trace(Op^H Op) / cols. The
/// optional compact factor (C^H C = Op^H Op) routes the solve through the
/// smaller inner system.
CVector ridge_least_squares(const CMatrix& op, const CVector& target,
                            double scale = 1e-6, const CMatrix* gram_factor = nullptr);

/// Variational-EM estimator for one-bit measurements with an elementwise
/// Gaussian prior. Outer loop: covariance refresh and hyperparameter update;
/// inner loop: p_max alternations of the truncated-Gaussian signal mean and
/// the coefficient mean.
///
/// `gram_factor`, when given, must satisfy C^H C = Op^H Op with fewer rows
/// than Op has columns (Kronecker-structured operators have exact low rank);
/// the covariance algebra then runs through the compact factor instead of a
/// full-size factorization. Results are identical up to roundoff.
SblResult sbl_estimate(const CMatrix& op, const CVector& hard, double noise_var,
                       const SblControls& controls = {},
                       const CMatrix* gram_factor = nullptr);

/// Folds an angular-domain estimate of length K G_r G_t back into per-user
/// cascaded channels through the dictionaries.
std::vector<CMatrix> recover_cascaded(const CVector& coefficients,
                                      const VadDictionaries& dicts,
                                      const SystemConfig& cfg);

}  // namespace onebit
