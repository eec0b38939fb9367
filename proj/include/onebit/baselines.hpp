// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "onebit/measurement.hpp"
#include "onebit/sbl.hpp"

namespace onebit {

struct FistaControls {
    double eta = 0.6;          // l1 weight (the objective carries sigma^2 eta)
    int max_inner_iters = 200;
    double inner_tol = 1e-6;   // relative objective change
    int power_iters = 30;      // Lipschitz estimate of 2 lambda_max(Op^H Op)
    int max_em_iters = 150;
    double em_tol = 1e-3;
    double ridge_scale = 1e-6;
};

struct FistaDiagnostics {
    int outer_iterations = 0;
    std::vector<double> objective;  // inner objective of the last outer solve
    bool converged = false;
};

/// Proximal map of tau * ||.||_1 on complex moduli: shrinks the modulus by
/// tau, preserves the phase.
Complex complex_soft_threshold(Complex value, double tau);
CVector complex_soft_threshold(const CVector& v, double tau);

/// Largest eigenvalue of Op^H Op estimated by power iteration.
double lipschitz_power_iteration(const CMatrix& op, int iterations);

/// Monotone FISTA for min ||Op x - target||^2 + weight * ||x||_1, warm
/// started at x0. The tracked objective never increases.
CVector fista_solve(const CMatrix& op, const CVector& target, double weight,
                    const CVector& x0, const FistaControls& controls,
                    std::vector<double>* objective_trace = nullptr);

/// EM baseline with a fixed Laplace prior: alternates the truncated-Gaussian
/// signal mean with an l1-regularized least-squares fit solved by FISTA.
/// `gram_factor` as in sbl_estimate.
CVector em_bpdn_estimate(const CMatrix& op, const CVector& hard, double noise_var,
                         const FistaControls& controls = {},
                         FistaDiagnostics* diagnostics = nullptr,
                         const CMatrix* gram_factor = nullptr);

struct OracleResult {
    std::vector<CMatrix> channels;
    CVector coefficients;  // full-length angular vector, zero off support
    int iterations = 0;
};

/// Genie-aided lower bound: the variational machinery restricted to the true
/// support columns with unit prior variance and no hyperparameter update.
/// Requires an on-grid realization.
OracleResult oracle_map_estimate(const PilotFrame& frame, const VadDictionaries& dicts,
                                 const SystemConfig& cfg, const ChannelRealization& real,
                                 const CVector& hard, double noise_var,
                                 const SblControls& controls = {});

}  // namespace onebit
