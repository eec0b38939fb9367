// SPDX-License-Identifier: Apache-2.0
#include "onebit/baselines.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "onebit/numerics.hpp"

namespace onebit {

Complex complex_soft_threshold(Complex value, double tau) {
    const double magnitude = std::abs(value);
    if (magnitude <= tau) return Complex(0.0, 0.0);
    return value * ((magnitude - tau) / magnitude);
}

CVector complex_soft_threshold(const CVector& v, double tau) {
    CVector out(v.size());
    for (Index i = 0; i < v.size(); ++i) out(i) = complex_soft_threshold(v(i), tau);
    return out;
}

double lipschitz_power_iteration(const CMatrix& op, int iterations) {
    const Index n = op.cols();
    RandomSource rng(0x9E3779B97F4A7C15ULL);
    CVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = rng.complex_gaussian(1.0);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        const CVector w = op.adjoint() * (op * v);
        lambda = w.norm();
        if (lambda <= 0.0) return 0.0;
        v = w / lambda;
    }
    return lambda;
}

namespace {

struct QuadraticForm {
    const CMatrix& gram;    // full Gram, or a compact factor C (C^H C = Gram)
    bool factored;
    const CVector& linear;  // Op^H target
    double constant;        // ||target||^2

    CVector apply(const CVector& x) const {
        if (factored) return gram.adjoint() * (gram * x);
        return gram * x;
    }

    // f(x) = ||Op x - target||^2 given the cached Gram pieces; gx is reused
    // for the gradient.
    double value(const CVector& x, const CVector& gx) const {
        return x.dot(gx).real() - 2.0 * x.dot(linear).real() + constant;
    }
};

CVector fista_core(const QuadraticForm& q, double weight, double lipschitz,
                   const CVector& x0, const FistaControls& controls,
                   std::vector<double>* objective_trace) {
    const double step = 1.0 / std::max(lipschitz, 1e-300);
    CVector x_prev = x0;
    CVector x = x0;
    CVector y = x0;
    double t = 1.0;

    CVector gx = q.apply(x);
    double f_best = q.value(x, gx) + weight * x.lpNorm<1>();
    if (objective_trace) objective_trace->push_back(f_best);

    for (int k = 0; k < controls.max_inner_iters; ++k) {
        const CVector gy = q.apply(y);
        const CVector gradient = 2.0 * (gy - q.linear);
        const CVector z = complex_soft_threshold(y - step * gradient, weight * step);

        const CVector gz = q.apply(z);
        const double f_z = q.value(z, gz) + weight * z.lpNorm<1>();

        // monotone variant: keep the best iterate, steer momentum with the
        // proximal point
        x_prev = x;
        const double f_old = f_best;
        if (f_z <= f_best) {
            x = z;
            f_best = f_z;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = x + (t / t_next) * (z - x) + ((t - 1.0) / t_next) * (x - x_prev);
        t = t_next;

        if (objective_trace) objective_trace->push_back(f_best);
        if (std::abs(f_old - f_best) <= controls.inner_tol * std::max(std::abs(f_old), 1e-300))
            break;
    }
    return x;
}

}  // namespace

CVector fista_solve(const CMatrix& op, const CVector& target, double weight,
                    const CVector& x0, const FistaControls& controls,
                    std::vector<double>* objective_trace) {
    if (op.rows() != target.size() || op.cols() != x0.size())
        throw InvalidArgumentError("fista_solve: dimension mismatch");
    const CMatrix gram = op.adjoint() * op;
    const CVector linear = op.adjoint() * target;
    const QuadraticForm q{gram, false, linear, target.squaredNorm()};
    const double lipschitz = 2.0 * lipschitz_power_iteration(op, controls.power_iters);
    return fista_core(q, weight, lipschitz, x0, controls, objective_trace);
}

CVector em_bpdn_estimate(const CMatrix& op, const CVector& hard, double noise_var,
                         const FistaControls& controls, FistaDiagnostics* diagnostics,
                         const CMatrix* gram_factor) {
    if (op.rows() != hard.size())
        throw InvalidArgumentError("em_bpdn_estimate: observation/operator size mismatch");

    const bool factored = gram_factor && gram_factor->rows() < op.cols();
    const CMatrix gram = factored ? *gram_factor : CMatrix(op.adjoint() * op);
    const double lipschitz =
        2.0 * lipschitz_power_iteration(factored ? *gram_factor : op,
                                        controls.power_iters);
    const double weight = noise_var * controls.eta;

    CVector h = ridge_least_squares(op, hard, controls.ridge_scale, gram_factor);
    if (diagnostics) *diagnostics = {};

    for (int iter = 0; iter < controls.max_em_iters; ++iter) {
        const CVector z = op * h;
        const CVector soft = posterior_y_mean(hard, z, noise_var);
        const CVector linear = op.adjoint() * soft;
        const QuadraticForm q{gram, factored, linear, soft.squaredNorm()};

        std::vector<double>* trace = nullptr;
        if (diagnostics) {
            diagnostics->objective.clear();
            trace = &diagnostics->objective;
        }
        const CVector updated = fista_core(q, weight, lipschitz, h, controls, trace);

        const double scale = std::max(h.lpNorm<Eigen::Infinity>(), 1e-300);
        const double change = (updated - h).lpNorm<Eigen::Infinity>() / scale;
        h = updated;
        if (diagnostics) diagnostics->outer_iterations = iter + 1;
        if (change < controls.em_tol) {
            if (diagnostics) diagnostics->converged = true;
            break;
        }
    }
    return h;
}

OracleResult oracle_map_estimate(const PilotFrame& frame, const VadDictionaries& dicts,
                                 const SystemConfig& cfg, const ChannelRealization& real,
                                 const CVector& hard, double noise_var,
                                 const SblControls& controls) {
    if (!real.on_grid)
        throw ModeError("oracle_map_estimate: requires an on-grid realization");

    // Global coefficient indices of the true (row, column, user) support.
    std::vector<Index> support;
    for (int k = 0; k < cfg.users; ++k) {
        for (std::size_t l = 0; l < real.row_support.size(); ++l) {
            const int row = real.row_support[l];
            for (int col : real.col_supports[static_cast<std::size_t>(k)][l]) {
                support.push_back(
                    (static_cast<Index>(k) * cfg.grid_tx() + col) * cfg.grid_rx + row);
            }
        }
    }
    std::sort(support.begin(), support.end());

    const Index ns = static_cast<Index>(support.size());
    CMatrix op_s(frame.smv_operator.rows(), ns);
    for (Index i = 0; i < ns; ++i)
        op_s.col(i) = frame.smv_operator.col(support[static_cast<std::size_t>(i)]);

    // The genie knows the generative model, so the fixed prior variance is
    // the true second moment of a support entry, M N / (L_G L_r). There is
    // no hyperparameter update.
    const double prior_variance =
        static_cast<double>(cfg.bs_antennas) * cfg.irs_elements() /
        (static_cast<double>(cfg.paths_irs_bs) * cfg.paths_user_irs);
    CMatrix e = (op_s.adjoint() * op_s) / noise_var;
    e.diagonal().array() += 1.0 / prior_variance;
    const CMatrix sigma = hermitian_inverse(e);

    CVector mu = ridge_least_squares(op_s, hard, controls.ridge_scale);
    OracleResult result;
    for (int iter = 0; iter < controls.max_em_iters; ++iter) {
        CVector mu_next = mu;
        for (int p = 0; p < controls.p_max; ++p) {
            const CVector z = op_s * mu_next;
            const CVector soft = posterior_y_mean(hard, z, noise_var);
            mu_next = (sigma * (op_s.adjoint() * soft)) / noise_var;
        }
        const double scale = std::max(mu.lpNorm<Eigen::Infinity>(), 1e-300);
        const double change = (mu_next - mu).lpNorm<Eigen::Infinity>() / scale;
        mu = mu_next;
        result.iterations = iter + 1;
        if (change < controls.em_tol) break;
    }

    result.coefficients = CVector::Zero(frame.smv_operator.cols());
    for (Index i = 0; i < ns; ++i)
        result.coefficients(support[static_cast<std::size_t>(i)]) = mu(i);
    result.channels = recover_cascaded(result.coefficients, dicts, cfg);
    return result;
}

}  // namespace onebit
