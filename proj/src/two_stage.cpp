// SPDX-License-Identifier: Apache-2.0
#include "onebit/two_stage.hpp"

#include "onebit/numerics.hpp"

namespace onebit {

SupportSet detect_support(const RVector& gamma, double threshold) {
    if (!(threshold > 0.0))
        throw InvalidArgumentError("detect_support: threshold must be positive");
    SupportSet s;
    s.threshold = threshold;
    s.source = gamma;
    for (Index i = 0; i < gamma.size(); ++i)
        if (gamma(i) > threshold) s.rows.push_back(static_cast<int>(i));
    if (s.rows.empty())
        throw EmptySupportError("detect_support: no block variance exceeds the threshold");
    return s;
}

CMatrix reduced_operator(const PilotFrame& frame, const VadDictionaries& dicts,
                         const SupportSet& support) {
    if (support.rows.empty())
        throw InvalidArgumentError("reduced_operator: empty support");
    CMatrix bs_cols(dicts.bs.rows(), static_cast<Index>(support.rows.size()));
    for (std::size_t i = 0; i < support.rows.size(); ++i)
        bs_cols.col(static_cast<Index>(i)) = dicts.bs.col(support.rows[i]);
    return kron(frame.effective_pilots.transpose(), bs_cols);
}

TwoStageResult two_stage_estimate(const PilotFrame& frame, const QuantizedObservation& obs,
                                  const SystemConfig& cfg, const VadDictionaries& dicts,
                                  const BsblControls& stage1_controls,
                                  const SblControls& stage2_controls) {
    TwoStageResult result;

    const CMatrix stage1_factor = block_gram_factor(frame, dicts);
    const BsblResult stage1 =
        bsbl_estimate(frame.block_operator, obs.hard_block, obs.noise_var,
                      cfg.users * cfg.irs_elements(), stage1_controls, &stage1_factor);
    result.gamma = stage1.gamma;
    result.stage1 = stage1.diagnostics;

    try {
        result.support = detect_support(stage1.gamma, cfg.gamma_th);
    } catch (const EmptySupportError&) {
        result.used_fallback = true;
        result.channels = recover_cascaded_block(stage1.coefficients, dicts, cfg);
        return result;
    }

    const CMatrix op = reduced_operator(frame, dicts, result.support);
    CMatrix bs_cols(dicts.bs.rows(), static_cast<Index>(result.support.rows.size()));
    for (std::size_t i = 0; i < result.support.rows.size(); ++i)
        bs_cols.col(static_cast<Index>(i)) = dicts.bs.col(result.support.rows[i]);
    const CMatrix stage2_factor = reduced_gram_factor(frame, bs_cols);
    const SblResult stage2 =
        sbl_estimate(op, obs.hard, obs.noise_var, stage2_controls, &stage2_factor);
    result.stage2 = stage2.diagnostics;

    const Index rows = static_cast<Index>(result.support.rows.size());
    const Index wide_cols = static_cast<Index>(cfg.users) * cfg.grid_tx();
    Eigen::Map<const CMatrix> reduced(stage2.coefficients.data(), rows, wide_cols);
    CMatrix angular = CMatrix::Zero(cfg.grid_rx, wide_cols);
    for (Index i = 0; i < rows; ++i)
        angular.row(result.support.rows[static_cast<std::size_t>(i)]) = reduced.row(i);

    result.channels.reserve(static_cast<std::size_t>(cfg.users));
    for (int k = 0; k < cfg.users; ++k)
        result.channels.push_back(
            dicts.bs *
            angular.middleCols(static_cast<Index>(k) * cfg.grid_tx(), cfg.grid_tx()) *
            dicts.irs.adjoint());
    return result;
}

}  // namespace onebit
