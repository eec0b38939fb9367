// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "onebit/bsbl.hpp"
#include "onebit/measurement.hpp"

namespace onebit {

/// Detected shared row support.
struct SupportSet {
    std::vector<int> rows;  // ascending 0-based indices
    double threshold = 0.0;
    RVector source;  // the per-block variances the set was read from
};

/// Strict thresholding of the block variances. Throws EmptySupportError when
/// nothing exceeds the threshold.
SupportSet detect_support(const RVector& gamma, double threshold);

/// Row-restricted sensing operator Phi^T kron U_R[:, rows].
CMatrix reduced_operator(const PilotFrame& frame, const VadDictionaries& dicts,
                         const SupportSet& support);

struct TwoStageResult {
    std::vector<CMatrix> channels;
    SupportSet support;
    RVector gamma;           // stage-1 block variances
    bool used_fallback = false;  // true when stage 2 was skipped (empty support)
    SblDiagnostics stage1;
    SblDiagnostics stage2;
};

/// Stage 1 detects the shared row support with the block estimator; stage 2
/// reruns the elementwise estimator on the row-restricted operator and embeds
/// the result into a zero-padded angular matrix. On empty support the stage-1
/// channel estimate is returned with `used_fallback` set.
TwoStageResult two_stage_estimate(const PilotFrame& frame, const QuantizedObservation& obs,
                                  const SystemConfig& cfg, const VadDictionaries& dicts,
                                  const BsblControls& stage1_controls = {},
                                  const SblControls& stage2_controls = {});

}  // namespace onebit
