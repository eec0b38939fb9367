// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "onebit/types.hpp"

namespace onebit {

/// Per-run normalized mean square error: the Frobenius error ratio averaged
/// over users. Throws on a zero-norm true channel.
double nmse(const std::vector<CMatrix>& truth, const std::vector<CMatrix>& estimate);

/// 10 log10(x).
double to_db(double x);

/// Row-support recovery accuracy over `grid_rows` binary decisions:
/// (TP + TN) / grid_rows.
double support_accuracy(const std::vector<int>& true_rows,
                        const std::vector<int>& detected_rows, int grid_rows);

}  // namespace onebit
