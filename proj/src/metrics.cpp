// SPDX-License-Identifier: Apache-2.0
#include "onebit/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace onebit {

double nmse(const std::vector<CMatrix>& truth, const std::vector<CMatrix>& estimate) {
    if (truth.empty() || truth.size() != estimate.size())
        throw InvalidArgumentError("nmse: channel list size mismatch");
    double sum = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        if (truth[k].rows() != estimate[k].rows() || truth[k].cols() != estimate[k].cols())
            throw InvalidArgumentError("nmse: channel shape mismatch");
        const double denom = truth[k].squaredNorm();
        if (denom <= 0.0) throw InvalidArgumentError("nmse: zero true channel");
        sum += (truth[k] - estimate[k]).squaredNorm() / denom;
    }
    return sum / static_cast<double>(truth.size());
}

double to_db(double x) { return 10.0 * std::log10(x); }

double support_accuracy(const std::vector<int>& true_rows,
                        const std::vector<int>& detected_rows, int grid_rows) {
    if (grid_rows < 1) throw InvalidArgumentError("support_accuracy: grid must be >= 1");
    std::vector<char> truth(static_cast<std::size_t>(grid_rows), 0);
    std::vector<char> detected(static_cast<std::size_t>(grid_rows), 0);
    for (int r : true_rows) {
        if (r < 0 || r >= grid_rows)
            throw InvalidArgumentError("support_accuracy: row index out of range");
        truth[static_cast<std::size_t>(r)] = 1;
    }
    for (int r : detected_rows) {
        if (r < 0 || r >= grid_rows)
            throw InvalidArgumentError("support_accuracy: row index out of range");
        detected[static_cast<std::size_t>(r)] = 1;
    }
    int correct = 0;
    for (int r = 0; r < grid_rows; ++r)
        if (truth[static_cast<std::size_t>(r)] == detected[static_cast<std::size_t>(r)])
            ++correct;
    return static_cast<double>(correct) / static_cast<double>(grid_rows);
}

}  // namespace onebit
