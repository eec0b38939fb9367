// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "onebit/channel.hpp"
#include "onebit/measurement.hpp"

namespace onebit {

enum class EstimatorKind { Sbl, Bsbl, TwoStage, EmBpdn, Oracle };

std::string estimator_name(EstimatorKind kind);
/// Parses a comma-separated list like "sbl,bsbl,two-stage,em-bpdn,oracle".
std::vector<EstimatorKind> parse_estimator_list(const std::string& text);

enum class SweepAxis { SnrDb, PilotSlots, IrsElements, SupportThreshold };

std::string sweep_axis_name(SweepAxis axis);

struct ExperimentSpec {
    SystemConfig base;
    SweepAxis axis = SweepAxis::SnrDb;
    std::vector<double> values;
    std::vector<EstimatorKind> estimators = {EstimatorKind::Sbl, EstimatorKind::Bsbl,
                                             EstimatorKind::TwoStage,
                                             EstimatorKind::EmBpdn};
    int runs = 50;
    std::uint64_t seed = 1;
    PhaseMode phase_mode = PhaseMode::Random;
    bool redraw_pilots_per_run = true;
    // Wall-clock means are reported as 0 unless enabled, so that equal seeds
    // produce byte-identical CSV output.
    bool record_timing = false;

    void validate() const;
};

/// One (sweep value, estimator, run) outcome; streamed to the observer.
struct RunRecord {
    int sweep_index = 0;
    double sweep_value = 0.0;
    int run_index = 0;
    EstimatorKind estimator = EstimatorKind::Sbl;
    double nmse = 0.0;
    std::optional<double> accuracy;
    int iterations = 0;
    double wall_ms = 0.0;
    std::string error;  // nonempty when the run failed
};

/// Aggregate over runs for one (sweep value, estimator) cell. NMSE is
/// averaged in the linear domain; dB conversion happens at output only.
struct ResultRow {
    std::string estimator;
    std::string sweep_name;
    double sweep_value = 0.0;
    double nmse_linear = 0.0;
    std::optional<double> accuracy;
    double mean_iters = 0.0;
    double mean_wall_ms = 0.0;
    int errors = 0;
    int runs = 0;
};

using RunObserver = std::function<void(const RunRecord&)>;

/// Runs the Monte-Carlo sweep. Runs are distributed over a worker pool
/// (capped by the ONEBIT_THREADS environment variable) with per-run streams
/// derived by seed-splitting, so parallel and serial schedules produce
/// identical aggregates. All estimators inside one (sweep value, run) cell
/// share the same realization, frame and observation. Failed runs are
/// excluded from aggregates and counted in the error column. The observer,
/// when given, is invoked for every finished run in deterministic order.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec,
                                      const RunObserver& observer = {});

/// Header: estimator,sweep_name,sweep_value,nmse_db,accuracy,mean_iters,
/// mean_wall_ms,errors,runs. Accuracy is empty for estimators without a
/// support-detection stage.
void write_csv(const std::vector<ResultRow>& rows, std::ostream& os);

}  // namespace onebit
