// SPDX-License-Identifier: Apache-2.0
#include "onebit/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <thread>

#include "onebit/baselines.hpp"
#include "onebit/metrics.hpp"
#include "onebit/two_stage.hpp"

namespace onebit {

std::string estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Sbl: return "sbl";
        case EstimatorKind::Bsbl: return "bsbl";
        case EstimatorKind::TwoStage: return "two-stage";
        case EstimatorKind::EmBpdn: return "em-bpdn";
        case EstimatorKind::Oracle: return "oracle";
    }
    return "unknown";
}

std::vector<EstimatorKind> parse_estimator_list(const std::string& text) {
    std::vector<EstimatorKind> kinds;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        if (token == "sbl") kinds.push_back(EstimatorKind::Sbl);
        else if (token == "bsbl") kinds.push_back(EstimatorKind::Bsbl);
        else if (token == "two-stage") kinds.push_back(EstimatorKind::TwoStage);
        else if (token == "em-bpdn") kinds.push_back(EstimatorKind::EmBpdn);
        else if (token == "oracle") kinds.push_back(EstimatorKind::Oracle);
        else throw InvalidArgumentError("unknown estimator '" + token + "'");
    }
    if (kinds.empty()) throw InvalidArgumentError("estimator list is empty");
    return kinds;
}

std::string sweep_axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::SnrDb: return "snr_db";
        case SweepAxis::PilotSlots: return "q";
        case SweepAxis::IrsElements: return "n";
        case SweepAxis::SupportThreshold: return "gamma_th";
    }
    return "unknown";
}

void ExperimentSpec::validate() const {
    if (values.empty()) throw InvalidArgumentError("experiment: sweep values are empty");
    if (runs < 1) throw InvalidArgumentError("experiment: runs must be >= 1");
    if (estimators.empty())
        throw InvalidArgumentError("experiment: estimator set is empty");
    base.validate();
}

namespace {

SystemConfig config_for_value(const ExperimentSpec& spec, double value) {
    SystemConfig cfg = spec.base;
    switch (spec.axis) {
        case SweepAxis::SnrDb:
            cfg.set_snr_db(value);
            break;
        case SweepAxis::PilotSlots:
            cfg.pilot_slots = static_cast<int>(value);
            break;
        case SweepAxis::IrsElements: {
            const int n = static_cast<int>(value);
            if (n % cfg.irs_x != 0)
                throw ConfigError("sweep-n: N must be divisible by the panel width Nx");
            const int ratio_y = cfg.grid_tx_y / cfg.irs_y;
            if (ratio_y * cfg.irs_y != cfg.grid_tx_y)
                throw ConfigError("sweep-n: G_ty must be an integer multiple of Ny");
            cfg.irs_y = n / cfg.irs_x;
            cfg.grid_tx_y = ratio_y * cfg.irs_y;
            break;
        }
        case SweepAxis::SupportThreshold:
            cfg.gamma_th = value;
            break;
    }
    cfg.validate();
    return cfg;
}

struct RunOutput {
    std::vector<RunRecord> records;  // one per estimator
};

RunOutput execute_run(const ExperimentSpec& spec, const SystemConfig& cfg,
                      int sweep_index, double value, int run_index) {
    RunOutput out;
    RandomSource rng(derive_seed(spec.seed, static_cast<std::uint64_t>(sweep_index),
                                 static_cast<std::uint64_t>(run_index)));
    const VadDictionaries dicts = build_dictionaries(cfg);

    const ChannelRealization real = generate_channels(cfg, rng);
    PilotFrame frame;
    if (spec.redraw_pilots_per_run) {
        frame = build_pilot_frame(cfg, dicts, rng, spec.phase_mode);
    } else {
        RandomSource frame_rng(
            derive_seed(spec.seed, static_cast<std::uint64_t>(sweep_index), 0x7fffffff));
        frame = build_pilot_frame(cfg, dicts, frame_rng, spec.phase_mode);
    }
    const QuantizedObservation obs = observe(real, frame, cfg, rng);
    const CMatrix smv_factor = smv_gram_factor(frame, dicts);
    const CMatrix block_factor = block_gram_factor(frame, dicts);

    for (EstimatorKind kind : spec.estimators) {
        RunRecord record;
        record.sweep_index = sweep_index;
        record.sweep_value = value;
        record.run_index = run_index;
        record.estimator = kind;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            switch (kind) {
                case EstimatorKind::Sbl: {
                    const SblResult r = sbl_estimate(frame.smv_operator, obs.hard,
                                                     cfg.noise_var,
                                                     SblControls::from_config(cfg),
                                                     &smv_factor);
                    record.nmse = nmse(real.cascaded,
                                       recover_cascaded(r.coefficients, dicts, cfg));
                    record.iterations = r.diagnostics.iterations;
                    break;
                }
                case EstimatorKind::Bsbl: {
                    const BsblResult r = bsbl_estimate(
                        frame.block_operator, obs.hard_block, cfg.noise_var,
                        cfg.users * cfg.irs_elements(), BsblControls::from_config(cfg),
                        &block_factor);
                    record.nmse = nmse(real.cascaded,
                                       recover_cascaded_block(r.coefficients, dicts, cfg));
                    record.iterations = r.diagnostics.iterations;
                    break;
                }
                case EstimatorKind::TwoStage: {
                    const TwoStageResult r =
                        two_stage_estimate(frame, obs, cfg, dicts,
                                           BsblControls::from_config(cfg),
                                           SblControls::from_config(cfg));
                    record.nmse = nmse(real.cascaded, r.channels);
                    record.iterations = r.stage1.iterations + r.stage2.iterations;
                    if (cfg.on_grid && !r.used_fallback)
                        record.accuracy = support_accuracy(real.row_support,
                                                           r.support.rows, cfg.grid_rx);
                    else if (cfg.on_grid)
                        record.accuracy =
                            support_accuracy(real.row_support, {}, cfg.grid_rx);
                    break;
                }
                case EstimatorKind::EmBpdn: {
                    FistaControls controls;
                    controls.eta = cfg.eta;
                    controls.max_em_iters = cfg.max_em_iters;
                    controls.em_tol = cfg.em_tol;
                    FistaDiagnostics diag;
                    const CVector h = em_bpdn_estimate(frame.smv_operator, obs.hard,
                                                       cfg.noise_var, controls, &diag,
                                                       &smv_factor);
                    record.nmse =
                        nmse(real.cascaded, recover_cascaded(h, dicts, cfg));
                    record.iterations = diag.outer_iterations;
                    break;
                }
                case EstimatorKind::Oracle: {
                    const OracleResult r =
                        oracle_map_estimate(frame, dicts, cfg, real, obs.hard,
                                            cfg.noise_var, SblControls::from_config(cfg));
                    record.nmse = nmse(real.cascaded, r.channels);
                    record.iterations = r.iterations;
                    break;
                }
            }
        } catch (const std::exception& e) {
            record.error = e.what();
        }
        const auto t1 = std::chrono::steady_clock::now();
        record.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        out.records.push_back(std::move(record));
    }
    return out;
}

int worker_count() {
    if (const char* env = std::getenv("ONEBIT_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec,
                                      const RunObserver& observer) {
    spec.validate();

    std::vector<ResultRow> rows;
    for (std::size_t si = 0; si < spec.values.size(); ++si) {
        const double value = spec.values[si];
        const SystemConfig cfg = config_for_value(spec, value);

        std::vector<RunOutput> outputs(static_cast<std::size_t>(spec.runs));
        const int workers = std::min(worker_count(), spec.runs);
        std::atomic<int> next{0};
        auto work = [&]() {
            while (true) {
                const int run = next.fetch_add(1);
                if (run >= spec.runs) break;
                outputs[static_cast<std::size_t>(run)] =
                    execute_run(spec, cfg, static_cast<int>(si), value, run);
            }
        };
        if (workers <= 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(workers));
            for (int w = 0; w < workers; ++w) pool.emplace_back(work);
            for (std::thread& t : pool) t.join();
        }

        // reduce in run order, per estimator
        for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
            ResultRow row;
            row.estimator = estimator_name(spec.estimators[e]);
            row.sweep_name = sweep_axis_name(spec.axis);
            row.sweep_value = value;
            double nmse_sum = 0.0;
            double accuracy_sum = 0.0;
            int accuracy_count = 0;
            double iter_sum = 0.0;
            double wall_sum = 0.0;
            int ok = 0;
            for (int run = 0; run < spec.runs; ++run) {
                const RunRecord& record = outputs[static_cast<std::size_t>(run)].records[e];
                if (observer) observer(record);
                if (!record.error.empty()) {
                    ++row.errors;
                    continue;
                }
                ++ok;
                nmse_sum += record.nmse;
                iter_sum += record.iterations;
                wall_sum += record.wall_ms;
                if (record.accuracy) {
                    accuracy_sum += *record.accuracy;
                    ++accuracy_count;
                }
            }
            row.runs = spec.runs;
            if (ok > 0) {
                row.nmse_linear = nmse_sum / ok;
                row.mean_iters = iter_sum / ok;
                row.mean_wall_ms = spec.record_timing ? wall_sum / ok : 0.0;
                if (accuracy_count > 0) row.accuracy = accuracy_sum / accuracy_count;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
    os << "estimator,sweep_name,sweep_value,nmse_db,accuracy,mean_iters,"
          "mean_wall_ms,errors,runs\n";
    char buffer[512];
    for (const ResultRow& row : rows) {
        std::string accuracy;
        if (row.accuracy) {
            std::snprintf(buffer, sizeof(buffer), "%.6f", *row.accuracy);
            accuracy = buffer;
        }
        std::snprintf(buffer, sizeof(buffer), "%s,%s,%.6g,%.6f,%s,%.3f,%.3f,%d,%d",
                      row.estimator.c_str(), row.sweep_name.c_str(), row.sweep_value,
                      row.nmse_linear > 0.0 ? to_db(row.nmse_linear) : -999.0,
                      accuracy.c_str(), row.mean_iters, row.mean_wall_ms, row.errors,
                      row.runs);
        os << buffer << "\n";
    }
}

}  // namespace onebit
