// SPDX-License-Identifier: Apache-2.0
#include "onebit/measurement.hpp"

#include "onebit/numerics.hpp"

namespace onebit {

PilotFrame build_pilot_frame(const SystemConfig& cfg, const VadDictionaries& dicts,
                             RandomSource& rng, PhaseMode mode) {
    cfg.validate();
    const int slots = cfg.pilot_slots;
    const int users = cfg.users;
    const int n = cfg.irs_elements();
    const int g_t = cfg.grid_tx();

    if (mode == PhaseMode::Structured && g_t != n)
        throw ConfigError("build_pilot_frame: structured phases require G_t = N");

    PilotFrame frame;
    frame.phase_mode = mode;

    frame.pilots = CMatrix(slots, users);
    for (int q = 0; q < slots; ++q)
        for (int k = 0; k < users; ++k) frame.pilots(q, k) = rng.qpsk_symbol();

    frame.phases = CMatrix(n, slots);
    if (mode == PhaseMode::Structured) {
        for (int q = 0; q < slots; ++q) frame.phases.col(q) = dicts.irs.col(q % n);
    } else {
        for (int q = 0; q < slots; ++q)
            for (int i = 0; i < n; ++i) frame.phases(i, q) = rng.unit_circle();
    }

    frame.effective_pilots = CMatrix(static_cast<Index>(users) * g_t, slots);
    frame.block_pilots = CMatrix(static_cast<Index>(users) * n, slots);
    for (int q = 0; q < slots; ++q) {
        const CVector projected = dicts.irs.adjoint() * frame.phases.col(q);
        for (int k = 0; k < users; ++k) {
            frame.effective_pilots.col(q).segment(static_cast<Index>(k) * g_t, g_t) =
                frame.pilots(q, k) * projected;
            frame.block_pilots.col(q).segment(static_cast<Index>(k) * n, n) =
                frame.pilots(q, k) * frame.phases.col(q);
        }
    }

    frame.smv_operator = kron(frame.effective_pilots.transpose(), dicts.bs);
    frame.block_operator = kron(dicts.bs, frame.block_pilots.transpose());
    return frame;
}

QuantizedObservation observe(const ChannelRealization& real, const PilotFrame& frame,
                             const SystemConfig& cfg, RandomSource& rng,
                             const std::vector<CVector>& direct) {
    const int slots = cfg.pilot_slots;
    const int antennas = cfg.bs_antennas;
    const int users = cfg.users;
    if (static_cast<int>(real.cascaded.size()) != users)
        throw InvalidArgumentError("observe: realization/user-count mismatch");
    if (!direct.empty() && static_cast<int>(direct.size()) != users)
        throw InvalidArgumentError("observe: direct-link vector count mismatch");

    CMatrix received(antennas, slots);
    for (int q = 0; q < slots; ++q) {
        CVector y = CVector::Zero(antennas);
        for (int k = 0; k < users; ++k) {
            y += real.cascaded[static_cast<std::size_t>(k)] * frame.phases.col(q) *
                 frame.pilots(q, k);
            if (!direct.empty())
                y += direct[static_cast<std::size_t>(k)] * frame.pilots(q, k);
        }
        for (int m = 0; m < antennas; ++m) y(m) += rng.complex_gaussian(cfg.noise_var);
        received.col(q) = y;
    }

    QuantizedObservation obs;
    obs.noise_var = cfg.noise_var;
    obs.soft = CVector(Eigen::Map<const CVector>(received.data(), received.size()));
    const CMatrix transposed = received.transpose();
    obs.soft_block = CVector(Eigen::Map<const CVector>(transposed.data(), transposed.size()));
    obs.hard = sign_quantize(obs.soft);
    obs.hard_block = sign_quantize(obs.soft_block);
    return obs;
}

CMatrix extend_with_direct_link(const PilotFrame& frame, const VadDictionaries& dicts,
                                const SystemConfig& cfg) {
    const CMatrix direct_op = kron(frame.pilots, dicts.bs);
    CMatrix out(frame.smv_operator.rows(),
                frame.smv_operator.cols() + direct_op.cols());
    out << frame.smv_operator, direct_op;
    (void)cfg;
    return out;
}

CVector to_block_order(const CVector& v, int bs_antennas, int pilot_slots) {
    if (v.size() != static_cast<Index>(bs_antennas) * pilot_slots)
        throw InvalidArgumentError("to_block_order: length mismatch");
    CVector out(v.size());
    for (int q = 0; q < pilot_slots; ++q)
        for (int m = 0; m < bs_antennas; ++m)
            out(static_cast<Index>(m) * pilot_slots + q) =
                v(static_cast<Index>(q) * bs_antennas + m);
    return out;
}

CVector from_block_order(const CVector& v, int bs_antennas, int pilot_slots) {
    if (v.size() != static_cast<Index>(bs_antennas) * pilot_slots)
        throw InvalidArgumentError("from_block_order: length mismatch");
    CVector out(v.size());
    for (int q = 0; q < pilot_slots; ++q)
        for (int m = 0; m < bs_antennas; ++m)
            out(static_cast<Index>(q) * bs_antennas + m) =
                v(static_cast<Index>(m) * pilot_slots + q);
    return out;
}

namespace {

// Thin triangular factor R of A = QR, so that R^H R = A^H A.
CMatrix thin_r_factor(const CMatrix& a) {
    const Index k = std::min(a.rows(), a.cols());
    Eigen::HouseholderQR<CMatrix> qr(a);
    return CMatrix(qr.matrixQR().topRows(k).triangularView<Eigen::Upper>());
}

}  // namespace

CMatrix smv_gram_factor(const PilotFrame& frame, const VadDictionaries& dicts) {
    return kron(thin_r_factor(frame.effective_pilots.transpose()),
                thin_r_factor(dicts.bs));
}

CMatrix block_gram_factor(const PilotFrame& frame, const VadDictionaries& dicts) {
    return kron(thin_r_factor(dicts.bs),
                thin_r_factor(frame.block_pilots.transpose()));
}

CMatrix reduced_gram_factor(const PilotFrame& frame, const CMatrix& bs_columns) {
    return kron(thin_r_factor(frame.effective_pilots.transpose()),
                thin_r_factor(bs_columns));
}

}  // namespace onebit
