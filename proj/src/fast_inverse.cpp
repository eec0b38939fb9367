// SPDX-License-Identifier: Apache-2.0
#include "onebit/fast_inverse.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "onebit/numerics.hpp"

namespace onebit {

DiagBlockMatrix::DiagBlockMatrix(int k, int m, int n)
    : users(k), bs_antennas(m), irs_elements(n),
      blocks(static_cast<std::size_t>(k) * k,
             CVector::Zero(static_cast<Index>(m) * n)) {}

CVector& DiagBlockMatrix::block(int i, int j) {
    return blocks[static_cast<std::size_t>(i) * users + j];
}

const CVector& DiagBlockMatrix::block(int i, int j) const {
    return blocks[static_cast<std::size_t>(i) * users + j];
}

CMatrix DiagBlockMatrix::to_dense() const {
    const Index len = block_length();
    CMatrix out = CMatrix::Zero(users * len, users * len);
    for (int i = 0; i < users; ++i)
        for (int j = 0; j < users; ++j)
            out.block(i * len, j * len, len, len) = block(i, j).asDiagonal();
    return out;
}

double DiagBlockMatrix::max_diagonal_magnitude() const {
    double top = 0.0;
    for (int i = 0; i < users; ++i)
        top = std::max(top, block(i, i).cwiseAbs().maxCoeff());
    return top;
}

DiagBlockMatrix assemble_structured_e(const RVector& alpha, const PilotFrame& frame,
                                      double noise_var, const SystemConfig& cfg) {
    if (frame.phase_mode != PhaseMode::Structured)
        throw ModeError("assemble_structured_e: frame must use structured phases");
    if (cfg.grid_rx != cfg.bs_antennas || cfg.grid_tx() != cfg.irs_elements())
        throw ModeError("assemble_structured_e: requires G_r = M and G_t = N");

    const int users = cfg.users;
    const int m = cfg.bs_antennas;
    const int n = cfg.irs_elements();
    const int slots = cfg.pilot_slots;
    const Index len = static_cast<Index>(m) * n;
    if (alpha.size() != static_cast<Index>(users) * len)
        throw InvalidArgumentError("assemble_structured_e: alpha length mismatch");

    DiagBlockMatrix e(users, m, n);

    // Slot q lands on dictionary column (q mod N); tally per-column pilot
    // cross-products for every user pair.
    CMatrix cross = CMatrix::Zero(static_cast<Index>(users) * users, n);
    RVector multiplicity = RVector::Zero(n);
    for (int q = 0; q < slots; ++q) {
        const int col = q % n;
        multiplicity(col) += 1.0;
        for (int i = 0; i < users; ++i)
            for (int j = 0; j < users; ++j)
                cross(static_cast<Index>(i) * users + j, col) +=
                    std::conj(frame.pilots(q, i)) * frame.pilots(q, j);
    }

    for (int i = 0; i < users; ++i) {
        for (int j = 0; j < users; ++j) {
            CVector& blk = e.block(i, j);
            for (int col = 0; col < n; ++col) {
                const Complex value =
                    (i == j) ? Complex(multiplicity(col), 0.0)
                             : cross(static_cast<Index>(i) * users + j, col);
                blk.segment(static_cast<Index>(col) * m, m).setConstant(value / noise_var);
            }
            if (i == j) {
                for (Index t = 0; t < len; ++t)
                    blk(t) += 1.0 / alpha(static_cast<Index>(i) * len + t);
            }
        }
    }
    return e;
}

namespace {

void check_pivots(const CVector& diag, double tolerance, int block_index) {
    for (Index t = 0; t < diag.size(); ++t) {
        if (std::abs(diag(t)) < tolerance)
            throw SingularMatrixError(
                "diag_blk_inv: vanishing pivot in diagonal block " +
                    std::to_string(block_index),
                t);
    }
}

DiagBlockMatrix invert_recursive(const DiagBlockMatrix& e, double tolerance) {
    const int k = e.users;
    if (k == 1) {
        check_pivots(e.block(0, 0), tolerance, 0);
        DiagBlockMatrix out(1, e.bs_antennas, e.irs_elements);
        out.block(0, 0) = e.block(0, 0).cwiseInverse();
        return out;
    }

    // Split off the last user block: A is the leading (k-1)^2 grid, B the
    // last block column, C = B^H the last block row, D the corner.
    DiagBlockMatrix a(k - 1, e.bs_antennas, e.irs_elements);
    for (int i = 0; i < k - 1; ++i)
        for (int j = 0; j < k - 1; ++j) a.block(i, j) = e.block(i, j);
    const DiagBlockMatrix a_inv = invert_recursive(a, tolerance);

    const Index len = e.block_length();
    std::vector<CVector> a_inv_b(static_cast<std::size_t>(k - 1), CVector::Zero(len));
    std::vector<CVector> c_a_inv(static_cast<std::size_t>(k - 1), CVector::Zero(len));
    for (int i = 0; i < k - 1; ++i) {
        for (int j = 0; j < k - 1; ++j) {
            a_inv_b[static_cast<std::size_t>(i)] +=
                a_inv.block(i, j).cwiseProduct(e.block(j, k - 1));
            c_a_inv[static_cast<std::size_t>(i)] +=
                e.block(k - 1, j).cwiseProduct(a_inv.block(j, i));
        }
    }

    CVector schur = e.block(k - 1, k - 1);
    for (int i = 0; i < k - 1; ++i)
        schur -= e.block(k - 1, i).cwiseProduct(a_inv_b[static_cast<std::size_t>(i)]);
    check_pivots(schur, tolerance, k - 1);
    const CVector schur_inv = schur.cwiseInverse();

    DiagBlockMatrix out(k, e.bs_antennas, e.irs_elements);
    for (int i = 0; i < k - 1; ++i) {
        for (int j = 0; j < k - 1; ++j) {
            out.block(i, j) = a_inv.block(i, j) +
                              a_inv_b[static_cast<std::size_t>(i)]
                                  .cwiseProduct(schur_inv)
                                  .cwiseProduct(c_a_inv[static_cast<std::size_t>(j)]);
        }
        out.block(i, k - 1) =
            -a_inv_b[static_cast<std::size_t>(i)].cwiseProduct(schur_inv);
        out.block(k - 1, i) =
            -schur_inv.cwiseProduct(c_a_inv[static_cast<std::size_t>(i)]);
    }
    out.block(k - 1, k - 1) = schur_inv;
    return out;
}

}  // namespace

DiagBlockMatrix diag_blk_inv(const DiagBlockMatrix& e) {
    if (e.users < 1 || e.block_length() < 1)
        throw InvalidArgumentError("diag_blk_inv: empty matrix");
    const double tolerance = 1e-14 * std::max(e.max_diagonal_magnitude(), 1e-300);
    return invert_recursive(e, tolerance);
}

std::vector<ProbeRow> complexity_probe(const std::vector<int>& user_counts,
                                       int bs_antennas, int irs_elements, int repeats,
                                       bool include_dense, std::uint64_t seed) {
    using clock = std::chrono::steady_clock;
    std::vector<ProbeRow> rows;

    for (int users : user_counts) {
        SystemConfig cfg;
        cfg.bs_antennas = bs_antennas;
        cfg.grid_rx = bs_antennas;
        cfg.irs_x = 1;
        cfg.irs_y = irs_elements;
        cfg.grid_tx_x = 1;
        cfg.grid_tx_y = irs_elements;
        cfg.users = users;
        cfg.pilot_slots = 2 * irs_elements + std::max(1, irs_elements / 2);
        cfg.paths_irs_bs = 1;
        cfg.paths_user_irs = 1;

        RandomSource rng(seed + static_cast<std::uint64_t>(users));
        const VadDictionaries dicts = build_dictionaries(cfg);
        const PilotFrame frame =
            build_pilot_frame(cfg, dicts, rng, PhaseMode::Structured);
        RVector alpha(static_cast<Index>(users) * bs_antennas * irs_elements);
        for (Index i = 0; i < alpha.size(); ++i) alpha(i) = 0.1 + rng.uniform();

        const DiagBlockMatrix e = assemble_structured_e(alpha, frame, 1.0, cfg);

        const auto t0 = clock::now();
        for (int r = 0; r < repeats; ++r) {
            const DiagBlockMatrix inv = diag_blk_inv(e);
            (void)inv;
        }
        const auto t1 = clock::now();
        rows.push_back({users, bs_antennas, irs_elements,
                        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
                                .count() /
                            repeats,
                        "structured"});

        if (include_dense) {
            const CMatrix dense = e.to_dense();
            const auto d0 = clock::now();
            const CMatrix inv = hermitian_inverse(dense);
            const auto d1 = clock::now();
            (void)inv;
            rows.push_back({users, bs_antennas, irs_elements,
                            std::chrono::duration_cast<std::chrono::nanoseconds>(d1 - d0)
                                .count(),
                            "dense"});
        }
    }
    return rows;
}

std::string probe_csv(const std::vector<ProbeRow>& rows) {
    std::ostringstream os;
    os << "K,M,N,elapsed_ns,route\n";
    for (const ProbeRow& r : rows)
        os << r.users << "," << r.bs_antennas << "," << r.irs_elements << ","
           << r.elapsed_ns << "," << r.route << "\n";
    return os.str();
}

}  // namespace onebit
