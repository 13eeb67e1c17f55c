#include "aqec/tomography.hpp"

#include <cmath>
#include <iostream>
#include <random>

namespace aqec {

namespace {

CMatrix pauli(MeasBasis b) {
    CMatrix m(2, 2);
    switch (b) {
        case MeasBasis::x: m << 0, 1, 1, 0; break;
        case MeasBasis::y: m << 0, cxd(0, -1), cxd(0, 1), 0; break;
        case MeasBasis::z: m << 1, 0, 0, -1; break;
    }
    return m;
}

std::array<double, 3> outcome_probabilities(const CMatrix& block, MeasBasis basis) {
    const CMatrix s = pauli(basis);
    const CMatrix plus = 0.5 * (CMatrix::Identity(2, 2) + s);
    const CMatrix minus = 0.5 * (CMatrix::Identity(2, 2) - s);
    const double p_plus = std::max(0.0, (plus * block).trace().real());
    const double p_minus = std::max(0.0, (minus * block).trace().real());
    const double p_leak = std::max(0.0, 1.0 - p_plus - p_minus);
    return {p_plus, p_minus, p_leak};
}

// Bloch vector -> physical state, shrinking to the ball surface when shot
// noise pushed it outside (the Frobenius PSD projection for a qubit).
CMatrix state_from_bloch(double rx, double ry, double rz) {
    const double len = std::sqrt(rx * rx + ry * ry + rz * rz);
    if (len > 1.0) {
        rx /= len;
        ry /= len;
        rz /= len;
    }
    CMatrix rho(2, 2);
    rho << 1.0 + rz, cxd(rx, -ry), cxd(rx, ry), 1.0 - rz;
    return 0.5 * rho;
}

} // namespace

ShotRecord simulate_counts(const CMatrix& qubit_block, MeasBasis basis, long shots,
                           std::uint64_t seed) {
    if (qubit_block.rows() != 2 || qubit_block.cols() != 2)
        throw std::invalid_argument("simulate_counts: expected a 2x2 qubit block");
    if (shots < 1) throw std::invalid_argument("simulate_counts: shots must be >= 1");

    const auto p = outcome_probabilities(qubit_block, basis);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    ShotRecord record;
    record.basis = basis;
    record.shots = shots;
    const double total = p[0] + p[1] + p[2];
    for (long s = 0; s < shots; ++s) {
        const double r = uniform(rng) * total;
        if (r < p[0]) ++record.counts[0];
        else if (r < p[0] + p[1]) ++record.counts[1];
        else ++record.counts[2];
    }
    return record;
}

CMatrix state_tomography(const std::array<ShotRecord, 3>& records) {
    double bloch[3] = {0, 0, 0};
    bool seen[3] = {false, false, false};
    long leak_counts = 0;
    long total_shots = 0;
    for (const auto& rec : records) {
        if (rec.shots < 1 || rec.counts[0] + rec.counts[1] + rec.counts[2] != rec.shots)
            throw std::invalid_argument("state_tomography: inconsistent shot record");
        const int axis = static_cast<int>(rec.basis);
        seen[axis] = true;
        bloch[axis] = static_cast<double>(rec.counts[0] - rec.counts[1]) / rec.shots;
        leak_counts += rec.counts[2];
        total_shots += rec.shots;
    }
    if (!seen[0] || !seen[1] || !seen[2])
        throw std::invalid_argument("state_tomography: need X, Y and Z records");

    const double w = static_cast<double>(leak_counts) / total_shots;
    // The raw Bloch estimates refer to the subnormalized block; rescale to
    // the qubit subspace before projecting.
    const double scale = w < 1.0 ? 1.0 / (1.0 - w) : 0.0;
    const CMatrix qubit = state_from_bloch(bloch[0] * scale, bloch[1] * scale, bloch[2] * scale);
    return (1.0 - w) * qubit + w * 0.5 * CMatrix::Identity(2, 2);
}

CMatrix state_tomography_analytic(const CMatrix& qubit_block) {
    const double w = std::max(0.0, 1.0 - qubit_block.trace().real());
    const double scale = w < 1.0 ? 1.0 / (1.0 - w) : 0.0;
    const CMatrix s[3] = {pauli(MeasBasis::x), pauli(MeasBasis::y), pauli(MeasBasis::z)};
    const CMatrix qubit = state_from_bloch((s[0] * qubit_block).trace().real() * scale,
                                           (s[1] * qubit_block).trace().real() * scale,
                                           (s[2] * qubit_block).trace().real() * scale);
    return (1.0 - w) * qubit + w * 0.5 * CMatrix::Identity(2, 2);
}

ChiMatrix process_tomography(const ChannelEvaluator& channel, long shots, std::uint64_t seed) {
    std::array<CMatrix, 4> blocks;
    const auto inputs = tomography_inputs();
    for (std::size_t j = 0; j < inputs.size(); ++j)
        blocks[j] = channel((inputs[j] * inputs[j].adjoint()).eval());
    return process_tomography_blocks(blocks, shots, seed);
}

ChiMatrix process_tomography_blocks(const std::array<CMatrix, 4>& blocks, long shots,
                                    std::uint64_t seed) {
    const cxd i1(0, 1);
    std::array<CMatrix, 4> outputs;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        if (shots == 0) {
            outputs[j] = state_tomography_analytic(blocks[j]);
        } else {
            std::array<ShotRecord, 3> records = {
                simulate_counts(blocks[j], MeasBasis::x, shots, seed + 4 * j + 1),
                simulate_counts(blocks[j], MeasBasis::y, shots, seed + 4 * j + 2),
                simulate_counts(blocks[j], MeasBasis::z, shots, seed + 4 * j + 3)};
            outputs[j] = state_tomography(records);
        }
    }

    // Linear inversion for the off-diagonal inputs.
    const CMatrix e00 = outputs[0];
    const CMatrix e11 = outputs[1];
    const CMatrix e01 = outputs[2] + i1 * outputs[3] - 0.5 * (1.0 + i1) * (e00 + e11);
    const CMatrix e10 = outputs[2] - i1 * outputs[3] - 0.5 * (1.0 - i1) * (e00 + e11);

    // Choi matrix in the convention C = sum E(|i><j|) (x) |i><j|, expanded
    // over v_m = (P_m (x) I)|omega> with Tr(P_m P_n) = 2 delta_mn.
    CMatrix choi = CMatrix::Zero(4, 4);
    const std::array<std::array<const CMatrix*, 2>, 2> maps = {{{&e00, &e01}, {&e10, &e11}}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    choi(r * 2 + i, c * 2 + j) = (*maps[i][j])(r, c);

    const CMatrix paulis[4] = {CMatrix::Identity(2, 2), pauli(MeasBasis::x),
                               pauli(MeasBasis::y), pauli(MeasBasis::z)};
    CMatrix vm(4, 4);
    for (int m = 0; m < 4; ++m) {
        // (P_m (x) I) |omega>, omega = |00> + |11>
        CVector v(4);
        for (int r = 0; r < 2; ++r)
            for (int q = 0; q < 2; ++q) v(r * 2 + q) = paulis[m](r, q);
        vm.col(m) = v;
    }
    CMatrix chi = (vm.adjoint() * choi * vm) / 4.0;
    chi = 0.5 * (chi + chi.adjoint()).eval();

    // MLE step: project the linear-inversion estimate onto the PSD cone and
    // renormalize the trace.
    Eigen::SelfAdjointEigenSolver<CMatrix> es(chi);
    ChiMatrix result;
    result.pre_projection_min_eigenvalue = es.eigenvalues().minCoeff();
    Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    const double trace = clipped.sum();
    if (trace <= 0) throw std::runtime_error("process_tomography: degenerate chi estimate");
    clipped /= trace;
    result.mat = es.eigenvectors() * clipped.cast<cxd>().asDiagonal() * es.eigenvectors().adjoint();
    return result;
}

double process_fidelity(const ChiMatrix& measured, const ChiMatrix& ideal) {
    double f = (measured.mat * ideal.mat).trace().real();
    if (f < -1e-9 || f > 1.0 + 1e-9)
        std::cerr << "process_fidelity: clamping out-of-range value " << f << "\n";
    return std::clamp(f, 0.0, 1.0);
}

ChiMatrix chi_identity() {
    CMatrix chi = CMatrix::Zero(4, 4);
    chi(0, 0) = 1.0;
    return {chi, 0.0};
}

std::array<CVector, 4> tomography_inputs() {
    const double sq = 1.0 / std::sqrt(2.0);
    CVector zero(2), one(2), plus(2), plus_i(2);
    zero << 1, 0;
    one << 0, 1;
    plus << sq, sq;
    plus_i << sq, cxd(0, sq);
    return {zero, one, plus, plus_i};
}

} // namespace aqec
