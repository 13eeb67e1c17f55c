#pragma once

#include <array>
#include <cstdint>
#include <functional>

#include "aqec/algebra.hpp"

namespace aqec {

// 4x4 process matrix in the {I, X, Y, Z} basis of the reconstructed qubit,
// row-major ordering II, IX, ... After MLE projection it is Hermitian, PSD
// and trace one.
struct ChiMatrix {
    CMatrix mat;
    double pre_projection_min_eigenvalue = 0.0;
};

enum class MeasBasis { x, y, z };

// Counts of a projective measurement on the qubit subspace: outcomes along
// +basis, -basis, and a leakage bin for population outside the subspace.
struct ShotRecord {
    MeasBasis basis = MeasBasis::z;
    std::array<long, 3> counts = {0, 0, 0}; // plus, minus, leak
    long shots = 0;
};

// A channel under test maps a qubit input to the projected qubit block of
// the output; trace below one is leakage out of the computational subspace.
using ChannelEvaluator = std::function<CMatrix(const CMatrix&)>;

// Multinomial sampling of the three outcome probabilities; the input block
// may be subnormalized, the deficit feeding the leakage bin.
ShotRecord simulate_counts(const CMatrix& qubit_block, MeasBasis basis, long shots,
                           std::uint64_t seed);

// Maximum-likelihood qubit state from X/Y/Z records: linear inversion of the
// Bloch vector, projection into the physical ball, and admixture of the
// maximally mixed state in proportion to the observed leakage weight.
CMatrix state_tomography(const std::array<ShotRecord, 3>& records);

// Infinite-shot variant operating on exact probabilities.
CMatrix state_tomography_analytic(const CMatrix& qubit_block);

// Standard four-input process tomography; shots == 0 uses exact outcome
// probabilities. The result is projected onto the PSD cone and renormalized.
ChiMatrix process_tomography(const ChannelEvaluator& channel, long shots, std::uint64_t seed);

// Same reconstruction from already-evaluated output blocks for the inputs
// |0>, |1>, |+>, |+i>.
ChiMatrix process_tomography_blocks(const std::array<CMatrix, 4>& blocks, long shots,
                                    std::uint64_t seed);

// Re Tr(chi_m chi_i), clamped to [0, 1].
double process_fidelity(const ChiMatrix& measured, const ChiMatrix& ideal);

ChiMatrix chi_identity();

// The four tomography input states |0>, |1>, |+>, |+i>.
std::array<CVector, 4> tomography_inputs();

// Average fidelity of a qubit channel from its process fidelity.
inline double average_fidelity(double f_chi) { return (2.0 * f_chi + 1.0) / 3.0; }

} // namespace aqec
