#pragma once

#include <array>
#include <vector>

#include "aqec/algebra.hpp"

namespace aqec {

// Four-level dephasing code hosted in a spin manifold: two codewords, the
// two error words they map to under S_z, the associated projectors and the
// parity operator distinguishing the spaces. kappa_t > 0 selects the tilted
// variant matched to the finite-duration Lindblad Kraus pair.
struct CodeSpec {
    SpinManifold manifold;
    std::array<Eigen::Index, 4> levels; // host level indices, ascending m
    CVector zero_l, one_l;              // codewords, host space
    CVector zero_e, one_e;              // error words, host space
    CMatrix code_projector;             // P_C
    CMatrix error_projector;            // P_E
    CMatrix parity;                     // +1 on codewords, -1 on error words (kappa_t = 0)
    double kappa_t = 0.0;
};

// Knill-Laflamme check result. alpha collects <0_L|E_l^dag E_k|0_L>; the
// violation is the worst deviation from alpha_lk * delta_{sigma sigma'}
// across both codewords and the cross terms.
struct KLReport {
    CMatrix alpha;
    double max_violation = 0.0;
    bool pass = false;
};

CodeSpec build_code(const SpinManifold& manifold, double kappa_t);
CodeSpec build_code(double spin, double kappa_t);

KLReport kl_verify(const CodeSpec& code, const std::vector<CMatrix>& errors,
                   double tol = 1e-10);

// Parity built from the spin-3/2 operator acting on the embedded four-level
// subspace, zero outside it. On the untilted code P|sigma_L> = +|sigma_L>
// and P|sigma_E> = -|sigma_E>.
CMatrix parity_operator(const CodeSpec& code);

// Brute-force search for {I, S_z}-correctable codes over all four-level
// sublevel choices with the real two-amplitude ansatz. Results are ordered
// lexicographically by sublevel indices; an empty list means no code exists.
std::vector<CodeSpec> code_search(const SpinManifold& manifold, double tol = 1e-10);

} // namespace aqec
