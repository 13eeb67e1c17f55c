#pragma once

#include "aqec/code.hpp"
#include "aqec/noise.hpp"

namespace aqec {

// Effective entropy-conversion drive: Rabi rate, pulse duration and the Fock
// truncation of the joint space.
struct EntropyConversionParams {
    double omega_ec;             // rad/s
    double t;                    // s
    Eigen::Index fock_levels = 6;
};

// One autonomous correction cycle: idle (noise accumulates) followed by the
// conversion pulse and a phonon reset.
struct CycleConfig {
    double tau_ec;               // s, conversion duration
    double tau_idle;             // s, reset + idle duration
    double omega_ec = 0.0;       // rad/s; 0 means pi / tau_ec
    double reset_nbar = 0.0;     // residual occupation after cooling
    Eigen::Index fock_levels = 6;
    enum class IdleNoise { rotation, lindblad } idle_noise = IdleNoise::rotation;
    double idle_kappa = 0.0;     // 1/s, only for the lindblad mode

    double omega() const { return omega_ec > 0 ? omega_ec : constants::pi / tau_ec; }
};

// Per-shot imperfection draws applied to a single cycle.
struct CycleShot {
    double idle_phase = 0.0;   // rad per m-quantum accumulated during tau_idle
    double mode_drift = 0.0;   // rad/s phonon detuning during conversion
    double omega_scale = 1.0;  // relative Rabi factor (intensity)
    double stark_phase = 0.0;  // rad, residual logical Z phase per cycle
};

// Kraus pair R_0 = sum |s_L><s_L|, R_1 = sum |s_L><s_E|; complete on the
// four-level subspace.
struct RecoveryChannel {
    CMatrix r0, r1;
    KrausChannel as_kraus() const { return KrausChannel({r0, r1}); }
};

// Unitary on the auxiliary-extended space {|0_g>, |1_g>} + host manifold
// mapping |0_g> -> |0_L>, |1_g> -> |1_L>. The decoder is its adjoint.
Operator encoder_unitary(const CodeSpec& code);

// Dimension of the extended space and embeddings into it.
inline Eigen::Index extended_dim(const CodeSpec& code) { return 2 + code.manifold.dim(); }
CVector embed_host(const CodeSpec& code, const CVector& host_vec);
CVector aux_basis_state(const CodeSpec& code, int which);

// (omega/2) (|0_L><0_E| + |1_L><1_E|) (x) a^dag + h.c. on host (x) Fock.
Operator h_ec(const EntropyConversionParams& p, const CodeSpec& code);

// Closed-form evolution operator of h_ec; equals evolve(h_ec, t).
Operator u_ec(const EntropyConversionParams& p, const CodeSpec& code);

RecoveryChannel recovery_channel(const CodeSpec& code);

// Channel on the phonon subsystem replacing any state with the thermal state
// of occupation nbar.
KrausChannel reset_channel(double nbar, const FockSpace& fock);

// Trace out the phonon of a [spin, fock] joint state and re-tensor the reset
// thermal state; identity on the spin factor.
DensityMatrix reset_phonon(const DensityMatrix& joint, double nbar);

// One full correction cycle on a [spin, fock] joint state.
DensityMatrix aqec_cycle(const DensityMatrix& joint, const CodeSpec& code,
                         const CycleConfig& cfg, const CycleShot& shot);

// The same cycle as a superoperator on the spin factor alone (the phonon is
// attached in the reset state and traced out after the pulse). Acts on
// column-major vec(rho); one matrix per distinct shot.
CMatrix cycle_superoperator(const CodeSpec& code, const CycleConfig& cfg, const CycleShot& shot);

CMatrix apply_superoperator(const CMatrix& superop, const CMatrix& rho);

// Residual norms of the error-transparency condition for a joint-space
// Hamiltonian: |P_C H P_C| and min_c |P_z^dag H P_z - P_C H P_C - c P_C|
// with P_z the normalized S_z image of the code projector.
struct TransparencyResiduals {
    double code_block;
    double error_block;
};
TransparencyResiduals error_transparency_check(const Operator& h, const CodeSpec& code);

} // namespace aqec
