#pragma once

#include <cstdint>
#include <vector>

#include "aqec/algebra.hpp"
#include "aqec/constants.hpp"

namespace aqec {

// Pure S_z dephasing at rate kappa for duration t, expanded to l_max jump
// Kraus operators.
struct DephasingParams {
    double kappa = 0.0; // 1/s
    double t = 0.0;     // s
    int l_max = 8;
};

struct RotationNoise {
    double sigma_theta = 0.0; // rad, Gaussian standard deviation
};

// Quasi-static magnetic noise: the field is resampled from N(0, sigma_b)
// every update interval and converted to a detuning through the sensitivity
// (rad/s per m-quantum per tesla).
struct NoiseSchedule {
    double sigma_b_tesla = 0.0;
    double update_interval_s = 0.1;
    double duration_s = 0.0;
    double sensitivity = constants::two_pi * constants::default_g_factor *
                         constants::bohr_magneton_over_h_hz_per_tesla;
};

// Noise regime switch: quasi-static (phase grows linearly with time within a
// trial) or random-walk (phase variance grows linearly with time).
enum class NoiseRegime { quasi_static, random_walk };

struct NoiseTrajectory {
    struct Segment {
        double duration_s;
        double detuning; // rad/s per m-quantum
    };
    std::vector<Segment> segments;

    double total_duration() const {
        double t = 0;
        for (const auto& s : segments) t += s.duration_s;
        return t;
    }
    // Phase accumulated per m-quantum over [0, t].
    double accumulated_phase(double t) const;
};

// Per-cycle instrument imperfections at the magnitudes of the error budget.
struct InstrumentImperfections {
    double nbar = 0.0;                    // residual phonon occupation
    double heating_quanta_per_s = 0.0;    // phonon heating rate
    double mode_drift_sigma_rad_s = 0.0;  // per-shot mode-frequency offset, Gaussian sigma
    double intensity_rel_sigma = 0.0;     // per-shot relative intensity deviation, Gaussian sigma
    double stark_phase_rad = 0.0;         // residual logical Z phase per cycle
};

// l-jump Kraus operators E_l = sqrt((kappa t)^l / l!) e^{-kappa t Sz^2/2} Sz^l.
// Throws truncation_too_small when the completeness defect exceeds 1e-6.
KrausChannel lindblad_kraus(const DephasingParams& p, const CMatrix& sz);

// Smallest truncation order with completeness defect <= 1e-10.
int suggested_kraus_order(double kappa_t, const CMatrix& sz);

// kappa (Sz rho Sz - 1/2 {Sz^2, rho}).
CMatrix lindblad_rhs(const CMatrix& rho, double kappa, const CMatrix& sz);

// U(theta) = exp(-i theta Sz).
CMatrix coherent_rotation(double theta, const CMatrix& sz);

// Gaussian-averaged random rotation, evaluated by Gauss-Hermite quadrature
// and returned as an explicit mixed-unitary Kraus decomposition.
KrausChannel averaged_rotation_channel(double sigma_theta, const CMatrix& sz,
                                       int quadrature_order = 41);

struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights; // sum to sqrt(pi)
};
GaussHermiteRule gauss_hermite(int order);

NoiseTrajectory sample_trajectory(const NoiseSchedule& schedule, std::uint64_t seed);

// 2*pi * g_J * (mu_B/h) * B * dm, in rad/s.
double field_to_detuning(double b_tesla, double delta_m,
                         double g_factor = constants::default_g_factor);

// Boltzmann-weighted Fock state with mean occupation nbar, renormalized
// after truncation. Throws truncation_too_small when the dropped tail
// exceeds 1e-8.
DensityMatrix thermal_phonon_state(double nbar, const FockSpace& fock);

} // namespace aqec
