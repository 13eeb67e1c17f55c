#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aqec/code.hpp"
#include "aqec/engine.hpp"
#include "aqec/fit.hpp"
#include "aqec/noise.hpp"
#include "aqec/tomography.hpp"

namespace aqec {

// Which qubit is stored during the idle time: the optimal physical qubit in
// span{|-1/2>, |+1/2>}, the encoded logical qubit with or without correction
// cycles, or the more field-sensitive auxiliary ground-manifold qubit.
enum class QubitKind { physical, logical_plain, logical_aqec, auxiliary };

struct ExperimentConfig {
    QubitKind configuration = QubitKind::logical_aqec;
    double tau_ec = 0.62e-3;          // s
    double tau_idle = 0.12e-3;        // s
    double omega_ec = 0.0;            // rad/s, 0 means pi / tau_ec
    std::vector<double> time_grid;    // s, strictly increasing
    NoiseSchedule noise;
    NoiseRegime regime = NoiseRegime::quasi_static;
    InstrumentImperfections imperfections;
    double kappa_t = 0.0;             // code tilt
    long shots = 0;                   // per tomography basis; 0 = exact probabilities
    int trajectories = 1000;
    int bootstrap_resamples = 1000;
    std::uint64_t master_seed = 1;
    int threads = 1;
    Eigen::Index fock_levels = 6;
};

struct FidelityPoint {
    double time_s;
    double f_chi;
    double ci_lo, ci_hi;
};

struct FidelityCurve {
    std::vector<FidelityPoint> points;
    std::vector<std::vector<double>> per_trajectory; // [point][trajectory]
};

// Monte-Carlo lifetime curve: every trajectory runs the full pipeline
// (encode, idle or correction cycles, decode, process tomography) under its
// own noise draw; identical master seeds give identical curves for any
// thread count.
FidelityCurve run_lifetime(const ExperimentConfig& cfg);

FitResult fit_gaussian_decay(const FidelityCurve& curve);

// Closed forms for the quasi-static rotation channel.
double analytic_physical_fidelity(double sigma_theta);     // process fidelity
double analytic_uncorrected_fidelity(double sigma_theta);  // average fidelity

// Average fidelity after n correction cycles with per-cycle spread sigma.
double analytic_aqec_fidelity(double sigma, int cycles, NoiseRegime regime);

// Per-cycle logical flip probability entering the independent-phase decay.
double aqec_flip_probability(double sigma);

// Monte-Carlo of the Haar-averaged uncorrected state fidelity, the sampling
// oracle matching analytic_uncorrected_fidelity.
struct MonteCarloEstimate {
    double mean;
    double std_error;
};
MonteCarloEstimate uncorrected_state_fidelity_mc(double sigma_theta, int samples,
                                                 std::uint64_t seed);

struct RotationScanRow {
    double phi;
    double p_plus_l, p_minus_l, p_plus_e, p_minus_e;
};
std::vector<RotationScanRow> phase_rotation_scan(const CodeSpec& code,
                                                 const std::vector<double>& phis);

// One-cycle infidelities with a single imperfection enabled at a time,
// starting from code-space and error-space inputs.
struct BudgetRow {
    std::string source;
    double infidelity_logical;
    double infidelity_error;
};
std::vector<BudgetRow> error_budget(const ExperimentConfig& cfg);

// Process fidelity of one correction cycle with the given imperfections,
// averaged over their Gaussian draws by quadrature; from_error selects
// error-space inputs.
double cycle_process_fidelity(const ExperimentConfig& cfg,
                              const InstrumentImperfections& imp, bool from_error);

// Percentile bootstrap confidence interval of the mean.
struct BootstrapCI {
    double lo, hi;
};
BootstrapCI bootstrap_errors(const std::vector<double>& samples, int resamples,
                             std::uint64_t seed);

// Effective-level conversion dynamics (populations against pulse duration).
struct CycleDynamicsRow {
    double time_s;
    double p_logical, p_error, p_phonon_excited;
};
std::vector<CycleDynamicsRow> cycle_dynamics(const ExperimentConfig& cfg, int points,
                                             double t_max);

} // namespace aqec
