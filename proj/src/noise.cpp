#include "aqec/noise.hpp"

#include <cmath>
#include <random>

namespace aqec {

double NoiseTrajectory::accumulated_phase(double t) const {
    double phase = 0.0;
    double elapsed = 0.0;
    for (const auto& seg : segments) {
        if (t <= elapsed) break;
        const double dt = std::min(seg.duration_s, t - elapsed);
        phase += seg.detuning * dt;
        elapsed += seg.duration_s;
    }
    return phase;
}

namespace {

// Completeness defect of the truncated jump expansion. All operators are
// diagonal in the m basis, so the defect is the worst per-level remainder of
// the exponential series.
double kraus_defect(double kappa_t, const CMatrix& sz, int l_max) {
    double defect = 0.0;
    for (Eigen::Index i = 0; i < sz.rows(); ++i) {
        const double x = kappa_t * std::norm(sz(i, i)); // kappa t m^2
        double term = std::exp(-x);
        double sum = term;
        for (int l = 1; l <= l_max; ++l) {
            term *= x / l;
            sum += term;
        }
        defect = std::max(defect, std::abs(1.0 - sum));
    }
    return defect;
}

} // namespace

int suggested_kraus_order(double kappa_t, const CMatrix& sz) {
    for (int l = 1; l <= 256; ++l)
        if (kraus_defect(kappa_t, sz, l) <= 1e-10) return l;
    throw truncation_too_small("suggested_kraus_order: no order <= 256 reaches 1e-10");
}

KrausChannel lindblad_kraus(const DephasingParams& p, const CMatrix& sz) {
    if (p.kappa < 0 || p.t < 0 || p.l_max < 1)
        throw std::invalid_argument("lindblad_kraus: invalid parameters");
    const double kt = p.kappa * p.t;
    if (kt == 0.0)
        return KrausChannel({CMatrix::Identity(sz.rows(), sz.cols())});
    if (kraus_defect(kt, sz, p.l_max) > 1e-6)
        throw truncation_too_small("lindblad_kraus: completeness defect above 1e-6");

    const CMatrix decay = expm_hermitian(sz * sz, -0.5 * kt);
    std::vector<CMatrix> kraus;
    kraus.reserve(p.l_max + 1);
    CMatrix sz_power = CMatrix::Identity(sz.rows(), sz.cols());
    double log_fact = 0.0;
    for (int l = 0; l <= p.l_max; ++l) {
        if (l > 0) {
            sz_power = sz_power * sz;
            log_fact += std::log(static_cast<double>(l));
        }
        const double coeff = std::exp(0.5 * (l * std::log(kt) - log_fact));
        kraus.push_back(coeff * decay * sz_power);
    }
    return KrausChannel(std::move(kraus));
}

CMatrix lindblad_rhs(const CMatrix& rho, double kappa, const CMatrix& sz) {
    if (rho.rows() != sz.rows()) throw std::invalid_argument("lindblad_rhs: dimension mismatch");
    const CMatrix sz2 = sz * sz;
    return kappa * (sz * rho * sz - 0.5 * (sz2 * rho + rho * sz2));
}

CMatrix coherent_rotation(double theta, const CMatrix& sz) {
    return expm_unitary(sz, theta);
}

GaussHermiteRule gauss_hermite(int order) {
    if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
    using RMatrix = Eigen::MatrixXd;
    RMatrix jacobi = RMatrix::Zero(order, order);
    for (int i = 0; i + 1 < order; ++i) {
        const double off = std::sqrt(0.5 * (i + 1));
        jacobi(i, i + 1) = off;
        jacobi(i + 1, i) = off;
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(jacobi);
    GaussHermiteRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const double sqrt_pi = std::sqrt(constants::pi);
    for (int i = 0; i < order; ++i) {
        rule.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = sqrt_pi * v0 * v0;
    }
    return rule;
}

KrausChannel averaged_rotation_channel(double sigma_theta, const CMatrix& sz,
                                       int quadrature_order) {
    if (sigma_theta < 0) throw std::invalid_argument("averaged_rotation_channel: sigma < 0");
    if (quadrature_order < 21)
        throw std::invalid_argument("averaged_rotation_channel: quadrature order must be >= 21");
    if (sigma_theta == 0.0)
        return KrausChannel({CMatrix::Identity(sz.rows(), sz.cols())});

    // theta = sqrt(2) sigma x turns the Gaussian average into the
    // Gauss-Hermite form; each node contributes a weighted unitary.
    const auto rule = gauss_hermite(quadrature_order);
    const double sqrt_pi = std::sqrt(constants::pi);
    std::vector<CMatrix> kraus;
    kraus.reserve(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double theta = std::sqrt(2.0) * sigma_theta * rule.nodes[i];
        kraus.push_back(std::sqrt(rule.weights[i] / sqrt_pi) * coherent_rotation(theta, sz));
    }
    return KrausChannel(std::move(kraus));
}

NoiseTrajectory sample_trajectory(const NoiseSchedule& schedule, std::uint64_t seed) {
    if (schedule.update_interval_s <= 0)
        throw std::invalid_argument("sample_trajectory: update interval must be > 0");
    if (schedule.sigma_b_tesla < 0)
        throw std::invalid_argument("sample_trajectory: sigma_b must be >= 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    NoiseTrajectory traj;
    double remaining = schedule.duration_s;
    while (remaining > 1e-15) {
        const double dt = std::min(schedule.update_interval_s, remaining);
        const double field = schedule.sigma_b_tesla * gauss(rng);
        traj.segments.push_back({dt, field * schedule.sensitivity});
        remaining -= dt;
    }
    return traj;
}

double field_to_detuning(double b_tesla, double delta_m, double g_factor) {
    return constants::two_pi * g_factor * constants::bohr_magneton_over_h_hz_per_tesla *
           b_tesla * delta_m;
}

DensityMatrix thermal_phonon_state(double nbar, const FockSpace& fock) {
    if (nbar < 0) throw std::invalid_argument("thermal_phonon_state: nbar must be >= 0");
    const auto n = fock.dim();
    CMatrix rho = CMatrix::Zero(n, n);
    if (nbar == 0.0) {
        rho(0, 0) = 1.0;
        return {rho, Dims{n}};
    }
    const double ratio = nbar / (1.0 + nbar);
    const double tail = std::pow(ratio, static_cast<double>(n));
    if (tail > 1e-8)
        throw truncation_too_small("thermal_phonon_state: truncated tail above 1e-8");
    double sum = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double p = std::pow(ratio, static_cast<double>(k)) / (1.0 + nbar);
        rho(k, k) = p;
        sum += p;
    }
    rho /= sum;
    return {rho, Dims{n}};
}

} // namespace aqec
