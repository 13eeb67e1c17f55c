#pragma once

// Test-only oracles, kept independent of the library implementations they
// check: direct-summation tensor products and partial traces, truncated
// series exponentials, and a fixed-step master-equation integrator.

#include <complex>
#include <random>

#include "aqec/algebra.hpp"

namespace oracle {

using aqec::CMatrix;
using aqec::CVector;
using aqec::cxd;

inline CMatrix naive_kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (Eigen::Index k = 0; k < b.rows(); ++k)
                for (Eigen::Index l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

// Fourth-order truncated series of exp(-i H t).
inline CMatrix series_expm(const CMatrix& h, double t) {
    const auto d = h.rows();
    CMatrix term = CMatrix::Identity(d, d);
    CMatrix sum = term;
    for (int k = 1; k <= 4; ++k) {
        term = (term * (cxd(0, -t) * h) / static_cast<double>(k)).eval();
        sum += term;
    }
    return sum;
}

// Direct-index partial trace keeping subsystem `keep` of dims {da, db}.
inline CMatrix naive_partial_trace_2(const CMatrix& rho, Eigen::Index da, Eigen::Index db,
                                     int keep) {
    if (keep == 0) {
        CMatrix out = CMatrix::Zero(da, da);
        for (Eigen::Index i = 0; i < da; ++i)
            for (Eigen::Index j = 0; j < da; ++j)
                for (Eigen::Index k = 0; k < db; ++k) out(i, j) += rho(i * db + k, j * db + k);
        return out;
    }
    CMatrix out = CMatrix::Zero(db, db);
    for (Eigen::Index i = 0; i < db; ++i)
        for (Eigen::Index j = 0; j < db; ++j)
            for (Eigen::Index k = 0; k < da; ++k) out(i, j) += rho(k * db + i, k * db + j);
    return out;
}

// Fixed-step RK4 integration of d rho/dt = f(rho).
template <typename Rhs>
CMatrix rk4(const CMatrix& rho0, double t_total, int steps, const Rhs& f) {
    CMatrix rho = rho0;
    const double h = t_total / steps;
    for (int s = 0; s < steps; ++s) {
        const CMatrix k1 = f(rho);
        const CMatrix k2 = f((rho + 0.5 * h * k1).eval());
        const CMatrix k3 = f((rho + 0.5 * h * k2).eval());
        const CMatrix k4 = f((rho + h * k3).eval());
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
}

inline CMatrix random_density(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) g(i, j) = cxd(gauss(rng), gauss(rng));
    CMatrix rho = g * g.adjoint();
    return rho / rho.trace();
}

inline CVector random_state(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CVector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = cxd(gauss(rng), gauss(rng));
    return v / v.norm();
}

inline CMatrix random_hermitian(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) g(i, j) = cxd(gauss(rng), gauss(rng));
    return 0.5 * (g + g.adjoint());
}

} // namespace oracle
