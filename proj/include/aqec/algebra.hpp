#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aqec/errors.hpp"

// Dense linear algebra for a spin-S manifold coupled to a truncated phonon
// mode: operators, states, Kraus channels, composition and evolution.
// Everything is templated on the real scalar; `double` aliases below are what
// the rest of the library uses. All values are immutable after construction
// and all functions are pure, so sharing across threads needs no locks.

namespace aqec {

template <typename Real>
using ComplexMatrixT =
    Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVectorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RealVectorT = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using cxd     = std::complex<double>;
using CMatrix = ComplexMatrixT<double>;
using CVector = ComplexVectorT<double>;

using Dims = std::vector<Eigen::Index>; // subsystem dimensions, leftmost is most significant

inline Eigen::Index total_dim(const Dims& dims) {
    Eigen::Index d = 1;
    for (auto x : dims) d *= x;
    return d;
}

// Spin-S internal manifold with levels ordered by m ascending: index i holds
// m = -S + i. S is stored as 2S to keep half-integers exact.
class SpinManifold {
  public:
    explicit SpinManifold(int twice_s) : twice_s_(twice_s) {
        if (twice_s < 1)
            throw std::invalid_argument("SpinManifold: 2S must be a positive integer");
    }
    static SpinManifold from_spin(double s) {
        const double twice = 2.0 * s;
        const auto rounded = static_cast<int>(twice + 0.5);
        if (rounded < 1 || std::abs(twice - rounded) > 1e-9)
            throw std::invalid_argument("SpinManifold: S must be a positive multiple of 1/2");
        return SpinManifold(rounded);
    }

    int twice_s() const { return twice_s_; }
    double spin() const { return 0.5 * twice_s_; }
    Eigen::Index dim() const { return twice_s_ + 1; }
    bool is_half_odd_integer() const { return twice_s_ % 2 == 1; }

    double m(Eigen::Index level) const { return -spin() + static_cast<double>(level); }
    // Level index of magnetic quantum number m, given as 2m.
    Eigen::Index level_of_twice_m(int twice_m) const {
        const int idx = (twice_m + twice_s_) / 2;
        if ((twice_m + twice_s_) % 2 != 0 || idx < 0 || idx >= dim())
            throw std::invalid_argument("SpinManifold: m outside manifold");
        return idx;
    }

  private:
    int twice_s_;
};

// Truncated phonon Fock space with N retained levels |0..N-1>.
class FockSpace {
  public:
    explicit FockSpace(Eigen::Index levels) : levels_(levels) {
        if (levels < 2) throw std::invalid_argument("FockSpace: need at least 2 levels");
    }
    Eigen::Index dim() const { return levels_; }

  private:
    Eigen::Index levels_;
};

// Dense operator on a composite Hilbert space. The dims vector records the
// tensor factorization; its product must equal the matrix dimension.
template <typename Real>
struct OperatorT {
    ComplexMatrixT<Real> mat;
    Dims dims;

    OperatorT() = default;
    OperatorT(ComplexMatrixT<Real> m, Dims d) : mat(std::move(m)), dims(std::move(d)) {
        if (mat.rows() != mat.cols())
            throw std::invalid_argument("Operator: matrix must be square");
        if (total_dim(dims) != mat.rows())
            throw std::invalid_argument("Operator: subsystem dims do not match matrix size");
    }
    Eigen::Index dim() const { return mat.rows(); }
};

template <typename Real>
struct StateVectorT {
    ComplexVectorT<Real> vec;
    Dims dims;

    StateVectorT() = default;
    StateVectorT(ComplexVectorT<Real> v, Dims d) : vec(std::move(v)), dims(std::move(d)) {
        if (total_dim(dims) != vec.size())
            throw std::invalid_argument("StateVector: subsystem dims do not match vector size");
    }
    Eigen::Index dim() const { return vec.size(); }
    Real norm() const { return vec.norm(); }
};

template <typename Real>
struct DensityMatrixT {
    ComplexMatrixT<Real> mat;
    Dims dims;

    DensityMatrixT() = default;
    DensityMatrixT(ComplexMatrixT<Real> m, Dims d) : mat(std::move(m)), dims(std::move(d)) {
        if (mat.rows() != mat.cols())
            throw std::invalid_argument("DensityMatrix: matrix must be square");
        if (total_dim(dims) != mat.rows())
            throw std::invalid_argument("DensityMatrix: subsystem dims do not match matrix size");
    }
    Eigen::Index dim() const { return mat.rows(); }
};

using Operator      = OperatorT<double>;
using StateVector   = StateVectorT<double>;
using DensityMatrix = DensityMatrixT<double>;

template <typename Real>
DensityMatrixT<Real> to_density(const StateVectorT<Real>& psi) {
    return {(psi.vec * psi.vec.adjoint()).eval(), psi.dims};
}

// ---------------------------------------------------------------------------
// Spin and Fock operators

template <typename Real>
struct SpinOperatorsT {
    ComplexMatrixT<Real> sz, sp, sm, sx, sy;
};
using SpinOperators = SpinOperatorsT<double>;

// S_z, ladder and transverse operators in the m-ascending basis:
// S_z = diag(-S..+S), S_+|S,m> = sqrt(S(S+1) - m(m+1)) |S,m+1>.
template <typename Real = double>
SpinOperatorsT<Real> spin_operators(const SpinManifold& manifold) {
    using Mat = ComplexMatrixT<Real>;
    const auto d = manifold.dim();
    const Real s = static_cast<Real>(manifold.spin());

    Mat sz = Mat::Zero(d, d);
    Mat sp = Mat::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const Real m = static_cast<Real>(manifold.m(i));
        sz(i, i) = m;
        if (i + 1 < d) sp(i + 1, i) = std::sqrt(s * (s + 1) - m * (m + 1));
    }
    Mat sm = sp.adjoint();
    Mat sx = (sp + sm) / Real(2);
    Mat sy = (sp - sm) / std::complex<Real>(0, 2);
    return {std::move(sz), std::move(sp), std::move(sm), std::move(sx), std::move(sy)};
}

// Annihilation operator a on the truncated Fock space; a|0> = 0.
template <typename Real = double>
ComplexMatrixT<Real> fock_lower(const FockSpace& fock) {
    ComplexMatrixT<Real> a = ComplexMatrixT<Real>::Zero(fock.dim(), fock.dim());
    for (Eigen::Index n = 1; n < fock.dim(); ++n)
        a(n - 1, n) = std::sqrt(static_cast<Real>(n));
    return a;
}

template <typename Real = double>
ComplexMatrixT<Real> fock_raise(const FockSpace& fock) {
    return fock_lower<Real>(fock).adjoint();
}

template <typename Real = double>
ComplexMatrixT<Real> fock_number(const FockSpace& fock) {
    ComplexMatrixT<Real> n = ComplexMatrixT<Real>::Zero(fock.dim(), fock.dim());
    for (Eigen::Index k = 0; k < fock.dim(); ++k) n(k, k) = static_cast<Real>(k);
    return n;
}

template <typename Real = double>
ComplexVectorT<Real> fock_basis_state(const FockSpace& fock, Eigen::Index n) {
    if (n < 0 || n >= fock.dim())
        throw std::invalid_argument("fock_basis_state: level outside truncation");
    ComplexVectorT<Real> v = ComplexVectorT<Real>::Zero(fock.dim());
    v(n) = Real(1);
    return v;
}

// ---------------------------------------------------------------------------
// Tensor products

// Kronecker product of raw matrices/vectors; left factor is most significant.
template <typename DerivedA, typename DerivedB>
auto tensor(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    return Eigen::kroneckerProduct(a.derived(), b.derived()).eval();
}

template <typename Real>
OperatorT<Real> tensor(const OperatorT<Real>& a, const OperatorT<Real>& b) {
    Dims dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    return {tensor(a.mat, b.mat), std::move(dims)};
}

template <typename Real>
StateVectorT<Real> tensor(const StateVectorT<Real>& a, const StateVectorT<Real>& b) {
    Dims dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    return {tensor(a.vec, b.vec), std::move(dims)};
}

template <typename Real>
DensityMatrixT<Real> tensor(const DensityMatrixT<Real>& a, const DensityMatrixT<Real>& b) {
    Dims dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    return {tensor(a.mat, b.mat), std::move(dims)};
}

// ---------------------------------------------------------------------------
// Hermiticity and evolution

template <typename Derived>
auto hermiticity_defect(const Eigen::MatrixBase<Derived>& h) {
    return (h.derived() - h.derived().adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& h, double tol = 1e-10) {
    const double scale = std::max(1.0, static_cast<double>(h.derived().cwiseAbs().maxCoeff()));
    if (hermiticity_defect(h) > tol * scale)
        throw std::invalid_argument("expected a Hermitian matrix");
}

// exp(scale * H) for Hermitian H and real scale, via eigendecomposition.
template <typename Derived>
auto expm_hermitian(const Eigen::MatrixBase<Derived>& h, double scale) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    using Mat  = ComplexMatrixT<Real>;
    require_hermitian(h);
    Eigen::SelfAdjointEigenSolver<Mat> es(h.derived());
    if (es.info() != Eigen::Success)
        throw std::runtime_error("expm_hermitian: eigendecomposition failed");
    RealVectorT<Real> exps = (scale * es.eigenvalues().array()).exp();
    return Mat(es.eigenvectors() * exps.template cast<std::complex<Real>>().asDiagonal() *
               es.eigenvectors().adjoint());
}

// U = exp(-i H t) for Hermitian H, via eigendecomposition.
template <typename Derived>
auto expm_unitary(const Eigen::MatrixBase<Derived>& h, double t) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    using Mat  = ComplexMatrixT<Real>;
    require_hermitian(h);
    Eigen::SelfAdjointEigenSolver<Mat> es(h.derived());
    if (es.info() != Eigen::Success)
        throw std::runtime_error("expm_unitary: eigendecomposition failed");
    ComplexVectorT<Real> phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(std::complex<Real>(0, -es.eigenvalues()(i) * t));
    return Mat(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
}

template <typename Real>
StateVectorT<Real> evolve(const OperatorT<Real>& h, double t, const StateVectorT<Real>& psi) {
    if (h.dim() != psi.dim()) throw std::invalid_argument("evolve: dimension mismatch");
    return {expm_unitary(h.mat, t) * psi.vec, psi.dims};
}

template <typename Real>
DensityMatrixT<Real> evolve(const OperatorT<Real>& h, double t, const DensityMatrixT<Real>& rho) {
    if (h.dim() != rho.dim()) throw std::invalid_argument("evolve: dimension mismatch");
    const auto u = expm_unitary(h.mat, t);
    return {(u * rho.mat * u.adjoint()).eval(), rho.dims};
}

// ---------------------------------------------------------------------------
// Kraus channels

// Finite list of Kraus operators {K_i}. The channel is trace-non-increasing
// (sum K_i^dag K_i <= I); it is flagged complete when the sum equals I.
template <typename Real>
class KrausChannelT {
  public:
    using Mat = ComplexMatrixT<Real>;

    explicit KrausChannelT(std::vector<Mat> kraus, double tol = 1e-10)
        : kraus_(std::move(kraus)) {
        if (kraus_.empty()) throw std::invalid_argument("KrausChannel: empty operator list");
        const auto d = kraus_.front().rows();
        Mat sum = Mat::Zero(d, d);
        for (const auto& k : kraus_) {
            if (k.rows() != d || k.cols() != d)
                throw std::invalid_argument("KrausChannel: inconsistent operator dimensions");
            sum += k.adjoint() * k;
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(sum);
        const double max_ev = es.eigenvalues().maxCoeff();
        if (max_ev > 1.0 + 1e-8)
            throw std::invalid_argument("KrausChannel: trace-increasing operator set");
        completeness_defect_ = (sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
        complete_ = completeness_defect_ <= tol;
    }

    const std::vector<Mat>& kraus() const { return kraus_; }
    Eigen::Index dim() const { return kraus_.front().rows(); }
    bool complete() const { return complete_; }
    double completeness_defect() const { return completeness_defect_; }

  private:
    std::vector<Mat> kraus_;
    double completeness_defect_ = 0;
    bool complete_ = false;
};

using KrausChannel = KrausChannelT<double>;

template <typename Real>
ComplexMatrixT<Real> apply_channel(const KrausChannelT<Real>& ch, const ComplexMatrixT<Real>& rho) {
    if (ch.dim() != rho.rows()) throw std::invalid_argument("apply_channel: dimension mismatch");
    ComplexMatrixT<Real> out = ComplexMatrixT<Real>::Zero(rho.rows(), rho.cols());
    for (const auto& k : ch.kraus()) out += k * rho * k.adjoint();
    return out;
}

template <typename Real>
DensityMatrixT<Real> apply_channel(const KrausChannelT<Real>& ch, const DensityMatrixT<Real>& rho) {
    return {apply_channel(ch, rho.mat), rho.dims};
}

// ---------------------------------------------------------------------------
// Partial trace

// Reduce a composite density matrix to the `keep`-th subsystem. Subsystem
// ordering matches tensor(): index = (..(i0*d1 + i1)*d2 ..) + i_{n-1}.
template <typename Real>
ComplexMatrixT<Real> partial_trace(const ComplexMatrixT<Real>& rho, const Dims& dims,
                                   std::size_t keep) {
    if (keep >= dims.size()) throw std::invalid_argument("partial_trace: invalid subsystem index");
    if (total_dim(dims) != rho.rows())
        throw std::invalid_argument("partial_trace: dims do not match matrix size");

    Eigen::Index right = 1; // stride of the kept subsystem
    for (std::size_t j = keep + 1; j < dims.size(); ++j) right *= dims[j];
    const Eigen::Index dk = dims[keep];
    const Eigen::Index left = rho.rows() / (dk * right);

    ComplexMatrixT<Real> out = ComplexMatrixT<Real>::Zero(dk, dk);
    for (Eigen::Index a = 0; a < dk; ++a)
        for (Eigen::Index b = 0; b < dk; ++b) {
            std::complex<Real> acc(0, 0);
            for (Eigen::Index lo = 0; lo < left; ++lo)
                for (Eigen::Index r = 0; r < right; ++r) {
                    const Eigen::Index row = (lo * dk + a) * right + r;
                    const Eigen::Index col = (lo * dk + b) * right + r;
                    acc += rho(row, col);
                }
            out(a, b) = acc;
        }
    return out;
}

template <typename Real>
DensityMatrixT<Real> partial_trace(const DensityMatrixT<Real>& rho, std::size_t keep) {
    return {partial_trace(rho.mat, rho.dims, keep), Dims{rho.dims[keep]}};
}

// ---------------------------------------------------------------------------
// Small helpers

template <typename Real>
bool is_valid_density(const ComplexMatrixT<Real>& rho, double herm_tol = 1e-10,
                      double eig_tol = 1e-10, double trace_tol = 1e-10) {
    if (rho.rows() != rho.cols()) return false;
    if (hermiticity_defect(rho) > herm_tol) return false;
    if (std::abs(rho.trace().real() - 1.0) > trace_tol || std::abs(rho.trace().imag()) > trace_tol)
        return false;
    Eigen::SelfAdjointEigenSolver<ComplexMatrixT<Real>> es((rho + rho.adjoint()) / Real(2));
    return es.eigenvalues().minCoeff() >= -eig_tol;
}

template <typename Real>
Real state_fidelity(const ComplexVectorT<Real>& psi, const ComplexMatrixT<Real>& rho) {
    return (psi.adjoint() * rho * psi)(0, 0).real();
}

template <typename Real>
Real trace_distance(const ComplexMatrixT<Real>& a, const ComplexMatrixT<Real>& b) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrixT<Real>> es(a - b);
    return Real(0.5) * es.eigenvalues().cwiseAbs().sum();
}

} // namespace aqec
