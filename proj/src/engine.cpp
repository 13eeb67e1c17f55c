#include "aqec/engine.hpp"

#include <cmath>

namespace aqec {

namespace {

// sigma = |0_L><0_E| + |1_L><1_E| maps the error space to the code space.
CMatrix error_to_code(const CodeSpec& code) {
    return code.zero_l * code.zero_e.adjoint() + code.one_l * code.one_e.adjoint();
}

CMatrix logical_z(const CodeSpec& code) {
    return code.zero_l * code.zero_l.adjoint() - code.one_l * code.one_l.adjoint() +
           code.zero_e * code.zero_e.adjoint() - code.one_e * code.one_e.adjoint();
}

} // namespace

CVector embed_host(const CodeSpec& code, const CVector& host_vec) {
    CVector out = CVector::Zero(extended_dim(code));
    out.segment(2, host_vec.size()) = host_vec;
    return out;
}

CVector aux_basis_state(const CodeSpec& code, int which) {
    if (which != 0 && which != 1)
        throw std::invalid_argument("aux_basis_state: which must be 0 or 1");
    CVector out = CVector::Zero(extended_dim(code));
    out(which) = 1.0;
    return out;
}

Operator encoder_unitary(const CodeSpec& code) {
    const auto dim = extended_dim(code);
    CMatrix u = CMatrix::Zero(dim, dim);
    u.col(0) = embed_host(code, code.zero_l);
    u.col(1) = embed_host(code, code.one_l);

    // Complete the unitary by Gram-Schmidt over the standard basis; the
    // action on the complement is arbitrary but fixed and real.
    Eigen::Index next = 2;
    for (Eigen::Index k = 0; k < dim && next < dim; ++k) {
        CVector cand = CVector::Zero(dim);
        cand(k) = 1.0;
        for (Eigen::Index c = 0; c < next; ++c) cand -= (u.col(c).adjoint() * cand)(0, 0) * u.col(c);
        const double norm = cand.norm();
        if (norm > 1e-8) u.col(next++) = cand / norm;
    }
    if (next != dim) throw std::runtime_error("encoder_unitary: basis completion failed");
    return {u, Dims{dim}};
}

Operator h_ec(const EntropyConversionParams& p, const CodeSpec& code) {
    if (p.omega_ec <= 0 || p.t <= 0)
        throw std::invalid_argument("h_ec: omega and duration must be positive");
    const FockSpace fock(p.fock_levels);
    const CMatrix sigma = error_to_code(code);
    const CMatrix raise = fock_raise(fock);
    CMatrix h = 0.5 * p.omega_ec * tensor(sigma, raise);
    h = (h + h.adjoint()).eval();
    return {h, Dims{code.manifold.dim(), fock.dim()}};
}

Operator u_ec(const EntropyConversionParams& p, const CodeSpec& code) {
    const FockSpace fock(p.fock_levels);
    const auto nf = fock.dim();
    const auto ds = code.manifold.dim();
    const double half_angle = 0.5 * p.omega_ec * p.t;

    // Everything is block-diagonal over {|s_L,n+1>, |s_E,n>} pairs, so the
    // propagator is assembled from diagonal cos factors and one off-diagonal
    // sin band. On the truncated space a|0> = 0 and a^dag|N-1> = 0 make this
    // exactly the exponential of the truncated h_ec.
    CMatrix cos_code = CMatrix::Zero(nf, nf);  // cos(x sqrt(a^dag a)) - I
    CMatrix cos_err = CMatrix::Zero(nf, nf);   // cos(x sqrt(a a^dag)) - I
    CMatrix sin_band = CMatrix::Zero(nf, nf);  // sin(x sqrt(a^dag a)) (a^dag a)^{-1/2} a^dag
    for (Eigen::Index n = 0; n < nf; ++n) {
        cos_code(n, n) = std::cos(half_angle * std::sqrt(static_cast<double>(n))) - 1.0;
        const double m = (n + 1 < nf) ? static_cast<double>(n + 1) : 0.0;
        cos_err(n, n) = std::cos(half_angle * std::sqrt(m)) - 1.0;
        if (n + 1 < nf)
            sin_band(n + 1, n) = std::sin(half_angle * std::sqrt(static_cast<double>(n + 1)));
    }

    const CMatrix sigma = error_to_code(code);
    const CMatrix p_c = code.code_projector;
    const CMatrix p_e = code.error_projector;

    CMatrix u = CMatrix::Identity(ds * nf, ds * nf);
    u += tensor(p_c, cos_code) + tensor(p_e, cos_err);
    u += cxd(0, -1) * (tensor(sigma, sin_band) + tensor(sigma.adjoint().eval(),
                                                        sin_band.transpose().eval()));
    return {u, Dims{ds, nf}};
}

RecoveryChannel recovery_channel(const CodeSpec& code) {
    return {code.code_projector, error_to_code(code)};
}

KrausChannel reset_channel(double nbar, const FockSpace& fock) {
    const auto n = fock.dim();
    const DensityMatrix thermal = thermal_phonon_state(nbar, fock);
    std::vector<CMatrix> kraus;
    kraus.reserve(n * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double p = thermal.mat(j, j).real();
        if (p <= 0) continue;
        for (Eigen::Index k = 0; k < n; ++k) {
            CMatrix op = CMatrix::Zero(n, n);
            op(j, k) = std::sqrt(p);
            kraus.push_back(std::move(op));
        }
    }
    return KrausChannel(std::move(kraus));
}

DensityMatrix reset_phonon(const DensityMatrix& joint, double nbar) {
    if (joint.dims.size() != 2)
        throw std::invalid_argument("reset_phonon: expected a [spin, fock] state");
    const FockSpace fock(joint.dims[1]);
    DensityMatrix spin = partial_trace(joint, 0);
    return tensor(spin, thermal_phonon_state(nbar, fock));
}

namespace {

DensityMatrix apply_idle(const DensityMatrix& joint, const CodeSpec& code,
                         const CycleConfig& cfg, const CycleShot& shot) {
    const auto sz = spin_operators(code.manifold).sz;
    const auto nf = joint.dims[1];
    if (cfg.idle_noise == CycleConfig::IdleNoise::rotation) {
        const CMatrix u = tensor(coherent_rotation(shot.idle_phase, sz),
                                 CMatrix::Identity(nf, nf));
        return {(u * joint.mat * u.adjoint()).eval(), joint.dims};
    }
    DephasingParams p{cfg.idle_kappa, cfg.tau_idle,
                      suggested_kraus_order(cfg.idle_kappa * cfg.tau_idle, sz)};
    const auto channel = lindblad_kraus(p, sz);
    CMatrix out = CMatrix::Zero(joint.dim(), joint.dim());
    for (const auto& k : channel.kraus()) {
        const CMatrix kj = tensor(k, CMatrix::Identity(nf, nf).eval());
        out += kj * joint.mat * kj.adjoint();
    }
    return {out, joint.dims};
}

DensityMatrix apply_conversion(const DensityMatrix& joint, const CodeSpec& code,
                               const CycleConfig& cfg, const CycleShot& shot) {
    EntropyConversionParams p{cfg.omega() * shot.omega_scale, cfg.tau_ec, joint.dims[1]};
    CMatrix u;
    if (shot.mode_drift == 0.0) {
        u = u_ec(p, code).mat;
    } else {
        const FockSpace fock(joint.dims[1]);
        CMatrix h = h_ec(p, code).mat;
        h += shot.mode_drift *
             tensor(CMatrix::Identity(code.manifold.dim(), code.manifold.dim()).eval(),
                    fock_number(fock));
        u = expm_unitary(h, cfg.tau_ec);
    }
    if (shot.stark_phase != 0.0) {
        const CMatrix zphase =
            expm_unitary(logical_z(code), 0.5 * shot.stark_phase); // exp(-i phi/2 Z)
        u = tensor(zphase, CMatrix::Identity(joint.dims[1], joint.dims[1]).eval()) * u;
    }
    return {(u * joint.mat * u.adjoint()).eval(), joint.dims};
}

} // namespace

DensityMatrix aqec_cycle(const DensityMatrix& joint, const CodeSpec& code,
                         const CycleConfig& cfg, const CycleShot& shot) {
    if (joint.dims.size() != 2 || joint.dims[0] != code.manifold.dim())
        throw std::invalid_argument("aqec_cycle: expected a [spin, fock] state over the host manifold");
    DensityMatrix rho = apply_idle(joint, code, cfg, shot);
    rho = apply_conversion(rho, code, cfg, shot);
    return reset_phonon(rho, cfg.reset_nbar);
}

CMatrix cycle_superoperator(const CodeSpec& code, const CycleConfig& cfg, const CycleShot& shot) {
    const auto ds = code.manifold.dim();
    const FockSpace fock(cfg.fock_levels);
    const DensityMatrix thermal = thermal_phonon_state(cfg.reset_nbar, fock);

    CMatrix superop = CMatrix::Zero(ds * ds, ds * ds);
    for (Eigen::Index j = 0; j < ds; ++j)
        for (Eigen::Index i = 0; i < ds; ++i) {
            CMatrix basis = CMatrix::Zero(ds, ds);
            basis(i, j) = 1.0;
            DensityMatrix joint{tensor(basis, thermal.mat), Dims{ds, fock.dim()}};
            joint = apply_idle(joint, code, cfg, shot);
            joint = apply_conversion(joint, code, cfg, shot);
            const CMatrix reduced = partial_trace(joint.mat, joint.dims, 0);
            superop.col(j * ds + i) = Eigen::Map<const CVector>(reduced.data(), ds * ds);
        }
    return superop;
}

CMatrix apply_superoperator(const CMatrix& superop, const CMatrix& rho) {
    const auto d = rho.rows();
    const CVector out = superop * Eigen::Map<const CVector>(rho.data(), d * d);
    return Eigen::Map<const CMatrix>(out.data(), d, d);
}

TransparencyResiduals error_transparency_check(const Operator& h, const CodeSpec& code) {
    if (h.dims.size() != 2 || h.dims[0] != code.manifold.dim())
        throw std::invalid_argument("error_transparency_check: expected a [spin, fock] operator");
    const auto nf = h.dims[1];
    const CMatrix in = CMatrix::Identity(nf, nf);

    const auto sz = spin_operators(code.manifold).sz;
    const double alpha1 = (code.zero_l.adjoint() * sz * sz * code.zero_l)(0, 0).real();
    const CMatrix pz_spin = (1.0 / std::sqrt(alpha1)) * sz * code.code_projector;

    const CMatrix pc = tensor(code.code_projector, in);
    const CMatrix pz = tensor(pz_spin, in);

    const CMatrix code_block = pc * h.mat * pc;
    const CMatrix m = pz.adjoint() * h.mat * pz - code_block;
    const cxd c_opt = (pc.adjoint() * m).trace() / (pc.adjoint() * pc).trace();
    return {code_block.norm(), (m - c_opt * pc).norm()};
}

} // namespace aqec
