#include "aqec/code.hpp"

#include <algorithm>
#include <cmath>

namespace aqec {

namespace {

// Error word as the normalized component of S_z|psi> orthogonal to |psi>,
// with an overall minus sign. For the untilted code this reproduces the
// explicit error-word amplitudes (sqrt(3)/2, -1/2) etc., and in general it
// keeps S_z|sigma_L> inside span{|sigma_L>, |sigma_E>}.
CVector error_word(const CMatrix& sz, const CVector& codeword) {
    const cxd mean = (codeword.adjoint() * sz * codeword)(0, 0);
    CVector residual = sz * codeword - mean * codeword;
    const double norm = residual.norm();
    if (norm < 1e-14)
        throw unsupported_manifold("code has no first-order error component");
    return (-residual / norm).eval();
}

// |0_L> = sqrt(wa)|a0> + sqrt(1-wa)|a1>, |1_L> = sqrt(wb)|b0> + sqrt(1-wb)|b1>.
CodeSpec make_code(const SpinManifold& manifold, Eigen::Index a0, Eigen::Index a1, double wa,
                   Eigen::Index b0, Eigen::Index b1, double wb, double kappa_t) {
    const auto d = manifold.dim();
    const auto sz = spin_operators(manifold).sz;

    CVector zero_l = CVector::Zero(d);
    CVector one_l = CVector::Zero(d);
    zero_l(a0) = std::sqrt(wa);
    zero_l(a1) = std::sqrt(1.0 - wa);
    one_l(b0) = std::sqrt(wb);
    one_l(b1) = std::sqrt(1.0 - wb);

    std::array<Eigen::Index, 4> levels = {a0, a1, b0, b1};
    std::sort(levels.begin(), levels.end());

    CodeSpec code{manifold, levels,
                  zero_l, one_l,
                  error_word(sz, zero_l), error_word(sz, one_l),
                  CMatrix(), CMatrix(), CMatrix(), kappa_t};
    code.code_projector = code.zero_l * code.zero_l.adjoint() + code.one_l * code.one_l.adjoint();
    code.error_projector = code.zero_e * code.zero_e.adjoint() + code.one_e * code.one_e.adjoint();
    code.parity = parity_operator(code);
    return code;
}

} // namespace

CodeSpec build_code(const SpinManifold& manifold, double kappa_t) {
    if (!manifold.is_half_odd_integer() || manifold.twice_s() < 3)
        throw unsupported_manifold("build_code: need half-odd-integer S >= 3/2");
    if (kappa_t < 0) throw std::invalid_argument("build_code: kappa_t must be >= 0");

    // Codeword weight e^{2kt}/(3+e^{2kt}) on the outer sublevel and
    // 3/(3+e^{2kt}) on the inner one; at kappa_t = 0 these are 1/4 and 3/4.
    const double e2 = std::exp(2.0 * kappa_t);
    const double w_outer = e2 / (3.0 + e2);

    return make_code(manifold,
                     manifold.level_of_twice_m(-3), manifold.level_of_twice_m(+1), w_outer,
                     manifold.level_of_twice_m(+3), manifold.level_of_twice_m(-1), w_outer,
                     kappa_t);
}

CodeSpec build_code(double spin, double kappa_t) {
    return build_code(SpinManifold::from_spin(spin), kappa_t);
}

KLReport kl_verify(const CodeSpec& code, const std::vector<CMatrix>& errors, double tol) {
    const auto d = code.manifold.dim();
    for (const auto& e : errors)
        if (e.rows() != d || e.cols() != d)
            throw std::invalid_argument("kl_verify: error operator dimension mismatch");

    const auto n = static_cast<Eigen::Index>(errors.size());
    KLReport report;
    report.alpha = CMatrix::Zero(n, n);
    double violation = 0.0;
    for (Eigen::Index l = 0; l < n; ++l)
        for (Eigen::Index k = 0; k < n; ++k) {
            const CMatrix prod = errors[l].adjoint() * errors[k];
            const cxd a00 = (code.zero_l.adjoint() * prod * code.zero_l)(0, 0);
            const cxd a11 = (code.one_l.adjoint() * prod * code.one_l)(0, 0);
            const cxd a01 = (code.zero_l.adjoint() * prod * code.one_l)(0, 0);
            const cxd a10 = (code.one_l.adjoint() * prod * code.zero_l)(0, 0);
            report.alpha(l, k) = a00;
            violation = std::max({violation, std::abs(a00 - a11), std::abs(a01), std::abs(a10)});
        }
    report.max_violation = violation;
    report.pass = violation <= tol;
    return report;
}

CMatrix parity_operator(const CodeSpec& code) {
    // Pseudo-spin-3/2 S_x on the embedded four-level subspace; its square
    // minus 5/4 has spectrum {+1, +1, -1, -1}.
    const auto pseudo = spin_operators(SpinManifold(3));
    const CMatrix block = pseudo.sx * pseudo.sx - 1.25 * CMatrix::Identity(4, 4);

    const auto d = code.manifold.dim();
    CMatrix parity = CMatrix::Zero(d, d);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            parity(code.levels[r], code.levels[c]) = block(r, c);
    return parity;
}

std::vector<CodeSpec> code_search(const SpinManifold& manifold, double tol) {
    std::vector<CodeSpec> found;
    const auto d = manifold.dim();
    if (d < 4) return found;

    const auto sops = spin_operators(manifold);
    const std::vector<CMatrix> errors = {CMatrix::Identity(d, d), sops.sz};

    // Choose disjoint sublevel pairs (i, j) for |0_L> and (k, l) for |1_L>;
    // the 0/1 relabeling is fixed by i < k. Matching the first and second
    // S_z moments of the codewords is linear in the level weights, so each
    // geometry admits at most one candidate.
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j)
            for (Eigen::Index k = i + 1; k < d; ++k)
                for (Eigen::Index l = k + 1; l < d; ++l) {
                    if (k == j || l == j) continue;
                    const double mi = manifold.m(i), mj = manifold.m(j);
                    const double mk = manifold.m(k), ml = manifold.m(l);

                    const double a11 = mi - mj, a12 = -(mk - ml);
                    const double a21 = mi * mi - mj * mj, a22 = -(mk * mk - ml * ml);
                    const double r1 = ml - mj;
                    const double r2 = ml * ml - mj * mj;
                    const double det = a11 * a22 - a12 * a21;
                    if (std::abs(det) < 1e-12) continue;
                    const double x = (r1 * a22 - r2 * a12) / det;
                    const double y = (a11 * r2 - a21 * r1) / det;
                    const double eps = 1e-9;
                    if (x < eps || x > 1.0 - eps || y < eps || y > 1.0 - eps) continue;

                    CodeSpec code = make_code(manifold, i, j, x, k, l, y, 0.0);
                    if (kl_verify(code, errors, tol).pass) found.push_back(std::move(code));
                }
    return found;
}

} // namespace aqec
