#include <doctest.h>

#include "aqec/algebra.hpp"
#include "aqec/constants.hpp"
#include "oracles.hpp"

using namespace aqec;

TEST_CASE("spin operators: defining cases") {
    const auto half = spin_operators(SpinManifold(1));
    CHECK(half.sz(0, 0).real() == doctest::Approx(-0.5));
    CHECK(half.sz(1, 1).real() == doctest::Approx(0.5));

    const SpinManifold five_half(5);
    const auto ops = spin_operators(five_half);
    for (Eigen::Index i = 0; i < 6; ++i)
        CHECK(ops.sz(i, i).real() == doctest::Approx(-2.5 + i));

    // <+1/2| S_+^2 |-3/2> = 6 sqrt(2), from the closed-form ladder factors.
    const CMatrix sp2 = ops.sp * ops.sp;
    const auto row = five_half.level_of_twice_m(1);
    const auto col = five_half.level_of_twice_m(-3);
    CHECK(sp2(row, col).real() == doctest::Approx(6.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("spin operators: algebra holds for all supported spins") {
    for (int twice_s : {1, 2, 3, 5, 7}) {
        const SpinManifold m(twice_s);
        const auto ops = spin_operators(m);
        const auto d = m.dim();
        const double s = m.spin();

        const CMatrix comm = ops.sx * ops.sy - ops.sy * ops.sx;
        CHECK((comm - cxd(0, 1) * ops.sz).cwiseAbs().maxCoeff() < 1e-10);

        const CMatrix casimir = ops.sx * ops.sx + ops.sy * ops.sy + ops.sz * ops.sz;
        CHECK((casimir - s * (s + 1) * CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);

        CHECK(hermiticity_defect(ops.sx) < 1e-12);
        CHECK(hermiticity_defect(ops.sy) < 1e-12);
    }
}

TEST_CASE("spin manifold rejects invalid spins") {
    CHECK_THROWS_AS(SpinManifold::from_spin(0.3), std::invalid_argument);
    CHECK_THROWS_AS(SpinManifold::from_spin(-0.5), std::invalid_argument);
    CHECK_THROWS_AS(SpinManifold(0), std::invalid_argument);
}

TEST_CASE("fock ladder operators") {
    const FockSpace fock(6);
    const CMatrix a = fock_lower(fock);
    const CMatrix ad = fock_raise(fock);
    CHECK((a * fock_basis_state(fock, 0)).norm() == doctest::Approx(0.0));
    // [a, a^dag] = I below the truncation edge.
    const CMatrix comm = a * ad - ad * a;
    for (Eigen::Index n = 0; n + 1 < fock.dim(); ++n)
        CHECK(comm(n, n).real() == doctest::Approx(1.0));
    CHECK_THROWS_AS(FockSpace(1), std::invalid_argument);
}

TEST_CASE("tensor products against the direct oracle") {
    std::mt19937_64 rng(7);
    const CMatrix i2 = CMatrix::Identity(2, 2);
    const CMatrix i3 = CMatrix::Identity(3, 3);
    CHECK((tensor(i2, i3) - CMatrix::Identity(6, 6)).norm() == doctest::Approx(0.0));

    const CMatrix a = oracle::random_hermitian(3, rng);
    const CMatrix b = oracle::random_hermitian(4, rng);
    CHECK((tensor(a, b) - oracle::naive_kron(a, b)).cwiseAbs().maxCoeff() < 1e-14);

    const CVector u = oracle::random_state(3, rng);
    const CVector v = oracle::random_state(4, rng);
    const CVector lhs = tensor((a * u).eval(), (b * v).eval());
    const CVector rhs = tensor(a, b) * tensor(u, v);
    CHECK((lhs - rhs).norm() < 1e-12);

    const Operator oa{a, Dims{3}};
    const Operator ob{b, Dims{4}};
    const Operator prod = tensor(oa, ob);
    CHECK(prod.dims == Dims{3, 4});
}

TEST_CASE("operator metadata validation") {
    CHECK_THROWS_AS(Operator(CMatrix::Identity(4, 4), Dims{3}), std::invalid_argument);
    CHECK_THROWS_AS(Operator(CMatrix::Zero(2, 3), Dims{2}), std::invalid_argument);
}

TEST_CASE("evolve: identity, Larmor half turn, series oracle") {
    const SpinManifold half(1);
    const auto ops = spin_operators(half);

    const Operator zero{CMatrix::Zero(2, 2), Dims{2}};
    CVector plus_x(2);
    plus_x << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const StateVector psi{plus_x, Dims{2}};
    CHECK((evolve(zero, 1.0, psi).vec - plus_x).norm() < 1e-14);

    // exp(-i Sz pi)|+x> = -i |-x> for spin-1/2.
    const Operator sz{ops.sz, Dims{2}};
    const CVector rotated = evolve(sz, constants::pi, psi).vec;
    CVector minus_x(2);
    minus_x << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    CHECK(std::abs(std::abs((minus_x.adjoint() * rotated)(0, 0)) - 1.0) < 1e-12);

    std::mt19937_64 rng(11);
    CMatrix h = oracle::random_hermitian(5, rng);
    h *= 0.01 / h.cwiseAbs().maxCoeff();
    CHECK((expm_unitary(h, 1.0) - oracle::series_expm(h, 1.0)).cwiseAbs().maxCoeff() < 1e-10);

    CMatrix not_hermitian = CMatrix::Zero(2, 2);
    not_hermitian(0, 1) = 1.0;
    CHECK_THROWS_AS(expm_unitary(not_hermitian, 1.0), std::invalid_argument);
}

TEST_CASE("evolve preserves norm and unitarity") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        const CMatrix h = oracle::random_hermitian(6, rng);
        const CMatrix u = expm_unitary(h, 0.7);
        CHECK((u * u.adjoint() - CMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
        const CVector psi = oracle::random_state(6, rng);
        CHECK(std::abs((u * psi).norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("kraus channels: identity, unitary conjugation, completeness") {
    std::mt19937_64 rng(17);
    const CMatrix rho = oracle::random_density(4, rng);

    const KrausChannel id({CMatrix::Identity(4, 4)});
    CHECK(id.complete());
    CHECK((apply_channel(id, rho) - rho).cwiseAbs().maxCoeff() < 1e-14);

    const CMatrix u = expm_unitary(oracle::random_hermitian(4, rng), 1.0);
    const KrausChannel unitary({u});
    CHECK((apply_channel(unitary, rho) - u * rho * u.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

    // Complete dephasing channel on a qubit keeps unit trace.
    CMatrix k0 = CMatrix::Zero(2, 2), k1 = CMatrix::Zero(2, 2);
    k0(0, 0) = 1;
    k1(1, 1) = 1;
    const KrausChannel dephase({k0, k1});
    CHECK(dephase.complete());
    const CMatrix rho2 = oracle::random_density(2, rng);
    CHECK(std::abs(apply_channel(dephase, rho2).trace().real() - 1.0) < 1e-10);
    CHECK(is_valid_density(apply_channel(dephase, rho2)));

    CHECK_THROWS_AS(apply_channel(dephase, rho), std::invalid_argument);
    CHECK_THROWS_AS(KrausChannel({(2.0 * CMatrix::Identity(2, 2)).eval()}),
                    std::invalid_argument);
}

TEST_CASE("partial trace: product states, entangled pair, trace preservation") {
    std::mt19937_64 rng(19);
    const CMatrix rho_a = oracle::random_density(3, rng);
    const CMatrix rho_b = oracle::random_density(4, rng);
    const DensityMatrix joint{tensor(rho_a, rho_b), Dims{3, 4}};

    CHECK((partial_trace(joint, 0).mat - rho_a).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((partial_trace(joint, 1).mat - rho_b).cwiseAbs().maxCoeff() < 1e-12);

    CVector bell(4);
    bell << 1.0 / std::sqrt(2.0), 0, 0, 1.0 / std::sqrt(2.0);
    const DensityMatrix pair{(bell * bell.adjoint()).eval(), Dims{2, 2}};
    CHECK((partial_trace(pair, 0).mat - 0.5 * CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-12);

    const CMatrix random = oracle::random_density(12, rng);
    CHECK((partial_trace(random, Dims{3, 4}, 1) -
           oracle::naive_partial_trace_2(random, 3, 4, 1))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK(std::abs(partial_trace(random, Dims{3, 4}, 0).trace().real() - 1.0) < 1e-12);

    CHECK_THROWS_AS(partial_trace(random, Dims{3, 4}, 2), std::invalid_argument);
}

TEST_CASE("core types instantiate for float scalars") {
    const SpinManifold m(3);
    const auto ops = spin_operators<float>(m);
    CHECK(ops.sz.rows() == 4);
    const ComplexMatrixT<float> comm = ops.sx * ops.sy - ops.sy * ops.sx;
    CHECK((comm - std::complex<float>(0, 1) * ops.sz).cwiseAbs().maxCoeff() < 1e-5f);
}
