#include <doctest.h>

#include "aqec/code.hpp"
#include "aqec/noise.hpp"
#include "oracles.hpp"

using namespace aqec;

TEST_CASE("lindblad kraus expansion") {
    const auto sz_half = spin_operators(SpinManifold(1)).sz;

    SUBCASE("zero rate gives the identity channel") {
        const auto ch = lindblad_kraus({0.0, 1.0, 4}, sz_half);
        CHECK(ch.kraus().size() == 1);
        CHECK((ch.kraus()[0] - CMatrix::Identity(2, 2)).norm() < 1e-14);
    }

    SUBCASE("qubit coherence decays as e^{-kappa t / 2}") {
        // With S_z = -Z/2 the coherence rate is kappa (m0 m1 - (m0^2+m1^2)/2)
        // = -kappa/2, so <+x|E(rho)|+x> = (1 + e^{-kappa t/2})/2.
        const double kt = 0.1;
        const auto ch = lindblad_kraus({1.0, kt, 12}, sz_half);
        CVector plus(2);
        plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
        const CMatrix out = apply_channel(ch, (plus * plus.adjoint()).eval());
        const double f = (plus.adjoint() * out * plus)(0, 0).real();
        CHECK(f == doctest::Approx(0.5 * (1.0 + std::exp(-0.5 * kt))).epsilon(1e-10));
    }

    SUBCASE("completeness at kappa t = 0.2 for the spin-5/2 operator") {
        // The worst Poisson tail sits at m = 5/2 (x = kappa t m^2 = 1.25);
        // reaching 1e-10 needs l_max around 15, while l_max = 8 leaves a
        // defect near 7e-6.
        const auto sz = spin_operators(SpinManifold(5)).sz;
        const int order = suggested_kraus_order(0.2, sz);
        CHECK(order <= 16);
        const auto ch = lindblad_kraus({1.0, 0.2, order}, sz);
        CMatrix sum = CMatrix::Zero(6, 6);
        for (const auto& k : ch.kraus()) sum += k.adjoint() * k;
        CHECK((sum - CMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(ch.complete());
    }

    SUBCASE("too small truncation is rejected") {
        const auto sz = spin_operators(SpinManifold(5)).sz;
        CHECK_THROWS_AS(lindblad_kraus({1.0, 2.0, 1}, sz), truncation_too_small);
        CHECK_THROWS_AS(lindblad_kraus({1.0, 0.2, 8}, sz), truncation_too_small);
    }

    SUBCASE("populations in the m basis are exactly preserved") {
        const auto sz = spin_operators(SpinManifold(5)).sz;
        std::mt19937_64 rng(29);
        const CMatrix rho = oracle::random_density(6, rng);
        const auto ch = lindblad_kraus({1.0, 0.3, suggested_kraus_order(0.3, sz)}, sz);
        const CMatrix out = apply_channel(ch, rho);
        for (Eigen::Index i = 0; i < 6; ++i)
            CHECK(std::abs(out(i, i).real() - rho(i, i).real()) < 1e-10);
    }
}

TEST_CASE("lindblad right-hand side") {
    const auto sz = spin_operators(SpinManifold(5)).sz;
    std::mt19937_64 rng(31);

    SUBCASE("diagonal states are fixed points") {
        CMatrix rho = CMatrix::Zero(6, 6);
        for (Eigen::Index i = 0; i < 6; ++i) rho(i, i) = (i + 1) / 21.0;
        CHECK(lindblad_rhs(rho, 0.7, sz).cwiseAbs().maxCoeff() < 1e-14);
    }

    SUBCASE("trace of the generator vanishes") {
        const CMatrix rho = oracle::random_density(6, rng);
        CHECK(std::abs(lindblad_rhs(rho, 0.7, sz).trace()) < 1e-12);
    }

    SUBCASE("integrated equation matches the Kraus channel") {
        const double kappa = 1.0, t = 0.1;
        const CMatrix rho = oracle::random_density(6, rng);
        const CMatrix direct = oracle::rk4(
            rho, t, 2000, [&](const CMatrix& r) { return lindblad_rhs(r, kappa, sz); });
        const auto ch = lindblad_kraus({kappa, t, 12}, sz);
        CHECK(trace_distance(direct, apply_channel(ch, rho)) < 1e-6);
    }
}

TEST_CASE("coherent rotation and its Gaussian average") {
    const auto sz = spin_operators(SpinManifold(5)).sz;

    SUBCASE("zero angle is the identity") {
        CHECK((coherent_rotation(0.0, sz) - CMatrix::Identity(6, 6)).norm() < 1e-14);
    }

    SUBCASE("first-order action creates the error word") {
        const CodeSpec code = build_code(2.5, 0.0);
        const double theta = 1e-5;
        const CVector psi = coherent_rotation(theta, sz) * code.zero_l;
        const cxd overlap = (code.zero_e.adjoint() * psi)(0, 0);
        // U|psi_L> = |psi_L> + i theta (sqrt(3)/2)|psi_E> + O(theta^2)
        CHECK(overlap.imag() == doctest::Approx(theta * std::sqrt(3.0) / 2).epsilon(1e-4));
        const cxd back = (code.zero_l.adjoint() * psi)(0, 0);
        CHECK(back.real() == doctest::Approx(1.0 - 3.0 / 8.0 * theta * theta).epsilon(1e-6));
    }

    SUBCASE("averaged channel: identity at sigma 0, coherence factor on the qubit span") {
        const auto id = averaged_rotation_channel(0.0, sz);
        CHECK(id.kraus().size() == 1);

        const double sigma = 0.8;
        const auto ch = averaged_rotation_channel(sigma, sz, 41);
        CHECK(ch.complete());

        const SpinManifold m(5);
        CVector plus = CVector::Zero(6);
        plus(m.level_of_twice_m(-1)) = 1.0 / std::sqrt(2.0);
        plus(m.level_of_twice_m(1)) = 1.0 / std::sqrt(2.0);
        const CMatrix out = apply_channel(ch, (plus * plus.adjoint()).eval());
        const double coh = 2.0 * std::abs(out(m.level_of_twice_m(-1), m.level_of_twice_m(1)));
        CHECK(coh == doctest::Approx(std::exp(-0.5 * sigma * sigma)).epsilon(1e-8));
    }

    SUBCASE("quadrature matches a Monte-Carlo average within 3 standard errors") {
        const double sigma = 0.5;
        const auto ch = averaged_rotation_channel(sigma, sz, 41);
        std::mt19937_64 rng(37);
        const CVector psi = oracle::random_state(6, rng);
        const CMatrix rho = psi * psi.adjoint();
        const CMatrix quad = apply_channel(ch, rho);

        std::normal_distribution<double> gauss(0.0, sigma);
        const int n = 100000;
        CMatrix mc = CMatrix::Zero(6, 6);
        std::vector<double> f_samples;
        f_samples.reserve(n);
        for (int s = 0; s < n; ++s) {
            const double theta = gauss(rng);
            CVector rotated = psi;
            for (Eigen::Index i = 0; i < 6; ++i)
                rotated(i) = psi(i) * std::exp(cxd(0, -theta * sz(i, i).real()));
            mc += (rotated * rotated.adjoint()).eval();
            f_samples.push_back(std::norm((psi.adjoint() * rotated)(0, 0)));
        }
        mc /= n;
        double mean = 0, var = 0;
        for (double f : f_samples) mean += f;
        mean /= n;
        for (double f : f_samples) var += (f - mean) * (f - mean);
        var /= n - 1;
        const double se = std::sqrt(var / n);
        const double f_quad = (psi.adjoint() * quad * psi)(0, 0).real();
        CHECK(std::abs(f_quad - mean) < 3.0 * se);
        CHECK(trace_distance(quad, mc) < 0.01);
    }

    SUBCASE("quadrature order below 21 is rejected") {
        CHECK_THROWS_AS(averaged_rotation_channel(0.5, sz, 11), std::invalid_argument);
    }
}

TEST_CASE("gauss-hermite rule integrates low moments exactly") {
    const auto rule = gauss_hermite(41);
    double w = 0, x2 = 0, x4 = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        w += rule.weights[i];
        x2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
        x4 += rule.weights[i] * std::pow(rule.nodes[i], 4);
    }
    const double sqrt_pi = std::sqrt(constants::pi);
    CHECK(w == doctest::Approx(sqrt_pi).epsilon(1e-12));
    CHECK(x2 == doctest::Approx(0.5 * sqrt_pi).epsilon(1e-12));
    CHECK(x4 == doctest::Approx(0.75 * sqrt_pi).epsilon(1e-12));
}

TEST_CASE("noise trajectories") {
    NoiseSchedule schedule;
    schedule.sigma_b_tesla = 16e-9;
    schedule.update_interval_s = 0.1;
    schedule.duration_s = 0.35;

    SUBCASE("zero field gives a zero trajectory") {
        NoiseSchedule quiet = schedule;
        quiet.sigma_b_tesla = 0.0;
        const auto traj = sample_trajectory(quiet, 5);
        for (const auto& seg : traj.segments) CHECK(seg.detuning == 0.0);
    }

    SUBCASE("segment count and total duration") {
        const auto traj = sample_trajectory(schedule, 5);
        CHECK(traj.segments.size() == 4); // ceil(0.35 / 0.1)
        CHECK(traj.total_duration() == doctest::Approx(0.35).epsilon(1e-12));
    }

    SUBCASE("reproducible for a fixed seed") {
        const auto a = sample_trajectory(schedule, 42);
        const auto b = sample_trajectory(schedule, 42);
        REQUIRE(a.segments.size() == b.segments.size());
        for (std::size_t i = 0; i < a.segments.size(); ++i)
            CHECK(a.segments[i].detuning == b.segments[i].detuning);
        const auto c = sample_trajectory(schedule, 43);
        CHECK(a.segments[0].detuning != c.segments[0].detuning);
    }

    SUBCASE("sample variance approaches the field variance") {
        NoiseSchedule one = schedule;
        one.duration_s = 0.05;
        one.sensitivity = 1.0;
        double sum2 = 0;
        const int n = 10000;
        for (int k = 0; k < n; ++k) {
            const auto traj = sample_trajectory(one, 1000 + k);
            sum2 += traj.segments[0].detuning * traj.segments[0].detuning;
        }
        const double sigma2 = schedule.sigma_b_tesla * schedule.sigma_b_tesla;
        CHECK(sum2 / n == doctest::Approx(sigma2).epsilon(0.05));
    }

    SUBCASE("accumulated phase is detuning times time on a constant segment") {
        NoiseTrajectory traj;
        traj.segments = {{0.2, 100.0}, {0.2, -50.0}};
        CHECK(traj.accumulated_phase(0.1) == doctest::Approx(10.0));
        CHECK(traj.accumulated_phase(0.3) == doctest::Approx(20.0 - 5.0));
    }
}

TEST_CASE("field to detuning conversion") {
    CHECK(field_to_detuning(0.0, 1.0) == 0.0);
    // 16 nT at g = 6/5 lands near 2 pi x 269 Hz.
    const double w = field_to_detuning(16e-9, 1.0);
    CHECK(w / constants::two_pi == doctest::Approx(268.73).epsilon(1e-3));
    CHECK(field_to_detuning(32e-9, 1.0) == doctest::Approx(2.0 * w));
    CHECK(field_to_detuning(16e-9, 2.0) == doctest::Approx(2.0 * w));
}

TEST_CASE("thermal phonon state") {
    const FockSpace fock(6);
    SUBCASE("ground state at nbar = 0") {
        const auto rho = thermal_phonon_state(0.0, fock);
        CHECK(rho.mat(0, 0).real() == doctest::Approx(1.0));
    }
    SUBCASE("geometric weights at nbar = 0.02") {
        const auto rho = thermal_phonon_state(0.02, fock);
        CHECK(rho.mat(1, 1).real() == doctest::Approx(0.0192234).epsilon(1e-4));
        CHECK(std::abs(rho.mat.trace().real() - 1.0) < 1e-12);
    }
    SUBCASE("large occupation needs a larger truncation") {
        CHECK_THROWS_AS(thermal_phonon_state(5.0, fock), truncation_too_small);
    }
}
