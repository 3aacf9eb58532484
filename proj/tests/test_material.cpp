#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace tlsph;

TEST_CASE("engineering constants") {
    const auto m = test::rubber();
    const double E = 17e6, nu = 0.45;
    const double mu = E / (2 * (1 + nu));
    const double lambda = E * nu / ((1 + nu) * (1 - 2 * nu));
    CHECK(m.shear_modulus == doctest::Approx(mu));
    CHECK(m.lame_lambda == doctest::Approx(lambda));
    CHECK(m.bulk_modulus == doctest::Approx(lambda + 2 * mu / 3));
    CHECK(m.pwave_speed == doctest::Approx(std::sqrt((lambda + 2 * mu) / 1100.0)));
    CHECK(m.pwave_speed == doctest::Approx(242.1).epsilon(1e-3));
    CHECK_THROWS_AS(NeoHookeanParams::from_engineering(17e6, 0.5, 1100), std::invalid_argument);
    CHECK_THROWS_AS(NeoHookeanParams::from_engineering(-1, 0.3, 1100), std::invalid_argument);
}

TEST_CASE("reference state is stress and energy free") {
    const auto m = test::rubber();
    CHECK(first_piola(Mat3::Identity(), m).norm() < 1e-6);
    CHECK(stress_energy_density(Mat3::Identity(), m) == doctest::Approx(0.0));
    CHECK(strain_energy_density(Mat3::Identity(), m) == doctest::Approx(0.0));
}

TEST_CASE("first Piola stress is the derivative of its energy") {
    const auto m = test::rubber(0.3);
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const Mat3 F = test::random_deformation(rng);
        const Mat3 P = first_piola(F, m);
        Mat3 fd;
        const double e = 1e-6;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                Mat3 Fp = F, Fm = F;
                Fp(a, b) += e;
                Fm(a, b) -= e;
                fd(a, b) = (stress_energy_density(Fp, m) - stress_energy_density(Fm, m)) / (2 * e);
            }
        }
        CHECK((P - fd).norm() <= 1e-4 * std::max(P.norm(), m.shear_modulus));
    }
}

TEST_CASE("stress and energies are objective") {
    const auto m = test::rubber();
    std::mt19937_64 rng(5);
    const Mat3 F = test::random_deformation(rng);
    const Mat3 P = first_piola(F, m);
    const double w = strain_energy_density(F, m), ws = stress_energy_density(F, m);
    const double vm = von_mises(cauchy_from_piola(P, F));
    for (int trial = 0; trial < 20; ++trial) {
        const Mat3 Q = test::random_rotation(rng);
        const Mat3 QF = Q * F;
        CHECK((first_piola(QF, m) - Q * P).norm() <= 1e-8 * P.norm());
        CHECK(test::rel(strain_energy_density(QF, m), w) < 1e-8);
        CHECK(test::rel(stress_energy_density(QF, m), ws) < 1e-8);
        CHECK(test::rel(von_mises(cauchy_from_piola(first_piola(QF, m), QF)), vm) < 1e-8);
    }
}

TEST_CASE("Cauchy stress is symmetric and von Mises matches principal stresses") {
    const auto m = test::rubber();
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const Mat3 F = test::random_deformation(rng);
        double asym = 1.0;
        const Mat3 s = cauchy_from_piola(first_piola(F, m), F, kNoParticle, &asym);
        CHECK(asym < 1e-12);
        CHECK((s - s.transpose()).norm() == 0.0);
        const Eigen::SelfAdjointEigenSolver<Mat3> eig(s);
        const auto l = eig.eigenvalues();
        const double expected =
            std::sqrt(0.5 * ((l[0] - l[1]) * (l[0] - l[1]) + (l[1] - l[2]) * (l[1] - l[2]) + (l[2] - l[0]) * (l[2] - l[0])));
        CHECK(von_mises(s) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("uniaxial stretch gives the closed-form energy") {
    const auto m = test::rubber();
    const double s = 1.3;
    Mat3 F = Mat3::Identity();
    F(0, 0) = s;
    const double I1 = s * s + 2.0;
    const double expected = 0.5 * m.shear_modulus * (I1 - 3.0 - 2.0 * std::log(s)) +
                            0.5 * m.lame_lambda * (s - 1.0) * (s - 1.0);
    CHECK(strain_energy_density(F, m) == doctest::Approx(expected));
    CHECK(strain_energy_particle(F, m, 0.25) == doctest::Approx(0.25 * expected));
}

TEST_CASE("inverted deformation raises with the particle index") {
    const auto m = test::rubber();
    Mat3 F = Mat3::Identity();
    F(2, 2) = -0.5;
    try {
        first_piola(F, m, 42);
        FAIL("expected an inversion error");
    } catch (const InversionError& e) {
        CHECK(e.particle() == 42);
        CHECK(e.determinant() == doctest::Approx(-0.5));
    }
    CHECK_THROWS_AS(strain_energy_density(F, m), InversionError);
}

TEST_CASE("plane strain padding") {
    Mat<2> F;
    F << 1.1, 0.2, -0.1, 0.9;
    const Mat3 P = pad_to_3d(F);
    CHECK(P(2, 2) == 1.0);
    CHECK(P(0, 2) == 0.0);
    CHECK(P.topLeftCorner<2, 2>() == F);
}
