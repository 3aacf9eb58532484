// Small builders shared by the unit tests.

#pragma once

#include "tlsph/kernel.hpp"
#include "tlsph/material.hpp"
#include "tlsph/particle_domain.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace tlsph::test {

/// Lattice on [0, n d]^dim with h = beta d, optionally jittered by `jitter` d.
template <int Dim>
ParticleDomain<Dim> lattice(int n, double d, double beta = 0.9, double jitter = 0.0, std::uint64_t seed = 7,
                            LatticePlacement placement = LatticePlacement::CellCentered) {
    auto domain = generate_lattice<Dim>(Vec<Dim>::Zero(), Vec<Dim>::Constant(n * d), d, placement);
    if (jitter > 0.0) jitter_positions(domain, jitter * d, seed);
    domain.set_density(1100.0);
    domain.set_smoothing_length(beta * d);
    return domain;
}

inline NeoHookeanParams rubber(double nu = 0.45) { return NeoHookeanParams::from_engineering(17e6, nu, 1100.0); }

/// Relative difference with an absolute floor, for comparing values that may vanish.
inline double rel(double a, double b, double floor = 1.0) { return std::abs(a - b) / std::max(floor, std::abs(b)); }

/// Random 3x3 matrix near the identity with det > min_det.
inline Mat3 random_deformation(std::mt19937_64& rng, double spread = 0.4, double min_det = 0.2) {
    std::uniform_real_distribution<double> u(-spread, spread);
    for (;;) {
        Mat3 F = Mat3::Identity();
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) F(a, b) += u(rng);
        if (F.determinant() > min_det) return F;
    }
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    return q.normalized().toRotationMatrix();
}

}  // namespace tlsph::test
