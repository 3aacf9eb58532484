/**
 * @file material.hpp
 * @brief Nearly incompressible Neo-Hookean response, stress measures and energy densities.
 *
 * Everything operates on 3x3 deformation gradients. Plane-strain 2D states
 * are padded with F33 = 1 through `pad_to_3d`.
 */

#pragma once

#include "tlsph/types.hpp"

#include <cstddef>
#include <limits>

namespace tlsph {

inline constexpr std::size_t kNoParticle = std::numeric_limits<std::size_t>::max();

struct NeoHookeanParams {
    double youngs_modulus = 0.0;
    double poisson_ratio = 0.0;
    double ref_density = 0.0;
    double shear_modulus = 0.0;
    double bulk_modulus = 0.0;  ///< lambda + 2 mu / 3
    double lame_lambda = 0.0;
    double pwave_speed = 0.0;   ///< sqrt((lambda + 2 mu) / rho)

    /// Derives the remaining constants. Throws std::invalid_argument unless
    /// E > 0, 0 <= nu < 0.5 and rho > 0.
    static NeoHookeanParams from_engineering(double youngs_modulus, double poisson_ratio, double ref_density);
};

/// Embeds a dim x dim deformation gradient in 3x3, padding with the identity.
template <int Dim>
Mat3 pad_to_3d(const Mat<Dim>& F) {
    Mat3 out = Mat3::Identity();
    out.template topLeftCorner<Dim, Dim>() = F;
    return out;
}

/**
 * P = p J F^{-T} + mu J^{-2/3} (F - (F:F)/3 F^{-T}) with p = kappa (J - 1).
 * Throws InversionError (tagged with `particle`) when det F <= 0.
 */
Mat3 first_piola(const Mat3& F, const NeoHookeanParams& params, std::size_t particle = kNoParticle);

/// mu/2 (J^{-2/3} F:F - 3) + kappa/2 (J - 1)^2, the potential whose F-derivative is `first_piola`.
double stress_energy_density(const Mat3& F, const NeoHookeanParams& params, std::size_t particle = kNoParticle);

/**
 * sigma = P F^T / J, symmetrised. If `asymmetry` is given it receives
 * |sigma - sigma^T| / |sigma| before symmetrisation (0 for a zero stress).
 */
Mat3 cauchy_from_piola(const Mat3& P, const Mat3& F, std::size_t particle = kNoParticle,
                       double* asymmetry = nullptr);

double von_mises(const Mat3& sigma);

/// mu/2 (I1 - 3 - 2 ln J) + lambda/2 (J - 1)^2 per unit undeformed volume.
double strain_energy_density(const Mat3& F, const NeoHookeanParams& params, std::size_t particle = kNoParticle);

inline double strain_energy_particle(const Mat3& F, const NeoHookeanParams& params, double ref_volume,
                                     std::size_t particle = kNoParticle) {
    return strain_energy_density(F, params, particle) * ref_volume;
}

}  // namespace tlsph
