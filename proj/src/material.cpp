#include "tlsph/material.hpp"

#include <cmath>
#include <stdexcept>

namespace tlsph {

NeoHookeanParams NeoHookeanParams::from_engineering(double youngs_modulus, double poisson_ratio,
                                                    double ref_density) {
    if (!(youngs_modulus > 0.0)) throw std::invalid_argument("Young's modulus must be positive");
    if (!(poisson_ratio >= 0.0 && poisson_ratio < 0.5)) {
        throw std::invalid_argument("Poisson ratio must lie in [0, 0.5)");
    }
    if (!(ref_density > 0.0)) throw std::invalid_argument("density must be positive");

    NeoHookeanParams p;
    p.youngs_modulus = youngs_modulus;
    p.poisson_ratio = poisson_ratio;
    p.ref_density = ref_density;
    p.shear_modulus = youngs_modulus / (2.0 * (1.0 + poisson_ratio));
    p.lame_lambda = youngs_modulus * poisson_ratio / ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
    p.bulk_modulus = p.lame_lambda + 2.0 * p.shear_modulus / 3.0;
    p.pwave_speed = std::sqrt((p.lame_lambda + 2.0 * p.shear_modulus) / ref_density);
    return p;
}

namespace {

double checked_det(const Mat3& F, std::size_t particle) {
    const double J = F.determinant();
    if (!(J > 0.0)) throw InversionError(particle, J);
    return J;
}

}  // namespace

Mat3 first_piola(const Mat3& F, const NeoHookeanParams& params, std::size_t particle) {
    const double J = checked_det(F, particle);
    const Mat3 F_inv_T = F.inverse().transpose();
    const double pressure = params.bulk_modulus * (J - 1.0);
    const Mat3 P_vol = pressure * J * F_inv_T;
    const Mat3 P_dev = params.shear_modulus * std::pow(J, -2.0 / 3.0) * (F - F.squaredNorm() / 3.0 * F_inv_T);
    return P_vol + P_dev;
}

double stress_energy_density(const Mat3& F, const NeoHookeanParams& params, std::size_t particle) {
    const double J = checked_det(F, particle);
    return 0.5 * params.shear_modulus * (std::pow(J, -2.0 / 3.0) * F.squaredNorm() - 3.0) +
           0.5 * params.bulk_modulus * (J - 1.0) * (J - 1.0);
}

Mat3 cauchy_from_piola(const Mat3& P, const Mat3& F, std::size_t particle, double* asymmetry) {
    const double J = checked_det(F, particle);
    const Mat3 sigma = P * F.transpose() / J;
    if (asymmetry) {
        const double norm = sigma.norm();
        *asymmetry = norm > 0.0 ? (sigma - sigma.transpose()).norm() / norm : 0.0;
    }
    return 0.5 * (sigma + sigma.transpose());
}

double von_mises(const Mat3& sigma) {
    const Mat3 dev = sigma - sigma.trace() / 3.0 * Mat3::Identity();
    return std::sqrt(1.5 * dev.squaredNorm());
}

double strain_energy_density(const Mat3& F, const NeoHookeanParams& params, std::size_t particle) {
    const double J = checked_det(F, particle);
    const double I1 = (F.transpose() * F).trace();
    return 0.5 * params.shear_modulus * (I1 - 3.0 - 2.0 * std::log(J)) +
           0.5 * params.lame_lambda * (J - 1.0) * (J - 1.0);
}

}  // namespace tlsph
