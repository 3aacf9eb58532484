/**
 * @file kinematics.hpp
 * @brief Deformation state, averaged and bond-based deformation gradients, 1D gradient estimators.
 */

#pragma once

#include "tlsph/kernel.hpp"
#include "tlsph/particle_domain.hpp"
#include "tlsph/types.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace tlsph {

/// Which corrected kernel / gradient pair is used for sums.
enum class KernelVariant {
    FirstOrder,            ///< first-order corrected kernel and its exact gradient
    ZerothOrderCorrected,  ///< zeroth-order kernel with L-corrected gradient
};

enum class BondVariant {
    Kinematic,  ///< rank-one pairwise stretch
    FullRank,   ///< F_i with its bond-direction column replaced by the pairwise stretch
};

/// Which deformation gradient feeds the constitutive law.
enum class GradientFormulation {
    ImprovedBond,  ///< kernel-weighted bond gradients including the self bond
    Standard,      ///< the averaged F evolved by its conservation law
};

std::string_view to_string(KernelVariant v);
std::string_view to_string(BondVariant v);
std::string_view to_string(GradientFormulation v);

template <int Dim>
struct DeformationState {
    std::vector<Vec<Dim>> momentum;  ///< per unit undeformed volume
    std::vector<Mat<Dim>> F;         ///< averaged deformation gradient
    std::vector<Mat<Dim>> Fc;        ///< gradient used for stress, refreshed by the solver
    std::vector<Vec<Dim>> positions;
    double time = 0.0;

    std::size_t size() const noexcept { return positions.size(); }

    /// x = X, p = 0, F = Fc = I, t = 0.
    static DeformationState undeformed(const ParticleDomain<Dim>& domain);
};

template <int Dim>
std::span<const double> kernel_weights(const CorrectionState<Dim>& c, KernelVariant v) {
    return v == KernelVariant::FirstOrder ? std::span<const double>(c.kernel1) : std::span<const double>(c.kernel0);
}

template <int Dim>
std::span<const Vec<Dim>> kernel_gradients(const CorrectionState<Dim>& c, KernelVariant v) {
    return v == KernelVariant::FirstOrder ? std::span<const Vec<Dim>>(c.grad_kernel1)
                                          : std::span<const Vec<Dim>>(c.corrected_grad0);
}

/// dF_i/dt = sum_j V_j / rho_j  p_j (x) grad W_i(X_j).
template <int Dim>
void deformation_gradient_rate(const DeformationState<Dim>& state, const ParticleDomain<Dim>& domain,
                               const NeighborTable<Dim>& table, const CorrectionState<Dim>& corrections,
                               KernelVariant variant, std::vector<Mat<Dim>>& rate);

/// (dx / r0) (x) e for a bond with reference length r0 and unit direction e.
template <int Dim>
Mat<Dim> bond_gradient_kinematic(const Vec<Dim>& current_bond, double r0, const Vec<Dim>& unit) {
    return (current_bond / r0) * unit.transpose();
}

/// F_i - (F_i e) (x) e + (dx / r0) (x) e.
template <int Dim>
Mat<Dim> bond_gradient_fullrank(const Mat<Dim>& Fi, const Vec<Dim>& current_bond, double r0, const Vec<Dim>& unit) {
    return Fi + (current_bond / r0 - Fi * unit) * unit.transpose();
}

/// Bond gradient for the neighbour stored at `slot` of particle i; the self slot returns F_i.
template <int Dim>
Mat<Dim> bond_deformation_gradient_kinematic(std::size_t i, std::size_t slot, const DeformationState<Dim>& state,
                                             const NeighborTable<Dim>& table);

template <int Dim>
Mat<Dim> bond_deformation_gradient_fullrank(std::size_t i, std::size_t slot, const DeformationState<Dim>& state,
                                            const NeighborTable<Dim>& table);

/// F^c_i = sum_j V_j w_i(X_j) F_ij with the self bond weighted by w_i(X_i).
template <int Dim>
void corrected_deformation_gradient(const DeformationState<Dim>& state, const ParticleDomain<Dim>& domain,
                                    const NeighborTable<Dim>& table, const CorrectionState<Dim>& corrections,
                                    KernelVariant kernel, BondVariant bond, std::vector<Mat<Dim>>& out);

// 1D estimators of dx/dX from sampled values x_j = samples[j].

/// sum_j V_j (x_j - x_i) grad W_i(X_j).
std::vector<double> gradient_1d_standard(std::span<const double> samples, const ParticleDomain<1>& domain,
                                         const NeighborTable<1>& table, const CorrectionState<1>& corrections,
                                         KernelVariant variant = KernelVariant::FirstOrder);

/// sum_{j != i} V_j W0_i(X_j) (x_j - x_i) / (X_j - X_i); the self weight is left out of the sum.
std::vector<double> gradient_1d_bond_naive(std::span<const double> samples, const ParticleDomain<1>& domain,
                                           const NeighborTable<1>& table, const CorrectionState<1>& corrections);

/// Bond slopes plus a self bond carrying the standard estimate, weighted by the variant's kernel.
std::vector<double> gradient_1d_bond_improved(std::span<const double> samples, const ParticleDomain<1>& domain,
                                              const NeighborTable<1>& table, const CorrectionState<1>& corrections,
                                              KernelVariant variant);

}  // namespace tlsph
