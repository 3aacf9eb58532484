#include "tlsph/kinematics.hpp"

#include "parallel.hpp"

namespace tlsph {

std::string_view to_string(KernelVariant v) {
    return v == KernelVariant::FirstOrder ? "first_order" : "zeroth_order";
}

std::string_view to_string(BondVariant v) {
    return v == BondVariant::FullRank ? "fullrank" : "kinematic";
}

std::string_view to_string(GradientFormulation v) {
    return v == GradientFormulation::ImprovedBond ? "improved_bond" : "standard";
}

template <int Dim>
DeformationState<Dim> DeformationState<Dim>::undeformed(const ParticleDomain<Dim>& domain) {
    DeformationState s;
    s.positions = domain.ref_positions;
    s.momentum.assign(domain.size(), Vec<Dim>::Zero());
    s.F.assign(domain.size(), Mat<Dim>::Identity());
    s.Fc.assign(domain.size(), Mat<Dim>::Identity());
    return s;
}

template <int Dim>
void deformation_gradient_rate(const DeformationState<Dim>& state, const ParticleDomain<Dim>& domain,
                               const NeighborTable<Dim>& table, const CorrectionState<Dim>& corrections,
                               KernelVariant variant, std::vector<Mat<Dim>>& rate) {
    const auto grad = kernel_gradients(corrections, variant);
    const double inv_rho = 1.0 / domain.ref_density;
    rate.resize(domain.size());
    detail::parallel_for(domain.size(), [&](std::size_t i) {
        Mat<Dim> acc = Mat<Dim>::Zero();
        for (std::size_t k = table.begin(i); k < table.end(i); ++k) {
            const std::size_t j = table.indices[k];
            acc += (domain.volumes[j] * inv_rho) * state.momentum[j] * grad[k].transpose();
        }
        rate[i] = acc;
    });
}

template <int Dim>
Mat<Dim> bond_deformation_gradient_kinematic(std::size_t i, std::size_t slot, const DeformationState<Dim>& state,
                                             const NeighborTable<Dim>& table) {
    const std::size_t j = table.indices[slot];
    if (j == i) return state.F[i];
    const double r0 = table.ref_distance[slot];
    if (!(r0 > 0.0)) throw CorruptNeighborTableError("zero reference distance between distinct particles");
    return bond_gradient_kinematic<Dim>(state.positions[j] - state.positions[i], r0, table.unit_bond[slot]);
}

template <int Dim>
Mat<Dim> bond_deformation_gradient_fullrank(std::size_t i, std::size_t slot, const DeformationState<Dim>& state,
                                            const NeighborTable<Dim>& table) {
    const std::size_t j = table.indices[slot];
    if (j == i) return state.F[i];
    const double r0 = table.ref_distance[slot];
    if (!(r0 > 0.0)) throw CorruptNeighborTableError("zero reference distance between distinct particles");
    return bond_gradient_fullrank<Dim>(state.F[i], state.positions[j] - state.positions[i], r0,
                                       table.unit_bond[slot]);
}

template <int Dim>
void corrected_deformation_gradient(const DeformationState<Dim>& state, const ParticleDomain<Dim>& domain,
                                    const NeighborTable<Dim>& table, const CorrectionState<Dim>& corrections,
                                    KernelVariant kernel, BondVariant bond, std::vector<Mat<Dim>>& out) {
    const auto weight = kernel_weights(corrections, kernel);
    out.resize(domain.size());
    detail::parallel_for(domain.size(), [&](std::size_t i) {
        const Mat<Dim>& Fi = state.F[i];
        const Vec<Dim>& xi = state.positions[i];
        Mat<Dim> acc = Mat<Dim>::Zero();
        for (std::size_t k = table.begin(i); k < table.end(i); ++k) {
            const std::size_t j = table.indices[k];
            const double vw = domain.volumes[j] * weight[k];
            if (j == i) {
                acc += vw * Fi;
                continue;
            }
            const Vec<Dim> dx = state.positions[j] - xi;
            const double r0 = table.ref_distance[k];
            const Vec<Dim>& e = table.unit_bond[k];
            if (bond == BondVariant::FullRank) {
                acc += vw * bond_gradient_fullrank<Dim>(Fi, dx, r0, e);
            } else {
                acc += vw * bond_gradient_kinematic<Dim>(dx, r0, e);
            }
        }
        out[i] = acc;
    });
}

std::vector<double> gradient_1d_standard(std::span<const double> samples, const ParticleDomain<1>& domain,
                                         const NeighborTable<1>& table, const CorrectionState<1>& corrections,
                                         KernelVariant variant) {
    const auto grad = kernel_gradients(corrections, variant);
    std::vector<double> out(domain.size(), 0.0);
    for (std::size_t i = 0; i < domain.size(); ++i) {
        double acc = 0.0;
        for (std::size_t k = table.begin(i); k < table.end(i); ++k) {
            const std::size_t j = table.indices[k];
            acc += domain.volumes[j] * (samples[j] - samples[i]) * grad[k][0];
        }
        out[i] = acc;
    }
    return out;
}

namespace {

double slope(std::span<const double> samples, const ParticleDomain<1>& domain, std::size_t i, std::size_t j) {
    return (samples[j] - samples[i]) / (domain.ref_positions[j][0] - domain.ref_positions[i][0]);
}

}  // namespace

std::vector<double> gradient_1d_bond_naive(std::span<const double> samples, const ParticleDomain<1>& domain,
                                           const NeighborTable<1>& table, const CorrectionState<1>& corrections) {
    std::vector<double> out(domain.size(), 0.0);
    for (std::size_t i = 0; i < domain.size(); ++i) {
        double acc = 0.0;
        for (std::size_t k = table.begin(i); k < table.end(i); ++k) {
            const std::size_t j = table.indices[k];
            if (j == i) continue;
            acc += domain.volumes[j] * corrections.kernel0[k] * slope(samples, domain, i, j);
        }
        out[i] = acc;
    }
    return out;
}

std::vector<double> gradient_1d_bond_improved(std::span<const double> samples, const ParticleDomain<1>& domain,
                                              const NeighborTable<1>& table, const CorrectionState<1>& corrections,
                                              KernelVariant variant) {
    const auto standard = gradient_1d_standard(samples, domain, table, corrections, variant);
    const auto weight = kernel_weights(corrections, variant);
    std::vector<double> out(domain.size(), 0.0);
    for (std::size_t i = 0; i < domain.size(); ++i) {
        double acc = 0.0;
        for (std::size_t k = table.begin(i); k < table.end(i); ++k) {
            const std::size_t j = table.indices[k];
            const double s = (j == i) ? standard[i] : slope(samples, domain, i, j);
            acc += domain.volumes[j] * weight[k] * s;
        }
        out[i] = acc;
    }
    return out;
}

#define TLSPH_INSTANTIATE(D)                                                                                    \
    template struct DeformationState<D>;                                                                        \
    template void deformation_gradient_rate<D>(const DeformationState<D>&, const ParticleDomain<D>&,            \
                                               const NeighborTable<D>&, const CorrectionState<D>&,              \
                                               KernelVariant, std::vector<Mat<D>>&);                            \
    template Mat<D> bond_deformation_gradient_kinematic<D>(std::size_t, std::size_t, const DeformationState<D>&, \
                                                           const NeighborTable<D>&);                            \
    template Mat<D> bond_deformation_gradient_fullrank<D>(std::size_t, std::size_t, const DeformationState<D>&,  \
                                                          const NeighborTable<D>&);                             \
    template void corrected_deformation_gradient<D>(const DeformationState<D>&, const ParticleDomain<D>&,       \
                                                    const NeighborTable<D>&, const CorrectionState<D>&,         \
                                                    KernelVariant, BondVariant, std::vector<Mat<D>>&);

TLSPH_INSTANTIATE(1)
TLSPH_INSTANTIATE(2)
TLSPH_INSTANTIATE(3)

#undef TLSPH_INSTANTIATE

}  // namespace tlsph
