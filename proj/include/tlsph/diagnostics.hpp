/**
 * @file diagnostics.hpp
 * @brief Quadrature, corrected interpolation, error norms, conservation ledger, slope fitting.
 */

#pragma once

#include "tlsph/kernel.hpp"
#include "tlsph/kinematics.hpp"
#include "tlsph/material.hpp"
#include "tlsph/particle_domain.hpp"
#include "tlsph/types.hpp"

#include <functional>
#include <span>
#include <vector>

namespace tlsph {

/// Gauss points per tile per axis.
inline constexpr int kGaussPoints = 5;

/// Tensor-product Gauss rule over a box split into equal tiles.
template <int Dim>
struct QuadratureGrid {
    std::vector<Vec<Dim>> points;
    std::vector<double> weights;
    int tiles = 0;

    static QuadratureGrid box(const Vec<Dim>& lower, const Vec<Dim>& upper, int tiles_per_axis);
    double total_weight() const;
};

/**
 * First-order corrected SPH interpolation at arbitrary points of the reference
 * configuration; alpha and beta are solved at each evaluation point, so affine
 * fields are reproduced exactly.
 */
template <int Dim>
class Interpolator {
public:
    explicit Interpolator(const ParticleDomain<Dim>& domain);
    // The cell grid views positions_, so the object must stay put.
    Interpolator(const Interpolator&) = delete;
    Interpolator& operator=(const Interpolator&) = delete;

    /// Indices and V_j * corrected kernel weights at X.
    void weights(const Vec<Dim>& X, std::vector<std::size_t>& indices, std::vector<double>& w) const;

    double interpolate_scalar(const Vec<Dim>& X, std::span<const double> field) const;
    Vec<Dim> interpolate_vector(const Vec<Dim>& X, std::span<const Vec<Dim>> field) const;
    Mat<Dim> interpolate_tensor(const Vec<Dim>& X, std::span<const Mat<Dim>> field) const;

private:
    std::vector<Vec<Dim>> positions_;
    std::vector<double> volumes_;
    CubicSpline<Dim> kernel_;
    CellGrid<Dim> grid_;
};

/// Swinging plate mode on [0, 2]^2: u = U sin(wt) (-sin(pi X/2) cos(pi Y/2), cos(pi X/2) sin(pi Y/2)).
struct SwingingPlate {
    double amplitude = 0.01;
    double omega = 0.0;

    /// omega = (pi/2) sqrt(2 mu / rho)
    static SwingingPlate from_material(double amplitude, const NeoHookeanParams& material);

    Vec<2> displacement(const Vec<2>& X, double t) const;
    Vec<2> velocity(const Vec<2>& X, double t) const;
    /// (a, b) = du_a / dX_b
    Mat<2> displacement_gradient(const Vec<2>& X, double t) const;
    double quarter_period() const;
};

template <int Dim>
using VectorField = std::function<Vec<Dim>(const Vec<Dim>&)>;
template <int Dim>
using TensorField = std::function<Mat<Dim>(const Vec<Dim>&)>;

/// sqrt(sum_q w_q |u(X_q) - u_h(X_q)|^2) with u_h interpolated from x - X.
template <int Dim>
double l2_error(const DeformationState<Dim>& state, const ParticleDomain<Dim>& domain, const Interpolator<Dim>& interp,
                const QuadratureGrid<Dim>& quadrature, const VectorField<Dim>& exact_displacement);

/// Same with gradients; the discrete gradient is interpolated from Fc - I.
template <int Dim>
double h1_seminorm_error(const DeformationState<Dim>& state, const Interpolator<Dim>& interp,
                         const QuadratureGrid<Dim>& quadrature, const TensorField<Dim>& exact_gradient);

struct LedgerRow {
    double time = 0.0;
    Vec3 linear_momentum = Vec3::Zero();
    Vec3 angular_momentum = Vec3::Zero();
    double kinetic = 0.0;
    double strain = 0.0;        ///< mu/2 (I1 - 3 - 2 ln J) + lambda/2 (J - 1)^2, summed with volumes
    double total = 0.0;         ///< kinetic + strain
    double model_strain = 0.0;  ///< energy of the split law that generates the stress
    double max_von_mises = 0.0;
    double min_jacobian = 0.0;
};

/// Ledger row from state.Fc; angular momentum is taken about `center`.
template <int Dim>
LedgerRow conservation_sample(const DeformationState<Dim>& state, const ParticleDomain<Dim>& domain,
                              const NeoHookeanParams& material, const Vec<Dim>& center);

/// Per-particle von Mises stress of the symmetrised Cauchy stress from Fc.
template <int Dim>
std::vector<double> von_mises_field(const DeformationState<Dim>& state, const NeoHookeanParams& material);

/// Least-squares slope of log(value) against log(size).
double fit_slope(std::span<const double> sizes, std::span<const double> values);

}  // namespace tlsph
