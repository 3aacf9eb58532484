/**
 * @file kernel.hpp
 * @brief Cubic B-spline kernel and the corrected kernels built on top of it.
 *
 * Conventions used throughout:
 *  - W_i(x_j) = W(|x_i - x_j|, h).
 *  - Gradients are taken with respect to the evaluation point x_i:
 *    grad W_i(x_j) = W'(r) (x_i - x_j) / r.
 *  - a (x) b = a b^T, so (x_j - x_i) (x) grad W_i(x_j) is a matrix whose
 *    (a, b) entry is (x_j - x_i)_a d_b W.
 *
 * All correction tables are evaluated once on the reference configuration.
 */

#pragma once

#include "tlsph/particle_domain.hpp"
#include "tlsph/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace tlsph {

/// Condition number above which a moment matrix is treated as singular.
inline constexpr double kMaxConditionNumber = 1e12;

/// M4 cubic B-spline with support radius 2h.
template <int Dim>
class CubicSpline {
public:
    explicit CubicSpline(double h);

    double smoothing_length() const noexcept { return h_; }
    double support_radius() const noexcept { return 2.0 * h_; }
    double normalization() const noexcept { return sigma_; }

    double value(double r) const;
    /// dW/dr
    double radial_derivative(double r) const;
    /// d^2W/dr^2
    double radial_second_derivative(double r) const;

    /// grad_{x_i} W(|x_i - x_j|); the zero vector when the points coincide.
    Vec<Dim> gradient(const Vec<Dim>& xi, const Vec<Dim>& xj) const;

    /// W''(r) + (dim-1)/r W'(r), with the limit dim W''(0) at r = 0.
    double laplacian(const Vec<Dim>& xi, const Vec<Dim>& xj) const;

private:
    double h_;
    double sigma_;
};

template <int Dim>
double eval_kernel(double r, double h) {
    return CubicSpline<Dim>(h).value(r);
}

template <int Dim>
Vec<Dim> eval_kernel_gradient(const Vec<Dim>& xi, const Vec<Dim>& xj, double h) {
    return CubicSpline<Dim>(h).gradient(xi, xj);
}

template <int Dim>
double eval_radial_laplacian(const Vec<Dim>& xi, const Vec<Dim>& xj, double h) {
    return CubicSpline<Dim>(h).laplacian(xi, xj);
}

/**
 * Geometric moments and first-order correction coefficients at one evaluation point.
 *
 * With x_ij = x - x_j:
 *   phi   = sum V_j W,   phi_v = sum V_j x_ij W,   Phi = sum V_j x_ij x_ij^T W,
 *   beta  = -Phi^{-1} phi_v,   alpha = 1 / (phi - (Phi^{-1} phi_v) . phi_v).
 * The derivative members are only filled when requested.
 */
template <int Dim>
struct FirstOrderCoefficients {
    double zeroth_moment = 0.0;
    Vec<Dim> first_moment = Vec<Dim>::Zero();
    Mat<Dim> second_moment = Mat<Dim>::Zero();
    Mat<Dim> second_moment_inverse = Mat<Dim>::Zero();
    double condition = 1.0;

    double alpha = 0.0;
    Vec<Dim> beta = Vec<Dim>::Zero();

    Vec<Dim> grad_zeroth_moment = Vec<Dim>::Zero();
    Mat<Dim> grad_first_moment = Mat<Dim>::Zero();  ///< (a, k) = d phi_v[a] / d x_k
    std::array<Mat<Dim>, Dim> grad_second_moment{};   ///< [k] = d Phi / d x_k
    Vec<Dim> grad_alpha = Vec<Dim>::Zero();
    Mat<Dim> grad_beta = Mat<Dim>::Zero();  ///< (a, k) = d beta[a] / d x_k

    /// alpha (1 + beta . (x - x_j)) W(|x - x_j|)
    double corrected_value(const CubicSpline<Dim>& kernel, const Vec<Dim>& x, const Vec<Dim>& xj) const;
    /// Three-term product rule for grad of the corrected kernel.
    Vec<Dim> corrected_gradient(const CubicSpline<Dim>& kernel, const Vec<Dim>& x, const Vec<Dim>& xj) const;
};

/**
 * Solves the first-order correction at `x` over the sample points `samples`
 * (indices into `positions`/`volumes`). Throws SingularNeighborhoodError,
 * tagged with `label`, when Phi is singular or ill-conditioned.
 */
template <int Dim>
FirstOrderCoefficients<Dim> first_order_coefficients(const Vec<Dim>& x, std::span<const Vec<Dim>> positions,
                                                     std::span<const double> volumes,
                                                     std::span<const std::size_t> samples,
                                                     const CubicSpline<Dim>& kernel, std::size_t label,
                                                     bool with_gradient);

/**
 * Per-particle correction coefficients and per-pair corrected kernel tables.
 * Pair arrays are aligned with NeighborTable::indices.
 */
template <int Dim>
struct CorrectionState {
    double smoothing_length = 0.0;

    // per particle
    std::vector<double> zeroth_moment;
    std::vector<Vec<Dim>> grad_zeroth_moment;
    std::vector<Vec<Dim>> gamma;
    std::vector<Mat<Dim>> gradient_correction;  ///< L_i
    std::vector<double> gradient_moment_condition;
    std::vector<Vec<Dim>> first_moment;
    std::vector<Mat<Dim>> second_moment;
    std::vector<double> second_moment_condition;
    std::vector<double> alpha;
    std::vector<Vec<Dim>> beta;
    std::vector<Vec<Dim>> grad_alpha;
    std::vector<Mat<Dim>> grad_beta;
    std::vector<double> laplacian_scale;  ///< a_i
    std::vector<double> laplacian_shift;  ///< b_i

    // per pair
    std::vector<double> kernel;                 ///< W
    std::vector<double> kernel0;                ///< zeroth-order corrected kernel
    std::vector<Vec<Dim>> grad_kernel0;         ///< its gradient
    std::vector<Vec<Dim>> corrected_grad0;      ///< L_i times the above
    std::vector<double> kernel1;                ///< first-order corrected kernel
    std::vector<Vec<Dim>> grad_kernel1;         ///< its gradient
    std::vector<double> corrected_laplacian;
};

/// Zeroth-order normalised kernel, its gradient and gamma = grad(phi) / phi.
template <int Dim>
void compute_zeroth_correction(const ParticleDomain<Dim>& domain, const NeighborTable<Dim>& table,
                               CorrectionState<Dim>& state);

/// L_i such that the corrected zeroth-order gradient meets both gradient completeness criteria.
template <int Dim>
void compute_gradient_correction(const ParticleDomain<Dim>& domain, const NeighborTable<Dim>& table,
                                 CorrectionState<Dim>& state);

/// alpha_i, beta_i and the first-order corrected kernel values.
template <int Dim>
void compute_first_order_correction(const ParticleDomain<Dim>& domain, const NeighborTable<Dim>& table,
                                    CorrectionState<Dim>& state);

/// Gradient of the first-order corrected kernel, through the full moment-derivative chain.
template <int Dim>
void compute_first_order_gradient(const ParticleDomain<Dim>& domain, const NeighborTable<Dim>& table,
                                  CorrectionState<Dim>& state);

/**
 * a_i (lap W_i(X_j) - b_i W0_i(X_j)) with (a_i, b_i) chosen so that the sum of
 * V_j times it is zero and the sum of V_j |X_j - X_i|^2 times it is 2 dim.
 * Requires the zeroth correction.
 */
template <int Dim>
void compute_corrected_laplacian(const ParticleDomain<Dim>& domain, const NeighborTable<Dim>& table,
                                 CorrectionState<Dim>& state);

/// Runs every correction stage in dependency order.
template <int Dim>
CorrectionState<Dim> build_corrections(const ParticleDomain<Dim>& domain, const NeighborTable<Dim>& table);

}  // namespace tlsph
