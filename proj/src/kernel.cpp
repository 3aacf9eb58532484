#include "tlsph/kernel.hpp"

#include "parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tlsph {

namespace {

template <int Dim>
double spline_normalization(double h) {
    if constexpr (Dim == 1) {
        return 2.0 / (3.0 * h);
    } else if constexpr (Dim == 2) {
        return 10.0 / (7.0 * std::numbers::pi * h * h);
    } else {
        return 1.0 / (std::numbers::pi * h * h * h);
    }
}

/// Ratio of extreme eigenvalues of a symmetric matrix; infinity when not positive definite.
template <int Dim>
double symmetric_condition(const Mat<Dim>& m) {
    Eigen::SelfAdjointEigenSolver<Mat<Dim>> eig(m, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

template <int Dim>
double general_condition(const Mat<Dim>& m) {
    if constexpr (Dim == 1) {
        return m(0, 0) != 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    Eigen::JacobiSVD<Mat<Dim>> svd(m);
    const auto& s = svd.singularValues();
    const double lo = s.minCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return s.maxCoeff() / lo;
}

template <int Dim>
void require_isolated_free(const NeighborTable<Dim>& table) {
    if (!table.isolated.empty()) {
        throw SingularNeighborhoodError(table.isolated.front(), "particle has no neighbours");
    }
}

}  // namespace

template <int Dim>
CubicSpline<Dim>::CubicSpline(double h) : h_(h), sigma_(spline_normalization<Dim>(h)) {
    if (!(h > 0.0)) throw std::invalid_argument("smoothing length must be positive");
}

template <int Dim>
double CubicSpline<Dim>::value(double r) const {
    const double q = r / h_;
    if (q < 1.0) return sigma_ * (1.0 - 1.5 * q * q + 0.75 * q * q * q);
    if (q < 2.0) {
        const double t = 2.0 - q;
        return sigma_ * 0.25 * t * t * t;
    }
    return 0.0;
}

template <int Dim>
double CubicSpline<Dim>::radial_derivative(double r) const {
    const double q = r / h_;
    if (q < 1.0) return sigma_ / h_ * (-3.0 * q + 2.25 * q * q);
    if (q < 2.0) {
        const double t = 2.0 - q;
        return -sigma_ / h_ * 0.75 * t * t;
    }
    return 0.0;
}

template <int Dim>
double CubicSpline<Dim>::radial_second_derivative(double r) const {
    const double q = r / h_;
    if (q < 1.0) return sigma_ / (h_ * h_) * (-3.0 + 4.5 * q);
    if (q < 2.0) return sigma_ / (h_ * h_) * 1.5 * (2.0 - q);
    return 0.0;
}

template <int Dim>
Vec<Dim> CubicSpline<Dim>::gradient(const Vec<Dim>& xi, const Vec<Dim>& xj) const {
    const Vec<Dim> d = xi - xj;
    const double r = d.norm();
    if (r == 0.0) return Vec<Dim>::Zero();
    return radial_derivative(r) / r * d;
}

template <int Dim>
double CubicSpline<Dim>::laplacian(const Vec<Dim>& xi, const Vec<Dim>& xj) const {
    const double r = (xi - xj).norm();
    if (r == 0.0) return Dim * radial_second_derivative(0.0);
    return radial_second_derivative(r) + (Dim - 1) / r * radial_derivative(r);
}

template <int Dim>
double FirstOrderCoefficients<Dim>::corrected_value(const CubicSpline<Dim>& kernel, const Vec<Dim>& x,
                                                    const Vec<Dim>& xj) const {
    const Vec<Dim> xij = x - xj;
    return alpha * (1.0 + beta.dot(xij)) * kernel.value(xij.norm());
}

template <int Dim>
Vec<Dim> FirstOrderCoefficients<Dim>::corrected_gradient(const CubicSpline<Dim>& kernel, const Vec<Dim>& x,
                                                         const Vec<Dim>& xj) const {
    const Vec<Dim> xij = x - xj;
    const double w = kernel.value(xij.norm());
    const Vec<Dim> dw = kernel.gradient(x, xj);
    const double linear = 1.0 + beta.dot(xij);
    return alpha * linear * dw + linear * w * grad_alpha + alpha * w * (grad_beta.transpose() * xij + beta);
}

template <int Dim>
FirstOrderCoefficients<Dim> first_order_coefficients(const Vec<Dim>& x, std::span<const Vec<Dim>> positions,
                                                     std::span<const double> volumes,
                                                     std::span<const std::size_t> samples,
                                                     const CubicSpline<Dim>& kernel, std::size_t label,
                                                     bool with_gradient) {
    FirstOrderCoefficients<Dim> c;
    for (std::size_t j : samples) {
        const Vec<Dim> xij = x - positions[j];
        const double vw = volumes[j] * kernel.value(xij.norm());
        c.zeroth_moment += vw;
        c.first_moment += vw * xij;
        c.second_moment += vw * xij * xij.transpose();
    }

    c.condition = symmetric_condition<Dim>(c.second_moment);
    if (!(c.condition <= kMaxConditionNumber)) {
        throw SingularNeighborhoodError(label, "second moment matrix has condition number " +
                                                   std::to_string(c.condition));
    }
    const Mat<Dim>& Phi = c.second_moment;
    c.second_moment_inverse = Phi.inverse();
    const Mat<Dim>& Phi_inv = c.second_moment_inverse;
    const Vec<Dim> Phi_inv_phi = Phi_inv * c.first_moment;
    c.beta = -Phi_inv_phi;
    const double denom = c.zeroth_moment - Phi_inv_phi.dot(c.first_moment);
    if (!(denom > 0.0)) {
        throw SingularNeighborhoodError(label, "non-positive normalisation in first-order correction");
    }
    c.alpha = 1.0 / denom;

    if (!with_gradient) return c;

    for (auto& m : c.grad_second_moment) m.setZero();

    for (std::size_t j : samples) {
        const Vec<Dim> xij = x - positions[j];
        const double w = kernel.value(xij.norm());
        const Vec<Dim> dw = kernel.gradient(x, positions[j]);
        const double v = volumes[j];
        c.grad_zeroth_moment += v * dw;
        c.grad_first_moment += v * (xij * dw.transpose() + Mat<Dim>::Identity() * w);
        for (int k = 0; k < Dim; ++k) {
            const Vec<Dim> ek = Vec<Dim>::Unit(k);
            c.grad_second_moment[k] +=
                v * (xij * xij.transpose() * dw[k] + (xij * ek.transpose() + ek * xij.transpose()) * w);
        }
    }

    const double alpha2 = c.alpha * c.alpha;
    for (int k = 0; k < Dim; ++k) {
        const Vec<Dim> dphi_v = c.grad_first_moment.col(k);
        const Mat<Dim>& dPhi = c.grad_second_moment[k];
        const Vec<Dim> chain = Phi_inv * dPhi * Phi_inv_phi;
        c.grad_alpha[k] = -alpha2 * (c.grad_zeroth_moment[k] - Phi_inv_phi.dot(dphi_v) -
                                     (Phi_inv * dphi_v).dot(c.first_moment) + chain.dot(c.first_moment));
        c.grad_beta.col(k) = -Phi_inv * dphi_v + chain;
    }
    return c;
}

template <int Dim>
void compute_zeroth_correction(const ParticleDomain<Dim>& domain, const NeighborTable<Dim>& table,
                               CorrectionState<Dim>& state) {
    require_isolated_free(table);
    const CubicSpline<Dim> kernel(domain.smoothing_length);
    const std::size_t n = domain.size();
    const auto& X = domain.ref_positions;
    state.smoothing_length = domain.smoothing_length;
    state.zeroth_moment.assign(n, 0.0);
    state.grad_zeroth_moment.assign(n, Vec<Dim>::Zero());
    state.gamma.assign(n, Vec<Dim>::Zero());
    state.kernel.assign(table.pair_count(), 0.0);
    state.kernel0.assign(table.pair_count(), 0.0);
    state.grad_kernel0.assign(table.pair_count(), Vec<Dim>::Zero());

    detail::parallel_for(n, [&](std::size_t i) {
        double phi = 0.0;
        Vec<Dim> dphi = Vec<Dim>::Zero();
        for (std::size_t k = table.begin(i); k < table.end(i); ++k) {
            const std::size_t j = table.indices[k];
            const double w = kernel.value(table.ref_distance[k]);
            state.kernel[k] = w;
            phi += domain.volumes[j] * w;
            dphi += domain.volumes[j] * kernel.gradient(X[i], X[j]);
        }
        if (!(phi > 0.0)) throw SingularNeighborhoodError(i, "zero kernel sum");
        state.zeroth_moment[i] = phi;
        state.grad_zeroth_moment[i] = dphi;
        state.gamma[i] = dphi / phi;
        for (std::size_t k = table.begin(i); k < table.end(i); ++k) {
            const std::size_t j = table.indices[k];
            state.kernel0[k] = state.kernel[k] / phi;
            state.grad_kernel0[k] = (kernel.gradient(X[i], X[j]) - state.kernel[k] * state.gamma[i]) / phi;
        }
    });
}

template <int Dim>
void compute_gradient_correction(const ParticleDomain<Dim>& domain, const NeighborTable<Dim>& table,
                                 CorrectionState<Dim>& state) {
    if (state.grad_kernel0.size() != table.pair_count()) {
        throw std::logic_error("zeroth-order correction must be computed first");
    }
    const std::size_t n = domain.size();
    const auto& X = domain.ref_positions;
    state.gradient_correction.assign(n, Mat<Dim>::Identity());
    state.gradient_moment_condition.assign(n, 1.0);
    state.corrected_grad0.assign(table.pair_count(), Vec<Dim>::Zero());

    detail::parallel_for(n, [&](std::size_t i) {
        Mat<Dim> m = Mat<Dim>::Zero();
        for (std::size_t k = table.begin(i); k < table.end(i); ++k) {
            const std::size_t j = table.indices[k];
            m += domain.volumes[j] * (X[j] - X[i]) * state.grad_kernel0[k].transpose();
        }
        const double cond = general_condition<Dim>(m);
        state.gradient_moment_condition[i] = cond;
        if (!(cond <= kMaxConditionNumber)) {
            throw SingularNeighborhoodError(i, "gradient moment matrix has condition number " + std::to_string(cond));
        }
        // sum V (X_j - X_i) (L g)^T = M L^T, so L = M^{-T}.
        const Mat<Dim> L = m.inverse().transpose();
        state.gradient_correction[i] = L;
        for (std::size_t k = table.begin(i); k < table.end(i); ++k) state.corrected_grad0[k] = L * state.grad_kernel0[k];
    });
}

namespace {

template <int Dim>
void first_order_pass(const ParticleDomain<Dim>& domain, const NeighborTable<Dim>& table,
                      CorrectionState<Dim>& state, bool with_gradient) {
    require_isolated_free(table);
    const CubicSpline<Dim> kernel(domain.smoothing_length);
    const std::size_t n = domain.size();
    const std::span<const Vec<Dim>> X(domain.ref_positions);
    const std::span<const double> V(domain.volumes);
    state.smoothing_length = domain.smoothing_length;
    state.first_moment.resize(n);
    state.second_moment.resize(n);
    state.second_moment_condition.resize(n);
    state.alpha.resize(n);
    state.beta.resize(n);
    state.kernel1.resize(table.pair_count());
    if (with_gradient) {
        state.grad_alpha.resize(n);
        state.grad_beta.resize(n);
        state.grad_kernel1.resize(table.pair_count());
    }

    detail::parallel_for(n, [&](std::size_t i) {
        const auto c = first_order_coefficients<Dim>(X[i], X, V, table.of(i), kernel, i, with_gradient);
        state.first_moment[i] = c.first_moment;
        state.second_moment[i] = c.second_moment;
        state.second_moment_condition[i] = c.condition;
        state.alpha[i] = c.alpha;
        state.beta[i] = c.beta;
        for (std::size_t k = table.begin(i); k < table.end(i); ++k) {
            state.kernel1[k] = c.corrected_value(kernel, X[i], X[table.indices[k]]);
        }
        if (with_gradient) {
            state.grad_alpha[i] = c.grad_alpha;
            state.grad_beta[i] = c.grad_beta;
            for (std::size_t k = table.begin(i); k < table.end(i); ++k) {
                state.grad_kernel1[k] = c.corrected_gradient(kernel, X[i], X[table.indices[k]]);
            }
        }
    });
}

}  // namespace

template <int Dim>
void compute_first_order_correction(const ParticleDomain<Dim>& domain, const NeighborTable<Dim>& table,
                                    CorrectionState<Dim>& state) {
    first_order_pass(domain, table, state, false);
}

template <int Dim>
void compute_first_order_gradient(const ParticleDomain<Dim>& domain, const NeighborTable<Dim>& table,
                                  CorrectionState<Dim>& state) {
    first_order_pass(domain, table, state, true);
}

template <int Dim>
void compute_corrected_laplacian(const ParticleDomain<Dim>& domain, const NeighborTable<Dim>& table,
                                 CorrectionState<Dim>& state) {
    if (state.kernel0.size() != table.pair_count()) {
        throw std::logic_error("zeroth-order correction must be computed first");
    }
    const CubicSpline<Dim> kernel(domain.smoothing_length);
    const std::size_t n = domain.size();
    const auto& X = domain.ref_positions;
    state.laplacian_scale.assign(n, 0.0);
    state.laplacian_shift.assign(n, 0.0);
    state.corrected_laplacian.assign(table.pair_count(), 0.0);

    detail::parallel_for(n, [&](std::size_t i) {
        double lap_sum = 0.0, lap_r2 = 0.0, w0_r2 = 0.0;
        for (std::size_t k = table.begin(i); k < table.end(i); ++k) {
            const std::size_t j = table.indices[k];
            const double v = domain.volumes[j];
            const double lap = kernel.laplacian(X[i], X[j]);
            const double r2 = (X[j] - X[i]).squaredNorm();
            lap_sum += v * lap;
            lap_r2 += v * r2 * lap;
            w0_r2 += v * r2 * state.kernel0[k];
        }
        // Zero sum forces b = sum V lap W because the zeroth-order kernel sums to one.
        const double b = lap_sum;
        const double denom = lap_r2 - b * w0_r2;
        if (!(std::abs(denom) > 1e-12 * (std::abs(lap_r2) + std::abs(b * w0_r2)))) {
            throw SingularNeighborhoodError(i, "degenerate corrected Laplacian system");
        }
        const double a = 2.0 * Dim / denom;
        state.laplacian_scale[i] = a;
        state.laplacian_shift[i] = b;
        for (std::size_t k = table.begin(i); k < table.end(i); ++k) {
            const std::size_t j = table.indices[k];
            state.corrected_laplacian[k] = a * (kernel.laplacian(X[i], X[j]) - b * state.kernel0[k]);
        }
    });
}

template <int Dim>
CorrectionState<Dim> build_corrections(const ParticleDomain<Dim>& domain, const NeighborTable<Dim>& table) {
    CorrectionState<Dim> state;
    compute_zeroth_correction(domain, table, state);
    compute_gradient_correction(domain, table, state);
    compute_first_order_gradient(domain, table, state);
    compute_corrected_laplacian(domain, table, state);
    return state;
}

#define TLSPH_INSTANTIATE(D)                                                                                 \
    template class CubicSpline<D>;                                                                           \
    template struct FirstOrderCoefficients<D>;                                                               \
    template FirstOrderCoefficients<D> first_order_coefficients<D>(                                          \
        const Vec<D>&, std::span<const Vec<D>>, std::span<const double>, std::span<const std::size_t>,       \
        const CubicSpline<D>&, std::size_t, bool);                                                           \
    template void compute_zeroth_correction<D>(const ParticleDomain<D>&, const NeighborTable<D>&,            \
                                               CorrectionState<D>&);                                         \
    template void compute_gradient_correction<D>(const ParticleDomain<D>&, const NeighborTable<D>&,          \
                                                 CorrectionState<D>&);                                       \
    template void compute_first_order_correction<D>(const ParticleDomain<D>&, const NeighborTable<D>&,       \
                                                    CorrectionState<D>&);                                    \
    template void compute_first_order_gradient<D>(const ParticleDomain<D>&, const NeighborTable<D>&,         \
                                                  CorrectionState<D>&);                                      \
    template void compute_corrected_laplacian<D>(const ParticleDomain<D>&, const NeighborTable<D>&,          \
                                                 CorrectionState<D>&);                                       \
    template CorrectionState<D> build_corrections<D>(const ParticleDomain<D>&, const NeighborTable<D>&);

TLSPH_INSTANTIATE(1)
TLSPH_INSTANTIATE(2)
TLSPH_INSTANTIATE(3)

#undef TLSPH_INSTANTIATE

}  // namespace tlsph
