#include "tlsph/diagnostics.hpp"

#include "parallel.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace tlsph {

namespace {

// Nodes and weights of the Gauss rule on [-1, 1]; boost stores only the non-negative half.
std::vector<std::pair<double, double>> gauss_rule() {
    using rule = boost::math::quadrature::gauss<double, kGaussPoints>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    std::vector<std::pair<double, double>> out;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k] == 0.0) {
            out.emplace_back(0.0, w[k]);
        } else {
            out.emplace_back(-x[k], w[k]);
            out.emplace_back(x[k], w[k]);
        }
    }
    return out;
}

}  // namespace

template <int Dim>
QuadratureGrid<Dim> QuadratureGrid<Dim>::box(const Vec<Dim>& lower, const Vec<Dim>& upper, int tiles_per_axis) {
    if (tiles_per_axis < 1) throw std::invalid_argument("quadrature needs at least one tile per axis");
    const auto rule = gauss_rule();
    const std::size_t per_axis = static_cast<std::size_t>(tiles_per_axis) * rule.size();

    // 1D nodes and weights along each axis.
    std::array<std::vector<double>, Dim> node, weight;
    for (int a = 0; a < Dim; ++a) {
        const double width = (upper[a] - lower[a]) / tiles_per_axis;
        if (!(width > 0.0)) throw std::invalid_argument("quadrature box must have positive extent");
        for (int t = 0; t < tiles_per_axis; ++t) {
            const double mid = lower[a] + (t + 0.5) * width;
            for (const auto& [x, w] : rule) {
                node[a].push_back(mid + 0.5 * width * x);
                weight[a].push_back(0.5 * width * w);
            }
        }
    }

    QuadratureGrid grid;
    grid.tiles = tiles_per_axis;
    std::size_t total = 1;
    for (int a = 0; a < Dim; ++a) total *= per_axis;
    grid.points.reserve(total);
    grid.weights.reserve(total);
    std::array<std::size_t, Dim> c{};
    for (std::size_t n = 0; n < total; ++n) {
        Vec<Dim> p;
        double w = 1.0;
        for (int a = 0; a < Dim; ++a) {
            p[a] = node[a][c[a]];
            w *= weight[a][c[a]];
        }
        grid.points.push_back(p);
        grid.weights.push_back(w);
        for (int a = 0; a < Dim; ++a) {
            if (++c[a] < per_axis) break;
            c[a] = 0;
        }
    }
    return grid;
}

template <int Dim>
double QuadratureGrid<Dim>::total_weight() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

template <int Dim>
Interpolator<Dim>::Interpolator(const ParticleDomain<Dim>& domain)
    : positions_(domain.ref_positions),
      volumes_(domain.volumes),
      kernel_(domain.smoothing_length),
      grid_(std::span<const Vec<Dim>>(positions_), domain.support_radius) {}

template <int Dim>
void Interpolator<Dim>::weights(const Vec<Dim>& X, std::vector<std::size_t>& indices, std::vector<double>& w) const {
    grid_.query(X, kernel_.support_radius(), indices);
    const auto coeff = first_order_coefficients<Dim>(X, positions_, volumes_, indices, kernel_, kNoParticle, false);
    w.resize(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const std::size_t j = indices[k];
        w[k] = volumes_[j] * coeff.corrected_value(kernel_, X, positions_[j]);
    }
}

namespace {

template <class T, class Zero>
T weighted_sum(const std::vector<std::size_t>& idx, const std::vector<double>& w, std::span<const T> field, Zero zero) {
    T acc = zero;
    for (std::size_t k = 0; k < idx.size(); ++k) acc += w[k] * field[idx[k]];
    return acc;
}

}  // namespace

template <int Dim>
double Interpolator<Dim>::interpolate_scalar(const Vec<Dim>& X, std::span<const double> field) const {
    std::vector<std::size_t> idx;
    std::vector<double> w;
    weights(X, idx, w);
    return weighted_sum<double>(idx, w, field, 0.0);
}

template <int Dim>
Vec<Dim> Interpolator<Dim>::interpolate_vector(const Vec<Dim>& X, std::span<const Vec<Dim>> field) const {
    std::vector<std::size_t> idx;
    std::vector<double> w;
    weights(X, idx, w);
    return weighted_sum<Vec<Dim>>(idx, w, field, Vec<Dim>::Zero().eval());
}

template <int Dim>
Mat<Dim> Interpolator<Dim>::interpolate_tensor(const Vec<Dim>& X, std::span<const Mat<Dim>> field) const {
    std::vector<std::size_t> idx;
    std::vector<double> w;
    weights(X, idx, w);
    return weighted_sum<Mat<Dim>>(idx, w, field, Mat<Dim>::Zero().eval());
}

SwingingPlate SwingingPlate::from_material(double amplitude, const NeoHookeanParams& material) {
    SwingingPlate s;
    s.amplitude = amplitude;
    s.omega = 0.5 * std::numbers::pi * std::sqrt(2.0 * material.shear_modulus / material.ref_density);
    return s;
}

Vec<2> SwingingPlate::displacement(const Vec<2>& X, double t) const {
    const double k = 0.5 * std::numbers::pi;
    const double a = amplitude * std::sin(omega * t);
    return {-a * std::sin(k * X[0]) * std::cos(k * X[1]), a * std::cos(k * X[0]) * std::sin(k * X[1])};
}

Vec<2> SwingingPlate::velocity(const Vec<2>& X, double t) const {
    const double k = 0.5 * std::numbers::pi;
    const double a = amplitude * omega * std::cos(omega * t);
    return {-a * std::sin(k * X[0]) * std::cos(k * X[1]), a * std::cos(k * X[0]) * std::sin(k * X[1])};
}

Mat<2> SwingingPlate::displacement_gradient(const Vec<2>& X, double t) const {
    const double k = 0.5 * std::numbers::pi;
    const double a = amplitude * std::sin(omega * t) * k;
    const double s1 = std::sin(k * X[0]), c1 = std::cos(k * X[0]);
    const double s2 = std::sin(k * X[1]), c2 = std::cos(k * X[1]);
    Mat<2> g;
    g << -a * c1 * c2, a * s1 * s2,
         -a * s1 * s2, a * c1 * c2;
    return g;
}

double SwingingPlate::quarter_period() const { return 0.5 * std::numbers::pi / omega; }

template <int Dim>
double l2_error(const DeformationState<Dim>& state, const ParticleDomain<Dim>& domain, const Interpolator<Dim>& interp,
                const QuadratureGrid<Dim>& quadrature, const VectorField<Dim>& exact_displacement) {
    std::vector<Vec<Dim>> u(domain.size());
    for (std::size_t i = 0; i < domain.size(); ++i) u[i] = state.positions[i] - domain.ref_positions[i];
    std::vector<double> local(quadrature.points.size());
    detail::parallel_for(quadrature.points.size(), [&](std::size_t q) {
        const Vec<Dim>& X = quadrature.points[q];
        const Vec<Dim> e = exact_displacement(X) - interp.interpolate_vector(X, std::span<const Vec<Dim>>(u));
        local[q] = quadrature.weights[q] * e.squaredNorm();
    });
    return std::sqrt(std::accumulate(local.begin(), local.end(), 0.0));
}

template <int Dim>
double h1_seminorm_error(const DeformationState<Dim>& state, const Interpolator<Dim>& interp,
                         const QuadratureGrid<Dim>& quadrature, const TensorField<Dim>& exact_gradient) {
    std::vector<Mat<Dim>> g(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) g[i] = state.Fc[i] - Mat<Dim>::Identity();
    std::vector<double> local(quadrature.points.size());
    detail::parallel_for(quadrature.points.size(), [&](std::size_t q) {
        const Vec<Dim>& X = quadrature.points[q];
        const Mat<Dim> e = exact_gradient(X) - interp.interpolate_tensor(X, std::span<const Mat<Dim>>(g));
        local[q] = quadrature.weights[q] * e.squaredNorm();
    });
    return std::sqrt(std::accumulate(local.begin(), local.end(), 0.0));
}

namespace {

template <int Dim>
Vec3 pad(const Vec<Dim>& v) {
    Vec3 out = Vec3::Zero();
    out.template head<Dim>() = v;
    return out;
}

}  // namespace

template <int Dim>
LedgerRow conservation_sample(const DeformationState<Dim>& state, const ParticleDomain<Dim>& domain,
                              const NeoHookeanParams& material, const Vec<Dim>& center) {
    LedgerRow row;
    row.time = state.time;
    row.min_jacobian = std::numeric_limits<double>::infinity();
    const double inv_rho = 1.0 / domain.ref_density;
    for (std::size_t i = 0; i < domain.size(); ++i) {
        const double V = domain.volumes[i];
        const Vec3 mv = pad<Dim>(V * state.momentum[i]);
        row.linear_momentum += mv;
        row.angular_momentum += pad<Dim>(state.positions[i] - center).cross(mv);
        row.kinetic += 0.5 * V * inv_rho * state.momentum[i].squaredNorm();
        const Mat3 F = pad_to_3d<Dim>(state.Fc[i]);
        row.strain += strain_energy_particle(F, material, V, i);
        row.model_strain += V * stress_energy_density(F, material, i);
        const Mat3 sigma = cauchy_from_piola(first_piola(F, material, i), F, i);
        row.max_von_mises = std::max(row.max_von_mises, von_mises(sigma));
        row.min_jacobian = std::min(row.min_jacobian, F.determinant());
    }
    row.total = row.kinetic + row.strain;
    return row;
}

template <int Dim>
std::vector<double> von_mises_field(const DeformationState<Dim>& state, const NeoHookeanParams& material) {
    std::vector<double> out(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        const Mat3 F = pad_to_3d<Dim>(state.Fc[i]);
        out[i] = von_mises(cauchy_from_piola(first_piola(F, material, i), F, i));
    }
    return out;
}

double fit_slope(std::span<const double> sizes, std::span<const double> values) {
    if (sizes.size() != values.size() || sizes.size() < 2) {
        throw std::invalid_argument("slope fit needs at least two matching samples");
    }
    const double n = static_cast<double>(sizes.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (!(sizes[k] > 0.0) || !(values[k] > 0.0)) throw std::invalid_argument("slope fit needs positive data");
        const double x = std::log(sizes[k]), y = std::log(values[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) throw std::invalid_argument("slope fit needs distinct sizes");
    return (n * sxy - sx * sy) / denom;
}

#define TLSPH_INSTANTIATE(D)                                                                                         \
    template struct QuadratureGrid<D>;                                                                               \
    template class Interpolator<D>;                                                                                  \
    template double l2_error<D>(const DeformationState<D>&, const ParticleDomain<D>&, const Interpolator<D>&,        \
                                const QuadratureGrid<D>&, const VectorField<D>&);                                    \
    template double h1_seminorm_error<D>(const DeformationState<D>&, const Interpolator<D>&, const QuadratureGrid<D>&, \
                                         const TensorField<D>&);                                                     \
    template LedgerRow conservation_sample<D>(const DeformationState<D>&, const ParticleDomain<D>&,                  \
                                              const NeoHookeanParams&, const Vec<D>&);                               \
    template std::vector<double> von_mises_field<D>(const DeformationState<D>&, const NeoHookeanParams&);

TLSPH_INSTANTIATE(1)
TLSPH_INSTANTIATE(2)
TLSPH_INSTANTIATE(3)

#undef TLSPH_INSTANTIATE

}  // namespace tlsph
