#include "tlsph/particle_domain.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace tlsph {

template <int Dim>
void ParticleDomain<Dim>::set_density(double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("reference density must be positive");
    ref_density = rho;
    masses.resize(volumes.size());
    for (std::size_t i = 0; i < volumes.size(); ++i) masses[i] = rho * volumes[i];
}

template <int Dim>
void ParticleDomain<Dim>::set_smoothing_length(double h) {
    if (!(h > 0.0)) throw std::invalid_argument("smoothing length must be positive");
    smoothing_length = h;
    support_radius = kSupportFactor * h;
}

template <int Dim>
double ParticleDomain<Dim>::total_volume() const {
    return std::accumulate(volumes.begin(), volumes.end(), 0.0);
}

template <int Dim>
ParticleDomain<Dim> generate_lattice(const Vec<Dim>& origin, const Vec<Dim>& extents, double spacing,
                                     LatticePlacement placement) {
    if (!(spacing > 0.0)) throw std::invalid_argument("lattice spacing must be positive");

    std::array<std::size_t, Dim> cells{};
    for (int a = 0; a < Dim; ++a) {
        if (!(extents[a] > 0.0)) throw std::invalid_argument("lattice extents must be positive");
        const double ratio = extents[a] / spacing;
        const double rounded = std::round(ratio);
        if (rounded < 1.0 || std::abs(rounded * spacing - extents[a]) > 1e-9 * extents[a]) {
            throw std::invalid_argument("extent " + std::to_string(extents[a]) +
                                        " is not an integer multiple of spacing " +
                                        std::to_string(spacing));
        }
        cells[a] = static_cast<std::size_t>(rounded);
    }

    // Per-axis coordinates and 1D weights; the particle volume is their product.
    std::array<std::vector<double>, Dim> coord, weight;
    for (int a = 0; a < Dim; ++a) {
        const std::size_t n = cells[a];
        if (placement == LatticePlacement::CellCentered) {
            for (std::size_t k = 0; k < n; ++k) {
                coord[a].push_back(origin[a] + (static_cast<double>(k) + 0.5) * spacing);
                weight[a].push_back(spacing);
            }
        } else {
            for (std::size_t k = 0; k <= n; ++k) {
                coord[a].push_back(origin[a] + static_cast<double>(k) * spacing);
                weight[a].push_back((k == 0 || k == n) ? 0.5 * spacing : spacing);
            }
        }
    }

    ParticleDomain<Dim> domain;
    domain.spacing = spacing;
    domain.lower = origin;
    domain.upper = origin + extents;

    std::size_t total = 1;
    for (int a = 0; a < Dim; ++a) total *= coord[a].size();
    domain.ref_positions.reserve(total);
    domain.volumes.reserve(total);

    // Axis 0 varies fastest.
    std::array<std::size_t, Dim> idx{};
    for (std::size_t p = 0; p < total; ++p) {
        std::size_t rem = p;
        for (int a = 0; a < Dim; ++a) {
            idx[a] = rem % coord[a].size();
            rem /= coord[a].size();
        }
        Vec<Dim> x;
        double v = 1.0;
        for (int a = 0; a < Dim; ++a) {
            x[a] = coord[a][idx[a]];
            v *= weight[a][idx[a]];
        }
        domain.ref_positions.push_back(x);
        domain.volumes.push_back(v);
    }
    domain.masses.assign(total, 0.0);
    return domain;
}

template <int Dim>
void jitter_positions(ParticleDomain<Dim>& domain, double amount, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-amount, amount);
    for (auto& x : domain.ref_positions)
        for (int a = 0; a < Dim; ++a) x[a] += dist(rng);
}

template <int Dim>
CellGrid<Dim>::CellGrid(std::span<const Vec<Dim>> positions, double cell_size)
    : positions_(positions), cell_size_(cell_size) {
    if (!(cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
    Vec<Dim> lo = Vec<Dim>::Constant(0.0), hi = Vec<Dim>::Constant(0.0);
    if (!positions.empty()) {
        lo = hi = positions.front();
        for (const auto& x : positions) {
            lo = lo.cwiseMin(x);
            hi = hi.cwiseMax(x);
        }
    }
    origin_ = lo;
    std::size_t ncell = 1;
    for (int a = 0; a < Dim; ++a) {
        dims_[a] = static_cast<std::int64_t>(std::floor((hi[a] - lo[a]) / cell_size)) + 1;
        ncell *= static_cast<std::size_t>(dims_[a]);
    }

    // Counting sort of particles into cells.
    std::vector<std::size_t> cell_of_particle(positions.size());
    cell_start_.assign(ncell + 1, 0);
    for (std::size_t i = 0; i < positions.size(); ++i) {
        cell_of_particle[i] = flat(cell_of(positions[i]));
        ++cell_start_[cell_of_particle[i] + 1];
    }
    std::partial_sum(cell_start_.begin(), cell_start_.end(), cell_start_.begin());
    sorted_.resize(positions.size());
    std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < positions.size(); ++i) sorted_[fill[cell_of_particle[i]]++] = i;
}

template <int Dim>
std::array<std::int64_t, Dim> CellGrid<Dim>::cell_of(const Vec<Dim>& x) const {
    std::array<std::int64_t, Dim> c{};
    for (int a = 0; a < Dim; ++a) {
        auto k = static_cast<std::int64_t>(std::floor((x[a] - origin_[a]) / cell_size_));
        c[a] = std::clamp<std::int64_t>(k, 0, dims_[a] - 1);
    }
    return c;
}

template <int Dim>
std::size_t CellGrid<Dim>::flat(const std::array<std::int64_t, Dim>& c) const {
    std::size_t f = 0;
    for (int a = Dim - 1; a >= 0; --a) f = f * static_cast<std::size_t>(dims_[a]) + static_cast<std::size_t>(c[a]);
    return f;
}

template <int Dim>
void CellGrid<Dim>::query(const Vec<Dim>& point, double radius, std::vector<std::size_t>& out) const {
    out.clear();
    std::array<std::int64_t, Dim> lo{}, hi{};
    for (int a = 0; a < Dim; ++a) {
        lo[a] = static_cast<std::int64_t>(std::floor((point[a] - radius - origin_[a]) / cell_size_));
        hi[a] = static_cast<std::int64_t>(std::floor((point[a] + radius - origin_[a]) / cell_size_));
        lo[a] = std::max<std::int64_t>(lo[a], 0);
        hi[a] = std::min<std::int64_t>(hi[a], dims_[a] - 1);
        if (lo[a] > hi[a]) return;
    }
    const double r2 = radius * radius;
    std::array<std::int64_t, Dim> c = lo;
    while (true) {
        const std::size_t f = flat(c);
        for (std::size_t s = cell_start_[f]; s < cell_start_[f + 1]; ++s) {
            const std::size_t j = sorted_[s];
            if ((positions_[j] - point).squaredNorm() < r2) out.push_back(j);
        }
        int a = 0;
        for (; a < Dim; ++a) {
            if (++c[a] <= hi[a]) break;
            c[a] = lo[a];
        }
        if (a == Dim) break;
    }
    std::sort(out.begin(), out.end());
}

template <int Dim>
NeighborTable<Dim> build_neighbors(const ParticleDomain<Dim>& domain) {
    if (!(domain.support_radius > 0.0)) throw std::invalid_argument("support radius not set");
    const std::size_t n = domain.size();
    const std::span<const Vec<Dim>> pos(domain.ref_positions);
    CellGrid<Dim> grid(pos, domain.support_radius);

    NeighborTable<Dim> table;
    table.offsets.assign(1, 0);
    table.self_slot.resize(n);
    std::vector<std::size_t> found;
    for (std::size_t i = 0; i < n; ++i) {
        grid.query(pos[i], domain.support_radius, found);
        // The self entry is always kept, even if it would fail the strict test.
        if (!std::binary_search(found.begin(), found.end(), i)) {
            found.insert(std::upper_bound(found.begin(), found.end(), i), i);
        }
        for (std::size_t j : found) {
            if (j == i) {
                table.self_slot[i] = table.indices.size();
                table.ref_distance.push_back(0.0);
                table.unit_bond.push_back(Vec<Dim>::Zero());
            } else {
                const Vec<Dim> bond = pos[j] - pos[i];
                const double r = bond.norm();
                if (r == 0.0) {
                    throw CorruptNeighborTableError("particles " + std::to_string(i) + " and " +
                                                    std::to_string(j) + " coincide");
                }
                table.ref_distance.push_back(r);
                table.unit_bond.push_back(bond / r);
            }
            table.indices.push_back(j);
        }
        table.offsets.push_back(table.indices.size());
        if (found.size() == 1) table.isolated.push_back(i);
    }

    table.reverse.resize(table.indices.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = table.begin(i); k < table.end(i); ++k) {
            const std::size_t j = table.indices[k];
            const auto* first = table.indices.data() + table.begin(j);
            const auto* last = table.indices.data() + table.end(j);
            const auto* it = std::lower_bound(first, last, i);
            if (it == last || *it != i) {
                throw CorruptNeighborTableError("asymmetric neighbour pair (" + std::to_string(i) + ", " +
                                                std::to_string(j) + ")");
            }
            table.reverse[k] = static_cast<std::size_t>(it - table.indices.data());
        }
    }

    if (!table.isolated.empty()) {
        std::cerr << "warning: " << table.isolated.size()
                  << " particle(s) have no neighbours besides themselves\n";
    }
    return table;
}

#define TLSPH_INSTANTIATE(D)                                                                             \
    template struct ParticleDomain<D>;                                                                   \
    template ParticleDomain<D> generate_lattice<D>(const Vec<D>&, const Vec<D>&, double, LatticePlacement); \
    template void jitter_positions<D>(ParticleDomain<D>&, double, std::uint64_t);                       \
    template class CellGrid<D>;                                                                          \
    template NeighborTable<D> build_neighbors<D>(const ParticleDomain<D>&);

TLSPH_INSTANTIATE(1)
TLSPH_INSTANTIATE(2)
TLSPH_INSTANTIATE(3)

#undef TLSPH_INSTANTIATE

}  // namespace tlsph
