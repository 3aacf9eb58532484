/**
 * @file particle_domain.hpp
 * @brief Rectilinear particle lattices and the reference-configuration neighbour table.
 *
 * The neighbour table is built once from the reference positions and never
 * rebuilt: all kernel sums in the total Lagrangian formulation run over it.
 */

#pragma once

#include "tlsph/types.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace tlsph {

/// Ratio between the support radius and the smoothing length of the cubic B-spline.
inline constexpr double kSupportFactor = 2.0;

enum class LatticePlacement {
    CellCentered,  ///< particles at cell centres, every volume d^dim
    Vertex,        ///< particles on grid vertices (faces included), trapezoidal volumes
};

template <int Dim>
struct ParticleDomain {
    std::vector<Vec<Dim>> ref_positions;
    std::vector<double> volumes;
    std::vector<double> masses;
    double ref_density = 0.0;
    double smoothing_length = 0.0;
    double support_radius = 0.0;
    double spacing = 0.0;
    Vec<Dim> lower = Vec<Dim>::Zero();
    Vec<Dim> upper = Vec<Dim>::Zero();

    std::size_t size() const noexcept { return ref_positions.size(); }

    /// Sets rho_o and m_i = rho_o V_i.
    void set_density(double rho);

    /// Sets h and R = kappa h.
    void set_smoothing_length(double h);

    double total_volume() const;
};

/**
 * Uniform lattice over the box [origin, origin + extents].
 *
 * Each extent must be an integer multiple of `spacing` (relative tolerance 1e-9).
 * Throws std::invalid_argument otherwise.
 */
template <int Dim>
ParticleDomain<Dim> generate_lattice(const Vec<Dim>& origin, const Vec<Dim>& extents, double spacing,
                                     LatticePlacement placement = LatticePlacement::CellCentered);

/// Displaces every particle by a uniform random offset in [-amount, amount]^dim (units of length).
template <int Dim>
void jitter_positions(ParticleDomain<Dim>& domain, double amount, std::uint64_t seed);

/**
 * Compressed neighbour lists in the reference configuration.
 *
 * Entries for particle i live in [offsets[i], offsets[i+1]), sorted by index,
 * and always contain i itself. `reverse[k]` is the slot of i inside the list
 * of j for the pair k = (i, j), so pairwise-antisymmetric sums can look up
 * quantities stored from j's side.
 */
template <int Dim>
struct NeighborTable {
    std::vector<std::size_t> offsets{0};
    std::vector<std::size_t> indices;
    std::vector<std::size_t> reverse;
    std::vector<double> ref_distance;
    std::vector<Vec<Dim>> unit_bond;  // zero for the self entry
    std::vector<std::size_t> self_slot;
    std::vector<std::size_t> isolated;  // particles whose only neighbour is themselves

    std::size_t particle_count() const noexcept { return offsets.size() - 1; }
    std::size_t pair_count() const noexcept { return indices.size(); }
    std::size_t begin(std::size_t i) const noexcept { return offsets[i]; }
    std::size_t end(std::size_t i) const noexcept { return offsets[i + 1]; }
    std::span<const std::size_t> of(std::size_t i) const {
        return {indices.data() + offsets[i], offsets[i + 1] - offsets[i]};
    }
};

/// Uniform bucket grid used for range queries around arbitrary points.
template <int Dim>
class CellGrid {
public:
    CellGrid(std::span<const Vec<Dim>> positions, double cell_size);

    /// Indices j with |positions[j] - point| < radius, ascending. `radius` must not exceed the cell size.
    void query(const Vec<Dim>& point, double radius, std::vector<std::size_t>& out) const;

private:
    std::span<const Vec<Dim>> positions_;
    double cell_size_;
    Vec<Dim> origin_;
    std::array<std::int64_t, Dim> dims_{};
    std::vector<std::size_t> cell_start_;
    std::vector<std::size_t> sorted_;

    std::array<std::int64_t, Dim> cell_of(const Vec<Dim>& x) const;
    std::size_t flat(const std::array<std::int64_t, Dim>& c) const;
};

template <int Dim>
NeighborTable<Dim> build_neighbors(const ParticleDomain<Dim>& domain);

}  // namespace tlsph
