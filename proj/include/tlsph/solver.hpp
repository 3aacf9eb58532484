/**
 * @file solver.hpp
 * @brief Right-hand side assembly, boundary constraints and the explicit three-stage integrator.
 *
 * The state (p, F, x) is advanced with
 *   U*   = U^n + dt R(U^n)
 *   U**  = 3/4 U^n + 1/4 (U* + dt R(U*))
 *   U^n+1 = 1/3 U^n + 2/3 (U** + dt R(U**))
 * and constrained axes are projected after every stage.
 */

#pragma once

#include "tlsph/kernel.hpp"
#include "tlsph/kinematics.hpp"
#include "tlsph/material.hpp"
#include "tlsph/particle_domain.hpp"
#include "tlsph/types.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace tlsph {

/// U_k = keep U^n + advance (U_{k-1} + dt R(U_{k-1})), evaluated at t^n + time_fraction dt.
struct RkStage {
    double keep;
    double advance;
    double time_fraction;
};

inline constexpr std::array<RkStage, 3> kSspRk3Stages{{{0.0, 1.0, 1.0}, {0.75, 0.25, 0.5}, {1.0 / 3.0, 2.0 / 3.0, 1.0}}};

struct JstParams {
    double eta2 = 0.0;
    double eta4 = 0.125;
};

struct CflParams {
    double alpha = 0.9;
};

enum class ConstraintKind { Fixed, Roller, PrescribedVelocity };

template <int Dim>
struct BoundaryCondition {
    ConstraintKind kind = ConstraintKind::Fixed;
    int normal_axis = 0;                        ///< roller only
    Vec<Dim> velocity = Vec<Dim>::Zero();       ///< prescribed velocity only
    std::vector<std::size_t> particles;
};

/// Particles within `tolerance` of the face `axis` = lower/upper bound of the domain box.
template <int Dim>
std::vector<std::size_t> select_face(const ParticleDomain<Dim>& domain, int axis, bool upper, double tolerance);

template <int Dim>
struct SolverSettings {
    KernelVariant kernel = KernelVariant::FirstOrder;
    BondVariant bond = BondVariant::FullRank;
    GradientFormulation formulation = GradientFormulation::ImprovedBond;
    JstParams jst;
    CflParams cfl;
    Vec<Dim> body_force = Vec<Dim>::Zero();  ///< source per unit undeformed volume
};

template <int Dim>
struct StateRate {
    std::vector<Vec<Dim>> momentum;
    std::vector<Mat<Dim>> F;
    std::vector<Vec<Dim>> positions;
};

template <int Dim>
class Solver {
public:
    Solver(ParticleDomain<Dim> domain, NeighborTable<Dim> table, CorrectionState<Dim> corrections,
           NeoHookeanParams material, SolverSettings<Dim> settings,
           std::vector<BoundaryCondition<Dim>> conditions = {});

    const ParticleDomain<Dim>& domain() const noexcept { return domain_; }
    const NeighborTable<Dim>& neighbors() const noexcept { return table_; }
    const CorrectionState<Dim>& corrections() const noexcept { return corrections_; }
    const NeoHookeanParams& material() const noexcept { return material_; }
    const SolverSettings<Dim>& settings() const noexcept { return settings_; }
    const std::vector<BoundaryCondition<Dim>>& conditions() const noexcept { return conditions_; }
    /// Smallest smoothing length in the domain (uniform here).
    double min_smoothing_length() const noexcept { return domain_.smoothing_length; }

    /// Recomputes state.Fc from (F, x), or copies F for the standard formulation.
    void update_stress_gradient(DeformationState<Dim>& state) const;

    /// First Piola stress (dim x dim block) from state.Fc.
    void piola_stresses(const DeformationState<Dim>& state, std::vector<Mat<Dim>>& P) const;

    /// Source + pair-averaged stress divergence + JST dissipation.
    void momentum_rate(const DeformationState<Dim>& state, const std::vector<Mat<Dim>>& P,
                       std::vector<Vec<Dim>>& out) const;

    void jst_dissipation(const DeformationState<Dim>& state, std::vector<Vec<Dim>>& out) const;

    /// Full right-hand side; refreshes state.Fc as a side effect.
    void rhs(DeformationState<Dim>& state, StateRate<Dim>& rate) const;

    /// Projects momentum and positions onto the constraints.
    void apply_constraints(DeformationState<Dim>& state) const;

    /// alpha_CFL * min |x_i - x_j| / C_p over current neighbour pairs.
    double stable_timestep(const DeformationState<Dim>& state) const;

    /// One three-stage step. On failure the state is left untouched and
    /// InversionError or InstabilityError propagates.
    void step(DeformationState<Dim>& state, double dt) const;

    /// p = rho v(X) for a velocity field; constraints applied afterwards.
    void set_initial_velocity(DeformationState<Dim>& state, const std::function<Vec<Dim>(const Vec<Dim>&)>& v) const;

private:
    enum class AxisMode : std::uint8_t { Free, Pinned, Prescribed };

    ParticleDomain<Dim> domain_;
    NeighborTable<Dim> table_;
    CorrectionState<Dim> corrections_;
    NeoHookeanParams material_;
    SolverSettings<Dim> settings_;
    std::vector<BoundaryCondition<Dim>> conditions_;

    std::vector<double> pair_laplacian_;  // pair-averaged corrected Laplacian
    std::vector<std::array<AxisMode, Dim>> axis_mode_;
    std::vector<Vec<Dim>> prescribed_velocity_;
    std::vector<std::size_t> constrained_;

    mutable std::vector<Mat<Dim>> piola_;
    mutable std::vector<Vec<Dim>> laplacian_p_;
    mutable std::vector<Vec<Dim>> jst_;
    mutable std::array<StateRate<Dim>, 3> stage_rate_;
    mutable DeformationState<Dim> stage1_, stage2_;

    void constrain_rate(StateRate<Dim>& rate) const;
    void check_finite(const DeformationState<Dim>& state) const;
};

enum class RunStatus { Completed, InstabilityStop };

enum class OutputReason { Initial, Scheduled, Final, Instability };

struct RunControl {
    double end_time = 0.0;
    std::size_t max_steps = std::numeric_limits<std::size_t>::max();
    std::size_t output_every = 0;  ///< 0 disables scheduled output
    /// Stop as unstable once the CFL step drops below this fraction of the first one.
    /// Interpenetrating particles drive min r_ij, and with it dt, to zero without ever going non-finite.
    double min_dt_fraction = 1e-2;
};

struct RunReport {
    RunStatus status = RunStatus::Completed;
    double final_time = 0.0;
    std::size_t steps = 0;
    double wall_seconds = 0.0;
    std::string message;
};

template <int Dim>
using RunObserver = std::function<void(const DeformationState<Dim>&, std::size_t step, OutputReason)>;

/**
 * Steps until end_time (the final step is shortened to land on it), max_steps,
 * or an instability. The observer sees the initial state, every
 * `output_every`-th step and the last stable state.
 */
template <int Dim>
RunReport run(const Solver<Dim>& solver, DeformationState<Dim>& state, const RunControl& control,
              const RunObserver<Dim>& observer = {});

}  // namespace tlsph
