#include "tlsph/solver.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tlsph {

template <int Dim>
std::vector<std::size_t> select_face(const ParticleDomain<Dim>& domain, int axis, bool upper, double tolerance) {
    if (axis < 0 || axis >= Dim) throw std::invalid_argument("face axis out of range");
    const double plane = upper ? domain.upper[axis] : domain.lower[axis];
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < domain.size(); ++i) {
        if (std::abs(domain.ref_positions[i][axis] - plane) < tolerance) out.push_back(i);
    }
    return out;
}

template <int Dim>
Solver<Dim>::Solver(ParticleDomain<Dim> domain, NeighborTable<Dim> table, CorrectionState<Dim> corrections,
                    NeoHookeanParams material, SolverSettings<Dim> settings,
                    std::vector<BoundaryCondition<Dim>> conditions)
    : domain_(std::move(domain)),
      table_(std::move(table)),
      corrections_(std::move(corrections)),
      material_(material),
      settings_(settings),
      conditions_(std::move(conditions)) {
    if (!(domain_.ref_density > 0.0)) throw std::invalid_argument("domain density not set");
    if (settings_.jst.eta2 < 0.0 || settings_.jst.eta4 < 0.0) throw std::invalid_argument("JST constants must be >= 0");
    if (!(settings_.cfl.alpha > 0.0 && settings_.cfl.alpha <= 1.0)) {
        throw std::invalid_argument("alpha_CFL must lie in (0, 1]");
    }
    if (corrections_.corrected_laplacian.size() != table_.pair_count() ||
        corrections_.grad_kernel1.size() != table_.pair_count() ||
        corrections_.corrected_grad0.size() != table_.pair_count()) {
        throw std::invalid_argument("correction tables do not match the neighbour table");
    }

    pair_laplacian_.resize(table_.pair_count());
    for (std::size_t k = 0; k < table_.pair_count(); ++k) {
        pair_laplacian_[k] =
            0.5 * (corrections_.corrected_laplacian[k] + corrections_.corrected_laplacian[table_.reverse[k]]);
    }

    const std::size_t n = domain_.size();
    std::array<AxisMode, Dim> free_axes;
    free_axes.fill(AxisMode::Free);
    axis_mode_.assign(n, free_axes);
    prescribed_velocity_.assign(n, Vec<Dim>::Zero());

    // Rollers first so that fixed and prescribed conditions override them.
    auto apply = [&](ConstraintKind kind) {
        for (const auto& bc : conditions_) {
            if (bc.kind != kind) continue;
            for (std::size_t i : bc.particles) {
                if (i >= n) throw std::invalid_argument("boundary condition references a missing particle");
                switch (bc.kind) {
                    case ConstraintKind::Roller:
                        if (bc.normal_axis < 0 || bc.normal_axis >= Dim) throw std::invalid_argument("roller axis out of range");
                        axis_mode_[i][bc.normal_axis] = AxisMode::Pinned;
                        break;
                    case ConstraintKind::Fixed:
                        axis_mode_[i].fill(AxisMode::Pinned);
                        break;
                    case ConstraintKind::PrescribedVelocity:
                        axis_mode_[i].fill(AxisMode::Prescribed);
                        prescribed_velocity_[i] = bc.velocity;
                        break;
                }
            }
        }
    };
    apply(ConstraintKind::Roller);
    apply(ConstraintKind::Fixed);
    apply(ConstraintKind::PrescribedVelocity);

    for (std::size_t i = 0; i < n; ++i) {
        if (std::any_of(axis_mode_[i].begin(), axis_mode_[i].end(), [](AxisMode m) { return m != AxisMode::Free; })) {
            constrained_.push_back(i);
        }
    }
}

template <int Dim>
void Solver<Dim>::update_stress_gradient(DeformationState<Dim>& state) const {
    if (settings_.formulation == GradientFormulation::Standard) {
        state.Fc = state.F;
        return;
    }
    corrected_deformation_gradient(state, domain_, table_, corrections_, settings_.kernel, settings_.bond, state.Fc);
}

template <int Dim>
void Solver<Dim>::piola_stresses(const DeformationState<Dim>& state, std::vector<Mat<Dim>>& P) const {
    P.resize(domain_.size());
    detail::parallel_for(domain_.size(), [&](std::size_t i) {
        const Mat3 full = first_piola(pad_to_3d<Dim>(state.Fc[i]), material_, i);
        P[i] = full.template topLeftCorner<Dim, Dim>();
    });
}

template <int Dim>
void Solver<Dim>::jst_dissipation(const DeformationState<Dim>& state, std::vector<Vec<Dim>>& out) const {
    const std::size_t n = domain_.size();
    out.assign(n, Vec<Dim>::Zero());
    const double eta2 = settings_.jst.eta2, eta4 = settings_.jst.eta4;
    if (eta2 == 0.0 && eta4 == 0.0) return;

    const auto& p = state.momentum;
    const auto& V = domain_.volumes;
    laplacian_p_.resize(n);
    detail::parallel_for(n, [&](std::size_t i) {
        Vec<Dim> acc = Vec<Dim>::Zero();
        for (std::size_t k = table_.begin(i); k < table_.end(i); ++k) {
            const std::size_t j = table_.indices[k];
            acc += V[j] * pair_laplacian_[k] * (p[j] - p[i]);
        }
        laplacian_p_[i] = acc;
    });

    const double h = min_smoothing_length();
    const double cp = material_.pwave_speed;
    const double harmonic = eta2 * cp * h;
    const double biharmonic = eta4 * cp * h * h * h;
    detail::parallel_for(n, [&](std::size_t i) {
        Vec<Dim> acc = Vec<Dim>::Zero();
        for (std::size_t k = table_.begin(i); k < table_.end(i); ++k) {
            const std::size_t j = table_.indices[k];
            const double w = V[j] * pair_laplacian_[k];
            acc += w * (harmonic * (p[j] - p[i]) - biharmonic * (laplacian_p_[j] - laplacian_p_[i]));
        }
        out[i] = acc;
    });
}

template <int Dim>
void Solver<Dim>::momentum_rate(const DeformationState<Dim>& state, const std::vector<Mat<Dim>>& P,
                                std::vector<Vec<Dim>>& out) const {
    const auto grad = kernel_gradients(corrections_, settings_.kernel);
    const auto& V = domain_.volumes;
    jst_dissipation(state, jst_);
    out.resize(domain_.size());
    detail::parallel_for(domain_.size(), [&](std::size_t i) {
        Vec<Dim> acc = Vec<Dim>::Zero();
        for (std::size_t k = table_.begin(i); k < table_.end(i); ++k) {
            const std::size_t j = table_.indices[k];
            acc += V[j] * (P[i] + P[j]) * (grad[k] - grad[table_.reverse[k]]);
        }
        out[i] = settings_.body_force + 0.5 * acc + jst_[i];
    });
}

template <int Dim>
void Solver<Dim>::constrain_rate(StateRate<Dim>& rate) const {
    for (std::size_t i : constrained_) {
        for (int a = 0; a < Dim; ++a) {
            switch (axis_mode_[i][a]) {
                case AxisMode::Free:
                    break;
                case AxisMode::Pinned:
                    rate.momentum[i][a] = 0.0;
                    rate.positions[i][a] = 0.0;
                    break;
                case AxisMode::Prescribed:
                    rate.momentum[i][a] = 0.0;
                    rate.positions[i][a] = prescribed_velocity_[i][a];
                    break;
            }
        }
    }
}

template <int Dim>
void Solver<Dim>::rhs(DeformationState<Dim>& state, StateRate<Dim>& rate) const {
    update_stress_gradient(state);
    piola_stresses(state, piola_);
    momentum_rate(state, piola_, rate.momentum);
    deformation_gradient_rate(state, domain_, table_, corrections_, settings_.kernel, rate.F);
    const double inv_rho = 1.0 / domain_.ref_density;
    rate.positions.resize(domain_.size());
    for (std::size_t i = 0; i < domain_.size(); ++i) rate.positions[i] = state.momentum[i] * inv_rho;
    constrain_rate(rate);
}

template <int Dim>
void Solver<Dim>::apply_constraints(DeformationState<Dim>& state) const {
    for (std::size_t i : constrained_) {
        for (int a = 0; a < Dim; ++a) {
            switch (axis_mode_[i][a]) {
                case AxisMode::Free:
                    break;
                case AxisMode::Pinned:
                    state.momentum[i][a] = 0.0;
                    state.positions[i][a] = domain_.ref_positions[i][a];
                    break;
                case AxisMode::Prescribed:
                    state.momentum[i][a] = domain_.ref_density * prescribed_velocity_[i][a];
                    break;
            }
        }
    }
}

template <int Dim>
double Solver<Dim>::stable_timestep(const DeformationState<Dim>& state) const {
    double min_r2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < domain_.size(); ++i) {
        for (std::size_t k = table_.begin(i); k < table_.end(i); ++k) {
            const std::size_t j = table_.indices[k];
            if (j <= i) continue;
            min_r2 = std::min(min_r2, (state.positions[j] - state.positions[i]).squaredNorm());
        }
    }
    if (!std::isfinite(min_r2)) {
        // No pairs at all: fall back to the lattice spacing.
        min_r2 = domain_.spacing * domain_.spacing;
    }
    const double dt = settings_.cfl.alpha * std::sqrt(min_r2) / material_.pwave_speed;
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InstabilityError(state.time, "non-positive CFL time step");
    return dt;
}

template <int Dim>
void Solver<Dim>::check_finite(const DeformationState<Dim>& state) const {
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (!state.momentum[i].allFinite() || !state.F[i].allFinite() || !state.positions[i].allFinite()) {
            throw InstabilityError(state.time, "non-finite state at particle " + std::to_string(i));
        }
    }
}

namespace {

// out = a * u + b * (v + dt * r)
template <int Dim>
void combine(DeformationState<Dim>& out, double a, const DeformationState<Dim>& u, double b,
             const DeformationState<Dim>& v, const StateRate<Dim>& r, double dt) {
    const std::size_t n = u.size();
    out.momentum.resize(n);
    out.F.resize(n);
    out.positions.resize(n);
    out.Fc.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.momentum[i] = a * u.momentum[i] + b * (v.momentum[i] + dt * r.momentum[i]);
        out.F[i] = a * u.F[i] + b * (v.F[i] + dt * r.F[i]);
        out.positions[i] = a * u.positions[i] + b * (v.positions[i] + dt * r.positions[i]);
    }
}

}  // namespace

template <int Dim>
void Solver<Dim>::step(DeformationState<Dim>& state, double dt) const {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    const double t0 = state.time;
    DeformationState<Dim> start = state;

    DeformationState<Dim> next;
    DeformationState<Dim>* previous = &start;
    DeformationState<Dim>* targets[3] = {&stage1_, &stage2_, &next};
    for (std::size_t k = 0; k < kSspRk3Stages.size(); ++k) {
        const auto& stage = kSspRk3Stages[k];
        auto& out = *targets[k];
        rhs(*previous, stage_rate_[k]);
        combine(out, stage.keep, start, stage.advance, *previous, stage_rate_[k], dt);
        out.time = t0 + stage.time_fraction * dt;
        apply_constraints(out);
        check_finite(out);
        previous = &out;
    }
    update_stress_gradient(next);
    for (std::size_t i = 0; i < next.size(); ++i) {
        const double J = next.Fc[i].determinant();
        if (!(J > 0.0) || !std::isfinite(J)) throw InversionError(i, J);
    }
    state = std::move(next);
}

template <int Dim>
void Solver<Dim>::set_initial_velocity(DeformationState<Dim>& state,
                                       const std::function<Vec<Dim>(const Vec<Dim>&)>& v) const {
    for (std::size_t i = 0; i < domain_.size(); ++i) {
        state.momentum[i] = domain_.ref_density * v(domain_.ref_positions[i]);
    }
    apply_constraints(state);
}

template <int Dim>
RunReport run(const Solver<Dim>& solver, DeformationState<Dim>& state, const RunControl& control,
              const RunObserver<Dim>& observer) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    RunReport report;
    auto notify = [&](std::size_t step, OutputReason reason) {
        if (observer) observer(state, step, reason);
    };

    solver.update_stress_gradient(state);
    notify(0, OutputReason::Initial);

    std::size_t steps = 0;
    double first_dt = 0.0;
    const double tol = 1e-12 * std::max(1.0, std::abs(control.end_time));
    try {
        while (state.time < control.end_time - tol && steps < control.max_steps) {
            double dt = solver.stable_timestep(state);
            if (steps == 0) first_dt = dt;
            if (dt < control.min_dt_fraction * first_dt) {
                std::ostringstream msg;
                msg << "time step collapsed to " << dt << " s (first step " << first_dt << " s)";
                throw InstabilityError(state.time, msg.str());
            }
            if (state.time + dt > control.end_time) dt = control.end_time - state.time;
            solver.step(state, dt);
            ++steps;
            if (control.output_every > 0 && steps % control.output_every == 0) notify(steps, OutputReason::Scheduled);
        }
        report.status = RunStatus::Completed;
    } catch (const InversionError& e) {
        report.status = RunStatus::InstabilityStop;
        report.message = e.what();
    } catch (const InstabilityError& e) {
        report.status = RunStatus::InstabilityStop;
        report.message = e.what();
    }
    report.steps = steps;
    report.final_time = state.time;
    notify(steps, report.status == RunStatus::Completed ? OutputReason::Final : OutputReason::Instability);
    report.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
    return report;
}

#define TLSPH_INSTANTIATE(D)                                                                                 \
    template std::vector<std::size_t> select_face<D>(const ParticleDomain<D>&, int, bool, double);           \
    template class Solver<D>;                                                                                \
    template RunReport run<D>(const Solver<D>&, DeformationState<D>&, const RunControl&, const RunObserver<D>&);

TLSPH_INSTANTIATE(1)
TLSPH_INSTANTIATE(2)
TLSPH_INSTANTIATE(3)

#undef TLSPH_INSTANTIATE

}  // namespace tlsph
