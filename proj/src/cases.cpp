#include "tlsph/cases.hpp"

#include "tlsph/io.hpp"
#include "tlsph/kernel.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace tlsph {

namespace {

template <int Dim>
Vec<Dim> to_vec(const std::vector<double>& v) {
    Vec<Dim> out;
    for (int a = 0; a < Dim; ++a) out[a] = v[static_cast<std::size_t>(a)];
    return out;
}

NeoHookeanParams material_of(const CaseConfig& c) {
    return NeoHookeanParams::from_engineering(c.youngs_modulus, c.poisson_ratio, c.density);
}

template <int Dim>
ParticleDomain<Dim> lattice_of(const CaseConfig& c, double spacing, double beta, std::uint64_t seed) {
    auto domain = generate_lattice<Dim>(to_vec<Dim>(c.lower), to_vec<Dim>(c.extents), spacing, c.placement);
    if (c.jitter && *c.jitter > 0.0) jitter_positions(domain, *c.jitter * spacing, seed);
    domain.set_density(c.density);
    domain.set_smoothing_length(beta * spacing);
    return domain;
}

template <int Dim>
std::function<Vec<Dim>(const Vec<Dim>&)> initial_velocity(const CaseConfig& c, const NeoHookeanParams& m,
                                                          const Vec<Dim>& center) {
    const auto zero = [](const Vec<Dim>&) { return Vec<Dim>::Zero().eval(); };
    if constexpr (Dim == 2) {
        if (c.id == CaseId::SwingingPlate) {
            const auto plate = SwingingPlate::from_material(*c.amplitude, m);
            return [plate](const Vec<2>& X) { return plate.velocity(X, 0.0); };
        }
        if (c.id == CaseId::SpinningPlate) {
            const double w = *c.omega3;
            return [w, center](const Vec<2>& X) {
                const Vec<2> r = X - center;
                return Vec<2>(-w * r[1], w * r[0]);
            };
        }
    } else if constexpr (Dim == 3) {
        switch (c.id) {
            case CaseId::SpinningCube: {
                const double w = *c.omega3;
                return [w, center](const Vec<3>& X) {
                    const Vec<3> r = X - center;
                    return Vec<3>(-w * r[1], w * r[0], 0.0);
                };
            }
            case CaseId::BendingColumn:
                return [](const Vec<3>& X) { return Vec<3>(0.0, 5.0 * X[2] / 3.0, 0.0); };
            case CaseId::TwistingColumn: {
                const double w = *c.omega3;
                return [w](const Vec<3>& X) {
                    const double s = w * std::sin(std::numbers::pi * X[2] / 12.0);
                    return Vec<3>(-s * X[1], s * X[0], 0.0);
                };
            }
            default:
                break;
        }
    }
    return zero;
}

template <int Dim>
CaseSetup<Dim> build_case_at(const CaseConfig& c, double spacing, double beta, KernelVariant variant,
                             std::uint64_t seed) {
    auto domain = lattice_of<Dim>(c, spacing, beta, seed);
    auto table = build_neighbors(domain);
    auto corrections = build_corrections(domain, table);
    const auto material = material_of(c);

    SolverSettings<Dim> settings;
    settings.kernel = variant;
    settings.bond = c.bond;
    settings.formulation = c.formulation;
    settings.jst = {c.eta2, c.eta4};
    settings.cfl = {c.alpha_cfl};

    CaseSetup<Dim> setup;
    std::vector<BoundaryCondition<Dim>> bcs;
    for (const auto& fc : c.boundary) {
        BoundaryCondition<Dim> bc;
        bc.kind = fc.kind;
        bc.normal_axis = fc.axis;
        if (fc.kind == ConstraintKind::PrescribedVelocity) bc.velocity = to_vec<Dim>(fc.velocity);
        bc.particles = select_face(domain, fc.axis, fc.upper, 0.51 * spacing);
        if (fc.kind == ConstraintKind::PrescribedVelocity) {
            setup.pulled.insert(setup.pulled.end(), bc.particles.begin(), bc.particles.end());
        }
        bcs.push_back(std::move(bc));
    }

    Vec<Dim> center = Vec<Dim>::Zero();
    for (std::size_t i = 0; i < domain.size(); ++i) center += domain.volumes[i] * domain.ref_positions[i];
    center /= domain.total_volume();
    setup.center = center;

    setup.state = DeformationState<Dim>::undeformed(domain);
    setup.solver = std::make_unique<Solver<Dim>>(std::move(domain), std::move(table), std::move(corrections), material,
                                                 settings, std::move(bcs));
    setup.solver->set_initial_velocity(setup.state, initial_velocity<Dim>(c, material, center));
    return setup;
}

template <int Dim>
double stretch_percent(const Solver<Dim>& solver, const DeformationState<Dim>& state,
                       const std::vector<std::size_t>& pulled, int axis) {
    const auto& d = solver.domain();
    double shift = 0.0;
    for (std::size_t i : pulled) shift += state.positions[i][axis] - d.ref_positions[i][axis];
    shift /= static_cast<double>(pulled.size());
    const double length = d.upper[axis] - d.lower[axis];
    return 100.0 * shift / length;
}

std::string step_name(std::size_t step) {
    std::ostringstream s;
    s << "snapshot_" << std::setw(7) << std::setfill('0') << step << ".vtk";
    return s.str();
}

std::filesystem::path output_dir(const CaseConfig& c, const RunOptions& o) {
    return o.out_dir.empty() ? std::filesystem::path(c.output_dir) : o.out_dir;
}

template <int Dim>
CaseResult run_case_dim(const CaseConfig& c, const RunOptions& options) {
    auto setup = build_case<Dim>(c, options.seed);
    const auto& solver = *setup.solver;
    const auto dir = output_dir(c, options);

    CaseResult result;
    result.particles = solver.domain().size();
    int pull_axis = Dim - 1;
    for (const auto& fc : c.boundary) {
        if (fc.kind == ConstraintKind::PrescribedVelocity) pull_axis = fc.axis;
    }

    RunControl control;
    control.end_time = c.end_time;
    if (c.max_steps) control.max_steps = *c.max_steps;
    control.output_every = c.output_every;

    const RunObserver<Dim> observer = [&](const DeformationState<Dim>& s, std::size_t step, OutputReason) {
        result.ledger.push_back(conservation_sample(s, solver.domain(), solver.material(), setup.center));
        result.ledger_steps.push_back(step);
        if (options.write_files && c.snapshots) {
            write_vtk_snapshot(dir / step_name(step), solver.domain(), s, solver.material());
        }
    };
    result.report = run(solver, setup.state, control, observer);

    if (!setup.pulled.empty()) result.stretch_percent = stretch_percent(solver, setup.state, setup.pulled, pull_axis);

    if constexpr (Dim == 2) {
        if (c.id == CaseId::SwingingPlate) {
            const auto plate = SwingingPlate::from_material(*c.amplitude, solver.material());
            const auto& d = solver.domain();
            const Interpolator<2> interp(d);
            const auto quad = QuadratureGrid<2>::box(d.lower, d.upper, c.convergence ? c.convergence->tiles : 10);
            const double t = setup.state.time;
            result.l2_error = l2_error<2>(setup.state, d, interp, quad, [&](const Vec<2>& X) { return plate.displacement(X, t); });
            result.h1_error = h1_seminorm_error<2>(setup.state, interp, quad,
                                                   [&](const Vec<2>& X) { return plate.displacement_gradient(X, t); });
        }
    }

    if (options.write_files) {
        write_ledger_csv(dir / "ledger.csv", result.ledger);
        std::ofstream(dir / "report.json") << report_json(c, result).dump(2) << '\n';
        save_config(c, dir / "config.json");
    }
    return result;
}

double rmse(const std::vector<double>& estimate, const std::vector<double>& exact) {
    double acc = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) acc += (estimate[i] - exact[i]) * (estimate[i] - exact[i]);
    return std::sqrt(acc / static_cast<double>(exact.size()));
}

double max_deviation(const std::vector<double>& estimate, const std::vector<double>& exact) {
    double m = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) m = std::max(m, std::abs(estimate[i] - exact[i]));
    return m;
}

struct Field1d {
    std::string name;
    std::function<double(double)> x;
    std::function<double(double)> dx;
};

const std::vector<Field1d>& fields_1d() {
    static const std::vector<Field1d> fields{
        {"linear", [](double X) { return X + 1.0; }, [](double) { return 1.0; }},
        {"quadratic", [](double X) { return X * X + 1.0; }, [](double X) { return 2.0 * X; }},
        {"cubic", [](double X) { return X * X * X + 1.0; }, [](double X) { return 3.0 * X * X; }},
        {"sin5", [](double X) { return std::sin(5.0 * X); }, [](double X) { return 5.0 * std::cos(5.0 * X); }},
    };
    return fields;
}

struct Lattice1d {
    ParticleDomain<1> domain;
    NeighborTable<1> table;
    CorrectionState<1> corrections;
};

Lattice1d lattice_1d(const CaseConfig& c, double spacing, double support_radius) {
    Lattice1d l;
    l.domain = generate_lattice<1>(to_vec<1>(c.lower), to_vec<1>(c.extents), spacing, c.placement);
    l.domain.set_density(c.density);
    l.domain.set_smoothing_length(support_radius / kSupportFactor);
    l.table = build_neighbors(l.domain);
    l.corrections = build_corrections(l.domain, l.table);
    return l;
}

}  // namespace

template <int Dim>
CaseSetup<Dim> build_case(const CaseConfig& config, std::uint64_t seed) {
    validate(config);
    if (config.dim != Dim) throw ConfigError("dim", "does not match the requested dimension");
    return build_case_at<Dim>(config, config.spacing, config.beta, config.kernel, seed);
}

template CaseSetup<1> build_case<1>(const CaseConfig&, std::uint64_t);
template CaseSetup<2> build_case<2>(const CaseConfig&, std::uint64_t);
template CaseSetup<3> build_case<3>(const CaseConfig&, std::uint64_t);

CaseResult run_case(const CaseConfig& config, const RunOptions& options) {
    validate(config);
    switch (config.dim) {
        case 1: throw ConfigError("case", "the 1D study is run with grad1d, not run");
        case 2: return run_case_dim<2>(config, options);
        default: return run_case_dim<3>(config, options);
    }
}

Json report_json(const CaseConfig& c, const CaseResult& r) {
    Json j;
    j["case"] = to_string(c.id);
    j["preset"] = to_string(c.preset);
    j["status"] = r.report.status == RunStatus::Completed ? "completed" : "instability_stop";
    j["final_time"] = r.report.final_time;
    j["steps"] = r.report.steps;
    j["wall_seconds"] = r.report.wall_seconds;
    j["particles"] = r.particles;
    if (!r.report.message.empty()) j["message"] = r.report.message;
    if (r.stretch_percent) j["stretch_percent"] = *r.stretch_percent;
    if (r.l2_error) j["l2_error"] = *r.l2_error;
    if (r.h1_error) j["h1_error"] = *r.h1_error;
    if (!r.ledger.empty()) {
        const auto& first = r.ledger.front();
        const auto& last = r.ledger.back();
        Json ledger;
        ledger["initial_total_energy"] = first.total;
        ledger["final_total_energy"] = last.total;
        ledger["final_linear_momentum"] = {last.linear_momentum[0], last.linear_momentum[1], last.linear_momentum[2]};
        ledger["initial_angular_momentum"] = {first.angular_momentum[0], first.angular_momentum[1],
                                              first.angular_momentum[2]};
        ledger["final_angular_momentum"] = {last.angular_momentum[0], last.angular_momentum[1],
                                            last.angular_momentum[2]};
        double peak = 0.0;
        for (const auto& row : r.ledger) peak = std::max(peak, row.max_von_mises);
        ledger["max_von_mises"] = peak;
        j["ledger"] = ledger;
    }
    return j;
}

ConvergenceResult run_convergence(const CaseConfig& c, const RunOptions& options) {
    validate(c);
    if (c.id != CaseId::SwingingPlate || !c.convergence) {
        throw ConfigError("convergence", "the convergence study needs a swinging plate config with a convergence block");
    }
    const auto& cv = *c.convergence;
    const auto plate = SwingingPlate::from_material(*c.amplitude, material_of(c));
    ConvergenceResult out;

    for (auto variant : cv.variants) {
        for (double beta : cv.betas) {
            std::vector<double> sizes, l2s, h1s;
            for (double d : cv.spacings) {
                auto setup = build_case_at<2>(c, d, beta, variant, options.seed);
                RunControl control;
                control.end_time = c.end_time;
                if (c.max_steps) control.max_steps = *c.max_steps;
                const auto report = run(*setup.solver, setup.state, control);

                const auto& dom = setup.solver->domain();
                const Interpolator<2> interp(dom);
                const auto quad = QuadratureGrid<2>::box(dom.lower, dom.upper, cv.tiles);
                const double t = setup.state.time;
                ConvergenceRow row;
                row.variant = variant;
                row.beta = beta;
                row.spacing = d;
                row.particles = dom.size();
                row.status = report.status;
                row.wall_seconds = report.wall_seconds;
                row.l2 = l2_error<2>(setup.state, dom, interp, quad, [&](const Vec<2>& X) { return plate.displacement(X, t); });
                row.h1 = h1_seminorm_error<2>(setup.state, interp, quad,
                                              [&](const Vec<2>& X) { return plate.displacement_gradient(X, t); });
                out.rows.push_back(row);
                if (report.status == RunStatus::Completed) {
                    sizes.push_back(d);
                    l2s.push_back(row.l2);
                    h1s.push_back(row.h1);
                }
            }
            if (sizes.size() >= 2) {
                out.fits.push_back({variant, beta, fit_slope(sizes, l2s), fit_slope(sizes, h1s)});
            }
        }
    }

    if (options.write_files) {
        const auto dir = output_dir(c, options);
        CsvWriter norms(dir / "convergence.csv",
                        {"variant", "status", "beta", "spacing", "particles", "l2", "h1", "wall_seconds"});
        for (const auto& r : out.rows) {
            norms.row({std::string(to_string(r.variant)), r.status == RunStatus::Completed ? "completed" : "instability_stop"},
                      {r.beta, r.spacing, static_cast<double>(r.particles), r.l2, r.h1, r.wall_seconds});
        }
        CsvWriter fits(dir / "convergence_slopes.csv", {"variant", "beta", "l2_slope", "h1_slope"});
        for (const auto& f : out.fits) fits.row({std::string(to_string(f.variant))}, {f.beta, f.l2_slope, f.h1_slope});
    }
    return out;
}

Grad1dResult run_grad1d(const CaseConfig& c, const RunOptions& options) {
    validate(c);
    if (c.id != CaseId::Grad1dStudy || !c.grad1d) throw ConfigError("case", "grad1d needs a grad1d_study config");
    const auto& g = *c.grad1d;
    Grad1dResult out;

    auto sample = [](const ParticleDomain<1>& d, const std::function<double(double)>& f) {
        std::vector<double> v(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) v[i] = f(d.ref_positions[i][0]);
        return v;
    };

    {
        const auto l = lattice_1d(c, c.spacing, g.support_radius);
        const auto& linear = fields_1d().front();
        const auto x = sample(l.domain, linear.x);
        const auto exact = sample(l.domain, linear.dx);
        out.linear_improved_max_deviation = max_deviation(
            gradient_1d_bond_improved(x, l.domain, l.table, l.corrections, KernelVariant::FirstOrder), exact);
        out.linear_naive_max_deviation = max_deviation(gradient_1d_bond_naive(x, l.domain, l.table, l.corrections), exact);
        out.linear_standard_max_deviation =
            max_deviation(gradient_1d_standard(x, l.domain, l.table, l.corrections), exact);
    }

    for (const auto& field : fields_1d()) {
        for (double d : g.spacings) {
            const auto l = lattice_1d(c, d, g.support_radius);
            const auto x = sample(l.domain, field.x);
            const auto exact = sample(l.domain, field.dx);
            Grad1dRow row;
            row.field = field.name;
            row.spacing = d;
            row.rmse_standard = rmse(gradient_1d_standard(x, l.domain, l.table, l.corrections), exact);
            row.rmse_improved_first =
                rmse(gradient_1d_bond_improved(x, l.domain, l.table, l.corrections, KernelVariant::FirstOrder), exact);
            row.rmse_improved_zeroth = rmse(
                gradient_1d_bond_improved(x, l.domain, l.table, l.corrections, KernelVariant::ZerothOrderCorrected), exact);
            row.rmse_naive = rmse(gradient_1d_bond_naive(x, l.domain, l.table, l.corrections), exact);
            out.rows.push_back(row);
        }
    }

    if (options.write_files) {
        const auto dir = output_dir(c, options);
        CsvWriter csv(dir / "grad1d.csv",
                      {"field", "spacing", "rmse_standard", "rmse_improved_first", "rmse_improved_zeroth", "rmse_naive"});
        for (const auto& r : out.rows) {
            csv.row({r.field}, {r.spacing, r.rmse_standard, r.rmse_improved_first, r.rmse_improved_zeroth, r.rmse_naive});
        }
        CsvWriter lin(dir / "grad1d_linear.csv", {"estimator", "max_deviation"});
        lin.row({"improved_bond"}, {out.linear_improved_max_deviation});
        lin.row({"naive_bond"}, {out.linear_naive_max_deviation});
        lin.row({"standard"}, {out.linear_standard_max_deviation});
    }
    return out;
}

}  // namespace tlsph
