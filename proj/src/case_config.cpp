#include "tlsph/case_config.hpp"

#include "tlsph/material.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>

namespace tlsph {

namespace {

constexpr std::array<std::pair<CaseId, std::string_view>, 7> kCaseNames{{
    {CaseId::SwingingPlate, "swinging_plate"},
    {CaseId::SpinningPlate, "spinning_plate"},
    {CaseId::SpinningCube, "spinning_cube"},
    {CaseId::BendingColumn, "bending_column"},
    {CaseId::PullingColumn, "pulling_column"},
    {CaseId::TwistingColumn, "twisting_column"},
    {CaseId::Grad1dStudy, "grad1d_study"},
}};

constexpr std::array<char, 3> kAxisNames{'x', 'y', 'z'};

std::string face_name(int axis, bool upper) {
    return std::string(1, kAxisNames[axis]) + (upper ? "+" : "-");
}

std::string_view kind_name(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::Fixed: return "fixed";
        case ConstraintKind::Roller: return "roller";
        case ConstraintKind::PrescribedVelocity: return "velocity";
    }
    return "fixed";
}

// Typed access with dotted field paths in every error.
class Reader {
public:
    Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    const Json& raw(const std::string& key) const {
        if (!has(key)) throw ConfigError(at(key), "required field is missing");
        return j_.at(key);
    }

    Reader object(const std::string& key) const {
        const Json& v = raw(key);
        if (!v.is_object()) throw ConfigError(at(key), "expected an object");
        return Reader(v, at(key));
    }

    double number(const std::string& key) const {
        const Json& v = raw(key);
        if (!v.is_number()) throw ConfigError(at(key), "expected a number");
        return v.get<double>();
    }

    std::optional<double> optional_number(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    std::size_t count(const std::string& key) const {
        const Json& v = raw(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ConfigError(at(key), "expected a non-negative integer");
        }
        return v.get<std::size_t>();
    }

    std::string string(const std::string& key) const {
        const Json& v = raw(key);
        if (!v.is_string()) throw ConfigError(at(key), "expected a string");
        return v.get<std::string>();
    }

    bool boolean(const std::string& key) const {
        const Json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(at(key), "expected true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key) const {
        const Json& v = raw(key);
        if (!v.is_array()) throw ConfigError(at(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (!v[k].is_number()) throw ConfigError(at(key) + "[" + std::to_string(k) + "]", "expected a number");
            out.push_back(v[k].get<double>());
        }
        return out;
    }

private:
    const Json& j_;
    std::string path_;
};

KernelVariant parse_variant(const std::string& s, const std::string& field) {
    if (s == to_string(KernelVariant::FirstOrder)) return KernelVariant::FirstOrder;
    if (s == to_string(KernelVariant::ZerothOrderCorrected)) return KernelVariant::ZerothOrderCorrected;
    throw ConfigError(field, "unknown kernel variant '" + s + "'");
}

void require_positive(double v, const std::string& field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be positive");
}

}  // namespace

std::string_view to_string(CaseId id) {
    for (const auto& [c, name] : kCaseNames) {
        if (c == id) return name;
    }
    return "unknown";
}

std::string_view to_string(Preset p) { return p == Preset::Quick ? "quick" : "paper"; }

std::optional<CaseId> parse_case_id(std::string_view name) {
    for (const auto& [c, n] : kCaseNames) {
        if (n == name) return c;
    }
    return std::nullopt;
}

std::optional<Preset> parse_preset(std::string_view name) {
    if (name == "quick") return Preset::Quick;
    if (name == "paper") return Preset::Paper;
    return std::nullopt;
}

const std::vector<CaseId>& all_cases() {
    static const std::vector<CaseId> cases = [] {
        std::vector<CaseId> v;
        for (const auto& [c, n] : kCaseNames) v.push_back(c);
        return v;
    }();
    return cases;
}

int case_dimension(CaseId id) {
    switch (id) {
        case CaseId::SwingingPlate:
        case CaseId::SpinningPlate: return 2;
        case CaseId::Grad1dStudy: return 1;
        default: return 3;
    }
}

void validate(const CaseConfig& c) {
    if (c.dim != case_dimension(c.id)) {
        throw ConfigError("dim", "case " + std::string(to_string(c.id)) + " is defined in " +
                                     std::to_string(case_dimension(c.id)) + "D");
    }
    const auto dim = static_cast<std::size_t>(c.dim);
    if (c.lower.size() != dim) throw ConfigError("geometry.lower", "needs one entry per dimension");
    if (c.extents.size() != dim) throw ConfigError("geometry.extents", "needs one entry per dimension");
    for (std::size_t a = 0; a < dim; ++a) {
        if (!std::isfinite(c.lower[a])) throw ConfigError("geometry.lower", "must be finite");
        require_positive(c.extents[a], "geometry.extents");
    }
    require_positive(c.spacing, "geometry.spacing");
    for (std::size_t a = 0; a < dim; ++a) {
        const double ratio = c.extents[a] / c.spacing;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
            throw ConfigError("geometry.spacing", "extents must be integer multiples of the spacing");
        }
    }
    if (c.jitter && !(*c.jitter >= 0.0 && *c.jitter < 0.5)) throw ConfigError("geometry.jitter", "must lie in [0, 0.5)");

    require_positive(c.youngs_modulus, "material.youngs_modulus");
    if (!(c.poisson_ratio >= 0.0 && c.poisson_ratio < 0.5)) {
        throw ConfigError("material.poisson_ratio", "must lie in [0, 0.5)");
    }
    require_positive(c.density, "material.density");
    require_positive(c.beta, "kernel.beta");
    if (!(c.eta2 >= 0.0)) throw ConfigError("jst.eta2", "must be >= 0");
    if (!(c.eta4 >= 0.0)) throw ConfigError("jst.eta4", "must be >= 0");
    if (!(c.alpha_cfl > 0.0 && c.alpha_cfl <= 1.0)) throw ConfigError("time.alpha_cfl", "must lie in (0, 1]");
    if (c.id != CaseId::Grad1dStudy) require_positive(c.end_time, "time.end_time");

    switch (c.id) {
        case CaseId::SwingingPlate:
            if (!c.amplitude) throw ConfigError("initial.amplitude", "required for the swinging plate");
            if (!std::isfinite(*c.amplitude)) throw ConfigError("initial.amplitude", "must be finite");
            break;
        case CaseId::SpinningPlate:
        case CaseId::SpinningCube:
        case CaseId::TwistingColumn:
            if (!c.omega3) throw ConfigError("initial.omega3", "required for rotating cases");
            if (!std::isfinite(*c.omega3)) throw ConfigError("initial.omega3", "must be finite");
            break;
        case CaseId::PullingColumn: {
            bool pulled = false;
            for (const auto& bc : c.boundary) pulled |= bc.kind == ConstraintKind::PrescribedVelocity;
            if (!pulled) throw ConfigError("boundary", "the pulling column needs a velocity condition");
            break;
        }
        case CaseId::Grad1dStudy:
            if (!c.grad1d) throw ConfigError("grad1d", "required for the gradient study");
            if (c.grad1d->spacings.size() < 2) throw ConfigError("grad1d.spacings", "needs at least two spacings");
            for (double d : c.grad1d->spacings) require_positive(d, "grad1d.spacings");
            require_positive(c.grad1d->support_radius, "grad1d.support_radius");
            break;
        default:
            break;
    }

    for (std::size_t k = 0; k < c.boundary.size(); ++k) {
        const auto& bc = c.boundary[k];
        const std::string field = "boundary[" + std::to_string(k) + "]";
        if (bc.axis < 0 || bc.axis >= c.dim) throw ConfigError(field + ".face", "axis outside the case dimension");
        if (bc.kind == ConstraintKind::PrescribedVelocity) {
            if (bc.velocity.size() != dim) throw ConfigError(field + ".velocity", "needs one entry per dimension");
        } else if (!bc.velocity.empty()) {
            throw ConfigError(field + ".velocity", "only velocity conditions carry a velocity");
        }
    }

    if (c.convergence) {
        const auto& cv = *c.convergence;
        if (cv.spacings.empty()) throw ConfigError("convergence.spacings", "must not be empty");
        for (double d : cv.spacings) require_positive(d, "convergence.spacings");
        if (cv.betas.empty()) throw ConfigError("convergence.betas", "must not be empty");
        for (double b : cv.betas) require_positive(b, "convergence.betas");
        if (cv.variants.empty()) throw ConfigError("convergence.variants", "must not be empty");
        if (cv.tiles < 1) throw ConfigError("convergence.tiles", "must be at least 1");
    }
}

CaseConfig parse_config(const Json& j) {
    if (!j.is_object()) throw ConfigError("", "configuration must be a JSON object");
    const Reader root(j, "");
    CaseConfig c;

    const std::string name = root.string("case");
    const auto id = parse_case_id(name);
    if (!id) throw ConfigError("case", "unknown case '" + name + "'");
    c.id = *id;
    const std::string preset = root.string("preset");
    const auto p = parse_preset(preset);
    if (!p) throw ConfigError("preset", "expected 'quick' or 'paper'");
    c.preset = *p;
    const Json& dim = root.raw("dim");
    if (!dim.is_number_integer()) throw ConfigError("dim", "expected 1, 2 or 3");
    c.dim = dim.get<int>();

    const Reader geo = root.object("geometry");
    c.lower = geo.numbers("lower");
    c.extents = geo.numbers("extents");
    c.spacing = geo.number("spacing");
    const std::string placement = geo.string("placement");
    if (placement == "cell_centered") {
        c.placement = LatticePlacement::CellCentered;
    } else if (placement == "vertex") {
        c.placement = LatticePlacement::Vertex;
    } else {
        throw ConfigError(geo.at("placement"), "expected 'cell_centered' or 'vertex'");
    }
    c.jitter = geo.optional_number("jitter");

    const Reader mat = root.object("material");
    c.youngs_modulus = mat.number("youngs_modulus");
    c.poisson_ratio = mat.number("poisson_ratio");
    c.density = mat.number("density");

    const Reader ker = root.object("kernel");
    c.beta = ker.number("beta");
    c.kernel = parse_variant(ker.string("variant"), ker.at("variant"));

    const Reader dg = root.object("deformation_gradient");
    const std::string formulation = dg.string("formulation");
    if (formulation == to_string(GradientFormulation::ImprovedBond)) {
        c.formulation = GradientFormulation::ImprovedBond;
    } else if (formulation == to_string(GradientFormulation::Standard)) {
        c.formulation = GradientFormulation::Standard;
    } else {
        throw ConfigError(dg.at("formulation"), "expected 'improved_bond' or 'standard'");
    }
    const std::string bond = dg.string("bond");
    if (bond == to_string(BondVariant::FullRank)) {
        c.bond = BondVariant::FullRank;
    } else if (bond == to_string(BondVariant::Kinematic)) {
        c.bond = BondVariant::Kinematic;
    } else {
        throw ConfigError(dg.at("bond"), "expected 'fullrank' or 'kinematic'");
    }

    const Reader jst = root.object("jst");
    c.eta2 = jst.number("eta2");
    c.eta4 = jst.number("eta4");

    const Reader time = root.object("time");
    c.alpha_cfl = time.number("alpha_cfl");
    c.end_time = time.number("end_time");
    if (time.has("max_steps")) c.max_steps = time.count("max_steps");

    const Reader init = root.object("initial");
    c.amplitude = init.optional_number("amplitude");
    c.omega3 = init.optional_number("omega3");

    const Json& bcs = root.raw("boundary");
    if (!bcs.is_array()) throw ConfigError("boundary", "expected an array");
    for (std::size_t k = 0; k < bcs.size(); ++k) {
        const std::string path = "boundary[" + std::to_string(k) + "]";
        if (!bcs[k].is_object()) throw ConfigError(path, "expected an object");
        const Reader r(bcs[k], path);
        FaceCondition fc;
        const std::string face = r.string("face");
        bool ok = face.size() == 2 && (face[1] == '-' || face[1] == '+');
        int axis = -1;
        for (int a = 0; ok && a < 3; ++a) {
            if (face[0] == kAxisNames[a]) axis = a;
        }
        if (!ok || axis < 0) throw ConfigError(r.at("face"), "expected one of x-, x+, y-, y+, z-, z+");
        fc.axis = axis;
        fc.upper = face[1] == '+';
        const std::string kind = r.string("kind");
        if (kind == "fixed") {
            fc.kind = ConstraintKind::Fixed;
        } else if (kind == "roller") {
            fc.kind = ConstraintKind::Roller;
        } else if (kind == "velocity") {
            fc.kind = ConstraintKind::PrescribedVelocity;
        } else {
            throw ConfigError(r.at("kind"), "expected 'fixed', 'roller' or 'velocity'");
        }
        if (r.has("velocity")) fc.velocity = r.numbers("velocity");
        c.boundary.push_back(std::move(fc));
    }

    const Reader out = root.object("output");
    c.output_every = out.count("every");
    c.output_dir = out.string("directory");
    c.snapshots = out.boolean("snapshots");

    if (root.has("convergence")) {
        const Reader cv = root.object("convergence");
        ConvergenceConfig cc;
        cc.spacings = cv.numbers("spacings");
        cc.betas = cv.numbers("betas");
        const Json& variants = cv.raw("variants");
        if (!variants.is_array()) throw ConfigError(cv.at("variants"), "expected an array of strings");
        for (std::size_t k = 0; k < variants.size(); ++k) {
            const std::string field = cv.at("variants") + "[" + std::to_string(k) + "]";
            if (!variants[k].is_string()) throw ConfigError(field, "expected a string");
            cc.variants.push_back(parse_variant(variants[k].get<std::string>(), field));
        }
        cc.tiles = static_cast<int>(cv.count("tiles"));
        c.convergence = std::move(cc);
    }

    if (root.has("grad1d")) {
        const Reader g = root.object("grad1d");
        Grad1dConfig gc;
        gc.spacings = g.numbers("spacings");
        gc.support_radius = g.number("support_radius");
        c.grad1d = std::move(gc);
    }

    validate(c);
    return c;
}

Json to_json(const CaseConfig& c) {
    Json j;
    j["case"] = to_string(c.id);
    j["preset"] = to_string(c.preset);
    j["dim"] = c.dim;

    Json geo;
    geo["lower"] = c.lower;
    geo["extents"] = c.extents;
    geo["spacing"] = c.spacing;
    geo["placement"] = c.placement == LatticePlacement::Vertex ? "vertex" : "cell_centered";
    if (c.jitter) geo["jitter"] = *c.jitter;
    j["geometry"] = geo;

    j["material"] = {{"youngs_modulus", c.youngs_modulus}, {"poisson_ratio", c.poisson_ratio}, {"density", c.density}};
    j["kernel"] = {{"beta", c.beta}, {"variant", to_string(c.kernel)}};
    j["deformation_gradient"] = {{"formulation", to_string(c.formulation)}, {"bond", to_string(c.bond)}};
    j["jst"] = {{"eta2", c.eta2}, {"eta4", c.eta4}};

    Json time;
    time["alpha_cfl"] = c.alpha_cfl;
    time["end_time"] = c.end_time;
    if (c.max_steps) time["max_steps"] = *c.max_steps;
    j["time"] = time;

    Json init = Json::object();
    if (c.amplitude) init["amplitude"] = *c.amplitude;
    if (c.omega3) init["omega3"] = *c.omega3;
    j["initial"] = init;

    Json bcs = Json::array();
    for (const auto& bc : c.boundary) {
        Json b;
        b["face"] = face_name(bc.axis, bc.upper);
        b["kind"] = kind_name(bc.kind);
        if (!bc.velocity.empty()) b["velocity"] = bc.velocity;
        bcs.push_back(b);
    }
    j["boundary"] = bcs;

    j["output"] = {{"every", c.output_every}, {"directory", c.output_dir}, {"snapshots", c.snapshots}};

    if (c.convergence) {
        Json cv;
        cv["spacings"] = c.convergence->spacings;
        cv["betas"] = c.convergence->betas;
        Json variants = Json::array();
        for (auto v : c.convergence->variants) variants.push_back(to_string(v));
        cv["variants"] = variants;
        cv["tiles"] = c.convergence->tiles;
        j["convergence"] = cv;
    }
    if (c.grad1d) {
        j["grad1d"] = {{"spacings", c.grad1d->spacings}, {"support_radius", c.grad1d->support_radius}};
    }
    return j;
}

CaseConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("", "malformed JSON in " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

void save_config(const CaseConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_json(config).dump(2) << '\n';
}

std::string builtin_file_name(CaseId id, Preset preset) {
    return std::string(to_string(id)) + "." + std::string(to_string(preset)) + ".json";
}

namespace {

// Box [-w/2, w/2]^2 x [0, length] with the column axis along z.
void column_geometry(CaseConfig& c, double length, int cells_across) {
    c.lower = {-0.5, -0.5, 0.0};
    c.extents = {1.0, 1.0, length};
    c.spacing = 1.0 / cells_across;
}

void rubber(CaseConfig& c, double nu) {
    c.youngs_modulus = 17.0e6;
    c.poisson_ratio = nu;
    c.density = 1100.0;
}

}  // namespace

CaseConfig builtin_config(CaseId id, Preset preset) {
    const bool paper = preset == Preset::Paper;
    CaseConfig c;
    c.id = id;
    c.preset = preset;
    c.dim = case_dimension(id);
    c.output_dir = "out/" + std::string(to_string(id)) + "." + std::string(to_string(preset));

    switch (id) {
        case CaseId::SwingingPlate: {
            c.lower = {0.0, 0.0};
            c.extents = {2.0, 2.0};
            c.spacing = paper ? 0.025 : 0.05;
            c.placement = LatticePlacement::Vertex;
            rubber(c, 0.495);
            c.amplitude = 0.01;
            const auto m = NeoHookeanParams::from_engineering(c.youngs_modulus, c.poisson_ratio, c.density);
            const double omega = 0.5 * std::numbers::pi * std::sqrt(2.0 * m.shear_modulus / m.ref_density);
            c.end_time = 0.5 * std::numbers::pi / omega;
            c.boundary = {{0, false, ConstraintKind::Roller, {}},
                          {0, true, ConstraintKind::Roller, {}},
                          {1, false, ConstraintKind::Roller, {}},
                          {1, true, ConstraintKind::Roller, {}}};
            c.output_every = 50;
            ConvergenceConfig cv;
            cv.spacings = paper ? std::vector<double>{0.2, 0.1, 0.05, 0.025} : std::vector<double>{0.2, 0.1, 0.05};
            cv.betas = paper ? std::vector<double>{0.6, 0.9, 1.2, 1.5} : std::vector<double>{0.9};
            cv.variants = paper ? std::vector<KernelVariant>{KernelVariant::FirstOrder, KernelVariant::ZerothOrderCorrected}
                                : std::vector<KernelVariant>{KernelVariant::FirstOrder};
            cv.tiles = 10;
            c.convergence = cv;
            break;
        }
        case CaseId::SpinningPlate:
            c.lower = {-0.5, -0.5};
            c.extents = {1.0, 1.0};
            c.spacing = paper ? 1.0 / 200.0 : 1.0 / 100.0;
            rubber(c, 0.45);
            c.omega3 = 105.0;
            c.end_time = paper ? 2.0 : 0.1;
            c.output_every = paper ? 2000 : 500;
            break;
        case CaseId::SpinningCube:
            c.lower = {-0.5, -0.5, -0.5};
            c.extents = {1.0, 1.0, 1.0};
            c.spacing = paper ? 1.0 / 50.0 : 1.0 / 10.0;
            rubber(c, 0.3);
            c.omega3 = 105.0;
            c.end_time = paper ? 2.0 : 0.1;
            c.output_every = paper ? 2000 : 100;
            break;
        case CaseId::BendingColumn:
            column_geometry(c, 6.0, 11);
            rubber(c, 0.45);
            c.end_time = paper ? 3.0 : 0.5;
            c.boundary = {{2, false, ConstraintKind::Fixed, {}}};
            c.output_every = 100;
            break;
        case CaseId::PullingColumn:
            column_geometry(c, 6.0, paper ? 12 : 8);
            rubber(c, 0.45);
            c.eta2 = 0.5;
            c.eta4 = 0.6;
            // With eta4 = 0.6 the biharmonic term inverts the column at alpha_cfl = 0.9 and
            // excites an edge mode above about 0.37 in which neighbours touch.
            c.alpha_cfl = 0.25;
            c.end_time = 3.0;
            c.boundary = {{2, false, ConstraintKind::Fixed, {}},
                          {2, true, ConstraintKind::PrescribedVelocity, {0.0, 0.0, 10.0}}};
            c.output_every = 200;
            break;
        case CaseId::TwistingColumn:
            column_geometry(c, 6.0, 7);
            rubber(c, 0.45);
            c.omega3 = 105.0;
            c.end_time = paper ? 0.25 : 0.1;
            c.boundary = {{2, false, ConstraintKind::Fixed, {}}};
            c.output_every = 100;
            break;
        case CaseId::Grad1dStudy:
            c.lower = {0.0};
            c.extents = {5.0};
            c.spacing = 1.0 / 8.0;
            rubber(c, 0.45);
            c.end_time = 0.0;
            c.grad1d = Grad1dConfig{{1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0}, 0.5};
            break;
    }
    c.snapshots = id != CaseId::Grad1dStudy;
    validate(c);
    return c;
}

}  // namespace tlsph
