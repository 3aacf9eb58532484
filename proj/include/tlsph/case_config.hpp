/**
 * @file case_config.hpp
 * @brief Benchmark case configuration: JSON schema, validation and the built-in presets.
 *
 * Top-level keys, in the order they are written:
 *   case, preset, dim,
 *   geometry {lower[dim], extents[dim], spacing, placement: "cell_centered"|"vertex", jitter?},
 *   material {youngs_modulus, poisson_ratio, density},
 *   kernel {beta, variant: "first_order"|"zeroth_order"},
 *   deformation_gradient {formulation: "improved_bond"|"standard", bond: "fullrank"|"kinematic"},
 *   jst {eta2, eta4},
 *   time {alpha_cfl, end_time, max_steps?},
 *   initial {amplitude?, omega3?},
 *   boundary [{face: "x-"|"x+"|"y-"|..., kind: "fixed"|"roller"|"velocity", velocity?[dim]}],
 *   output {every, directory, snapshots},
 *   convergence? {spacings[], betas[], variants[], tiles},
 *   grad1d? {spacings[], support_radius}
 * Keys marked '?' are optional and omitted when absent.
 */

#pragma once

#include "tlsph/kinematics.hpp"
#include "tlsph/particle_domain.hpp"
#include "tlsph/solver.hpp"
#include "tlsph/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tlsph {

enum class CaseId {
    SwingingPlate,
    SpinningPlate,
    SpinningCube,
    BendingColumn,
    PullingColumn,
    TwistingColumn,
    Grad1dStudy,
};

enum class Preset { Quick, Paper };

std::string_view to_string(CaseId id);
std::string_view to_string(Preset p);
std::optional<CaseId> parse_case_id(std::string_view name);
std::optional<Preset> parse_preset(std::string_view name);
const std::vector<CaseId>& all_cases();
/// Spatial dimension every case is defined in.
int case_dimension(CaseId id);

struct FaceCondition {
    int axis = 0;
    bool upper = false;
    ConstraintKind kind = ConstraintKind::Fixed;
    std::vector<double> velocity;  ///< velocity kind only

    bool operator==(const FaceCondition&) const = default;
};

struct ConvergenceConfig {
    std::vector<double> spacings;
    std::vector<double> betas;
    std::vector<KernelVariant> variants;
    int tiles = 10;

    bool operator==(const ConvergenceConfig&) const = default;
};

struct Grad1dConfig {
    std::vector<double> spacings;
    double support_radius = 0.5;  ///< held fixed across the sweep

    bool operator==(const Grad1dConfig&) const = default;
};

struct CaseConfig {
    CaseId id = CaseId::SwingingPlate;
    Preset preset = Preset::Quick;
    int dim = 2;

    std::vector<double> lower;
    std::vector<double> extents;
    double spacing = 0.0;
    LatticePlacement placement = LatticePlacement::CellCentered;
    std::optional<double> jitter;  ///< fraction of the spacing

    double youngs_modulus = 0.0;
    double poisson_ratio = 0.0;
    double density = 0.0;

    double beta = 0.9;  ///< h / d
    KernelVariant kernel = KernelVariant::FirstOrder;
    GradientFormulation formulation = GradientFormulation::ImprovedBond;
    BondVariant bond = BondVariant::FullRank;

    double eta2 = 0.0;
    double eta4 = 0.125;
    double alpha_cfl = 0.9;
    double end_time = 0.0;
    std::optional<std::size_t> max_steps;

    std::optional<double> amplitude;
    std::optional<double> omega3;

    std::vector<FaceCondition> boundary;

    std::size_t output_every = 0;
    std::string output_dir;
    bool snapshots = false;

    std::optional<ConvergenceConfig> convergence;
    std::optional<Grad1dConfig> grad1d;

    bool operator==(const CaseConfig&) const = default;
};

using Json = nlohmann::ordered_json;

/// Parses and validates; throws ConfigError naming the offending field.
CaseConfig parse_config(const Json& j);
Json to_json(const CaseConfig& config);
CaseConfig load_config(const std::filesystem::path& path);
void save_config(const CaseConfig& config, const std::filesystem::path& path);

/// Semantic checks shared by the parser and programmatic builders.
void validate(const CaseConfig& config);

CaseConfig builtin_config(CaseId id, Preset preset);

/// File name of a built-in config, e.g. "pulling_column.quick.json".
std::string builtin_file_name(CaseId id, Preset preset);

}  // namespace tlsph
