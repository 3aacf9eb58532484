/**
 * @file cases.hpp
 * @brief Turning a CaseConfig into a ready solver, and the drivers behind the CLI subcommands.
 */

#pragma once

#include "tlsph/case_config.hpp"
#include "tlsph/diagnostics.hpp"
#include "tlsph/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tlsph {

template <int Dim>
struct CaseSetup {
    std::unique_ptr<Solver<Dim>> solver;
    DeformationState<Dim> state;
    Vec<Dim> center = Vec<Dim>::Zero();  ///< angular momentum reference point
    std::vector<std::size_t> pulled;     ///< particles under a prescribed velocity
};

/// Lattice, neighbours, corrections, constraints and initial momentum p = rho v0(X).
template <int Dim>
CaseSetup<Dim> build_case(const CaseConfig& config, std::uint64_t seed = 0);

struct RunOptions {
    std::filesystem::path out_dir;  ///< empty: use config.output_dir
    bool write_files = true;
    std::uint64_t seed = 0;
};

struct CaseResult {
    RunReport report;
    std::size_t particles = 0;
    std::vector<LedgerRow> ledger;
    std::vector<std::size_t> ledger_steps;
    std::optional<double> stretch_percent;  ///< pulled cases: 100 (L' - L) / L of the last stable state
    std::optional<double> l2_error;         ///< swinging plate, at the final time
    std::optional<double> h1_error;
};

CaseResult run_case(const CaseConfig& config, const RunOptions& options = {});

/// Machine-readable run summary.
Json report_json(const CaseConfig& config, const CaseResult& result);

struct ConvergenceRow {
    KernelVariant variant = KernelVariant::FirstOrder;
    double beta = 0.0;
    double spacing = 0.0;
    std::size_t particles = 0;
    RunStatus status = RunStatus::Completed;
    double l2 = 0.0;
    double h1 = 0.0;
    double wall_seconds = 0.0;
};

struct ConvergenceFit {
    KernelVariant variant = KernelVariant::FirstOrder;
    double beta = 0.0;
    double l2_slope = 0.0;
    double h1_slope = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    std::vector<ConvergenceFit> fits;
};

/// Swinging plate norms at config.end_time for every (variant, beta, spacing) cell.
ConvergenceResult run_convergence(const CaseConfig& config, const RunOptions& options = {});

struct Grad1dRow {
    std::string field;
    double spacing = 0.0;
    double rmse_standard = 0.0;         ///< standard estimate with the first-order gradient
    double rmse_improved_first = 0.0;
    double rmse_improved_zeroth = 0.0;
    double rmse_naive = 0.0;
};

struct Grad1dResult {
    double linear_improved_max_deviation = 0.0;  ///< x = X + 1 at geometry.spacing
    double linear_naive_max_deviation = 0.0;
    double linear_standard_max_deviation = 0.0;
    std::vector<Grad1dRow> rows;
};

/// dx/dX estimates on the 1D lattice for x = X + 1, X^2 + 1, X^3 + 1 and sin(5X).
Grad1dResult run_grad1d(const CaseConfig& config, const RunOptions& options = {});

}  // namespace tlsph
