/**
 * @file io.hpp
 * @brief CSV tables, ASCII legacy VTK point clouds and run reports.
 *
 * All floating-point output uses 17 significant digits so that values
 * survive a write/read cycle exactly.
 */

#pragma once

#include "tlsph/diagnostics.hpp"
#include "tlsph/kinematics.hpp"
#include "tlsph/material.hpp"
#include "tlsph/particle_domain.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace tlsph {

/// Failure to open, write or parse a file; the message carries the path.
class IoError : public Error {
public:
    using Error::Error;
};

/// Header row plus numeric rows, RFC 4180 style (no quoting needed for numbers).
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    /// Leading text cells followed by numbers.
    void row(const std::vector<std::string>& text, const std::vector<double>& values);
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

/// Column order of ledger CSV files.
const std::vector<std::string>& ledger_header();
std::vector<double> ledger_values(const LedgerRow& row);
void write_ledger_csv(const std::filesystem::path& path, const std::vector<LedgerRow>& rows);

/**
 * POLYDATA point cloud with one vertex cell per particle and point arrays
 * displacement, velocity (3 components, zero padded), von_mises and det_Fc.
 */
template <int Dim>
void write_vtk_snapshot(const std::filesystem::path& path, const ParticleDomain<Dim>& domain,
                        const DeformationState<Dim>& state, const NeoHookeanParams& material);

struct VtkPointCloud {
    std::vector<std::array<double, 3>> points;
    /// name -> flattened values, with the component count alongside
    std::map<std::string, std::pair<int, std::vector<double>>> arrays;
};

/// Reads back what write_vtk_snapshot produces.
VtkPointCloud read_vtk_point_cloud(const std::filesystem::path& path);

}  // namespace tlsph
