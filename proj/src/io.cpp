#include "tlsph/io.hpp"

#include <iomanip>
#include <limits>
#include <sstream>

namespace tlsph {

namespace {

constexpr int kDigits = std::numeric_limits<double>::max_digits10;

std::ofstream open_for_writing(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << std::setprecision(kDigits);
    return out;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(open_for_writing(path)), columns_(header.size()) {
    for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) { row({}, values); }

void CsvWriter::row(const std::vector<std::string>& text, const std::vector<double>& values) {
    if (text.size() + values.size() != columns_) throw IoError("column count mismatch in " + path_.string());
    std::size_t k = 0;
    for (const auto& t : text) out_ << (k++ ? "," : "") << t;
    for (double v : values) out_ << (k++ ? "," : "") << v;
    out_ << '\n';
    if (!out_) throw IoError("write failed for " + path_.string());
}

const std::vector<std::string>& ledger_header() {
    static const std::vector<std::string> header{
        "time",    "px",     "py",    "pz",           "Lx",            "Ly",          "Lz",
        "kinetic", "strain", "total", "model_strain", "max_von_mises", "min_jacobian"};
    return header;
}

std::vector<double> ledger_values(const LedgerRow& r) {
    return {r.time,
            r.linear_momentum[0],
            r.linear_momentum[1],
            r.linear_momentum[2],
            r.angular_momentum[0],
            r.angular_momentum[1],
            r.angular_momentum[2],
            r.kinetic,
            r.strain,
            r.total,
            r.model_strain,
            r.max_von_mises,
            r.min_jacobian};
}

void write_ledger_csv(const std::filesystem::path& path, const std::vector<LedgerRow>& rows) {
    CsvWriter csv(path, ledger_header());
    for (const auto& r : rows) csv.row(ledger_values(r));
}

template <int Dim>
void write_vtk_snapshot(const std::filesystem::path& path, const ParticleDomain<Dim>& domain,
                        const DeformationState<Dim>& state, const NeoHookeanParams& material) {
    const std::size_t n = domain.size();
    auto out = open_for_writing(path);
    auto triple = [&](const auto& v) {
        for (int a = 0; a < 3; ++a) out << (a ? " " : "") << (a < Dim ? v[a] : 0.0);
        out << '\n';
    };

    out << "# vtk DataFile Version 3.0\n"
        << "tlsph particles t=" << state.time << "\n"
        << "ASCII\n"
        << "DATASET POLYDATA\n"
        << "POINTS " << n << " double\n";
    for (std::size_t i = 0; i < n; ++i) triple(state.positions[i]);
    out << "VERTICES " << n << ' ' << 2 * n << '\n';
    for (std::size_t i = 0; i < n; ++i) out << "1 " << i << '\n';

    out << "POINT_DATA " << n << '\n';
    out << "VECTORS displacement double\n";
    for (std::size_t i = 0; i < n; ++i) triple(Vec<Dim>(state.positions[i] - domain.ref_positions[i]));
    out << "VECTORS velocity double\n";
    for (std::size_t i = 0; i < n; ++i) triple(Vec<Dim>(state.momentum[i] / domain.ref_density));

    const auto vm = von_mises_field(state, material);
    out << "SCALARS von_mises double 1\nLOOKUP_TABLE default\n";
    for (double v : vm) out << v << '\n';
    out << "SCALARS det_Fc double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < n; ++i) out << state.Fc[i].determinant() << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

VtkPointCloud read_vtk_point_cloud(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    auto fail = [&](const std::string& what) { throw IoError(path.string() + ": " + what); };

    std::string line;
    for (int k = 0; k < 4; ++k) {
        if (!std::getline(in, line)) fail("truncated header");
        if (k == 0 && line.rfind("# vtk DataFile", 0) != 0) fail("not a legacy VTK file");
        if (k == 2 && line != "ASCII") fail("only ASCII files are supported");
    }

    VtkPointCloud cloud;
    std::size_t n = 0;
    std::string word;
    while (in >> word) {
        if (word == "POINTS") {
            std::string type;
            in >> n >> type;
            cloud.points.resize(n);
            for (auto& p : cloud.points) in >> p[0] >> p[1] >> p[2];
        } else if (word == "VERTICES") {
            std::size_t cells = 0, size = 0;
            in >> cells >> size;
            for (std::size_t k = 0; k < size; ++k) in >> word;
        } else if (word == "POINT_DATA") {
            std::size_t m = 0;
            in >> m;
            if (m != n) fail("POINT_DATA count differs from POINTS");
        } else if (word == "VECTORS" || word == "SCALARS") {
            const bool vectors = word == "VECTORS";
            std::string name, type;
            in >> name >> type;
            int components = 3;
            if (!vectors) {
                in >> components;
                std::string lookup, table;
                in >> lookup >> table;
            }
            std::vector<double> values(n * static_cast<std::size_t>(components));
            for (auto& v : values) in >> v;
            cloud.arrays[name] = {components, std::move(values)};
        } else {
            fail("unexpected token '" + word + "'");
        }
        if (in.fail()) fail("malformed data");
    }
    return cloud;
}

template void write_vtk_snapshot<1>(const std::filesystem::path&, const ParticleDomain<1>&, const DeformationState<1>&,
                                    const NeoHookeanParams&);
template void write_vtk_snapshot<2>(const std::filesystem::path&, const ParticleDomain<2>&, const DeformationState<2>&,
                                    const NeoHookeanParams&);
template void write_vtk_snapshot<3>(const std::filesystem::path&, const ParticleDomain<3>&, const DeformationState<3>&,
                                    const NeoHookeanParams&);

}  // namespace tlsph
