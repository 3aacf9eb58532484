#include "tlsph/case_config.hpp"
#include "tlsph/cases.hpp"
#include "tlsph/io.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace tlsph;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("tlsph_unit_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(const std::string& args) {
    const std::string cmd = std::string(TLSPH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Swinging plate at the coarsest convergence spacing, a few steps only.
CaseConfig tiny_plate() {
    auto c = builtin_config(CaseId::SwingingPlate, Preset::Quick);
    c.spacing = 0.2;
    c.end_time = 2e-3;
    c.output_every = 5;
    return c;
}

}  // namespace

TEST_CASE("every built-in config survives a JSON round trip") {
    for (auto id : all_cases()) {
        for (auto preset : {Preset::Quick, Preset::Paper}) {
            const auto c = builtin_config(id, preset);
            CHECK(c.dim == case_dimension(id));
            CHECK_NOTHROW(validate(c));
            CHECK(parse_config(to_json(c)) == c);
            CHECK(parse_case_id(to_string(id)) == id);
        }
    }
    CHECK_FALSE(parse_case_id("melting_column").has_value());
}

TEST_CASE("shipped config files equal the built-in presets") {
    for (auto id : all_cases()) {
        for (auto preset : {Preset::Quick, Preset::Paper}) {
            const fs::path file = fs::path(TLSPH_CONFIG_DIR) / builtin_file_name(id, preset);
            REQUIRE(fs::exists(file));
            CHECK(load_config(file) == builtin_config(id, preset));
        }
    }
}

TEST_CASE("config errors name the offending field") {
    auto j = to_json(builtin_config(CaseId::SpinningPlate, Preset::Quick));
    j["initial"].erase("omega3");
    try {
        parse_config(j);
        FAIL("missing omega3 accepted");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "initial.omega3");
    }

    auto k = to_json(builtin_config(CaseId::BendingColumn, Preset::Quick));
    k["time"]["alpha_cfl"] = 1.5;
    CHECK_THROWS_AS(parse_config(k), ConfigError);
    k["time"]["alpha_cfl"] = "fast";
    try {
        parse_config(k);
        FAIL("string CFL accepted");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "time.alpha_cfl");
    }

    auto g = to_json(builtin_config(CaseId::BendingColumn, Preset::Quick));
    g["geometry"]["extents"] = Json::array({1.0, 1.0});
    CHECK_THROWS_AS(parse_config(g), ConfigError);
}

TEST_CASE("CLI exit codes") {
    const auto dir = scratch("cli");
    auto j = to_json(builtin_config(CaseId::TwistingColumn, Preset::Quick));
    j["initial"].erase("omega3");
    std::ofstream(dir / "broken.json") << j.dump(2);

    CHECK(cli("validate " + (dir / "broken.json").string()) == 1);
    CHECK(cli("validate twisting_column:paper") == 0);
    CHECK(cli("validate no_such_case") == 1);
    CHECK(cli("frobnicate") == 1);

    auto plate = to_json(tiny_plate());
    std::ofstream(dir / "plate.json") << plate.dump(2);
    CHECK(cli("run " + (dir / "plate.json").string() + " --out-dir " + (dir / "plate").string()) == 0);
    CHECK(fs::exists(dir / "plate" / "ledger.csv"));
    CHECK(fs::exists(dir / "plate" / "report.json"));

    // eta4 = 0.6 at alpha 0.9 overruns the biharmonic limit within a step.
    auto pull = builtin_config(CaseId::PullingColumn, Preset::Quick);
    pull.alpha_cfl = 0.9;
    pull.end_time = 0.01;
    save_config(pull, dir / "pull.json");
    CHECK(cli("run " + (dir / "pull.json").string() + " --out-dir " + (dir / "pull").string()) == 2);
    const auto report = Json::parse(slurp(dir / "pull" / "report.json"));
    CHECK(report["status"] == "instability_stop");
    CHECK(report.contains("stretch_percent"));
}

TEST_CASE("repeated runs write identical ledgers") {
    const auto dir = scratch("determinism");
    RunOptions a{dir / "a", true, 0}, b{dir / "b", true, 0};
    const auto ra = run_case(tiny_plate(), a);
    const auto rb = run_case(tiny_plate(), b);
    CHECK(ra.report.status == RunStatus::Completed);
    CHECK(ra.l2_error.has_value());
    CHECK(ra.ledger.size() == rb.ledger.size());
    const auto la = slurp(dir / "a" / "ledger.csv");
    CHECK_FALSE(la.empty());
    CHECK(la == slurp(dir / "b" / "ledger.csv"));
    CHECK(la.substr(0, la.find('\n')) == "time,px,py,pz,Lx,Ly,Lz,kinetic,strain,total,model_strain,max_von_mises,min_jacobian");
}

TEST_CASE("VTK snapshots read back exactly") {
    const auto dir = scratch("vtk");
    const auto config = tiny_plate();
    auto setup = build_case<2>(config);
    auto& state = setup.state;
    const auto& domain = setup.solver->domain();
    for (std::size_t i = 0; i < domain.size(); ++i) state.positions[i] += Vec<2>(1e-3 * i, -2e-3);
    setup.solver->update_stress_gradient(state);
    const auto material = setup.solver->material();
    write_vtk_snapshot(dir / "s.vtk", domain, state, material);

    const auto cloud = read_vtk_point_cloud(dir / "s.vtk");
    REQUIRE(cloud.points.size() == domain.size());
    const auto& disp = cloud.arrays.at("displacement");
    const auto& vel = cloud.arrays.at("velocity");
    const auto& vm = cloud.arrays.at("von_mises");
    const auto& det = cloud.arrays.at("det_Fc");
    CHECK(disp.first == 3);
    CHECK(vm.first == 1);
    const auto vm_expected = von_mises_field(state, material);
    for (std::size_t i = 0; i < domain.size(); ++i) {
        CHECK(cloud.points[i][0] == state.positions[i].x());
        CHECK(cloud.points[i][1] == state.positions[i].y());
        CHECK(cloud.points[i][2] == 0.0);
        CHECK(disp.second[3 * i] == state.positions[i].x() - domain.ref_positions[i].x());
        CHECK(vel.second[3 * i + 1] == state.momentum[i].y() / domain.ref_density);
        CHECK(vm.second[i] == vm_expected[i]);
        CHECK(det.second[i] == state.Fc[i].determinant());
    }

    std::ofstream(dir / "bad.vtk") << "not a vtk file\n";
    CHECK_THROWS_AS(read_vtk_point_cloud(dir / "bad.vtk"), IoError);
    CHECK_THROWS_AS(read_vtk_point_cloud(dir / "missing.vtk"), IoError);
}

TEST_CASE("CSV writer checks the column count") {
    const auto dir = scratch("csv");
    {
        CsvWriter csv(dir / "t.csv", {"name", "x", "y"});
        csv.row({"a"}, {0.1, 1.0 / 3.0});
        CHECK_THROWS_AS(csv.row({1.0, 2.0}), IoError);
        csv.row({"b"}, {2.0, 3.0});
    }
    std::ifstream in(dir / "t.csv");
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "name,x,y");
    const double third = std::stod(first.substr(first.rfind(',') + 1));
    CHECK(third == 1.0 / 3.0);
}

TEST_CASE("built-in cases set up the documented initial state") {
    SUBCASE("spinning plate") {
        const auto c = builtin_config(CaseId::SpinningPlate, Preset::Quick);
        auto setup = build_case<2>(c);
        const auto& d = setup.solver->domain();
        CHECK(d.size() == 100 * 100);
        CHECK(setup.center.norm() < 1e-12);
        const std::size_t i = 1234;
        const Vec<2> X = d.ref_positions[i];
        CHECK((setup.state.momentum[i] - d.ref_density * *c.omega3 * Vec<2>(-X.y(), X.x())).norm() < 1e-9);
    }
    SUBCASE("pulling column") {
        const auto c = builtin_config(CaseId::PullingColumn, Preset::Quick);
        auto setup = build_case<3>(c);
        CHECK(setup.solver->domain().size() == 8 * 8 * 48);
        CHECK(setup.pulled.size() == 64);
        for (std::size_t i : setup.pulled) {
            CHECK(setup.state.momentum[i].z() == doctest::Approx(1100.0 * 10.0));
        }
    }
    SUBCASE("bending column") {
        const auto c = builtin_config(CaseId::BendingColumn, Preset::Quick);
        CHECK(c.spacing == doctest::Approx(1.0 / 11.0));
        auto setup = build_case<3>(c);
        CHECK(setup.solver->domain().size() == 11 * 11 * 66);
        const auto& d = setup.solver->domain();
        const std::size_t top = d.size() - 1;
        CHECK(setup.state.momentum[top].y() == doctest::Approx(1100.0 * 5.0 * d.ref_positions[top].z() / 3.0));
    }
}

TEST_CASE("1D study on the built-in lattice") {
    const auto dir = scratch("grad1d");
    const auto r = run_grad1d(builtin_config(CaseId::Grad1dStudy, Preset::Quick), {dir, true, 0});
    CHECK(r.linear_improved_max_deviation < 1e-10);
    CHECK(r.linear_standard_max_deviation < 1e-10);
    CHECK(r.linear_naive_max_deviation > 1e-3);
    CHECK(fs::exists(dir / "grad1d.csv"));
}
