// Command-line front end: run, convergence, grad1d, validate, cases.
//
// A config argument is either a JSON file or a built-in name such as
// "pulling_column" or "pulling_column:paper" (quick preset by default).
// Exit codes: 0 clean finish, 2 instability stop, 1 usage or config error.

#include "tlsph/case_config.hpp"
#include "tlsph/cases.hpp"
#include "tlsph/io.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <filesystem>
#include <iostream>

namespace {

using namespace tlsph;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInstability = 2;

CaseConfig resolve_config(const std::string& arg) {
    if (std::filesystem::exists(arg)) return load_config(arg);
    const auto colon = arg.find(':');
    const auto id = parse_case_id(arg.substr(0, colon));
    if (!id) throw ConfigError("", "no such file or built-in case: " + arg);
    Preset preset = Preset::Quick;
    if (colon != std::string::npos) {
        const auto p = parse_preset(arg.substr(colon + 1));
        if (!p) throw ConfigError("preset", "expected 'quick' or 'paper'");
        preset = *p;
    }
    return builtin_config(*id, preset);
}

void print_fits(const ConvergenceResult& r) {
    std::cout << "variant,beta,spacing,particles,status,l2,h1\n";
    for (const auto& row : r.rows) {
        std::cout << to_string(row.variant) << ',' << row.beta << ',' << row.spacing << ',' << row.particles << ','
                  << (row.status == RunStatus::Completed ? "completed" : "instability_stop") << ',' << row.l2 << ','
                  << row.h1 << '\n';
    }
    for (const auto& f : r.fits) {
        std::cout << "slopes " << to_string(f.variant) << " beta=" << f.beta << ": L2 " << f.l2_slope << ", H1 "
                  << f.h1_slope << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Total-Lagrangian SPH solver for large-strain solid dynamics"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_dir;
    int threads = 0;
    std::uint64_t seed = 0;
    app.add_option("--out-dir", out_dir, "Output directory (overrides the config)");
    app.add_option("--threads", threads, "Worker threads (0 keeps the runtime default)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", seed, "Seed for lattice jitter");

    std::string config_arg;
    auto* run_cmd = app.add_subcommand("run", "Run one case");
    run_cmd->add_option("config", config_arg, "Config file or built-in name")->required();
    auto* conv_cmd = app.add_subcommand("convergence", "Swinging-plate spacing/beta sweep with norm slopes");
    conv_cmd->add_option("config", config_arg, "Config file or built-in name")->required();
    auto* grad_cmd = app.add_subcommand("grad1d", "1D deformation-gradient estimator study");
    grad_cmd->add_option("config", config_arg, "Config file or built-in name")->required();
    auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a config");
    validate_cmd->add_option("config", config_arg, "Config file or built-in name")->required();
    auto* cases_cmd = app.add_subcommand("cases", "List built-in cases");
    std::string write_dir;
    cases_cmd->add_option("--write", write_dir, "Also write every built-in config into this directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        if (*cases_cmd) {
            for (auto id : all_cases()) {
                const auto quick = builtin_config(id, Preset::Quick);
                const auto paper = builtin_config(id, Preset::Paper);
                std::cout << to_string(id) << "  dim=" << quick.dim << "  quick spacing=" << quick.spacing
                          << "  paper spacing=" << paper.spacing << "  paper end_time=" << paper.end_time << '\n';
                if (!write_dir.empty()) {
                    std::filesystem::create_directories(write_dir);
                    save_config(quick, std::filesystem::path(write_dir) / builtin_file_name(id, Preset::Quick));
                    save_config(paper, std::filesystem::path(write_dir) / builtin_file_name(id, Preset::Paper));
                }
            }
            return kExitOk;
        }

        const CaseConfig config = resolve_config(config_arg);
        RunOptions options;
        options.out_dir = out_dir;
        options.seed = seed;

        if (*validate_cmd) {
            std::cout << "ok: " << to_string(config.id) << " (" << to_string(config.preset) << ")\n";
            return kExitOk;
        }
        if (*grad_cmd) {
            const auto r = run_grad1d(config, options);
            std::cout << "linear field max deviation: improved " << r.linear_improved_max_deviation << ", naive "
                      << r.linear_naive_max_deviation << ", standard " << r.linear_standard_max_deviation << '\n';
            std::cout << "field,spacing,rmse_standard,rmse_improved_first,rmse_improved_zeroth,rmse_naive\n";
            for (const auto& row : r.rows) {
                std::cout << row.field << ',' << row.spacing << ',' << row.rmse_standard << ','
                          << row.rmse_improved_first << ',' << row.rmse_improved_zeroth << ',' << row.rmse_naive
                          << '\n';
            }
            return kExitOk;
        }
        if (*conv_cmd) {
            const auto r = run_convergence(config, options);
            print_fits(r);
            for (const auto& row : r.rows) {
                if (row.status != RunStatus::Completed) return kExitInstability;
            }
            return kExitOk;
        }

        const auto result = run_case(config, options);
        std::cout << report_json(config, result).dump(2) << '\n';
        return result.report.status == RunStatus::Completed ? kExitOk : kExitInstability;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
}
