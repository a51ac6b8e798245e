// scan / fit / verify front-end

#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "wavemix/commands.hpp"

int main(int argc, char** argv)
{
    using namespace wavemix;

    CLI::App app{"Three-wave mixing on a cyclic three-level atom: emission maps, rate fits, self-checks"};
    app.set_version_flag("--version", std::string(WAVEMIX_VERSION));
    app.require_subcommand(1);

    const int cores = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    ScanCommand scan;
    scan.jobs = cores;
    bool no_heatmap = false;
    auto* scan_cmd = app.add_subcommand("scan", "Compute a 2-D emission map over both drive detunings");
    scan_cmd->add_option("--config", scan.config, "JSON scan config, or a map sidecar to reproduce")
        ->required()
        ->check(CLI::ExistingFile);
    scan_cmd->add_option("--out", scan.out, "Output directory")->capture_default_str();
    scan_cmd->add_option("--jobs", scan.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    scan_cmd->add_flag("--verbatim-hamiltonian", scan.verbatim_hamiltonian,
                       "Use the printed Hamiltonians instead of the corrected frame");
    scan_cmd->add_flag("--log-heatmap", scan.log_heatmap, "Log-scale the PGM heatmap");
    scan_cmd->add_flag("--no-heatmap", no_heatmap, "Skip the PGM heatmap");

    FitCommand fit;
    fit.jobs = cores;
    auto* fit_cmd = app.add_subcommand("fit", "Fit rates and output-line gains to measured maps");
    fit_cmd->add_option("--config", fit.config, "JSON fit config")->required()->check(CLI::ExistingFile);
    fit_cmd->add_option("data", fit.data, "Data CSVs replacing the config's dataset paths, in order");
    fit_cmd->add_option("--out", fit.out, "Output directory")->capture_default_str();
    fit_cmd->add_option("--jobs", fit.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    fit_cmd->add_flag("--verbatim-hamiltonian", fit.verbatim_hamiltonian,
                      "Use the printed Hamiltonians instead of the corrected frame");

    VerifyCommand verify;
    verify.jobs = cores;
    std::string mutate = "none";
    auto* verify_cmd = app.add_subcommand("verify", "Run the built-in oracle suites");
    verify_cmd->add_flag("--quick", verify.quick, "Reduced sample counts and grids");
    verify_cmd->add_option("--jobs", verify.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    verify_cmd->add_option("--mutate", mutate, "Inject a model defect (negative control)")
        ->check(CLI::IsMember({"none", "dissipator-sign"}))
        ->group("");
    verify_cmd->add_flag("--print-kappa", verify.print_kappa, "Print the weak-drive prefactors")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config_error;
    }

    try {
        if (*scan_cmd) {
            scan.heatmap = !no_heatmap;
            return cmd_scan(scan, std::cerr);
        }
        if (*fit_cmd) return cmd_fit(fit, std::cerr);
        verify.mutation = mutate == "dissipator-sign" ? Mutation::dissipator_sign : Mutation::none;
        return cmd_verify(verify, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config_error;
    }
}
