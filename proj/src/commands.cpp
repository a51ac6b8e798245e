// Batch commands behind the wavemix executable

#include "wavemix/commands.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "wavemix/io.hpp"
#include "wavemix/units.hpp"
#include "wavemix/verify.hpp"

namespace wavemix {

namespace {

Eigen::MatrixXd apply_synthetic(const Eigen::MatrixXd& values, const SyntheticNoise& noise)
{
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd out(values.rows(), values.cols());
    // row-major draw order, matching the CSV
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        for (Eigen::Index j = 0; j < values.cols(); ++j)
            out(i, j) = noise.gain * values(i, j) * (1.0 + noise.noise_rel * n(rng));
    return out;
}

} // namespace

int cmd_scan(const ScanCommand& cmd, std::ostream& log)
{
    ScanConfig config;
    try {
        config = load_scan_config(cmd.config);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
    if (cmd.verbatim_hamiltonian) config.options.model.hamiltonian = HamiltonianMode::verbatim;
    config.options.jobs = std::max(1, cmd.jobs);

    for (const auto& w : config.rates.validity_warnings()) log << "warning: " << w << "\n";
    for (const auto& w : config.rates.complete_positivity_warnings()) log << "warning: " << w << "\n";

    const EmissionMap map = run_scan(config.drive, config.rates, config.grid, config.options);
    const Eigen::MatrixXd values = config.synthetic ? apply_synthetic(map.values, *config.synthetic) : map.values;

    std::filesystem::create_directories(cmd.out);
    const auto stem = cmd.out / config.name;
    write_map_csv(stem.string() + ".csv", map, values);
    nlohmann::json sidecar = map_sidecar(config, map);
    sidecar["files"] = {{"csv", config.name + ".csv"}};
    if (cmd.heatmap) {
        write_pgm(stem.string() + ".pgm", values, cmd.log_heatmap);
        sidecar["files"]["pgm"] = config.name + ".pgm";
        sidecar["files"]["pgm_scale"] = cmd.log_heatmap ? "log10, 6 decades" : "linear";
    }
    write_text_file(stem.string() + ".json", sidecar.dump(2) + "\n");

    const double cells = static_cast<double>(map.values.size());
    const double failed = static_cast<double>(map.errors.size());
    log << "scan " << to_string(config.drive.scheme) << " (" << to_string(config.options.model.hamiltonian)
        << "): " << map.values.rows() << "x" << map.values.cols() << " cells, max photon rate "
        << map.max_value() << " /us, failed cells " << map.errors.size() << "\n";
    if (map.nonpositive_cells > 0) {
        log << "note: " << map.nonpositive_cells << " cells have steady states with eigenvalues below -1e-9"
            << " (lowest " << map.worst_min_eigenvalue << ")\n";
    }
    if (failed > config.failure_budget * cells) {
        log << "error: " << map.errors.size() << " failed cells exceed the budget of "
            << config.failure_budget * 100.0 << "% of " << map.values.size() << "\n";
        return exit_failure_budget;
    }
    return exit_ok;
}

int cmd_fit(const FitCommand& cmd, std::ostream& log)
{
    FitConfig config;
    std::string config_text;
    FitProblem problem;
    try {
        config_text = read_text_file(cmd.config);
        config = parse_fit_config(config_text, cmd.config.string(), cmd.config.parent_path());
        if (!cmd.data.empty()) {
            if (cmd.data.size() != config.datasets.size()) {
                throw ConfigError(cmd.config.string(), 0, "datasets",
                                  std::to_string(cmd.data.size()) + " data files given for " +
                                      std::to_string(config.datasets.size()) + " datasets");
            }
            for (std::size_t k = 0; k < cmd.data.size(); ++k) config.datasets[k].csv = cmd.data[k];
        }
        if (cmd.verbatim_hamiltonian) config.scan.model.hamiltonian = HamiltonianMode::verbatim;
        config.scan.jobs = std::max(1, cmd.jobs);
        problem.scan = config.scan;
        for (const FitDatasetSpec& spec : config.datasets) {
            CsvMap csv = read_map_csv(spec.csv);
            Dataset d;
            d.drive = {spec.scheme, units::from_mhz(spec.rabi_first_mhz), units::from_mhz(spec.rabi_second_mhz),
                       0.0, 0.0};
            d.grid = csv.grid;
            d.data = std::move(csv.values);
            problem.datasets.push_back(std::move(d));
        }
        problem.validate();
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::invalid_argument& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config_error;
    }

    const FitResult result = fit_rates(problem, config.initial_rates, config.options);
    const nlohmann::json report = fit_report(config, problem, result, fnv1a_hex(config_text));
    std::filesystem::create_directories(cmd.out);
    write_text_file(cmd.out / (config.name + ".json"), report.dump(2) + "\n");

    log << "fit: " << to_string(result.status) << " after " << result.evaluations << " evaluations, residual "
        << result.residual << "\n";
    const auto r = result.rates.as_array();
    for (std::size_t k = 0; k < 6; ++k)
        log << "  " << std::left << std::setw(8) << rate_names[k] << units::to_mhz(r[k]) << " MHz\n";
    for (Transition t : problem.fitted_transitions())
        log << "  G" << to_string(t) << "     " << result.gains[t] << "\n";

    if (result.status == FitStatus::max_evaluations_exceeded) {
        log << "error: evaluation budget of " << config.options.max_evaluations
            << " exhausted; partial result written\n";
        return exit_max_evaluations;
    }
    return exit_ok;
}

int cmd_verify(const VerifyCommand& cmd, std::ostream& log)
{
    if (cmd.print_kappa) {
        const RateSet rates = RateSet::reference_extracted();
        log << std::setprecision(17);
        for (Scheme s : {Scheme::A, Scheme::B, Scheme::C}) {
            const Complex k = calibrate_weak_drive_prefactor(s, rates);
            log << "kappa " << to_string(s) << " " << k.real() << " " << k.imag() << "\n";
        }
        return exit_ok;
    }

    VerifyOptions options;
    options.quick = cmd.quick;
    options.jobs = std::max(1, cmd.jobs);
    options.mutation = cmd.mutation;
    const auto results = run_verification(options);
    bool ok = true;
    for (const SuiteResult& r : results) {
        ok = ok && r.passed;
        log << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(20) << r.name << std::right
            << std::fixed << std::setprecision(2) << std::setw(7) << r.seconds << " s  "
            << std::defaultfloat << std::setprecision(6) << r.detail << "\n";
    }
    log << (ok ? "all suites passed" : "verification failed") << "\n";
    return ok ? exit_ok : exit_verify_failed;
}

} // namespace wavemix
