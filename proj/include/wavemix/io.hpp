// Configuration files, map CSV/JSON/PGM serialization, fit reports
//
// Config files are JSON. Frequencies at this boundary are linear: MHz for
// rates, Rabi amplitudes and detunings, GHz for transition frequencies.

#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wavemix/fit.hpp"

namespace wavemix {

// Bad config or data file. line is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& file, int line, const std::string& field, const std::string& message);

    const std::string& file() const { return file_; }
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    std::string file_;
    int line_;
    std::string field_;
};

struct SyntheticNoise {
    double gain{1.0};
    double noise_rel{0.0};  // std of the multiplicative Gaussian factor
    std::uint64_t seed{1};
};

struct ScanConfig {
    DriveScheme drive;
    RateSet rates;
    DetuningGrid grid;
    ScanOptions options;
    double failure_budget{1e-3};  // fraction of cells
    std::string name{"map"};
    std::optional<SyntheticNoise> synthetic;
};

// Accepts a scan config or a map sidecar (whose "config" member is used).
ScanConfig parse_scan_config(const std::string& text, const std::string& file = "<config>");
ScanConfig load_scan_config(const std::filesystem::path& path);

// Every physical input in linear units, in the schema parse_scan_config reads.
nlohmann::json to_json(const ScanConfig& config);

struct FitDatasetSpec {
    std::filesystem::path csv;
    Scheme scheme{Scheme::C};
    double rabi_first_mhz{0.0};
    double rabi_second_mhz{0.0};
};

struct FitConfig {
    std::vector<FitDatasetSpec> datasets;
    RateSet initial_rates;
    FitOptions options;
    ScanOptions scan;
    std::string name{"fit"};
};

// Relative csv paths resolve against base_dir.
FitConfig parse_fit_config(const std::string& text, const std::string& file = "<config>",
                           const std::filesystem::path& base_dir = {});
FitConfig load_fit_config(const std::filesystem::path& path);

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

void write_map_csv(const std::filesystem::path& path, const EmissionMap& map,
                   const Eigen::MatrixXd& values);
void write_map_csv(const std::filesystem::path& path, const EmissionMap& map);

struct CsvMap {
    DetuningGrid grid;
    Eigen::MatrixXd values;
    std::vector<std::string> meta;
};

// Throws ConfigError on schema mismatch.
CsvMap read_map_csv(const std::filesystem::path& path);

nlohmann::json map_sidecar(const ScanConfig& config, const EmissionMap& map);

// 8-bit binary PGM, axis2 horizontal, axis1 increasing upwards. Missing cells are black.
void write_pgm(const std::filesystem::path& path, const Eigen::MatrixXd& values, bool log_scale);

std::string fnv1a_hex(const std::string& bytes);

nlohmann::json fit_report(const FitConfig& config, const FitProblem& problem, const FitResult& result,
                          const std::string& config_hash);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace wavemix
