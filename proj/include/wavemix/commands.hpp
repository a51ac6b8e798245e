// scan / fit / verify entry points returning process exit codes

#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "wavemix/model.hpp"

namespace wavemix {

enum ExitCode : int {
    exit_ok = 0,
    exit_verify_failed = 1,
    exit_config_error = 2,
    exit_failure_budget = 3,
    exit_max_evaluations = 4,
};

struct ScanCommand {
    std::filesystem::path config;
    std::filesystem::path out{"."};
    int jobs{1};
    bool verbatim_hamiltonian{false};
    bool log_heatmap{false};
    bool heatmap{true};
};

// Writes <name>.csv, <name>.json and <name>.pgm into out.
int cmd_scan(const ScanCommand& cmd, std::ostream& log);

struct FitCommand {
    std::filesystem::path config;
    std::filesystem::path out{"."};
    // Replace the csv paths of the config's datasets, in order.
    std::vector<std::filesystem::path> data;
    int jobs{1};
    bool verbatim_hamiltonian{false};
};

// Writes <name>.json, also when the evaluation budget runs out.
int cmd_fit(const FitCommand& cmd, std::ostream& log);

struct VerifyCommand {
    bool quick{false};
    int jobs{1};
    Mutation mutation{Mutation::none};
    bool print_kappa{false};
};

int cmd_verify(const VerifyCommand& cmd, std::ostream& log);

} // namespace wavemix
