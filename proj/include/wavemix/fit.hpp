// Extraction of relaxation/dephasing rates and output-line gains from emission maps
//
// All rates and gains are optimised in log space. Gains enter the model
// linearly, so for any trial rate set the least-squares gains are obtained in
// closed form and the simplex search runs over the six rates only.

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wavemix/scan.hpp"

namespace wavemix {

// Multipliers from model photon rate (1/us) to instrument units.
struct CalibrationGains {
    std::array<double, 3> values{1.0, 1.0, 1.0}; // indexed by Transition

    double& operator[](Transition t) { return values[static_cast<std::size_t>(t)]; }
    double operator[](Transition t) const { return values[static_cast<std::size_t>(t)]; }
};

// One measured (or synthetic) map in arbitrary units. NaN cells are missing.
struct Dataset {
    DriveScheme drive; // Rabi amplitudes are known and fixed; detunings unused
    DetuningGrid grid;
    Eigen::MatrixXd data;

    Transition transition() const { return emission_transition(drive.scheme); }
};

struct FitProblem {
    std::vector<Dataset> datasets;
    ScanOptions scan;

    // Throws std::invalid_argument for an empty problem or mismatched shapes.
    void validate() const;

    // Emission transitions with at least one dataset, i.e. the fitted gains.
    std::vector<Transition> fitted_transitions() const;
};

struct ObjectiveValue {
    double cost{std::numeric_limits<double>::infinity()};
    // Empty unless a cell failed to solve (ModelEvaluationFailed).
    std::string failure;
};

// Sum over datasets of mean_cells((G nu_model - data)^2) / rms(data)^2.
// Missing cells are skipped. A solver failure gives +inf with diagnostics.
ObjectiveValue objective(const FitProblem& problem, const RateSet& rates,
                         const CalibrationGains& gains);

// Same cost with the gains replaced by their least-squares values for `rates`.
ObjectiveValue profiled_objective(const FitProblem& problem, const RateSet& rates,
                                  CalibrationGains* best_gains = nullptr);

struct FitOptions {
    long max_evaluations{20000};
    double cost_tolerance{1e-8};     // relative spread of costs over the simplex
    double simplex_tolerance{1e-6};  // simplex diameter in log space
    double absolute_cost_floor{1e-24};
    double initial_step{0.25};       // log space
    int restarts{2};
    std::uint64_t seed{1};
    bool confidence{true};
    double hessian_step{1e-3};
};

enum class FitStatus { converged, max_evaluations_exceeded };

std::string_view to_string(FitStatus s);

struct FitResult {
    RateSet rates;
    CalibrationGains gains;
    double residual{std::numeric_limits<double>::infinity()};
    // One-sigma relative half-widths from the local quadratic model of the
    // cost; +inf where the cost is flat in that direction, nullopt when not computed.
    std::optional<std::array<double, 6>> rate_half_widths;
    std::optional<CalibrationGains> gain_half_widths;
    long iterations{0};
    long evaluations{0};
    int restarts_used{0};
    FitStatus status{FitStatus::converged};
};

FitResult fit_rates(const FitProblem& problem, const RateSet& initial_rates,
                    const FitOptions& options = {});

} // namespace wavemix
