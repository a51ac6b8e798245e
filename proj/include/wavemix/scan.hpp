// Two-dimensional detuning sweeps and splitting diagnostics

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wavemix/emission.hpp"
#include "wavemix/steady_state.hpp"

namespace wavemix {

// Uniform axis of detunings in rad/us.
struct Axis {
    double min{0.0};
    double max{0.0};
    int points{2};

    double value(int k) const;
    double step() const { return (max - min) / (points - 1); }
    // Index of the point closest to zero detuning.
    int nearest_to_zero() const;
};

// axis1 sweeps the first drive's detuning, axis2 the second's.
struct DetuningGrid {
    Axis axis1;
    Axis axis2;

    // Throws std::invalid_argument for fewer than 2 points or non-finite ranges.
    void validate() const;

    // 201 x 201 points over +-100 MHz per axis.
    static DetuningGrid symmetric(double half_range, int points = 201);
};

struct CellError {
    int i{0};
    int j{0};
    SolverErrorKind kind{SolverErrorKind::non_convergent};
    std::string reason;
};

struct ScanOptions {
    int jobs{1};
    ModelOptions model;
    SteadyStateOptions solver;
};

struct ScanMeta {
    DriveScheme drive; // detunings unused
    RateSet rates;
    ScanOptions options;
    std::string code_version;
};

// values(i, j) is the photon rate (1/us) at axis1 point i, axis2 point j.
// Failed cells hold NaN and have an entry in errors.
struct EmissionMap {
    DetuningGrid grid;
    Eigen::MatrixXd values;
    Eigen::MatrixXcd sigma;
    std::vector<CellError> errors;
    ScanMeta meta;
    // Cells whose steady state has an eigenvalue below -1e-9, and the lowest one.
    int nonpositive_cells{0};
    double worst_min_eigenvalue{0.0};

    bool missing(int i, int j) const;
    double max_value() const;
};

DriveScheme drive_at(const DriveScheme& base, double detuning_first, double detuning_second);

// Steady state and emission at one parameter point. Throws SolverError.
EmissionSample evaluate_point(const DriveScheme& drive, const RateSet& rates,
                              const ScanOptions& options = {});

// Each cell is independent; with jobs > 1 rows are distributed over worker
// threads writing into disjoint slots.
EmissionMap run_scan(const DriveScheme& base, const RateSet& rates, const DetuningGrid& grid,
                     const ScanOptions& options = {});

enum class SplitAxis { axis1, axis2 };

class NoSplitDetected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Peak {
    double position{0.0};
    double height{0.0};
};

// Local maxima of a uniformly sampled profile above floor_fraction of its
// maximum, refined by a three-point parabola, sorted by height.
std::vector<Peak> find_peaks(const std::vector<double>& profile, const Axis& axis,
                             double floor_fraction = 0.1);

// Separation (rad/us) of the two highest maxima of the profile along `axis`,
// taken on the cut where the other drive is resonant. Throws NoSplitDetected.
double find_splitting(const EmissionMap& map, SplitAxis axis);

// The axis whose resonant cut shows a split with the brighter secondary peak;
// nullopt when neither cut is split.
std::optional<SplitAxis> split_axis(const EmissionMap& map);

struct RidgeReport {
    bool detected{false};        // contrast >= threshold
    bool aligned{false};         // cut maxima on one diagonal within two grid steps
    double offset{0.0};          // mean delta1 - delta2 of the cut maxima, rad/us
    double contrast{0.0};        // weakest cut maximum / median map value
    double offset_spread{0.0};   // std of the ridge offsets, rad/us
    int cuts{0};
};

// Looks for a bright line delta1 - delta2 = const. Every anti-diagonal cut
// (delta1 + delta2 = const) through the central half of the map is searched
// for its maximum; the ridge is detected when each of those maxima exceeds
// `contrast_threshold` times the median map value. Whether the maxima share
// one diagonal is reported separately.
RidgeReport detect_diagonal_ridge(const EmissionMap& map, double contrast_threshold = 3.0);

} // namespace wavemix
