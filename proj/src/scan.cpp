// Detuning sweeps, peak finding, ridge detection

#include "wavemix/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace wavemix {

double Axis::value(int k) const
{
    if (k == points - 1) return max;
    return min + (max - min) * static_cast<double>(k) / static_cast<double>(points - 1);
}

int Axis::nearest_to_zero() const
{
    int best = 0;
    for (int k = 1; k < points; ++k)
        if (std::abs(value(k)) < std::abs(value(best))) best = k;
    return best;
}

void DetuningGrid::validate() const
{
    for (const Axis* a : {&axis1, &axis2}) {
        if (a->points < 2) throw std::invalid_argument("grid axes need at least 2 points");
        if (!std::isfinite(a->min) || !std::isfinite(a->max) || !(a->max > a->min)) {
            throw std::invalid_argument("grid axis range must be finite with max > min");
        }
    }
}

DetuningGrid DetuningGrid::symmetric(double half_range, int points)
{
    return {{-half_range, half_range, points}, {-half_range, half_range, points}};
}

bool EmissionMap::missing(int i, int j) const
{
    return std::isnan(values(i, j));
}

double EmissionMap::max_value() const
{
    double m = 0.0;
    for (Eigen::Index k = 0; k < values.size(); ++k)
        if (!std::isnan(values(k))) m = std::max(m, values(k));
    return m;
}

DriveScheme drive_at(const DriveScheme& base, double detuning_first, double detuning_second)
{
    DriveScheme d = base;
    d.detuning_first = detuning_first;
    d.detuning_second = detuning_second;
    return d;
}

EmissionSample evaluate_point(const DriveScheme& drive, const RateSet& rates,
                              const ScanOptions& options)
{
    const Superoperator L = build_liouvillian(drive, rates, options.model);
    return coherent_emission(steady_state(L, options.solver), drive, rates);
}

EmissionMap run_scan(const DriveScheme& base, const RateSet& rates, const DetuningGrid& grid,
                     const ScanOptions& options)
{
    base.validate();
    rates.validate();
    grid.validate();

    const int n1 = grid.axis1.points;
    const int n2 = grid.axis2.points;

    EmissionMap map;
    map.grid = grid;
    map.values.setZero(n1, n2);
    map.sigma.setZero(n1, n2);
    map.meta = {base, rates, options, WAVEMIX_VERSION};

    std::vector<std::vector<CellError>> row_errors(static_cast<std::size_t>(n1));
    Eigen::MatrixXd min_eigenvalues = Eigen::MatrixXd::Zero(n1, n2);

    auto compute_row = [&](int i) {
        const double d1 = grid.axis1.value(i);
        for (int j = 0; j < n2; ++j) {
            const DriveScheme drive = drive_at(base, d1, grid.axis2.value(j));
            try {
                const Superoperator L = build_liouvillian(drive, rates, options.model);
                const DensityMatrix rho = steady_state(L, options.solver);
                const EmissionSample s = coherent_emission(rho, drive, rates);
                min_eigenvalues(i, j) = rho.min_eigenvalue();
                map.values(i, j) = s.photon_rate;
                map.sigma(i, j) = s.sigma;
            } catch (const SolverError& e) {
                map.values(i, j) = std::numeric_limits<double>::quiet_NaN();
                map.sigma(i, j) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
                row_errors[static_cast<std::size_t>(i)].push_back({i, j, e.kind(), e.what()});
            }
        }
    };

    const int jobs = std::clamp(options.jobs, 1, n1);
    if (jobs == 1) {
        for (int i = 0; i < n1; ++i) compute_row(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::jthread> workers;
        workers.reserve(static_cast<std::size_t>(jobs));
        for (int w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (int i = next.fetch_add(1); i < n1; i = next.fetch_add(1)) compute_row(i);
            });
        }
    }

    for (auto& errs : row_errors)
        map.errors.insert(map.errors.end(), errs.begin(), errs.end());
    map.worst_min_eigenvalue = std::min(0.0, min_eigenvalues.minCoeff());
    map.nonpositive_cells =
        static_cast<int>((min_eigenvalues.array() < StateCheck::positivity_tolerance).count());
    return map;
}

std::vector<Peak> find_peaks(const std::vector<double>& profile, const Axis& axis,
                             double floor_fraction)
{
    const int n = static_cast<int>(profile.size());
    double top = 0.0;
    for (double v : profile)
        if (!std::isnan(v)) top = std::max(top, v);

    std::vector<Peak> peaks;
    if (top <= 0.0) return peaks;
    for (int k = 1; k + 1 < n; ++k) {
        const double l = profile[k - 1];
        const double c = profile[k];
        const double r = profile[k + 1];
        if (std::isnan(l) || std::isnan(c) || std::isnan(r)) continue;
        if (!(c > l && c >= r) || c < floor_fraction * top) continue;

        // vertex of the parabola through the three samples
        double shift = 0.0;
        const double curvature = l - 2.0 * c + r;
        if (curvature < 0.0) shift = 0.5 * (l - r) / curvature;
        const double height = c - 0.25 * (l - r) * shift;
        peaks.push_back({axis.value(k) + shift * axis.step(), height});
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const Peak& a, const Peak& b) { return a.height > b.height; });
    return peaks;
}

namespace {

std::vector<double> resonant_cut(const EmissionMap& map, SplitAxis axis)
{
    std::vector<double> cut;
    if (axis == SplitAxis::axis1) {
        const int j0 = map.grid.axis2.nearest_to_zero();
        for (int i = 0; i < map.grid.axis1.points; ++i) cut.push_back(map.values(i, j0));
    } else {
        const int i0 = map.grid.axis1.nearest_to_zero();
        for (int j = 0; j < map.grid.axis2.points; ++j) cut.push_back(map.values(i0, j));
    }
    return cut;
}

const Axis& axis_of(const EmissionMap& map, SplitAxis axis)
{
    return axis == SplitAxis::axis1 ? map.grid.axis1 : map.grid.axis2;
}

} // namespace

double find_splitting(const EmissionMap& map, SplitAxis axis)
{
    const auto peaks = find_peaks(resonant_cut(map, axis), axis_of(map, axis));
    if (peaks.size() < 2) {
        std::ostringstream msg;
        msg << "found " << peaks.size() << " local maxima above 10% of the maximum along axis "
            << (axis == SplitAxis::axis1 ? 1 : 2);
        throw NoSplitDetected(msg.str());
    }
    return std::abs(peaks[0].position - peaks[1].position);
}

std::optional<SplitAxis> split_axis(const EmissionMap& map)
{
    // The cut through the dressed doublet crosses both bright ridges; a cut
    // that only grazes their tails also shows two maxima, but faint ones.
    double best_height = 0.0;
    std::optional<SplitAxis> best;
    for (SplitAxis a : {SplitAxis::axis1, SplitAxis::axis2}) {
        const auto peaks = find_peaks(resonant_cut(map, a), axis_of(map, a));
        if (peaks.size() < 2) continue;
        if (peaks[1].height > best_height) {
            best_height = peaks[1].height;
            best = a;
        }
    }
    return best;
}

RidgeReport detect_diagonal_ridge(const EmissionMap& map, double contrast_threshold)
{
    const Axis& a1 = map.grid.axis1;
    const Axis& a2 = map.grid.axis2;
    if (std::abs(a1.step() - a2.step()) > 1e-9 * std::abs(a1.step())) {
        throw std::invalid_argument("ridge detection needs equal grid steps on both axes");
    }

    std::vector<double> finite;
    finite.reserve(static_cast<std::size_t>(map.values.size()));
    for (Eigen::Index k = 0; k < map.values.size(); ++k)
        if (!std::isnan(map.values(k))) finite.push_back(map.values(k));
    RidgeReport report;
    if (finite.empty()) return report;
    const auto mid = finite.begin() + static_cast<std::ptrdiff_t>(finite.size() / 2);
    std::nth_element(finite.begin(), mid, finite.end());
    const double median = *mid;

    const int n1 = a1.points;
    const int n2 = a2.points;
    const int centre = (n1 + n2 - 2) / 2;
    const int half_span = std::min(n1, n2) / 4;

    std::vector<double> offsets;
    double weakest = std::numeric_limits<double>::infinity();
    for (int s = centre - half_span; s <= centre + half_span; ++s) {
        double best = -1.0;
        int best_i = -1;
        for (int i = std::max(0, s - (n2 - 1)); i <= std::min(n1 - 1, s); ++i) {
            const double v = map.values(i, s - i);
            if (!std::isnan(v) && v > best) {
                best = v;
                best_i = i;
            }
        }
        if (best_i < 0) continue;
        offsets.push_back(a1.value(best_i) - a2.value(s - best_i));
        weakest = std::min(weakest, best);
    }
    report.cuts = static_cast<int>(offsets.size());
    if (offsets.empty()) return report;

    const double mean_offset =
        std::accumulate(offsets.begin(), offsets.end(), 0.0) / static_cast<double>(offsets.size());
    double var = 0.0;
    for (double o : offsets) var += (o - mean_offset) * (o - mean_offset);
    report.offset = mean_offset;
    report.offset_spread = std::sqrt(var / static_cast<double>(offsets.size()));
    report.contrast = median > 0.0 ? weakest / median : std::numeric_limits<double>::infinity();
    report.detected = report.contrast >= contrast_threshold;
    report.aligned = report.offset_spread <= 2.0 * a1.step();
    return report;
}

} // namespace wavemix
