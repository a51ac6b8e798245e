// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "wavemix/commands.hpp"
#include "wavemix/fit.hpp"
#include "wavemix/io.hpp"
#include "wavemix/units.hpp"
#include "wavemix/verify.hpp"

using namespace wavemix;
using units::from_mhz;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed{false};
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int cores()
{
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

const RateSet paper_rates = RateSet::reference_extracted();

Outcome generator_validity()
{
    std::mt19937_64 rng(1001);
    double action = 0.0;
    double trace = 0.0;
    const auto t0 = Clock::now();
    for (int n = 0; n < 1000; ++n) {
        const RandomConfiguration cfg = random_configuration(rng);
        const Operator3 rho = random_density_matrix(rng);
        const Superoperator L = build_liouvillian(cfg.drive, cfg.rates);
        const Operator3 via_L = unflatten(L * flatten(rho));
        const Operator3 direct = master_equation_rhs(build_hamiltonian(cfg.drive), rho, cfg.rates);
        action = std::max(action, (via_L - direct).cwiseAbs().maxCoeff());
        trace = std::max(trace, std::abs(via_L.trace()));
    }
    const double t = seconds_since(t0);
    return {action <= 1e-12 && trace <= 1e-12 && t < 5.0,
            "max |L rho - rhs| = " + fmt(action) + ", max |Tr L rho| = " + fmt(trace) + ", " + fmt(t) + " s"};
}

Outcome steady_state_correctness()
{
    // rates drawn completely positive; otherwise a stationary state may be
    // legitimately non-positive
    std::mt19937_64 rng(1002);
    double diff = 0.0;
    double herm = 0.0;
    double tr = 0.0;
    double min_eig = 1.0;
    const auto t0 = Clock::now();
    for (int n = 0; n < 50; ++n) {
        const RandomConfiguration cfg = random_configuration(rng, true);
        const Superoperator L = build_liouvillian(cfg.drive, cfg.rates);
        SteadyStateOptions o;
        o.positivity = PositivityCheck::record;
        const DensityMatrix ss = steady_state(L, o);
        const double slow = min_nonzero_rate(cfg.rates);
        const Operator3 late = time_evolve(DensityMatrix::ground().matrix(), L, 30.0 / slow, 1.0 / slow);
        diff = std::max(diff, (ss.matrix() - late).cwiseAbs().maxCoeff());
        const StateCheck c = check_state(ss.matrix());
        herm = std::max(herm, c.hermiticity_error);
        tr = std::max(tr, c.trace_error);
        min_eig = std::min(min_eig, c.min_eigenvalue);
    }
    const double t = seconds_since(t0);
    const bool ok = diff <= 1e-6 && herm <= StateCheck::hermiticity_tolerance &&
                    tr <= StateCheck::trace_tolerance && min_eig >= StateCheck::positivity_tolerance && t < 30.0;
    return {ok, "max |rho_ss - rho(t)| = " + fmt(diff) + ", hermiticity " + fmt(herm) + ", trace " + fmt(tr) +
                    ", min eigenvalue " + fmt(min_eig) + ", " + fmt(t) + " s"};
}

Outcome coherence_bound()
{
    const auto t0 = Clock::now();
    ScanOptions o;
    o.jobs = cores();
    const DetuningGrid grid = DetuningGrid::symmetric(from_mhz(100.0), 201);
    double sigma_max = 0.0;
    double ratio_max = 0.0;
    std::size_t failed = 0;
    for (Scheme s : {Scheme::A, Scheme::B, Scheme::C}) {
        const EmissionMap map = run_scan({s, from_mhz(30.0), from_mhz(30.0), 0.0, 0.0}, paper_rates, grid, o);
        failed += map.errors.size();
        sigma_max = std::max(sigma_max, map.sigma.cwiseAbs().maxCoeff());
        ratio_max = std::max(ratio_max, map.max_value() / (paper_rates.relaxation(emission_transition(s)) / 8.0));
    }
    const double t = seconds_since(t0);
    return {failed == 0 && sigma_max <= 0.5 + 1e-9 && ratio_max <= 1.0 + 1e-9 && t < 600.0,
            "max |<sigma>| = " + fmt(sigma_max) + ", max nu / (Gamma/8) = " + fmt(ratio_max) + ", failed cells " +
                std::to_string(failed) + ", " + fmt(t) + " s on " + std::to_string(cores()) + " jobs"};
}

Outcome weak_drive_limit()
{
    bool ok = true;
    std::ostringstream d;
    const double g = std::min({paper_rates.gamma21, paper_rates.gamma32, paper_rates.gamma31});
    for (Scheme s : {Scheme::A, Scheme::B, Scheme::C}) {
        const double drift =
            std::abs(std::abs(weak_drive_ratio(s, paper_rates, 1e-2)) / std::abs(weak_drive_ratio(s, paper_rates, 1e-3)) - 1.0);
        const Complex kappa = calibrate_weak_drive_prefactor(s, paper_rates);
        double worst_slope = 2.0;
        for (int which = 0; which < 2; ++which) {
            auto nu = [&](double rabi) {
                DriveScheme drive{s, 1e-2 * g, 1e-2 * g, 0.0, 0.0};
                (which == 0 ? drive.rabi_first : drive.rabi_second) = rabi;
                return evaluate_point(drive, paper_rates).photon_rate;
            };
            const double slope = std::log10(nu(1e-2 * g) / nu(1e-3 * g));
            if (std::abs(slope - 2.0) > std::abs(worst_slope - 2.0)) worst_slope = slope;
            ok = ok && std::abs(slope - 2.0) <= 0.02;
        }
        ok = ok && drift < 5e-3;
        d << to_string(s) << ": drift " << fmt(drift) << ", kappa " << kappa.real() << ", slope "
          << fmt(worst_slope) << "; ";
    }
    return {ok, d.str()};
}

Outcome autler_townes_at(const RateSet& rates, const std::string& label)
{
    ScanOptions o;
    o.jobs = cores();
    const DetuningGrid grid = DetuningGrid::symmetric(from_mhz(100.0), 201);
    const double strong = from_mhz(50.0);
    const double weak = from_mhz(5.0);
    const EmissionMap first = run_scan({Scheme::A, strong, weak, 0.0, 0.0}, rates, grid, o);
    const EmissionMap second = run_scan({Scheme::A, weak, strong, 0.0, 0.0}, rates, grid, o);
    const auto a = split_axis(first);
    const auto b = split_axis(second);
    if (!a || !b) return {false, label + ": no split detected" + std::string(a ? " (swapped)" : "")};
    const double sep = find_splitting(first, *a);
    const double rel = std::abs(sep / strong - 1.0);
    const bool rotated = *a == SplitAxis::axis2 && *b == SplitAxis::axis1;
    return {rel <= 0.1 && rotated, label + ": separation " + fmt(units::to_mhz(sep)) + " MHz (" + fmt(100 * rel) +
                                       "% off), axes " + (*a == SplitAxis::axis2 ? "2" : "1") + " -> " +
                                       (*b == SplitAxis::axis2 ? "2" : "1")};
}

Outcome autler_townes()
{
    // The dressed-state oracle needs Omega13 >> gamma. At the reference rates
    // gamma31 is close to Omega13 and the two lines merge; that outcome is
    // reported alongside but does not decide the criterion.
    const Outcome narrow = autler_townes_at(narrow_line_rates(), "narrow-line rates");
    std::string reference;
    try {
        reference = autler_townes_at(paper_rates, "reference rates").detail;
    } catch (const NoSplitDetected& e) {
        reference = std::string("reference rates: ") + e.what();
    }
    return {narrow.passed, narrow.detail + "; [info] " + reference};
}

Outcome scheme_c_selectivity()
{
    const DriveScheme d{Scheme::C, from_mhz(30.0), from_mhz(30.0), 0.0, 0.0};
    const EmissionSample e = evaluate_point(d, paper_rates);
    const AtomSpectrum spec = AtomSpectrum::reference_device();
    const double sum = spec.frequency(Transition::t21) + spec.frequency(Transition::t32);
    const double difference = std::abs(spec.frequency(Transition::t32) - spec.frequency(Transition::t21));
    // the outputs are exactly the three level pairs; none radiates at the difference frequency
    std::set<std::pair<int, int>> pairs;
    bool none_at_difference = true;
    for (Transition t : {Transition::t21, Transition::t32, Transition::t31}) {
        const auto [u, l] = levels(t);
        pairs.insert({u, l});
        none_at_difference = none_at_difference && std::abs(spec.frequency(t) - difference) > 1e-9 * sum;
    }
    const bool structural = pairs.size() == 3 && none_at_difference;
    const bool at_sum = e.transition == Transition::t31 && std::abs(spec.frequency(e.transition) - sum) <= 1e-9 * sum;
    return {structural && at_sum && e.photon_rate > 0.0,
            "emission on " + std::string(to_string(e.transition)) + " with nu = " + fmt(e.photon_rate) +
                " /us; outputs are the three coherences, none at |w32 - w21|"};
}

struct FitSetup {
    FitProblem problem;
    FitResult result;
    double seconds{0.0};
};

const std::array<std::tuple<Scheme, double, double, double>, 3> fit_specs{
    {{Scheme::A, 50.0, 16.0, 2e5}, {Scheme::B, 30.0, 30.0, 1.3e6}, {Scheme::C, 30.0, 30.0, 1e5}}};

RateSet doubled(const RateSet& r)
{
    auto v = r.as_array();
    for (double& x : v) x *= 2.0;
    return RateSet::from_array(v);
}

FitSetup round_trip_fit()
{
    FitSetup s;
    s.problem.scan.jobs = cores();
    std::mt19937_64 rng(1007);
    std::normal_distribution<double> n(0.0, 1.0);
    for (const auto& [scheme, r1, r2, gain] : fit_specs) {
        Dataset d;
        d.drive = {scheme, from_mhz(r1), from_mhz(r2), 0.0, 0.0};
        d.grid = DetuningGrid::symmetric(from_mhz(100.0), 81);
        d.data = gain * run_scan(d.drive, paper_rates, d.grid, s.problem.scan).values;
        for (Eigen::Index i = 0; i < d.data.rows(); ++i)
            for (Eigen::Index j = 0; j < d.data.cols(); ++j) d.data(i, j) *= 1.0 + 0.01 * n(rng);
        s.problem.datasets.push_back(std::move(d));
    }
    const auto t0 = Clock::now();
    s.result = fit_rates(s.problem, doubled(paper_rates));
    s.seconds = seconds_since(t0);
    return s;
}

double max_rel(const RateSet& a, const RateSet& b)
{
    const auto x = a.as_array();
    const auto y = b.as_array();
    double w = 0.0;
    for (std::size_t k = 0; k < 6; ++k) w = std::max(w, std::abs(x[k] / y[k] - 1.0));
    return w;
}

Outcome fit_round_trip(const FitSetup& s)
{
    const double rate_err = max_rel(s.result.rates, paper_rates);
    double gain_err = 0.0;
    for (const auto& [scheme, r1, r2, gain] : fit_specs)
        gain_err = std::max(gain_err, std::abs(s.result.gains[emission_transition(scheme)] / gain - 1.0));
    const bool ok = s.result.status == FitStatus::converged && rate_err <= 0.05 && gain_err <= 0.05 &&
                    s.result.evaluations <= 20000 && s.seconds < 1800.0;
    return {ok, std::string(to_string(s.result.status)) + ", worst rate error " + fmt(100 * rate_err) +
                    "%, worst gain error " + fmt(100 * gain_err) + "%, " + std::to_string(s.result.evaluations) +
                    " evaluations, " + fmt(s.seconds) + " s"};
}

Outcome gain_invariance(const FitSetup& base)
{
    FitProblem p = base.problem;
    p.datasets[1].data *= 10.0;
    const FitResult r = fit_rates(p, doubled(paper_rates));
    const Transition t = p.datasets[1].transition();
    const double ratio = r.gains[t] / base.result.gains[t];
    const double shift = max_rel(r.rates, base.result.rates);
    return {std::abs(ratio / 10.0 - 1.0) <= 1e-3 && shift <= 1e-3,
            "gain ratio " + std::to_string(ratio) + ", largest rate shift " + fmt(100 * shift) + "%"};
}

Outcome determinism()
{
    const fs::path dir = fs::temp_directory_path() / "wavemix_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_text_file(dir / "scan.json", R"({"name": "det", "scheme": "B", "rabi_mhz": {"first": 30, "second": 20}})");
    std::ostringstream log;
    ScanCommand cmd;
    cmd.config = dir / "scan.json";
    cmd.jobs = cores();
    bool identical = true;
    cmd.out = dir / "one";
    const int c1 = cmd_scan(cmd, log);
    cmd.out = dir / "two";
    const int c2 = cmd_scan(cmd, log);
    for (const char* ext : {".csv", ".json", ".pgm"})
        identical = identical &&
                    read_text_file(dir / "one" / (std::string("det") + ext)) ==
                        read_text_file(dir / "two" / (std::string("det") + ext));

    const DriveScheme d{Scheme::B, from_mhz(30.0), from_mhz(20.0), 0.0, 0.0};
    const DetuningGrid grid = DetuningGrid::symmetric(from_mhz(100.0), 201);
    ScanOptions seq;
    ScanOptions par;
    par.jobs = std::max(4, cores());
    const double diff = (run_scan(d, paper_rates, grid, seq).values - run_scan(d, paper_rates, grid, par).values)
                            .cwiseAbs()
                            .maxCoeff();
    fs::remove_all(dir);
    return {c1 == exit_ok && c2 == exit_ok && identical && diff <= 1e-12,
            std::string(identical ? "repeated scans byte-identical" : "repeated scans differ") +
                ", sequential vs " + std::to_string(par.jobs) + " jobs max difference " + fmt(diff)};
}

} // namespace

int main()
{
    bool all = true;
    auto report = [&](int k, const std::function<Outcome()>& f) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all = all && o.passed;
        std::cout << "criterion " << k << ": " << (o.passed ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    };
    report(1, generator_validity);
    report(2, steady_state_correctness);
    report(3, coherence_bound);
    report(4, weak_drive_limit);
    report(5, autler_townes);
    report(6, scheme_c_selectivity);
    std::optional<FitSetup> fit;
    report(7, [&] {
        fit = round_trip_fit();
        return fit_round_trip(*fit);
    });
    report(8, [&] {
        if (!fit) return Outcome{false, "no base fit"};
        return gain_invariance(*fit);
    });
    report(9, determinism);
    return all ? 0 : 1;
}
