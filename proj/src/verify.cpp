// Oracle suites: operator algebra, generator, stationary state, weak drive, bounds, splitting

#include "wavemix/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "wavemix/units.hpp"

namespace wavemix {

namespace {

double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

RateSet random_rates(std::mt19937_64& rng)
{
    std::array<double, 6> v{};
    for (double& r : v) r = units::from_mhz(log_uniform(rng, 1.0, 50.0));
    return RateSet::from_array(v);
}

std::string format(const char* fmt, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b, c);
    return buf;
}

SuiteResult sigma_algebra()
{
    double worst = 0.0;
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j)
            for (int k = 1; k <= 3; ++k)
                for (int l = 1; l <= 3; ++l) {
                    const Operator3 expected = j == k ? sigma(i, l) : Operator3::Zero();
                    worst = std::max(worst, (sigma(i, j) * sigma(k, l) - expected).cwiseAbs().maxCoeff());
                }
    return {"sigma-algebra", worst == 0.0, format("81 products, max error %.1e", worst)};
}

SuiteResult trace_preservation(const VerifyOptions& options, std::mt19937_64& rng)
{
    const int samples = options.quick ? 100 : 1000;
    const ModelOptions model{HamiltonianMode::corrected, options.mutation};
    double worst = 0.0;
    for (int n = 0; n < samples; ++n) {
        const RandomConfiguration cfg = random_configuration(rng);
        const Superoperator L = build_liouvillian(cfg.drive, cfg.rates, model);
        const Operator3 rho = random_density_matrix(rng);
        const Operator3 d = unflatten(L * flatten(rho));
        worst = std::max(worst, std::abs(d.trace()));
    }
    return {"trace-preservation", worst <= 1e-12,
            format("%.0f generators, max |Tr L rho| = %.1e (tol 1e-12)", samples, worst)};
}

SuiteResult liouvillian_action(const VerifyOptions& options, std::mt19937_64& rng)
{
    const int samples = options.quick ? 100 : 1000;
    const ModelOptions model{HamiltonianMode::corrected, options.mutation};
    double worst = 0.0;
    for (int n = 0; n < samples; ++n) {
        const RandomConfiguration cfg = random_configuration(rng);
        const Superoperator L = build_liouvillian(cfg.drive, cfg.rates, model);
        const Operator3 rho = random_density_matrix(rng);
        const Operator3 direct = master_equation_rhs(build_hamiltonian(cfg.drive), rho, cfg.rates,
                                                     options.mutation);
        worst = std::max(worst, (unflatten(L * flatten(rho)) - direct).cwiseAbs().maxCoeff());
    }
    return {"liouvillian-action", worst <= 1e-12,
            format("%.0f random points, max |L rho - (-i[H, rho] + D[rho])| = %.1e (tol 1e-12)", samples, worst)};
}

SuiteResult steady_vs_evolve(const VerifyOptions& options, std::mt19937_64& rng)
{
    const int samples = options.quick ? 8 : 50;
    const ModelOptions model{HamiltonianMode::corrected, options.mutation};
    double worst = 0.0;
    double worst_eig = 1.0;
    bool states_ok = true;
    std::string failure;
    for (int n = 0; n < samples && failure.empty(); ++n) {
        const RandomConfiguration cfg = random_configuration(rng, true);
        try {
            const Superoperator L = build_liouvillian(cfg.drive, cfg.rates, model);
            const DensityMatrix ss = steady_state(L);
            const double t = 30.0 / min_nonzero_rate(cfg.rates);
            const Operator3 evolved = time_evolve(DensityMatrix::ground().matrix(), L, t, t / 100.0);
            worst = std::max(worst, (ss.matrix() - evolved).cwiseAbs().maxCoeff());
            const StateCheck chk = check_state(ss.matrix());
            states_ok = states_ok && chk.ok();
            worst_eig = std::min(worst_eig, chk.min_eigenvalue);
        } catch (const std::exception& e) {
            failure = e.what();
        }
    }
    if (!failure.empty()) return {"steady-vs-evolve", false, "solver failure: " + failure};
    return {"steady-vs-evolve", worst <= 1e-6 && states_ok,
            format("%.0f configurations, max |rho_ss - rho(30/min rate)| = %.1e (tol 1e-6), "
                   "min eigenvalue %.1e",
                   samples, worst, worst_eig)};
}

SuiteResult weak_drive(const VerifyOptions& options)
{
    const RateSet rates = RateSet::reference_extracted();
    const ModelOptions model{HamiltonianMode::corrected, options.mutation};
    std::ostringstream detail;
    bool ok = true;
    try {
        for (Scheme s : {Scheme::A, Scheme::B, Scheme::C}) {
            const Complex coarse = weak_drive_ratio(s, rates, 1e-2, model);
            const Complex fine = weak_drive_ratio(s, rates, 1e-3, model);
            const double drift = std::abs(std::abs(coarse) / std::abs(fine) - 1.0);

            // log-log slope of nu against each drive over one decade
            const double g = std::min({rates.gamma21, rates.gamma32, rates.gamma31});
            double worst_slope_error = 0.0;
            for (int which = 0; which < 2; ++which) {
                auto nu = [&](double rabi) {
                    DriveScheme d{s, 1e-2 * g, 1e-2 * g, 0.0, 0.0};
                    (which == 0 ? d.rabi_first : d.rabi_second) = rabi;
                    return coherent_emission(steady_state(build_liouvillian(d, rates, model)), d, rates)
                        .photon_rate;
                };
                const double slope = std::log10(nu(1e-2 * g) / nu(1e-3 * g));
                worst_slope_error = std::max(worst_slope_error, std::abs(slope - 2.0));
            }
            const Complex kappa = calibrate_weak_drive_prefactor(s, rates, model);
            ok = ok && drift < 5e-3 && worst_slope_error <= 0.02;
            detail << to_string(s) << ": kappa " << kappa.real() << (kappa.imag() < 0 ? "-" : "+")
                   << std::abs(kappa.imag()) << "i, ratio drift " << drift << ", slope error "
                   << worst_slope_error << "; ";
        }
    } catch (const std::exception& e) {
        return {"weak-drive", false, std::string("solver failure: ") + e.what()};
    }
    return {"weak-drive", ok, detail.str()};
}

SuiteResult coherence_bound(const VerifyOptions& options)
{
    const RateSet rates = RateSet::reference_extracted();
    const int points = options.quick ? 41 : 201;
    const DetuningGrid grid = DetuningGrid::symmetric(units::from_mhz(100.0), points);
    ScanOptions scan;
    scan.jobs = options.jobs;
    scan.model.mutation = options.mutation;
    double worst = 0.0;
    std::size_t errors = 0;
    for (Scheme s : {Scheme::A, Scheme::B, Scheme::C}) {
        const DriveScheme drive{s, units::from_mhz(30.0), units::from_mhz(30.0), 0.0, 0.0};
        const EmissionMap map = run_scan(drive, rates, grid, scan);
        errors += map.errors.size();
        for (Eigen::Index k = 0; k < map.sigma.size(); ++k)
            if (!std::isnan(map.sigma(k).real())) worst = std::max(worst, std::abs(map.sigma(k)));
    }
    return {"coherence-bound", errors == 0 && worst <= 0.5 + 1e-9,
            format("3 scans of %.0f^2 cells, max |sigma| = %.6f (bound 0.5), failed cells %.0f", points,
                   worst, static_cast<double>(errors))};
}

SuiteResult autler_townes(const VerifyOptions& options)
{
    const RateSet rates = narrow_line_rates();
    const int points = options.quick ? 101 : 201;
    const DetuningGrid grid = DetuningGrid::symmetric(units::from_mhz(100.0), points);
    ScanOptions scan;
    scan.jobs = options.jobs;
    scan.model.mutation = options.mutation;
    const double strong = units::from_mhz(50.0);
    const double weak = units::from_mhz(5.0);
    try {
        const EmissionMap first = run_scan({Scheme::A, strong, weak, 0.0, 0.0}, rates, grid, scan);
        const EmissionMap second = run_scan({Scheme::A, weak, strong, 0.0, 0.0}, rates, grid, scan);
        const auto axis_first = split_axis(first);
        const auto axis_second = split_axis(second);
        if (!axis_first || !axis_second) return {"autler-townes", false, "no split detected"};
        const double separation = find_splitting(first, *axis_first);
        const double rel = std::abs(separation / strong - 1.0);
        const bool rotated = *axis_first == SplitAxis::axis2 && *axis_second == SplitAxis::axis1;
        return {"autler-townes", rel <= 0.1 && rotated,
                format("separation %.2f MHz for Omega13 = 50 MHz (%.1f%%), ", units::to_mhz(separation), 100.0 * rel) +
                    (rotated ? "pattern rotated on swap" : "pattern not rotated on swap")};
    } catch (const std::exception& e) {
        return {"autler-townes", false, e.what()};
    }
}

} // namespace

RandomConfiguration random_configuration(std::mt19937_64& rng, bool completely_positive)
{
    RandomConfiguration cfg;
    cfg.rates = random_rates(rng);
    while (completely_positive && !cfg.rates.completely_positive()) cfg.rates = random_rates(rng);
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_real_distribution<double> detuning(-100.0, 100.0);
    cfg.drive.scheme = static_cast<Scheme>(pick(rng));
    cfg.drive.rabi_first = units::from_mhz(log_uniform(rng, 0.1, 100.0));
    cfg.drive.rabi_second = units::from_mhz(log_uniform(rng, 0.1, 100.0));
    cfg.drive.detuning_first = units::from_mhz(detuning(rng));
    cfg.drive.detuning_second = units::from_mhz(detuning(rng));
    return cfg;
}

Operator3 random_density_matrix(std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Operator3 a;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = Complex(n(rng), n(rng));
    const Operator3 rho = a * a.adjoint();
    return rho / rho.trace().real();
}

RateSet narrow_line_rates()
{
    return RateSet::from_mhz(2.0, 2.0, 2.0, 4.0, 2.0, 3.0);
}

std::vector<SuiteResult> run_verification(const VerifyOptions& options)
{
    std::mt19937_64 rng(options.seed);
    std::vector<std::function<SuiteResult()>> suites{
        [] { return sigma_algebra(); },
        [&] { return trace_preservation(options, rng); },
        [&] { return liouvillian_action(options, rng); },
        [&] { return steady_vs_evolve(options, rng); },
        [&] { return weak_drive(options); },
        [&] { return coherence_bound(options); },
        [&] { return autler_townes(options); },
    };
    std::vector<SuiteResult> out;
    for (auto& suite : suites) {
        const auto t0 = std::chrono::steady_clock::now();
        SuiteResult r = suite();
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace wavemix
