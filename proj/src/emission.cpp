// Coherent emission read-out and weak-drive approximation

#include "wavemix/emission.hpp"

#include <algorithm>
#include <cmath>

#include "wavemix/steady_state.hpp"
#include "wavemix/units.hpp"

namespace wavemix {

namespace {

constexpr Complex I{0.0, 1.0};

} // namespace

double EmissionSample::power_watts(double omega) const
{
    return units::hbar * units::to_per_second(omega) * photon_rate * 1.0e6;
}

EmissionSample coherent_emission(const DensityMatrix& rho_ss, Transition transition,
                                 const RateSet& rates)
{
    const auto [upper, lower] = levels(transition);
    EmissionSample s;
    s.transition = transition;
    s.sigma = rho_ss.expectation_sigma(lower, upper);
    s.photon_rate = 0.5 * rates.relaxation(transition) * std::norm(s.sigma);
    return s;
}

EmissionSample coherent_emission(const DensityMatrix& rho_ss, const DriveScheme& drive,
                                 const RateSet& rates)
{
    return coherent_emission(rho_ss, emission_transition(drive.scheme), rates);
}

Complex emitted_voltage(const EmissionSample& sample, const RateSet& rates, double omega,
                        double line_impedance)
{
    const double gamma_per_s = units::to_per_second(rates.relaxation(sample.transition));
    const double amplitude =
        std::sqrt(units::hbar * units::to_per_second(omega) * gamma_per_s * line_impedance);
    return I * amplitude * sample.sigma;
}

WeakDriveFactors weak_drive_factors(const DriveScheme& drive, const RateSet& rates)
{
    const double d1 = drive.detuning_first;
    const double d2 = drive.detuning_second;
    switch (drive.scheme) {
    case Scheme::A: // <sigma_12> via level 3: lambda_13, lambda_32
        return {rates.gamma31 + I * d1, rates.gamma32 - I * d2};
    case Scheme::B: // <sigma_23> via level 1: lambda_13, lambda_21
        return {rates.gamma31 + I * d1, rates.gamma21 - I * d2};
    case Scheme::C: // <sigma_13> via level 2: lambda_12, lambda_23
        return {rates.gamma21 + I * d1, rates.gamma32 + I * d2};
    }
    return {};
}

Complex weak_drive_sigma(const DriveScheme& drive, const RateSet& rates, Complex kappa)
{
    const WeakDriveFactors f = weak_drive_factors(drive, rates);
    return kappa * (drive.rabi_first / f.lambda_first) * (drive.rabi_second / f.lambda_second);
}

Complex reference_weak_drive_prefactor(Scheme scheme)
{
    // wavemix verify --print-kappa (reference rates, corrected frame)
    switch (scheme) {
    case Scheme::A: return {-1.3125000000000000, 0.0};
    case Scheme::B: return {0.28273809523809523, 0.0};
    case Scheme::C: return {-0.26582278481012656, 0.0};
    }
    return {};
}

Complex weak_drive_ratio(Scheme scheme, const RateSet& rates, double fraction,
                         const ModelOptions& options)
{
    const double gamma_min = std::min({rates.gamma21, rates.gamma32, rates.gamma31});
    const double rabi = fraction * gamma_min;
    const DriveScheme drive{scheme, rabi, rabi, 0.0, 0.0};
    const DensityMatrix rho = steady_state(build_liouvillian(drive, rates, options));
    const EmissionSample s = coherent_emission(rho, drive, rates);
    return s.sigma / weak_drive_sigma(drive, rates);
}

Complex calibrate_weak_drive_prefactor(Scheme scheme, const RateSet& rates,
                                       const ModelOptions& options)
{
    const Complex coarse = weak_drive_ratio(scheme, rates, 1e-2, options);
    const Complex fine = weak_drive_ratio(scheme, rates, 1e-3, options);
    return (100.0 * fine - coarse) / 99.0;
}

} // namespace wavemix
