// Coherent emission observables and the weak-drive product formula

#pragma once

#include "wavemix/model.hpp"

namespace wavemix {

// Stationary coherent output on one transition. sigma = <sigma_lower,upper>
// = rho_upper,lower; photon_rate = (Gamma / 2) |sigma|^2 in 1/us.
struct EmissionSample {
    Complex sigma{0.0, 0.0};
    double photon_rate{0.0};
    Transition transition{Transition::t21};

    // Narrow-peak power P = hbar omega nu in watts, omega in rad/us.
    double power_watts(double omega) const;
};

EmissionSample coherent_emission(const DensityMatrix& rho_ss, const DriveScheme& drive,
                                 const RateSet& rates);

// Same read-out for an arbitrary transition.
EmissionSample coherent_emission(const DensityMatrix& rho_ss, Transition transition,
                                 const RateSet& rates);

// Complex voltage amplitude at x = 0 such that |V|^2 / (2 Z0) = P. Volts;
// omega in rad/us, line impedance in ohms.
Complex emitted_voltage(const EmissionSample& sample, const RateSet& rates, double omega,
                        double line_impedance = 50.0);

// lambda_mn = gamma_mn - i delta_mn, with delta_mn = -delta_nm.
struct WeakDriveFactors {
    Complex lambda_first;
    Complex lambda_second;
};

WeakDriveFactors weak_drive_factors(const DriveScheme& drive, const RateSet& rates);

// Product formula (Omega_ik / lambda_ik)(Omega_kj / lambda_kj) for the emission
// transition i-j through the intermediate level k, times the prefactor kappa.
Complex weak_drive_sigma(const DriveScheme& drive, const RateSet& rates,
                         Complex kappa = Complex(1.0, 0.0));

// Prefactors at the reference extracted rates, zero detuning, corrected frame.
// Produced by calibrate_weak_drive_prefactor and frozen here.
Complex reference_weak_drive_prefactor(Scheme scheme);

// Ratio full steady-state coherence / product formula at rabi = fraction *
// min(gamma) for both drives, zero detuning.
Complex weak_drive_ratio(Scheme scheme, const RateSet& rates, double fraction,
                         const ModelOptions& options = {});

// Richardson extrapolation of weak_drive_ratio to zero drive from the points
// fraction = 1e-2 and 1e-3 (the correction is quadratic in the drive).
Complex calibrate_weak_drive_prefactor(Scheme scheme, const RateSet& rates,
                                       const ModelOptions& options = {});

} // namespace wavemix
