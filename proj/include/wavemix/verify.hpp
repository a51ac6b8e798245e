// Built-in oracle suites run by `wavemix verify`

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wavemix/scan.hpp"

namespace wavemix {

// A random driven configuration: rates log-uniform in [1, 50] MHz, Rabi
// amplitudes log-uniform in [0.1, 100] MHz, detunings uniform in +-100 MHz.
struct RandomConfiguration {
    DriveScheme drive;
    RateSet rates;
};

// With completely_positive set, rate sets whose coherences decay too slowly
// for a physical Lindblad generator are redrawn.
RandomConfiguration random_configuration(std::mt19937_64& rng, bool completely_positive = false);

// Random full-rank density matrix A A^dagger / Tr(A A^dagger), A complex Gaussian.
Operator3 random_density_matrix(std::mt19937_64& rng);

// Narrow lines (MHz): Gamma21 2, gamma21 2, Gamma32 2, gamma32 4, Gamma31 2,
// gamma31 3. Resolves a 50 MHz dressed-state doublet that the reference
// rates wash out.
RateSet narrow_line_rates();

struct SuiteResult {
    std::string name;
    bool passed{false};
    std::string detail;
    double seconds{0.0};
};

struct VerifyOptions {
    bool quick{false};
    Mutation mutation{Mutation::none};
    std::uint64_t seed{20240917};
    int jobs{1};
};

std::vector<SuiteResult> run_verification(const VerifyOptions& options = {});

} // namespace wavemix
