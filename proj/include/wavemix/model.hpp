// Driven cyclic three-level atom: Hamiltonians, dissipator, Liouvillian
//
// Basis ordering is |1>, |2>, |3> (ground, middle, top). Indices in the public
// API are 1-based to match the usual sigma_ij = |i><j| notation. All
// frequencies are angular, in rad/us (see units.hpp).

#pragma once

#include <array>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace wavemix {

using Complex = std::complex<double>;
using Operator3 = Eigen::Matrix3cd;
using Superoperator = Eigen::Matrix<Complex, 9, 9>;
using Vector9 = Eigen::Matrix<Complex, 9, 1>;

// Atomic transitions, named upper-lower.
enum class Transition { t21, t32, t31 };

struct TransitionLevels {
    int upper;
    int lower;
};

constexpr TransitionLevels levels(Transition t)
{
    switch (t) {
    case Transition::t21: return {2, 1};
    case Transition::t32: return {3, 2};
    case Transition::t31: return {3, 1};
    }
    return {0, 0};
}

std::string_view to_string(Transition t);

struct AtomSpectrum {
    double omega21{0.0};
    double omega32{0.0};
    double omega31{0.0};

    // Throws std::invalid_argument unless all three are positive and
    // omega31 = omega21 + omega32 to 1e-9 relative.
    static AtomSpectrum from_ghz(double f21, double f32, double f31);
    static AtomSpectrum reference_device();

    double frequency(Transition t) const;
};

struct RateSet {
    // Relaxation rates, upper -> lower.
    double Gamma21{0.0};
    double Gamma32{0.0};
    double Gamma31{0.0};
    // Off-diagonal damping; gamma_ij = gamma_ji, only i > j stored.
    double gamma21{0.0};
    double gamma32{0.0};
    double gamma31{0.0};

    static RateSet from_mhz(double G21, double g21, double G32, double g32, double G31, double g31);

    // Gamma21 = 8, gamma21 = 8, Gamma32 = 38, gamma32 = 42, Gamma31 = 41,
    // gamma31 = 39.5 MHz (times 2 pi).
    static RateSet reference_extracted();

    double relaxation(Transition t) const;
    double dephasing(Transition t) const;

    // Order: Gamma21, gamma21, Gamma32, gamma32, Gamma31, gamma31.
    std::array<double, 6> as_array() const;
    static RateSet from_array(const std::array<double, 6>& values);

    // Throws std::invalid_argument for negative or non-finite rates.
    void validate() const;

    // One message per transition with gamma_ij < Gamma_ij / 2. Not an error.
    std::vector<std::string> validity_warnings() const;

    // One message per coherence damped more slowly than half the total decay
    // out of its two levels, else one per violated triangle condition on the
    // excess dephasing. Empty exactly when the generator is completely
    // positive; otherwise steady states can have small negative eigenvalues.
    std::vector<std::string> complete_positivity_warnings() const;
    bool completely_positive() const { return complete_positivity_warnings().empty(); }
};

inline constexpr std::array<const char*, 6> rate_names{
    "Gamma21", "gamma21", "Gamma32", "gamma32", "Gamma31", "gamma31"};

// Pumping configurations. Drives are listed as (first, second):
//   A: (1<->3, 2<->3), emission on 2->1 at the difference frequency
//   B: (1<->3, 1<->2), emission on 3->2 at the difference frequency
//   C: (1<->2, 2<->3), emission on 3->1 at the sum frequency
enum class Scheme { A, B, C };

std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view s);

std::array<Transition, 2> driven_transitions(Scheme s);
Transition emission_transition(Scheme s);

// Rabi amplitudes are real and non-negative (drive phases fixed to zero).
// Detunings follow delta = omega_drive - omega_transition, with the
// transition frequency taken upper minus lower.
struct DriveScheme {
    Scheme scheme{Scheme::C};
    double rabi_first{0.0};
    double rabi_second{0.0};
    double detuning_first{0.0};
    double detuning_second{0.0};

    void validate() const;
};

// corrected: diagonal derived in the frame co-rotating with both drives and
// scheme B couples its first drive to 1<->3. verbatim: the printed operators,
// with delta_23 read as -delta_32.
enum class HamiltonianMode { corrected, verbatim };

std::string_view to_string(HamiltonianMode m);
HamiltonianMode hamiltonian_mode_from_string(std::string_view s);

// Deliberate model defects used as negative controls by the verifier.
enum class Mutation { none, dissipator_sign };

struct ModelOptions {
    HamiltonianMode hamiltonian{HamiltonianMode::corrected};
    Mutation mutation{Mutation::none};
};

// |i><j|, 1-based.
Operator3 sigma(int i, int j);

// Row-major flattening: rho(i, j) -> entry 3 i + j (0-based).
constexpr int flat_index(int row, int col) { return 3 * row + col; }
Vector9 flatten(const Operator3& rho);
Operator3 unflatten(const Vector9& v);

// H / hbar in rad/us.
Operator3 build_hamiltonian(const DriveScheme& drive,
                            HamiltonianMode mode = HamiltonianMode::corrected);

// Trace-preserving dissipator L[rho]. Accepts any 3x3 operator (linear map).
Operator3 dissipator(const Operator3& rho, const RateSet& rates,
                     Mutation mutation = Mutation::none);

// Matrix of rho -> -i[H, rho] + L[rho] on the row-major flattening.
Superoperator build_liouvillian(const DriveScheme& drive, const RateSet& rates,
                                const ModelOptions& options = {});

// Direct evaluation of -i[H, rho] + L[rho].
Operator3 master_equation_rhs(const Operator3& hamiltonian, const Operator3& rho,
                              const RateSet& rates, Mutation mutation = Mutation::none);

struct StateCheck {
    double hermiticity_error{0.0}; // max |rho - rho^dagger|
    double trace_error{0.0};       // |Tr rho - 1|
    double min_eigenvalue{0.0};

    static constexpr double hermiticity_tolerance = 1e-12;
    static constexpr double trace_tolerance = 1e-10;
    static constexpr double positivity_tolerance = -1e-9;

    bool hermitian() const { return hermiticity_error <= hermiticity_tolerance; }
    bool unit_trace() const { return trace_error <= trace_tolerance; }
    bool positive() const { return min_eigenvalue >= positivity_tolerance; }
    bool ok() const { return hermitian() && unit_trace() && positive(); }
};

StateCheck check_state(const Operator3& rho);

enum class PositivityCheck { enforce, record };

// Hermitian, unit-trace 3x3 matrix. Positivity is enforced by default; with
// PositivityCheck::record a negative eigenvalue is kept and reported, which is
// what a rate set violating complete positivity legitimately produces.
class DensityMatrix {
public:
    // Throws std::invalid_argument if the matrix fails check_state.
    explicit DensityMatrix(const Operator3& rho, PositivityCheck positivity = PositivityCheck::enforce);

    static DensityMatrix ground();
    static DensityMatrix basis_state(int level);

    const Operator3& matrix() const { return rho_; }

    // rho_ij, 1-based.
    Complex element(int i, int j) const { return rho_(i - 1, j - 1); }

    // <sigma_ij> = Tr(rho |i><j|) = rho_ji.
    Complex expectation_sigma(int i, int j) const { return element(j, i); }

    double population(int level) const { return element(level, level).real(); }

    double min_eigenvalue() const { return min_eigenvalue_; }
    bool positive() const { return min_eigenvalue_ >= StateCheck::positivity_tolerance; }

private:
    Operator3 rho_;
    double min_eigenvalue_{0.0};
};

} // namespace wavemix
