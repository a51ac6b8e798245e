// Hamiltonians, dissipator and Liouvillian of the driven three-level atom

#include "wavemix/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wavemix/units.hpp"

namespace wavemix {

namespace {

constexpr Complex I{0.0, 1.0};

bool finite_nonnegative(double x) { return std::isfinite(x) && x >= 0.0; }

} // namespace

std::string_view to_string(Transition t)
{
    switch (t) {
    case Transition::t21: return "21";
    case Transition::t32: return "32";
    case Transition::t31: return "31";
    }
    return "?";
}

AtomSpectrum AtomSpectrum::from_ghz(double f21, double f32, double f31)
{
    if (!(f21 > 0.0 && f32 > 0.0 && f31 > 0.0)) {
        throw std::invalid_argument("transition frequencies must be strictly positive");
    }
    if (std::abs(f31 - (f21 + f32)) > 1e-9 * f31) {
        std::ostringstream msg;
        msg << "atom is not cyclic: f31 = " << f31 << " GHz differs from f21 + f32 = "
            << f21 + f32 << " GHz";
        throw std::invalid_argument(msg.str());
    }
    return {units::from_ghz(f21), units::from_ghz(f32), units::from_ghz(f31)};
}

AtomSpectrum AtomSpectrum::reference_device()
{
    return from_ghz(6.48, 8.35, 14.83);
}

double AtomSpectrum::frequency(Transition t) const
{
    switch (t) {
    case Transition::t21: return omega21;
    case Transition::t32: return omega32;
    case Transition::t31: return omega31;
    }
    return 0.0;
}

RateSet RateSet::from_mhz(double G21, double g21, double G32, double g32, double G31, double g31)
{
    RateSet r{units::from_mhz(G21), units::from_mhz(G32), units::from_mhz(G31),
              units::from_mhz(g21), units::from_mhz(g32), units::from_mhz(g31)};
    r.validate();
    return r;
}

RateSet RateSet::reference_extracted()
{
    return from_mhz(8.0, 8.0, 38.0, 42.0, 41.0, 39.5);
}

double RateSet::relaxation(Transition t) const
{
    switch (t) {
    case Transition::t21: return Gamma21;
    case Transition::t32: return Gamma32;
    case Transition::t31: return Gamma31;
    }
    return 0.0;
}

double RateSet::dephasing(Transition t) const
{
    switch (t) {
    case Transition::t21: return gamma21;
    case Transition::t32: return gamma32;
    case Transition::t31: return gamma31;
    }
    return 0.0;
}

std::array<double, 6> RateSet::as_array() const
{
    return {Gamma21, gamma21, Gamma32, gamma32, Gamma31, gamma31};
}

RateSet RateSet::from_array(const std::array<double, 6>& v)
{
    return RateSet{v[0], v[2], v[4], v[1], v[3], v[5]};
}

void RateSet::validate() const
{
    const auto values = as_array();
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!finite_nonnegative(values[k])) {
            throw std::invalid_argument(std::string("rate ") + rate_names[k] +
                                        " must be finite and non-negative");
        }
    }
}

std::vector<std::string> RateSet::validity_warnings() const
{
    std::vector<std::string> warnings;
    for (Transition t : {Transition::t21, Transition::t32, Transition::t31}) {
        if (dephasing(t) < 0.5 * relaxation(t)) {
            std::ostringstream msg;
            msg << "gamma" << to_string(t) << " < Gamma" << to_string(t)
                << "/2: off-diagonal damping below the relaxation limit";
            warnings.push_back(msg.str());
        }
    }
    return warnings;
}

std::vector<std::string> RateSet::complete_positivity_warnings() const
{
    // total decay out of levels 1, 2, 3
    const std::array<double, 3> out{0.0, Gamma21, Gamma31 + Gamma32};
    std::vector<std::string> warnings;
    std::array<double, 3> pure{};  // excess dephasing, indexed by Transition
    for (Transition t : {Transition::t21, Transition::t32, Transition::t31}) {
        const auto [upper, lower] = levels(t);
        const double limit = 0.5 * (out[upper - 1] + out[lower - 1]);
        pure[static_cast<std::size_t>(t)] = dephasing(t) - limit;
        if (dephasing(t) < limit * (1.0 - 1e-12)) {
            std::ostringstream msg;
            msg << "gamma" << to_string(t) << " = " << units::to_mhz(dephasing(t))
                << " MHz is below the complete-positivity limit "
                << units::to_mhz(limit) << " MHz";
            warnings.push_back(msg.str());
        }
    }
    if (!warnings.empty()) return warnings;

    // Pure dephasing g_ij = (c_ii + c_jj) / 2 - c_ij needs a positive
    // semidefinite c, i.e. sqrt(g) must obey the triangle inequality.
    std::array<double, 3> d{};
    for (std::size_t k = 0; k < 3; ++k) d[k] = std::sqrt(std::max(0.0, pure[k]));
    const double scale = std::sqrt(std::max({dephasing(Transition::t21), dephasing(Transition::t32),
                                             dephasing(Transition::t31)}));
    for (std::size_t k = 0; k < 3; ++k) {
        const double others = d[(k + 1) % 3] + d[(k + 2) % 3];
        if (d[k] > others + 1e-12 * scale) {
            std::ostringstream msg;
            msg << "excess dephasing of coherence " << to_string(static_cast<Transition>(k)) << " ("
                << units::to_mhz(pure[k]) << " MHz) is not reachable from the other two ("
                << units::to_mhz(pure[(k + 1) % 3]) << ", " << units::to_mhz(pure[(k + 2) % 3])
                << " MHz): complete-positivity violated";
            warnings.push_back(msg.str());
        }
    }
    return warnings;
}

std::string_view to_string(Scheme s)
{
    switch (s) {
    case Scheme::A: return "A";
    case Scheme::B: return "B";
    case Scheme::C: return "C";
    }
    return "?";
}

Scheme scheme_from_string(std::string_view s)
{
    if (s == "A" || s == "a") return Scheme::A;
    if (s == "B" || s == "b") return Scheme::B;
    if (s == "C" || s == "c") return Scheme::C;
    throw std::invalid_argument("unknown scheme '" + std::string(s) + "' (expected A, B or C)");
}

std::array<Transition, 2> driven_transitions(Scheme s)
{
    switch (s) {
    case Scheme::A: return {Transition::t31, Transition::t32};
    case Scheme::B: return {Transition::t31, Transition::t21};
    case Scheme::C: return {Transition::t21, Transition::t32};
    }
    return {Transition::t21, Transition::t21};
}

Transition emission_transition(Scheme s)
{
    switch (s) {
    case Scheme::A: return Transition::t21;
    case Scheme::B: return Transition::t32;
    case Scheme::C: return Transition::t31;
    }
    return Transition::t21;
}

void DriveScheme::validate() const
{
    if (!finite_nonnegative(rabi_first) || !finite_nonnegative(rabi_second)) {
        throw std::invalid_argument("Rabi amplitudes must be finite and non-negative");
    }
    if (!std::isfinite(detuning_first) || !std::isfinite(detuning_second)) {
        throw std::invalid_argument("detunings must be finite");
    }
}

std::string_view to_string(HamiltonianMode m)
{
    return m == HamiltonianMode::corrected ? "corrected" : "verbatim";
}

HamiltonianMode hamiltonian_mode_from_string(std::string_view s)
{
    if (s == "corrected") return HamiltonianMode::corrected;
    if (s == "verbatim") return HamiltonianMode::verbatim;
    throw std::invalid_argument("unknown Hamiltonian mode '" + std::string(s) +
                                "' (expected corrected or verbatim)");
}

Operator3 sigma(int i, int j)
{
    if (i < 1 || i > 3 || j < 1 || j > 3) {
        throw std::out_of_range("sigma indices must be 1, 2 or 3");
    }
    Operator3 s = Operator3::Zero();
    s(i - 1, j - 1) = 1.0;
    return s;
}

Vector9 flatten(const Operator3& rho)
{
    Vector9 v;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) v(flat_index(r, c)) = rho(r, c);
    return v;
}

Operator3 unflatten(const Vector9& v)
{
    Operator3 rho;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rho(r, c) = v(flat_index(r, c));
    return rho;
}

Operator3 build_hamiltonian(const DriveScheme& drive, HamiltonianMode mode)
{
    const double d1 = drive.detuning_first;
    const double d2 = drive.detuning_second;
    const double half1 = 0.5 * drive.rabi_first;
    const double half2 = 0.5 * drive.rabi_second;
    const bool verbatim = mode == HamiltonianMode::verbatim;

    Operator3 h = Operator3::Zero();
    auto couple = [&h](int i, int j, double half_rabi) {
        h(i - 1, j - 1) -= half_rabi;
        h(j - 1, i - 1) -= half_rabi;
    };

    switch (drive.scheme) {
    case Scheme::A:
        // first = delta31, second = delta32; level 3 is the frame reference.
        h(0, 0) = verbatim ? -d1 : d1;
        h(1, 1) = d2;
        couple(1, 3, half1);
        couple(2, 3, half2);
        break;
    case Scheme::B:
        // first = delta31, second = delta21; level 1 is the frame reference.
        h(1, 1) = -d2;
        h(2, 2) = -d1;
        if (verbatim) couple(2, 3, half1);
        else couple(1, 3, half1);
        couple(1, 2, half2);
        break;
    case Scheme::C:
        // first = delta21, second = delta32; level 2 is the frame reference.
        h(0, 0) = verbatim ? -d1 : d1;
        h(2, 2) = -d2;
        couple(1, 2, half1);
        couple(2, 3, half2);
        break;
    }
    return h;
}

Operator3 dissipator(const Operator3& rho, const RateSet& rates, Mutation mutation)
{
    const Complex p2 = rho(1, 1);
    const Complex p3 = rho(2, 2);
    const double g32_sign = mutation == Mutation::dissipator_sign ? -1.0 : 1.0;

    Operator3 out;
    out(0, 0) = rates.Gamma31 * p3 + rates.Gamma21 * p2;
    out(1, 1) = g32_sign * rates.Gamma32 * p3 - rates.Gamma21 * p2;
    out(2, 2) = -(rates.Gamma31 + rates.Gamma32) * p3;

    out(0, 1) = -rates.gamma21 * rho(0, 1);
    out(1, 0) = -rates.gamma21 * rho(1, 0);
    out(1, 2) = -rates.gamma32 * rho(1, 2);
    out(2, 1) = -rates.gamma32 * rho(2, 1);
    out(0, 2) = -rates.gamma31 * rho(0, 2);
    out(2, 0) = -rates.gamma31 * rho(2, 0);
    return out;
}

Operator3 master_equation_rhs(const Operator3& hamiltonian, const Operator3& rho,
                              const RateSet& rates, Mutation mutation)
{
    return -I * (hamiltonian * rho - rho * hamiltonian) + dissipator(rho, rates, mutation);
}

Superoperator build_liouvillian(const DriveScheme& drive, const RateSet& rates,
                                const ModelOptions& options)
{
    const Operator3 h = build_hamiltonian(drive, options.hamiltonian);
    Superoperator L = Superoperator::Zero();

    // -i (H rho - rho H):  (H rho)_ij = H_ik rho_kj,  (rho H)_ij = rho_ik H_kj
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const int row = flat_index(i, j);
            for (int k = 0; k < 3; ++k) {
                L(row, flat_index(k, j)) += -I * h(i, k);
                L(row, flat_index(i, k)) += I * h(k, j);
            }
        }
    }

    const int p1 = flat_index(0, 0);
    const int p2 = flat_index(1, 1);
    const int p3 = flat_index(2, 2);
    const double g32_sign = options.mutation == Mutation::dissipator_sign ? -1.0 : 1.0;
    L(p1, p2) += rates.Gamma21;
    L(p1, p3) += rates.Gamma31;
    L(p2, p2) -= rates.Gamma21;
    L(p2, p3) += g32_sign * rates.Gamma32;
    L(p3, p3) -= rates.Gamma31 + rates.Gamma32;

    const std::array<std::array<double, 3>, 3> damping{{
        {0.0, rates.gamma21, rates.gamma31},
        {rates.gamma21, 0.0, rates.gamma32},
        {rates.gamma31, rates.gamma32, 0.0},
    }};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) L(flat_index(i, j), flat_index(i, j)) -= damping[i][j];
    return L;
}

StateCheck check_state(const Operator3& rho)
{
    StateCheck c;
    c.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    c.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
    const Operator3 herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator3> eig(herm, Eigen::EigenvaluesOnly);
    c.min_eigenvalue = eig.eigenvalues().minCoeff();
    return c;
}

DensityMatrix::DensityMatrix(const Operator3& rho, PositivityCheck positivity) : rho_(rho)
{
    const StateCheck c = check_state(rho);
    min_eigenvalue_ = c.min_eigenvalue;
    const bool valid = positivity == PositivityCheck::enforce
                           ? c.ok()
                           : c.hermitian() && c.unit_trace();
    if (!valid) {
        std::ostringstream msg;
        msg << "not a density matrix: hermiticity error " << c.hermiticity_error
            << ", trace error " << c.trace_error << ", min eigenvalue " << c.min_eigenvalue;
        throw std::invalid_argument(msg.str());
    }
}

DensityMatrix DensityMatrix::ground()
{
    return basis_state(1);
}

DensityMatrix DensityMatrix::basis_state(int level)
{
    return DensityMatrix(sigma(level, level));
}

} // namespace wavemix
