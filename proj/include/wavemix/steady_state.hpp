// Stationary solution of the master equation and a time-integration oracle

#pragma once

#include <stdexcept>
#include <string>

#include "wavemix/model.hpp"

namespace wavemix {

enum class SolverErrorKind {
    degenerate_steady_state,
    non_convergent,
    non_physical_state,
    step_underflow,
};

std::string_view to_string(SolverErrorKind kind);

class SolverError : public std::runtime_error {
public:
    SolverError(SolverErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    SolverErrorKind kind() const { return kind_; }

private:
    SolverErrorKind kind_;
};

struct SteadyStateOptions {
    // Residual bound relative to max |L_ij|.
    double residual_tolerance{1e-10};
    int refinement_steps{2};
    // Pivot threshold relative to the largest pivot for the rank estimate.
    double rank_threshold{1e-12};
    // enforce: a negative eigenvalue below -1e-9 raises non_physical_state.
    PositivityCheck positivity{PositivityCheck::record};
};

// Solves L vec(rho) = 0 with Tr rho = 1 by replacing the rho_11 row with the
// trace row. Throws SolverError (degenerate_steady_state, non_convergent, and
// non_physical_state when positivity is enforced).
DensityMatrix steady_state(const Superoperator& L, const SteadyStateOptions& options = {});

// Null space of L via SVD, normalised to unit trace. Debug path only.
Operator3 steady_state_svd(const Superoperator& L);

// max_k |(L v)_k| / max |L_ij|
double relative_residual(const Superoperator& L, const Operator3& rho);

// Singular values below threshold * largest, i.e. the estimated null-space dimension.
int null_space_dimension(const Superoperator& L, double threshold = 1e-10);

struct TimeEvolveOptions {
    double abs_tolerance{1e-11};
    double rel_tolerance{1e-11};
    // A step below min_step_fraction * t_final raises step_underflow.
    double min_step_fraction{1e-14};
};

struct TimeEvolveStats {
    long accepted_steps{0};
    long rejected_steps{0};
    double max_trace_drift{0.0};
};

// Integrates d vec(rho)/dt = L vec(rho) from t = 0 to t_final with an adaptive
// Dormand-Prince 5(4) scheme, steps capped at dt_max. Throws std::invalid_argument
// for t_final <= 0 and SolverError(step_underflow).
Operator3 time_evolve(const Operator3& rho0, const Superoperator& L, double t_final,
                      double dt_max, const TimeEvolveOptions& options = {},
                      TimeEvolveStats* stats = nullptr);

// Smallest nonzero rate; zero if all rates vanish.
double min_nonzero_rate(const RateSet& rates);

} // namespace wavemix
