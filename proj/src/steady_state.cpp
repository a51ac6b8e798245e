// Trace-row replacement solve and adaptive RK oracle

#include "wavemix/steady_state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/numeric/odeint.hpp>

namespace wavemix {

std::string_view to_string(SolverErrorKind kind)
{
    switch (kind) {
    case SolverErrorKind::degenerate_steady_state: return "DegenerateSteadyState";
    case SolverErrorKind::non_convergent: return "NonConvergent";
    case SolverErrorKind::non_physical_state: return "NonPhysicalState";
    case SolverErrorKind::step_underflow: return "StepUnderflow";
    }
    return "?";
}

double relative_residual(const Superoperator& L, const Operator3& rho)
{
    const double scale = L.cwiseAbs().maxCoeff();
    const double r = (L * flatten(rho)).cwiseAbs().maxCoeff();
    return scale > 0.0 ? r / scale : r;
}

DensityMatrix steady_state(const Superoperator& L, const SteadyStateOptions& options)
{
    const int trace_row = flat_index(0, 0);
    Superoperator A = L;
    A.row(trace_row).setZero();
    for (int k = 0; k < 3; ++k) A(trace_row, flat_index(k, k)) = 1.0;
    Vector9 b = Vector9::Zero();
    b(trace_row) = 1.0;

    Eigen::FullPivLU<Superoperator> lu(A);
    lu.setThreshold(options.rank_threshold);
    if (lu.rank() < 9) {
        std::ostringstream msg;
        msg << "steady state is not unique: constrained system has rank " << lu.rank()
            << " of 9 (null space of L has dimension " << 9 - lu.rank() + 1 << ")";
        throw SolverError(SolverErrorKind::degenerate_steady_state, msg.str());
    }

    Vector9 x = lu.solve(b);
    for (int k = 0; k < options.refinement_steps; ++k) {
        x += lu.solve(b - A * x);
    }

    Operator3 rho = unflatten(x);
    rho = 0.5 * (rho + rho.adjoint());

    const double residual = relative_residual(L, rho);
    if (!(residual <= options.residual_tolerance)) {
        std::ostringstream msg;
        msg << "steady-state residual " << residual << " exceeds " << options.residual_tolerance;
        throw SolverError(SolverErrorKind::non_convergent, msg.str());
    }

    const StateCheck check = check_state(rho);
    const bool valid = options.positivity == PositivityCheck::enforce
                           ? check.ok()
                           : check.hermitian() && check.unit_trace();
    if (!valid) {
        std::ostringstream msg;
        msg << "steady state is not a valid density matrix (min eigenvalue "
            << check.min_eigenvalue << ", trace error " << check.trace_error << ")";
        throw SolverError(SolverErrorKind::non_physical_state, msg.str());
    }
    return DensityMatrix(rho, PositivityCheck::record);
}

Operator3 steady_state_svd(const Superoperator& L)
{
    Eigen::JacobiSVD<Superoperator> svd(L, Eigen::ComputeFullV);
    const Vector9 v = svd.matrixV().col(8);
    Operator3 rho = unflatten(v);
    rho /= rho.trace();
    return rho;
}

int null_space_dimension(const Superoperator& L, double threshold)
{
    Eigen::JacobiSVD<Superoperator> svd(L);
    const auto& s = svd.singularValues();
    if (s(0) == 0.0) return 9;
    int count = 0;
    for (int k = 0; k < 9; ++k)
        if (s(k) <= threshold * s(0)) ++count;
    return count;
}

double min_nonzero_rate(const RateSet& rates)
{
    double m = std::numeric_limits<double>::infinity();
    for (double r : rates.as_array())
        if (r > 0.0) m = std::min(m, r);
    return std::isfinite(m) ? m : 0.0;
}

Operator3 time_evolve(const Operator3& rho0, const Superoperator& L, double t_final,
                      double dt_max, const TimeEvolveOptions& options, TimeEvolveStats* stats)
{
    namespace odeint = boost::numeric::odeint;
    using State = std::array<Complex, 9>;

    if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be positive");
    if (!(dt_max > 0.0)) throw std::invalid_argument("dt_max must be positive");

    State y;
    const Vector9 v0 = flatten(rho0);
    std::copy(v0.data(), v0.data() + 9, y.begin());

    auto rhs = [&L](const State& x, State& dxdt, double /*t*/) {
        Eigen::Map<const Vector9> xv(x.data());
        Eigen::Map<Vector9> dv(dxdt.data());
        dv.noalias() = L * xv;
    };

    auto stepper = odeint::make_controlled(options.abs_tolerance, options.rel_tolerance,
                                           odeint::runge_kutta_dopri5<State>());

    const Complex trace0 = rho0.trace();
    TimeEvolveStats local;
    double t = 0.0;
    double dt = std::min(dt_max, t_final / 100.0);
    const double dt_min = options.min_step_fraction * t_final;

    while (t < t_final) {
        double step = std::min(dt, t_final - t);
        const double t_before = t;
        const auto result = stepper.try_step(rhs, y, t, step);
        if (result == odeint::success) {
            ++local.accepted_steps;
            const Complex tr = y[0] + y[4] + y[8];
            local.max_trace_drift = std::max(local.max_trace_drift, std::abs(tr - trace0));
            dt = std::min(step, dt_max);
        } else {
            ++local.rejected_steps;
            dt = step;
        }
        if (t == t_before && dt < dt_min) {
            std::ostringstream msg;
            msg << "step size " << dt << " fell below " << dt_min << " at t = " << t;
            throw SolverError(SolverErrorKind::step_underflow, msg.str());
        }
    }

    if (stats) *stats = local;
    Eigen::Map<const Vector9> yv(y.data());
    return unflatten(yv);
}

} // namespace wavemix
