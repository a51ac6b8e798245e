// Profiled least-squares fit of rates and gains with a restarted Nelder-Mead simplex

#include "wavemix/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace wavemix {

namespace {

using Vec = Eigen::VectorXd;

struct DatasetWeights {
    double weight{0.0}; // 1 / (cells * rms^2)
    long cells{0};
};

DatasetWeights weights_of(const Dataset& d)
{
    DatasetWeights w;
    double sum_sq = 0.0;
    for (Eigen::Index k = 0; k < d.data.size(); ++k) {
        const double v = d.data(k);
        if (std::isnan(v)) continue;
        sum_sq += v * v;
        ++w.cells;
    }
    if (w.cells == 0 || sum_sq == 0.0) {
        w.weight = w.cells > 0 ? 1.0 / static_cast<double>(w.cells) : 0.0;
        return w;
    }
    // cells * rms^2 = sum of squares
    w.weight = 1.0 / sum_sq;
    return w;
}

struct ModelMaps {
    std::vector<Eigen::MatrixXd> values;
    std::string failure;
};

ModelMaps model_maps(const FitProblem& problem, const RateSet& rates)
{
    ModelMaps out;
    out.values.reserve(problem.datasets.size());
    for (std::size_t k = 0; k < problem.datasets.size(); ++k) {
        const Dataset& d = problem.datasets[k];
        EmissionMap map = run_scan(d.drive, rates, d.grid, problem.scan);
        if (!map.errors.empty() && out.failure.empty()) {
            std::ostringstream msg;
            msg << "ModelEvaluationFailed: dataset " << k << ", cell (" << map.errors.front().i
                << ", " << map.errors.front().j << "): " << map.errors.front().reason;
            out.failure = msg.str();
        }
        out.values.push_back(std::move(map.values));
    }
    return out;
}

double cost_with_gains(const FitProblem& problem, const ModelMaps& maps,
                       const CalibrationGains& gains)
{
    double total = 0.0;
    for (std::size_t k = 0; k < problem.datasets.size(); ++k) {
        const Dataset& d = problem.datasets[k];
        const DatasetWeights w = weights_of(d);
        const double g = gains[d.transition()];
        double sum = 0.0;
        for (Eigen::Index c = 0; c < d.data.size(); ++c) {
            const double v = d.data(c);
            if (std::isnan(v)) continue;
            const double r = g * maps.values[k](c) - v;
            sum += r * r;
        }
        total += w.weight * sum;
    }
    return total;
}

CalibrationGains closed_form_gains(const FitProblem& problem, const ModelMaps& maps)
{
    std::array<double, 3> num{};
    std::array<double, 3> den{};
    for (std::size_t k = 0; k < problem.datasets.size(); ++k) {
        const Dataset& d = problem.datasets[k];
        const double w = weights_of(d).weight;
        const auto t = static_cast<std::size_t>(d.transition());
        for (Eigen::Index c = 0; c < d.data.size(); ++c) {
            const double v = d.data(c);
            if (std::isnan(v)) continue;
            const double m = maps.values[k](c);
            num[t] += w * m * v;
            den[t] += w * m * m;
        }
    }
    CalibrationGains g;
    for (std::size_t t = 0; t < 3; ++t) {
        if (den[t] > 0.0) g.values[t] = std::max(num[t] / den[t], 1e-300);
    }
    return g;
}

RateSet rates_from_log(const Vec& x)
{
    std::array<double, 6> v{};
    for (int k = 0; k < 6; ++k) v[static_cast<std::size_t>(k)] = std::exp(x(k));
    return RateSet::from_array(v);
}

struct Vertex {
    Vec x;
    double f;
};

class CountedObjective {
public:
    CountedObjective(const FitProblem& problem, long budget) : problem_(problem), budget_(budget) {}

    double operator()(const Vec& x)
    {
        ++evaluations;
        return profiled_objective(problem_, rates_from_log(x)).cost;
    }

    bool can_afford(long n) const { return evaluations + n <= budget_; }

    long evaluations{0};

private:
    const FitProblem& problem_;
    long budget_;
};

struct SimplexOutcome {
    Vertex best;
    long iterations{0};
    bool budget_exceeded{false};
};

// start is already evaluated; the other vertices are start + steps(k) e_k.
SimplexOutcome nelder_mead(CountedObjective& f, const Vertex& start, const Vec& steps,
                           const FitOptions& options)
{
    constexpr double reflect = 1.0;
    constexpr double expand = 2.0;
    constexpr double contract = 0.5;
    constexpr double shrink = 0.5;

    SimplexOutcome out;
    const auto n = static_cast<std::size_t>(start.x.size());
    if (!f.can_afford(static_cast<long>(n))) {
        out.best = start;
        out.budget_exceeded = true;
        return out;
    }
    std::vector<Vertex> simplex{start};
    for (Eigen::Index k = 0; k < start.x.size(); ++k) {
        Vec p = start.x;
        p(k) += steps(k);
        simplex.push_back({p, f(p)});
    }

    auto by_cost = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };

    while (true) {
        std::stable_sort(simplex.begin(), simplex.end(), by_cost);
        const Vertex& best = simplex.front();
        const Vertex& worst = simplex.back();

        double diameter = 0.0;
        for (std::size_t k = 1; k <= n; ++k)
            diameter = std::max(diameter, (simplex[k].x - best.x).cwiseAbs().maxCoeff());
        const double spread = worst.f - best.f;
        if (best.f <= options.absolute_cost_floor ||
            (std::isfinite(worst.f) && spread <= options.cost_tolerance * std::abs(best.f)) ||
            diameter < options.simplex_tolerance) {
            break;
        }
        // one iteration costs at most n + 2 evaluations (reflect, contract, shrink)
        if (!f.can_afford(static_cast<long>(n) + 2)) {
            out.budget_exceeded = true;
            break;
        }
        ++out.iterations;

        Vec centroid = Vec::Zero(best.x.size());
        for (std::size_t k = 0; k < n; ++k) centroid += simplex[k].x;
        centroid /= static_cast<double>(n);

        const Vec xr = centroid + reflect * (centroid - worst.x);
        const double fr = f(xr);

        if (fr < best.f) {
            const Vec xe = centroid + expand * (xr - centroid);
            const double fe = f(xe);
            simplex.back() = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
            continue;
        }
        if (fr < simplex[n - 1].f) {
            simplex.back() = {xr, fr};
            continue;
        }

        const bool outside = fr < worst.f;
        const Vec xc = outside ? Vec(centroid + contract * (xr - centroid))
                               : Vec(centroid + contract * (worst.x - centroid));
        const double fc = f(xc);
        if (outside ? fc <= fr : fc < worst.f) {
            simplex.back() = {xc, fc};
            continue;
        }

        for (std::size_t k = 1; k <= n; ++k) {
            simplex[k].x = simplex[0].x + shrink * (simplex[k].x - simplex[0].x);
            simplex[k].f = f(simplex[k].x);
        }
    }

    std::stable_sort(simplex.begin(), simplex.end(), by_cost);
    out.best = simplex.front();
    return out;
}

// Central-difference Hessian of the unprofiled cost in (log rates, log gains).
Eigen::MatrixXd cost_hessian(const FitProblem& problem, const Vec& x,
                             const std::vector<Transition>& transitions, double h)
{
    const Eigen::Index p = x.size();
    auto eval = [&](const Vec& y) {
        CalibrationGains g;
        for (std::size_t k = 0; k < transitions.size(); ++k)
            g[transitions[k]] = std::exp(y(6 + static_cast<Eigen::Index>(k)));
        return objective(problem, rates_from_log(y.head(6)), g).cost;
    };

    const double f0 = eval(x);
    Eigen::MatrixXd H(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        Vec xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        H(i, i) = (eval(xp) - 2.0 * f0 + eval(xm)) / (h * h);
        for (Eigen::Index j = 0; j < i; ++j) {
            Vec a = x, b = x, c = x, d = x;
            a(i) += h; a(j) += h;
            b(i) += h; b(j) -= h;
            c(i) -= h; c(j) += h;
            d(i) -= h; d(j) -= h;
            H(i, j) = H(j, i) = (eval(a) - eval(b) - eval(c) + eval(d)) / (4.0 * h * h);
        }
    }
    return H;
}

} // namespace

void FitProblem::validate() const
{
    if (datasets.empty()) throw std::invalid_argument("fit problem has no datasets");
    for (std::size_t k = 0; k < datasets.size(); ++k) {
        const Dataset& d = datasets[k];
        d.drive.validate();
        d.grid.validate();
        if (d.data.rows() != d.grid.axis1.points || d.data.cols() != d.grid.axis2.points) {
            std::ostringstream msg;
            msg << "dataset " << k << ": data is " << d.data.rows() << "x" << d.data.cols()
                << " but the grid is " << d.grid.axis1.points << "x" << d.grid.axis2.points;
            throw std::invalid_argument(msg.str());
        }
    }
}

std::vector<Transition> FitProblem::fitted_transitions() const
{
    std::vector<Transition> out;
    for (Transition t : {Transition::t21, Transition::t32, Transition::t31}) {
        const bool present = std::any_of(datasets.begin(), datasets.end(),
                                         [t](const Dataset& d) { return d.transition() == t; });
        if (present) out.push_back(t);
    }
    return out;
}

ObjectiveValue objective(const FitProblem& problem, const RateSet& rates,
                         const CalibrationGains& gains)
{
    const ModelMaps maps = model_maps(problem, rates);
    if (!maps.failure.empty()) return {std::numeric_limits<double>::infinity(), maps.failure};
    return {cost_with_gains(problem, maps, gains), {}};
}

ObjectiveValue profiled_objective(const FitProblem& problem, const RateSet& rates,
                                  CalibrationGains* best_gains)
{
    const ModelMaps maps = model_maps(problem, rates);
    if (!maps.failure.empty()) return {std::numeric_limits<double>::infinity(), maps.failure};
    const CalibrationGains g = closed_form_gains(problem, maps);
    if (best_gains) *best_gains = g;
    return {cost_with_gains(problem, maps, g), {}};
}

std::string_view to_string(FitStatus s)
{
    return s == FitStatus::converged ? "converged" : "MaxEvaluationsExceeded";
}

FitResult fit_rates(const FitProblem& problem, const RateSet& initial_rates,
                    const FitOptions& options)
{
    problem.validate();
    initial_rates.validate();
    for (double r : initial_rates.as_array())
        if (!(r > 0.0)) throw std::invalid_argument("initial rates must be strictly positive");

    if (options.max_evaluations < 2) throw std::invalid_argument("max_evaluations must be at least 2");

    // evaluations kept back for the final gains and the Hessian; the Hessian
    // is dropped when it would leave the simplex less than one start-up
    const long p = 6 + static_cast<long>(problem.fitted_transitions().size());
    const long hessian_cost = 2 * p * p - p + 1;
    const bool confidence = options.confidence && options.max_evaluations - 1 - hessian_cost >= 7;
    const long reserved = 1 + (confidence ? hessian_cost : 0);
    CountedObjective f(problem, options.max_evaluations - reserved);
    Vec x0(6);
    const auto init = initial_rates.as_array();
    for (int k = 0; k < 6; ++k) x0(k) = std::log(init[static_cast<std::size_t>(k)]);

    FitResult result;
    Vertex best{x0, f(x0)};

    if (!(best.f <= options.absolute_cost_floor)) {
        std::mt19937_64 rng(options.seed);
        std::bernoulli_distribution coin(0.5);

        SimplexOutcome run = nelder_mead(f, best, Vec::Constant(6, options.initial_step), options);
        result.iterations += run.iterations;
        if (run.best.f < best.f) best = run.best;
        bool exhausted = run.budget_exceeded;

        for (int r = 0; r < options.restarts && !exhausted; ++r) {
            if (best.f <= options.absolute_cost_floor) break;
            Vec steps(6);
            for (int k = 0; k < 6; ++k)
                steps(k) = (coin(rng) ? 1.0 : -1.0) * 0.5 * options.initial_step;
            const double before = best.f;
            run = nelder_mead(f, best, steps, options);
            result.iterations += run.iterations;
            ++result.restarts_used;
            exhausted = run.budget_exceeded;
            if (run.best.f < best.f) best = run.best;
            if (before - best.f <= options.cost_tolerance * std::abs(before)) break;
        }
        if (exhausted) result.status = FitStatus::max_evaluations_exceeded;
    }

    result.rates = rates_from_log(best.x);
    const ObjectiveValue final_value = profiled_objective(problem, result.rates, &result.gains);
    result.residual = final_value.cost;
    result.evaluations = f.evaluations + 1;

    if (confidence && std::isfinite(result.residual)) {
        const auto transitions = problem.fitted_transitions();
        Vec x(6 + static_cast<Eigen::Index>(transitions.size()));
        x.head(6) = best.x;
        for (std::size_t k = 0; k < transitions.size(); ++k)
            x(6 + static_cast<Eigen::Index>(k)) = std::log(result.gains[transitions[k]]);
        const Eigen::MatrixXd H = cost_hessian(problem, x, transitions, options.hessian_step);
        result.evaluations += hessian_cost;

        long cells = 0;
        for (const Dataset& d : problem.datasets) cells += weights_of(d).cells;
        const long dof = cells - x.size();
        const double tau2 = dof > 0 ? result.residual / static_cast<double>(dof)
                                    : std::numeric_limits<double>::infinity();

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (H + H.transpose()));
        const Vec lambda = eig.eigenvalues();
        const Eigen::MatrixXd V = eig.eigenvectors();
        const double lambda_max = lambda.cwiseAbs().maxCoeff();
        Vec variance = Vec::Zero(x.size());
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            const bool flat = !(lambda(k) > 1e-10 * lambda_max);
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                const double v2 = V(i, k) * V(i, k);
                if (flat) {
                    if (v2 > 1e-6) variance(i) = std::numeric_limits<double>::infinity();
                } else {
                    variance(i) += v2 / lambda(k);
                }
            }
        }
        auto half_width = [&](Eigen::Index i) {
            if (std::isinf(variance(i))) return std::numeric_limits<double>::infinity();
            const double v = 2.0 * tau2 * variance(i);
            // relative half-width of exp(x +- sigma)
            return std::isfinite(v) ? std::expm1(std::sqrt(v)) : std::numeric_limits<double>::infinity();
        };
        std::array<double, 6> rates_hw{};
        for (int k = 0; k < 6; ++k) rates_hw[static_cast<std::size_t>(k)] = half_width(k);
        result.rate_half_widths = rates_hw;
        CalibrationGains gains_hw{{0.0, 0.0, 0.0}};
        for (std::size_t k = 0; k < transitions.size(); ++k)
            gains_hw[transitions[k]] = half_width(6 + static_cast<Eigen::Index>(k));
        result.gain_half_widths = gains_hw;
    }
    return result;
}

} // namespace wavemix
