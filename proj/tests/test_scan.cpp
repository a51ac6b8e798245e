#include <doctest.h>

#include <random>

#include "wavemix/scan.hpp"
#include "wavemix/units.hpp"
#include "wavemix/verify.hpp"

using namespace wavemix;
using units::from_mhz;

TEST_CASE("undriven 2x2 scan is all zero")
{
    const EmissionMap map = run_scan({Scheme::A, 0.0, 0.0, 0.0, 0.0}, RateSet::reference_extracted(),
                                     DetuningGrid::symmetric(from_mhz(10.0), 2));
    CHECK(map.values.rows() == 2);
    CHECK(map.values.cols() == 2);
    CHECK(map.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK(map.errors.empty());
}

TEST_CASE("axis values hit both ends exactly")
{
    const Axis a{from_mhz(-100.0), from_mhz(100.0), 201};
    CHECK(a.value(0) == a.min);
    CHECK(a.value(200) == a.max);
    CHECK(a.nearest_to_zero() == 100);
    CHECK(a.step() == doctest::Approx(from_mhz(1.0)));
    CHECK_THROWS_AS((DetuningGrid{{0.0, 1.0, 1}, {0.0, 1.0, 3}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((DetuningGrid{{0.0, NAN, 3}, {0.0, 1.0, 3}}.validate()), std::invalid_argument);
}

TEST_CASE("maps stay within the coherence bound")
{
    const RateSet rates = RateSet::reference_extracted();
    for (Scheme s : {Scheme::A, Scheme::B, Scheme::C}) {
        const EmissionMap map = run_scan({s, from_mhz(40.0), from_mhz(25.0), 0.0, 0.0}, rates,
                                         DetuningGrid::symmetric(from_mhz(100.0), 41));
        const double bound = rates.relaxation(emission_transition(s)) / 8.0;
        CHECK(map.errors.empty());
        CHECK(map.values.allFinite());
        CHECK(map.values.minCoeff() >= 0.0);
        CHECK(map.values.maxCoeff() <= bound * (1.0 + 1e-9));
        CHECK(map.sigma.cwiseAbs().maxCoeff() <= 0.5 + 1e-9);
    }
}

TEST_CASE("scheme C maps are symmetric under reversal of both detunings")
{
    // Complex conjugation composed with diag(1, -1, 1) maps H(d1, d2) to H(-d1, -d2)
    // and leaves the dissipator invariant, so |rho31| is unchanged.
    std::mt19937_64 rng(41);
    for (int n = 0; n < 3; ++n) {
        const RandomConfiguration cfg = random_configuration(rng, true);
        const DriveScheme d{Scheme::C, cfg.drive.rabi_first, cfg.drive.rabi_second, 0.0, 0.0};
        const EmissionMap map = run_scan(d, cfg.rates, DetuningGrid::symmetric(from_mhz(100.0), 41));
        double worst = 0.0;
        for (int i = 0; i < 41; ++i)
            for (int j = 0; j < 41; ++j) {
                const double a = map.values(i, j);
                const double b = map.values(40 - i, 40 - j);
                worst = std::max(worst, std::abs(a - b) / std::max(a, b));
            }
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("scheme B shows a bright diagonal emission line")
{
    const DetuningGrid grid = DetuningGrid::symmetric(from_mhz(100.0), 201);
    SUBCASE("reference rates: cut maxima exceed three times the median")
    {
        for (double rabi : {30.0, 50.0}) {
            const EmissionMap map = run_scan({Scheme::B, from_mhz(rabi), from_mhz(rabi), 0.0, 0.0},
                                             RateSet::reference_extracted(), grid);
            const RidgeReport r = detect_diagonal_ridge(map);
            CHECK(r.detected);
            CHECK(r.contrast > 3.0);
            CHECK(r.cuts == 101);
        }
    }
    SUBCASE("slowly dephasing 2<->3 coherence: the maxima share one diagonal")
    {
        const RateSet narrow = RateSet::from_mhz(1.0, 20.0, 1.0, 2.0, 1.0, 20.0);
        for (double rabi : {5.0, 30.0, 50.0}) {
            const EmissionMap map = run_scan({Scheme::B, from_mhz(rabi), from_mhz(rabi), 0.0, 0.0}, narrow, grid);
            const RidgeReport r = detect_diagonal_ridge(map);
            CHECK(r.detected);
            CHECK(r.aligned);
            CHECK(std::abs(units::to_mhz(r.offset)) < 1.0);
        }
    }
    SUBCASE("a single Lorentzian spot is not aligned on a diagonal")
    {
        const EmissionMap map = run_scan({Scheme::C, from_mhz(30.0), from_mhz(30.0), 0.0, 0.0},
                                         RateSet::reference_extracted(), grid);
        CHECK_FALSE(detect_diagonal_ridge(map).aligned);
    }
}

TEST_CASE("Autler-Townes splitting follows the strong drive")
{
    const RateSet rates = narrow_line_rates();
    const double strong = from_mhz(50.0);
    const double weak = from_mhz(5.0);

    const EmissionMap first = run_scan({Scheme::A, strong, weak, 0.0, 0.0}, rates,
                                       DetuningGrid::symmetric(from_mhz(100.0), 201));
    REQUIRE(split_axis(first).has_value());
    CHECK(*split_axis(first) == SplitAxis::axis2);
    const double separation = find_splitting(first, SplitAxis::axis2);
    CHECK(separation == doctest::Approx(strong).epsilon(0.1));

    const EmissionMap fine = run_scan({Scheme::A, strong, weak, 0.0, 0.0}, rates,
                                      DetuningGrid::symmetric(from_mhz(100.0), 401));
    CHECK(std::abs(find_splitting(fine, SplitAxis::axis2) - separation) <= first.grid.axis2.step());

    const EmissionMap swapped = run_scan({Scheme::A, weak, strong, 0.0, 0.0}, rates,
                                         DetuningGrid::symmetric(from_mhz(100.0), 201));
    REQUIRE(split_axis(swapped).has_value());
    CHECK(*split_axis(swapped) == SplitAxis::axis1);
}

TEST_CASE("a weak-drive map has no split")
{
    const EmissionMap map = run_scan({Scheme::C, from_mhz(1.0), from_mhz(1.0), 0.0, 0.0},
                                     RateSet::reference_extracted(), DetuningGrid::symmetric(from_mhz(100.0), 101));
    CHECK_THROWS_AS(find_splitting(map, SplitAxis::axis1), NoSplitDetected);
    CHECK_THROWS_AS(find_splitting(map, SplitAxis::axis2), NoSplitDetected);
    CHECK_FALSE(split_axis(map).has_value());
}

TEST_CASE("peak refinement recovers the vertex of a sampled parabola")
{
    const Axis axis{-5.0, 5.0, 11};
    std::vector<double> profile;
    for (int k = 0; k < 11; ++k) {
        const double x = axis.value(k);
        profile.push_back(std::max(0.0, 10.0 - (x - 0.3) * (x - 0.3)));
    }
    const auto peaks = find_peaks(profile, axis);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0].position == doctest::Approx(0.3));
    CHECK(peaks[0].height == doctest::Approx(10.0));
}

TEST_CASE("scans are deterministic and independent of the worker count")
{
    const DriveScheme d{Scheme::B, from_mhz(30.0), from_mhz(20.0), 0.0, 0.0};
    const RateSet rates = RateSet::reference_extracted();
    const DetuningGrid grid = DetuningGrid::symmetric(from_mhz(100.0), 61);
    ScanOptions seq;
    ScanOptions par;
    par.jobs = 4;
    const EmissionMap a = run_scan(d, rates, grid, seq);
    const EmissionMap b = run_scan(d, rates, grid, seq);
    const EmissionMap c = run_scan(d, rates, grid, par);
    CHECK(a.values == b.values);
    CHECK((a.values - c.values).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("failed cells are recorded, never zeroed")
{
    // no damping and no drive: every cell has a degenerate stationary state
    const EmissionMap map = run_scan({Scheme::A, 0.0, 0.0, 0.0, 0.0}, RateSet{},
                                     DetuningGrid::symmetric(from_mhz(10.0), 3));
    CHECK(map.errors.size() == 9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(map.missing(i, j));
    CHECK(map.errors.front().kind == SolverErrorKind::degenerate_steady_state);
    CHECK_FALSE(map.errors.front().reason.empty());
    CHECK(map.max_value() == 0.0);
}

TEST_CASE("scan metadata records the inputs")
{
    ScanOptions opts;
    opts.model.hamiltonian = HamiltonianMode::verbatim;
    const DriveScheme d{Scheme::C, from_mhz(3.0), from_mhz(4.0), 0.0, 0.0};
    const EmissionMap map = run_scan(d, RateSet::reference_extracted(), DetuningGrid::symmetric(from_mhz(10.0), 3), opts);
    CHECK(map.meta.drive.rabi_second == d.rabi_second);
    CHECK(map.meta.options.model.hamiltonian == HamiltonianMode::verbatim);
    CHECK(map.meta.code_version == WAVEMIX_VERSION);
}
