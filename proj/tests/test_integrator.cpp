// Copyright (c) 2026 the sirdde authors.
// SPDX-License-Identifier: Apache-2.0

#include "sirdde/integrator.hpp"
#include "sirdde/stability.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

using namespace sirdde;

namespace {

/// Scalar test equation u'(t) = f(t, u, u_lag).
struct ScalarRhs {
    std::function<double(double, double, double)> f;

    void eval(double t, const State& u, const State& u_lag, State& out) const
    {
        out[0] = f(t, u[0], u_lag[0]);
    }
};

double solve_scalar(const ScalarRhs& rhs, double u0, double t_end, double dt, double sigma)
{
    const TimeGrid grid = TimeGrid::from_step(0.0, t_end, dt);
    double last = u0;
    integrate_observe(rhs, constant_history({u0}), grid, sigma,
                      [&](double, const State& u) { last = u[0]; });
    return last;
}

/// Real root of lambda = b e^(-lambda) by bisection; independent oracle for
/// the smooth-solution convergence study.
double real_char_root(double b)
{
    double lo = -1.0, hi = 0.0; // for b in (-1/e, 0) the root lies in (-1, 0)
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid - b * std::exp(-mid) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("HistoryBuffer serves exact delayed lookups")
{
    const long m = 4;
    HistoryBuffer buf(static_cast<std::size_t>(m) + 1, -m);
    for (long j = -m; j <= 0; ++j)
        buf.push({100.0 + static_cast<double>(j)}); // history samples, value 96..100
    CHECK(buf.at_step(0 - m)[0] == 96.0);           // step 0 sees the sample at t = -sigma
    CHECK(buf.at_step(0)[0] == 100.0);

    for (long n = 1; n <= 4; ++n)
        buf.push({200.0 + static_cast<double>(n)});
    CHECK(buf.at_step(4 - m)[0] == 100.0); // step 4 still sees the initial condition u^0

    for (long n = 5; n <= 10; ++n)
        buf.push({200.0 + static_cast<double>(n)});
    CHECK(buf.at_step(10 - m)[0] == 206.0); // previously computed u^6

    CHECK_THROWS_AS(buf.at_step(2), std::logic_error);  // evicted
    CHECK_THROWS_AS(buf.at_step(11), std::logic_error); // not yet computed
}

TEST_CASE("scalar exponential decay without delay")
{
    const ScalarRhs rhs{[](double, double u, double) { return -u; }};
    const double u1 = solve_scalar(rhs, 1.0, 1.0, 0.25, 0.0);
    CHECK(u1 == Catch::Approx(std::exp(-1.0)).margin(0.02));

    // delayed argument present but unused behaves identically
    const ScalarRhs rhs_lagged{[](double, double u, double) { return -u; }};
    CHECK(solve_scalar(rhs_lagged, 1.0, 1.0, 0.25, 1.0) == u1);
}

TEST_CASE("BDF2 is second order on a smooth delay problem")
{
    // history e^(lambda t) makes the exact solution a single smooth
    // exponential, free of derivative discontinuities
    const double b = -0.2;
    const double lam = real_char_root(b);
    const ScalarRhs rhs{[=](double, double, double ulag) { return b * ulag; }};

    double prev_err = 0.0;
    std::vector<double> rates;
    for (double dt : {0.25, 0.125, 0.0625, 0.03125}) {
        const TimeGrid grid = TimeGrid::from_step(0.0, 10.0, dt);
        double last = 0.0;
        integrate_observe(
            rhs, [=](double t) { return State{std::exp(lam * t)}; }, grid, 1.0,
            [&](double, const State& u) { last = u[0]; });
        const double err = std::abs(last - std::exp(lam * 10.0));
        if (prev_err > 0.0)
            rates.push_back(std::log2(prev_err / err));
        prev_err = err;
    }
    REQUIRE(rates.size() == 3);
    for (double r : rates)
        CHECK((r > 1.8 && r < 2.2));
}

TEST_CASE("marginal point (0, -pi/2): bounded non-decaying oscillation")
{
    const double b = -std::numbers::pi / 2.0;
    const ScalarRhs rhs{[=](double, double, double ulag) { return b * ulag; }};

    // fine-step reference trajectory
    const TimeGrid fine = TimeGrid::from_step(0.0, 12.0, 1e-4);
    std::vector<double> ref;
    integrate_observe(rhs, constant_history({1.0}), fine, 1.0,
                      [&](double, const State& u) { ref.push_back(u[0]); });

    const TimeGrid coarse = TimeGrid::from_step(0.0, 12.0, 0.01);
    std::vector<double> sol;
    integrate_observe(rhs, constant_history({1.0}), coarse, 1.0,
                      [&](double, const State& u) { sol.push_back(u[0]); });

    double max_diff = 0.0, max_early = 0.0, max_late = 0.0;
    for (std::size_t k = 0; k < sol.size(); ++k) {
        max_diff = std::max(max_diff, std::abs(sol[k] - ref[k * 100]));
        const double t = coarse.time(static_cast<long>(k));
        if (t <= 4.0)
            max_early = std::max(max_early, std::abs(sol[k]));
        if (t >= 8.0)
            max_late = std::max(max_late, std::abs(sol[k]));
    }
    CHECK(max_diff < 5e-3);
    CHECK(max_late > 0.5 * max_early); // not decaying
    CHECK(max_late < 2.0 * max_early); // not growing
}

TEST_CASE("unstable point (0, -2): growth rate matches the rightmost root")
{
    const ScalarRhs rhs{[](double, double, double ulag) { return -2.0 * ulag; }};
    const TimeGrid grid = TimeGrid::from_step(0.0, 40.0, 0.005);
    std::vector<double> ts, us;
    integrate_observe(rhs, constant_history({1.0}), grid, 1.0, [&](double t, const State& u) {
        ts.push_back(t);
        us.push_back(std::abs(u[0]));
    });

    // envelope peaks in [20, 40]
    double first_peak = 0.0, first_t = 0.0, last_peak = 0.0, last_t = 0.0;
    for (std::size_t k = 1; k + 1 < us.size(); ++k) {
        if (ts[k] < 20.0 || us[k] <= us[k - 1] || us[k] <= us[k + 1])
            continue;
        if (first_peak == 0.0) {
            first_peak = us[k];
            first_t = ts[k];
        }
        last_peak = us[k];
        last_t = ts[k];
    }
    REQUIRE(last_t > first_t);
    const double observed_rate = std::log(last_peak / first_peak) / (last_t - first_t);
    const double expected_rate =
        characteristic_roots({0.0, -2.0}).rightmost_root().value.real();
    CHECK(expected_rate > 0.0);
    CHECK(observed_rate == Catch::Approx(expected_rate).epsilon(0.02));
}

TEST_CASE("decay inside the stability region over long horizons")
{
    // (a, b) = (-0.3, -0.8) lies strictly inside the stability region
    const ScalarRhs rhs{[](double, double u, double ulag) { return -0.3 * u - 0.8 * ulag; }};
    const TimeGrid grid = TimeGrid::from_step(0.0, 50.0, 0.05);
    double at_half = 0.0, at_end = 0.0;
    long step = 0;
    integrate_observe(rhs, constant_history({1.0}), grid, 1.0, [&](double, const State& u) {
        if (step++ == grid.n_steps / 2)
            at_half = u[0];
        at_end = u[0];
    });
    CHECK(std::abs(at_end) < std::abs(at_half));
}

TEST_CASE("two runs produce bit-identical trajectories")
{
    const ScalarRhs rhs{[](double, double u, double ulag) { return 0.1 * u - 1.2 * ulag; }};
    const TimeGrid grid = TimeGrid::from_step(0.0, 30.0, 0.25);
    const Trajectory a = integrate(rhs, constant_history({1.0}), grid, 5.0);
    const Trajectory b = integrate(rhs, constant_history({1.0}), grid, 5.0);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t k = 0; k < a.states.size(); ++k)
        CHECK(a.states[k][0] == b.states[k][0]);
}

TEST_CASE("error paths: delay divisibility and Picard divergence")
{
    const ScalarRhs rhs{[](double, double, double ulag) { return -ulag; }};
    const TimeGrid grid = TimeGrid::from_step(0.0, 10.0, 0.3);
    CHECK_THROWS_AS(integrate(rhs, constant_history({1.0}), grid, 5.0), config_error);

    // dt * Lipschitz >> 1 makes the fixed-point iteration diverge
    const ScalarRhs stiff{[](double, double u, double) { return -100.0 * u; }};
    const TimeGrid coarse = TimeGrid::from_step(0.0, 10.0, 0.25);
    CHECK_THROWS_AS(integrate(stiff, constant_history({1.0}), coarse, 0.0), convergence_error);
}
