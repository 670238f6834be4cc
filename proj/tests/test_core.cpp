// Copyright (c) 2026 the sirdde authors.
// SPDX-License-Identifier: Apache-2.0

#include "sirdde/core.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace sirdde;

namespace {

ModelParams table1()
{
    ModelParams p;
    p.beta_e = 9.0 / 40.0;
    p.beta_i = 3.0 / 32.0;
    p.phi_r = 1.0 / 32.0;
    p.phi_d = 3.0 / 640.0;
    p.phi_e = 1.0 / 8.0;
    p.sigma_delay = 5.0;
    return p;
}

} // namespace

TEST_CASE("params_at picks the parameter set in force")
{
    ModelParams base = table1();
    ModelParams lockdown = base;
    lockdown.beta_e = 9.0 / 160.0;
    ParamSchedule sched = ParamSchedule::constant(0.0, base);
    sched.add_breakpoint(30.0, lockdown);

    CHECK(params_at(sched, 29.75).beta_e == 9.0 / 40.0);
    CHECK(params_at(sched, 30.0).beta_e == 9.0 / 160.0); // left-closed interval
    CHECK(params_at(sched, 267.0).beta_e == 9.0 / 160.0);

    ParamSchedule single = ParamSchedule::constant(0.0, base);
    CHECK(params_at(single, 0.0) == base);

    CHECK_THROWS_AS(params_at(sched, -0.25), config_error);
    CHECK_THROWS_AS(sched.add_breakpoint(30.0, base), config_error);
}

TEST_CASE("params_at is piecewise constant and right-continuous")
{
    ParamSchedule sched = ParamSchedule::constant(0.0, table1());
    ModelParams p1 = table1();
    p1.beta_e *= 0.25;
    sched.add_breakpoint(10.0, p1);
    ModelParams p2 = p1;
    p2.nu_s = 1.0;
    sched.add_breakpoint(20.0, p2);

    for (double t = 0.0; t < 30.0; t += 0.1) {
        const ModelParams& expected = t < 10.0 ? sched.breakpoints[0].second
                                    : t < 20.0 ? sched.breakpoints[1].second
                                               : sched.breakpoints[2].second;
        CHECK(params_at(sched, t) == expected);
    }
}

TEST_CASE("normalize_ode_params divides contact rates by n0")
{
    ModelParams p = table1();
    const ModelParams q = normalize_ode_params(p, 1000.0);
    CHECK(q.beta_e == Catch::Approx(2.25e-4).epsilon(1e-15));
    CHECK(q.beta_i == Catch::Approx(9.375e-5).epsilon(1e-15));
    CHECK(q.phi_r == p.phi_r); // everything else untouched
    CHECK(q.sigma_delay == p.sigma_delay);

    ModelParams z = table1();
    z.beta_e = 0.0;
    CHECK(normalize_ode_params(z, 12.3).beta_e == 0.0);

    CHECK_THROWS_AS(normalize_ode_params(p, 0.0), config_error);
    CHECK_THROWS_AS(normalize_ode_params(p, -5.0), config_error);
}

TEST_CASE("normalization round-trips through the reciprocal population")
{
    std::mt19937 gen(42);
    std::uniform_real_distribution<double> dist(0.1, 1e6);
    for (int trial = 0; trial < 50; ++trial) {
        const double n0 = dist(gen);
        ModelParams p = table1();
        p.beta_e = dist(gen);
        p.beta_i = dist(gen);
        const ModelParams back = normalize_ode_params(normalize_ode_params(p, n0), 1.0 / n0);
        CHECK(back.beta_e == Catch::Approx(p.beta_e).epsilon(1e-14));
        CHECK(back.beta_i == Catch::Approx(p.beta_i).epsilon(1e-14));
    }
    // identity only for n0 = 1
    ModelParams p = table1();
    CHECK(normalize_ode_params(p, 1.0) == p);
}

TEST_CASE("time grid construction and delay divisibility")
{
    const TimeGrid g = TimeGrid::from_step(0.0, 267.0, 0.25);
    CHECK(g.n_steps == 1068);
    CHECK(g.t_end == 267.0);
    CHECK(g.time(4) == 1.0);

    CHECK(delay_steps(5.0, 0.25) == 20);
    CHECK(delay_steps(20.0, 0.25) == 80);
    CHECK_THROWS_AS(delay_steps(5.0, 0.3), config_error);
    CHECK_THROWS_AS(delay_steps(0.0, 0.25), config_error);
    CHECK_THROWS_AS(TimeGrid::from_step(0.0, 1.0, 0.0), config_error);
    CHECK_THROWS_AS(TimeGrid::from_step(1.0, 1.0, 0.1), config_error);
}

TEST_CASE("parameter validation rejects negative rates")
{
    ModelParams p = table1();
    validate_params(p, true);
    p.phi_r = -1.0;
    CHECK_THROWS_AS(validate_params(p, true), config_error);
    ModelParams q = table1();
    q.sigma_delay = 0.0;
    CHECK_THROWS_AS(validate_params(q, true), config_error);
    validate_params(q, false); // no delay needed for the SEIRD baseline
}
