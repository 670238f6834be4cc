// Copyright (c) 2026 the sirdde authors.
// SPDX-License-Identifier: Apache-2.0

#include "sirdde/models.hpp"
#include "sirdde/pde1d.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace sirdde;

namespace {

ModelParams table1_pde()
{
    ModelParams p;
    p.beta_e = 9.0 / 40.0;
    p.beta_i = 3.0 / 32.0;
    p.phi_r = 1.0 / 32.0;
    p.phi_d = 3.0 / 640.0;
    p.sigma_delay = 5.0;
    p.nu_s = 3.75e-5;
    p.nu_e = 0.75e-3;
    p.nu_i = 0.75e-10;
    p.nu_r = 3.75e-5;
    return p;
}

} // namespace

TEST_CASE("initial density profiles")
{
    CHECK(initial_infected_density(0.75) == Catch::Approx(1.0 / 20.0).epsilon(1e-12));
    CHECK(initial_infected_density(0.0) < 1e-15);
    CHECK(initial_infected_density(1.0) < 1e-15);
    CHECK(initial_susceptible_density(0.35) >= 1.0);
    CHECK(initial_susceptible_density(0.62) > initial_susceptible_density(0.9));

    const PdeState st = initial_conditions(2000);
    REQUIRE(st.s.n_nodes() == 2001);
    CHECK(st.s.values[700] == initial_susceptible_density(0.35));
    CHECK(st.i.values[1500] == initial_infected_density(0.75));
    for (double v : st.s.values)
        CHECK(v >= 0.0);
}

TEST_CASE("trapezoidal field integral")
{
    Field1D one = Field1D::zeros(100);
    for (auto& v : one.values)
        v = 1.0;
    CHECK(integrate_field(one) == Catch::Approx(1.0).epsilon(1e-14));

    Field1D lin = Field1D::zeros(100);
    for (std::size_t j = 0; j < lin.n_nodes(); ++j)
        lin.values[j] = static_cast<double>(j) * lin.dx;
    CHECK(integrate_field(lin) == Catch::Approx(0.5).epsilon(1e-14));

    // self-convergence of the initial mass
    const PdeState coarse = initial_conditions(2000);
    const PdeState fine = initial_conditions(4000);
    CHECK(std::abs(integrate_field(coarse.s) - integrate_field(fine.s)) < 1e-6);
    CHECK(std::abs(integrate_field(coarse.i) - integrate_field(fine.i)) < 1e-6);
}

TEST_CASE("diffusion operator: constant fields and exact mass balance")
{
    const std::size_t nn = 201;
    std::vector<double> u(nn, 3.7), n(nn), out(nn);
    for (std::size_t j = 0; j < nn; ++j)
        n[j] = 1.0 + 0.5 * std::sin(7.0 * static_cast<double>(j));
    diffusion_operator(u, n, 2.0, 1.0 / 200.0, out);
    for (double v : out)
        CHECK(v == 0.0);

    // random-ish field: trapezoid-weighted sum telescopes to zero
    for (std::size_t j = 0; j < nn; ++j)
        u[j] = std::cos(13.0 * static_cast<double>(j)) + 2.0;
    diffusion_operator(u, n, 2.0, 1.0 / 200.0, out);
    CHECK(std::abs(integrate_field(out, 1.0 / 200.0)) < 1e-9);
}

TEST_CASE("diffusion operator: second-order interior accuracy for n = 1")
{
    const double pi = std::numbers::pi;
    double prev_err = 0.0;
    for (std::size_t nc : {100, 200, 400}) {
        const double dx = 1.0 / static_cast<double>(nc);
        std::vector<double> u(nc + 1), n(nc + 1, 1.0), out(nc + 1);
        for (std::size_t j = 0; j <= nc; ++j)
            u[j] = std::sin(2.0 * pi * static_cast<double>(j) * dx);
        diffusion_operator(u, n, 1.0, dx, out);
        double err = 0.0;
        for (std::size_t j = 1; j < nc; ++j) {
            const double exact = -4.0 * pi * pi * u[j];
            err = std::max(err, std::abs(out[j] - exact));
        }
        if (prev_err > 0.0)
            CHECK(prev_err / err == Catch::Approx(4.0).epsilon(0.05));
        prev_err = err;
    }
}

TEST_CASE("pde rhs reduces to the pointwise reaction on constant fields")
{
    const ModelParams p = table1_pde();
    const ParamSchedule sched = ParamSchedule::constant(0.0, p);
    const std::size_t nc = 50;
    DelaySirdPde pde(sched, nc);

    PdeState st{Field1D::zeros(nc), Field1D::zeros(nc), Field1D::zeros(nc), Field1D::zeros(nc)};
    for (std::size_t j = 0; j <= nc; ++j) {
        st.s.values[j] = 0.7;
        st.i.values[j] = 0.2;
        st.r.values[j] = 0.05;
        st.d.values[j] = 0.01;
    }
    const State u = pde.pack(st);

    PdeState lag_st = st;
    for (auto& v : lag_st.i.values)
        v = 0.1;
    const State u_lag = pde.pack(lag_st);

    State out(pde.state_size());
    pde.eval(0.0, u, u_lag, out);

    const CompartmentVec f =
        delay_sird_rhs({0.7, 0.2, 0.05, 0.01}, {0.7, 0.1, 0.05, 0.01}, p);
    for (std::size_t j = 0; j <= nc; ++j) {
        CHECK(out[j] == Catch::Approx(f.s).margin(1e-15));
        CHECK(out[nc + 1 + j] == Catch::Approx(f.i).margin(1e-15));
        CHECK(out[2 * (nc + 1) + j] == Catch::Approx(f.r).margin(1e-15));
        CHECK(out[3 * (nc + 1) + j] == Catch::Approx(f.d).margin(1e-15));
    }
}

TEST_CASE("Allee threshold halves the contact terms when n = 2A")
{
    ModelParams p = table1_pde();
    ModelParams pa = p;
    pa.allee_A = 0.6; // n below will be 1.2

    const std::size_t nc = 10;
    DelaySirdPde plain(ParamSchedule::constant(0.0, p), nc);
    DelaySirdPde allee(ParamSchedule::constant(0.0, pa), nc);

    PdeState st{Field1D::zeros(nc), Field1D::zeros(nc), Field1D::zeros(nc), Field1D::zeros(nc)};
    for (std::size_t j = 0; j <= nc; ++j) {
        st.s.values[j] = 0.8;
        st.i.values[j] = 0.3;
        st.r.values[j] = 0.1;
    }
    const State u = plain.pack(st);

    State f0(plain.state_size()), f1(plain.state_size());
    plain.eval(0.0, u, u, f0);
    allee.eval(0.0, u, u, f1);

    const double contact = (p.beta_e + p.beta_i) * 0.8 * 0.3; // factor 1 case
    const std::size_t j = nc / 2;
    CHECK(f0[j] == Catch::Approx(-contact).epsilon(1e-13));
    CHECK(f1[j] == Catch::Approx(-0.5 * contact).epsilon(1e-13));
    // non-contact terms are untouched
    CHECK(f0[3 * (nc + 1) + j] == f1[3 * (nc + 1) + j]);
}

TEST_CASE("implicit stage solves the stage equation")
{
    const ModelParams p = table1_pde();
    DelaySirdPde pde(ParamSchedule::constant(0.0, p), 80);
    const State u0 = pde.pack(initial_conditions(80));

    const double coeff = 2.0 * 0.25 / 3.0;
    State u = u0;
    pde.solve_stage(0.25, coeff, u0, u0, u, IntegrateOptions{});

    State f(pde.state_size());
    pde.eval(0.25, u, u0, f);
    double res = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j)
        res = std::max(res, std::abs(u[j] - u0[j] - coeff * f[j]));
    CHECK(res < 1e-9);
}

TEST_CASE("short run conserves total living plus deceased mass")
{
    const ModelParams p = table1_pde(); // alpha = mu = 0
    DelaySirdPde pde(ParamSchedule::constant(0.0, p), 200);
    const State u0 = pde.pack(initial_conditions(200));
    const TimeGrid grid = TimeGrid::from_step(0.0, 20.0, 0.25);
    const PdeRunResult res = run_pde(pde, u0, grid, p.sigma_delay);

    REQUIRE(res.totals.times.size() == static_cast<std::size_t>(grid.n_steps) + 1);
    const double m0 = res.totals.n.front() + res.totals.d.front();
    for (std::size_t k = 0; k < res.totals.times.size(); ++k) {
        const double m = res.totals.n[k] + res.totals.d[k];
        CHECK(std::abs(m - m0) < 1e-10 * std::max(m0, 1.0));
    }
    // the outbreak actually does something
    CHECK(res.totals.i.back() != res.totals.i.front());
}

TEST_CASE("snapshots are captured at the requested times")
{
    const ModelParams p = table1_pde();
    DelaySirdPde pde(ParamSchedule::constant(0.0, p), 50);
    const State u0 = pde.pack(initial_conditions(50));
    const TimeGrid grid = TimeGrid::from_step(0.0, 5.0, 0.25);
    const PdeRunResult res = run_pde(pde, u0, grid, p.sigma_delay, {0.0, 2.5, 5.0});
    REQUIRE(res.snapshots.size() == 3);
    CHECK(res.snapshots[0].time == 0.0);
    CHECK(res.snapshots[1].time == 2.5);
    CHECK(res.snapshots[2].time == 5.0);
    CHECK(res.snapshots[0].state == u0);
}
