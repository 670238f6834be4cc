// Copyright (c) 2026 the sirdde authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sirdde {

/// Invalid configuration or scenario input.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative solve (Picard stage, root refinement) failed to converge.
class convergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Epidemiological rate constants shared by all model variants.
///
/// Rates are per day; contact rates beta_* are per (person * day) and are
/// stored unnormalized, exactly as they appear in configuration files.
/// Division by the initial population is an explicit step, see
/// normalize_ode_params(). phi_e and sigma_rate are used only by the
/// non-delay SEIRD baseline; allee_A and nu_* only by the 1D PDE model.
struct ModelParams {
    double alpha = 0.0;       // birth rate
    double mu = 0.0;          // background mortality rate
    double beta_e = 0.0;      // contact rate with non-delayed infected
    double beta_i = 0.0;      // contact rate with delayed infected
    double phi_r = 0.0;       // recovery rate
    double phi_d = 0.0;       // disease mortality rate
    double phi_e = 0.0;       // asymptomatic recovery rate (SEIRD only)
    double sigma_rate = 0.0;  // incubation rate (SEIRD only)
    double sigma_delay = 0.0; // incubation delay, days
    double allee_A = 0.0;     // Allee threshold, persons (PDE only)
    double nu_s = 0.0;        // diffusion coefficients (PDE only)
    double nu_e = 0.0;
    double nu_i = 0.0;
    double nu_r = 0.0;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Checks the sign constraints common to every model; throws config_error.
inline void validate_params(const ModelParams& p, bool requires_delay)
{
    auto check = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw config_error(std::string("parameter '") + name + "' must be finite and >= 0");
    };
    check(p.alpha, "alpha");
    check(p.mu, "mu");
    check(p.beta_e, "beta_e");
    check(p.beta_i, "beta_i");
    check(p.phi_r, "phi_r");
    check(p.phi_d, "phi_d");
    check(p.phi_e, "phi_e");
    check(p.sigma_rate, "sigma_rate");
    check(p.sigma_delay, "sigma_delay");
    check(p.allee_A, "allee_A");
    check(p.nu_s, "nu_s");
    check(p.nu_e, "nu_e");
    check(p.nu_i, "nu_i");
    check(p.nu_r, "nu_r");
    if (requires_delay && !(p.sigma_delay > 0.0))
        throw config_error("sigma_delay must be > 0 for delay models");
}

/// Divides the contact rates by the initial living population n0.
/// Applying with n0 and then 1/n0 recovers the original values.
inline ModelParams normalize_ode_params(ModelParams p, double n0)
{
    if (!(n0 > 0.0))
        throw config_error("normalize_ode_params: n0 must be > 0");
    p.beta_e /= n0;
    p.beta_i /= n0;
    return p;
}

/// Piecewise-constant-in-time parameter sets (lockdown schedules).
/// Breakpoint k is in force on [t_k, t_{k+1}): left-closed, right-open.
struct ParamSchedule {
    std::vector<std::pair<double, ModelParams>> breakpoints;

    static ParamSchedule constant(double t0, ModelParams p)
    {
        return ParamSchedule{{{t0, std::move(p)}}};
    }

    void add_breakpoint(double t, ModelParams p)
    {
        if (!breakpoints.empty() && !(t > breakpoints.back().first))
            throw config_error("schedule breakpoint times must be strictly increasing");
        breakpoints.emplace_back(t, std::move(p));
    }

    friend bool operator==(const ParamSchedule&, const ParamSchedule&) = default;
};

/// Parameter set in force at time t: the last breakpoint with time <= t.
inline const ModelParams& params_at(const ParamSchedule& s, double t)
{
    if (s.breakpoints.empty() || t < s.breakpoints.front().first)
        throw config_error("time before schedule start");
    std::size_t k = 0;
    while (k + 1 < s.breakpoints.size() && s.breakpoints[k + 1].first <= t)
        ++k;
    return s.breakpoints[k].second;
}

/// Uniform time grid with t_end adjusted so that n_steps * dt = t_end - t0
/// holds exactly on construction.
struct TimeGrid {
    double t0 = 0.0;
    double t_end = 0.0;
    double dt = 0.0;
    long n_steps = 0;

    static TimeGrid from_step(double t0, double t_end, double dt)
    {
        if (!(dt > 0.0))
            throw config_error("dt must be > 0");
        if (!(t_end > t0))
            throw config_error("t_end must be > t0");
        const long n = std::lround((t_end - t0) / dt);
        if (n < 1)
            throw config_error("time grid has no steps");
        return TimeGrid{t0, t0 + static_cast<double>(n) * dt, dt, n};
    }

    double time(long n) const { return t0 + static_cast<double>(n) * dt; }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Number of grid steps spanned by the delay. The delay must be an exact
/// multiple of dt; delayed lookups then always hit stored grid values and
/// no interpolation is needed.
inline long delay_steps(double sigma_delay, double dt)
{
    if (!(sigma_delay > 0.0))
        throw config_error("sigma_delay must be > 0");
    const double ratio = sigma_delay / dt;
    const long m = std::lround(ratio);
    if (m < 1 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * ratio)
        throw config_error("sigma_delay must be a positive integer multiple of dt (got sigma/dt = " +
                           std::to_string(ratio) + ")");
    return m;
}

} // namespace sirdde
