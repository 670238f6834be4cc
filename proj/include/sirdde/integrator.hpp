// Copyright (c) 2026 the sirdde authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sirdde/core.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace sirdde {

/// Flat solution vector. Model adaptors define the component layout.
using State = std::vector<double>;

/// Prescribed solution on the initial interval [-sigma, 0] (shifted by t0).
using HistoryFunction = std::function<State(double)>;

inline HistoryFunction constant_history(State u0)
{
    return [u = std::move(u0)](double) { return u; };
}

/// Ring buffer of the most recent states, indexed by absolute step number.
/// Holds enough steps for the delayed lookup (lag m) plus the two previous
/// states needed by the two-step BDF formula.
class HistoryBuffer {
public:
    HistoryBuffer(std::size_t capacity, long first_step)
        : slots_(capacity), next_step_(first_step)
    {
        if (capacity == 0)
            throw std::logic_error("HistoryBuffer capacity must be positive");
    }

    void push(State s)
    {
        slots_[index_of(next_step_)] = std::move(s);
        ++next_step_;
    }

    long last_step() const { return next_step_ - 1; }

    const State& at_step(long step) const
    {
        const long last = last_step();
        const long first = std::max(first_stored_, last - static_cast<long>(slots_.size()) + 1);
        if (step < first || step > last)
            throw std::logic_error("HistoryBuffer: step " + std::to_string(step) +
                                   " outside stored window [" + std::to_string(first) + ", " +
                                   std::to_string(last) + "]");
        return slots_[index_of(step)];
    }

private:
    std::size_t index_of(long step) const
    {
        long r = step % static_cast<long>(slots_.size());
        if (r < 0)
            r += static_cast<long>(slots_.size());
        return static_cast<std::size_t>(r);
    }

    std::vector<State> slots_;
    long next_step_;
    long first_stored_ = next_step_;
};

struct IntegrateOptions {
    double picard_tol = 1e-10; // relative increment
    int picard_max_iter = 100;
};

template <class Rhs>
concept DelayedRhs = requires(const Rhs r, double t, const State& u, State& out) {
    r.eval(t, u, u, out);
};

/// Rhs types may provide their own implicit-stage solver (e.g. the PDE model,
/// which treats diffusion implicitly). It must solve
///     u = rhs_const + coeff * F(t, u, u_lag)
/// to the requested relative increment, with the incoming u as initial guess.
template <class Rhs>
concept HasStageSolver = requires(const Rhs r, double t, double c, const State& rc,
                                  const State& lag, State& u, const IntegrateOptions& o) {
    r.solve_stage(t, c, rc, lag, u, o);
};

/// Plain fixed-point (Picard) solve of u = rhs_const + coeff * F(t, u, u_lag).
/// When lag is null (no delay) the current iterate is passed as the delayed
/// argument, giving an ordinary implicit ODE stage.
template <DelayedRhs Rhs>
inline int picard_solve(const Rhs& rhs, double t, double coeff, const State& rhs_const,
                        const State* lag, State& u, const IntegrateOptions& opts)
{
    State f(u.size()), next(u.size());
    double delta = 0.0;
    for (int it = 0; it < opts.picard_max_iter; ++it) {
        rhs.eval(t, u, lag ? *lag : u, f);
        delta = 0.0;
        double unorm = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) {
            next[j] = rhs_const[j] + coeff * f[j];
            delta = std::max(delta, std::abs(next[j] - u[j]));
            unorm = std::max(unorm, std::abs(next[j]));
        }
        u.swap(next);
        if (delta <= opts.picard_tol * std::max(unorm, 1.0))
            return it + 1;
    }
    throw convergence_error("Picard iteration did not converge at t = " + std::to_string(t) +
                            " (last increment " + std::to_string(delta) + ")");
}

/// Method-of-steps integrator for u'(t) = F(t, u(t), u(t - sigma)) with one
/// constant delay: BDF2 with a single BDF1 startup step, each implicit stage
/// solved by fixed-point iteration. The delayed argument is read from the
/// history buffer and is therefore known data at every stage.
///
/// sigma_delay == 0 integrates a plain (non-delayed) system with the same
/// scheme. The observer is called with (t, state) for every grid point,
/// including the initial condition.
template <DelayedRhs Rhs, class Observer>
inline void integrate_observe(const Rhs& rhs, const HistoryFunction& history, const TimeGrid& grid,
                              double sigma_delay, Observer&& on_step, IntegrateOptions opts = {})
{
    const long m = sigma_delay > 0.0 ? delay_steps(sigma_delay, grid.dt) : 0;
    const std::size_t capacity = static_cast<std::size_t>(std::max<long>(m, 2)) + 1;
    HistoryBuffer buf(capacity, -m);
    for (long j = -m; j <= 0; ++j)
        buf.push(history(grid.t0 + static_cast<double>(j) * grid.dt));

    State u_prev = buf.at_step(0);
    State u_prev2;
    on_step(grid.t0, u_prev);

    const std::size_t dim = u_prev.size();
    State rhs_const(dim);
    State u(dim);
    for (long n = 1; n <= grid.n_steps; ++n) {
        const double t = grid.time(n);
        double coeff;
        if (n == 1) { // BDF1 startup
            coeff = grid.dt;
            rhs_const = u_prev;
        }
        else { // BDF2: u = (4 u^{n-1} - u^{n-2}) / 3 + (2 dt / 3) F
            coeff = 2.0 * grid.dt / 3.0;
            for (std::size_t j = 0; j < dim; ++j)
                rhs_const[j] = (4.0 * u_prev[j] - u_prev2[j]) / 3.0;
        }
        const State* lag = m > 0 ? &buf.at_step(n - m) : nullptr;
        u = u_prev; // initial guess
        if constexpr (HasStageSolver<Rhs>) {
            rhs.solve_stage(t, coeff, rhs_const, lag ? *lag : u, u, opts);
        }
        else {
            picard_solve(rhs, t, coeff, rhs_const, lag, u, opts);
        }
        buf.push(u);
        on_step(t, u);
        u_prev2 = std::move(u_prev);
        u_prev = u;
    }
}

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
};

template <DelayedRhs Rhs>
inline Trajectory integrate(const Rhs& rhs, const HistoryFunction& history, const TimeGrid& grid,
                            double sigma_delay, IntegrateOptions opts = {})
{
    Trajectory traj;
    traj.times.reserve(static_cast<std::size_t>(grid.n_steps) + 1);
    traj.states.reserve(static_cast<std::size_t>(grid.n_steps) + 1);
    integrate_observe(
        rhs, history, grid, sigma_delay,
        [&](double t, const State& u) {
            traj.times.push_back(t);
            traj.states.push_back(u);
        },
        opts);
    return traj;
}

} // namespace sirdde
