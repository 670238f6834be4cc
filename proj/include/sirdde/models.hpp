// Copyright (c) 2026 the sirdde authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sirdde/core.hpp"
#include "sirdde/integrator.hpp"

#include <cstddef>

namespace sirdde {

/// Compartments of the delay SIRD model. The living population n = s + i + r
/// is always recomputed from the compartments, never integrated separately.
struct CompartmentVec {
    double s = 0.0;
    double i = 0.0;
    double r = 0.0;
    double d = 0.0;

    double living() const { return s + i + r; }
};

/// Delay SIRD right-hand side:
///   s' = alpha n - beta_e s i - beta_i s i_lag - mu s
///   i' = beta_e s i + beta_i s i_lag - (phi_d + phi_r) i_lag - mu i
///   r' = phi_r i_lag - mu r
///   d' = phi_d i_lag
inline CompartmentVec delay_sird_rhs(const CompartmentVec& u, const CompartmentVec& u_lag,
                                     const ModelParams& p)
{
    const double n = u.living();
    const double contact = p.beta_e * u.s * u.i + p.beta_i * u.s * u_lag.i;
    CompartmentVec f;
    f.s = p.alpha * n - contact - p.mu * u.s;
    f.i = contact - (p.phi_d + p.phi_r) * u_lag.i - p.mu * u.i;
    f.r = p.phi_r * u_lag.i - p.mu * u.r;
    f.d = p.phi_d * u_lag.i;
    return f;
}

/// Compartments of the non-delay SEIRD baseline, n = s + e + i + r.
struct SeirdVec {
    double s = 0.0;
    double e = 0.0;
    double i = 0.0;
    double r = 0.0;
    double d = 0.0;

    double living() const { return s + e + i + r; }
};

/// Non-delay SEIRD right-hand side. Here the incubation parameter is the
/// rate sigma_rate, not a delay.
inline SeirdVec seird_rhs(const SeirdVec& u, const ModelParams& p)
{
    const double n = u.living();
    SeirdVec f;
    const double contact = p.beta_i * u.s * u.i + p.beta_e * u.s * u.e;
    f.s = p.alpha * n - contact - p.mu * u.s;
    f.e = contact - (p.sigma_rate + p.phi_e + p.mu) * u.e;
    f.i = p.sigma_rate * u.e - (p.phi_d + p.phi_r + p.mu) * u.i;
    f.r = p.phi_r * u.i + p.phi_e * u.e - p.mu * u.r;
    f.d = p.phi_d * u.i;
    return f;
}

/// State of the linearization about the zero equilibrium, with n substituted
/// for s.
struct LinearizedVec {
    double n = 0.0;
    double i = 0.0;
    double r = 0.0;
    double d = 0.0;
};

/// Linearized delay system:
///   n' = (alpha - mu) n + mu d
///   i' = -(phi_d + phi_r) i_lag - mu i
///   r' = phi_r i_lag - mu r
///   d' = phi_d i_lag
inline LinearizedVec linearized_rhs(const LinearizedVec& u, const LinearizedVec& u_lag,
                                    const ModelParams& p)
{
    LinearizedVec f;
    f.n = (p.alpha - p.mu) * u.n + p.mu * u.d;
    f.i = -(p.phi_d + p.phi_r) * u_lag.i - p.mu * u.i;
    f.r = p.phi_r * u_lag.i - p.mu * u.r;
    f.d = p.phi_d * u_lag.i;
    return f;
}

// --- integrator adaptors on flat states -----------------------------------

namespace sird_layout {
constexpr std::size_t S = 0, I = 1, R = 2, D = 3, size = 4;

inline CompartmentVec unpack(const State& u)
{
    return CompartmentVec{u[S], u[I], u[R], u[D]};
}

inline State pack(const CompartmentVec& v)
{
    return State{v.s, v.i, v.r, v.d};
}
} // namespace sird_layout

struct DelaySirdRhs {
    ParamSchedule schedule;

    void eval(double t, const State& u, const State& u_lag, State& out) const
    {
        const ModelParams& p = params_at(schedule, t);
        const CompartmentVec f = delay_sird_rhs(sird_layout::unpack(u), sird_layout::unpack(u_lag), p);
        out[sird_layout::S] = f.s;
        out[sird_layout::I] = f.i;
        out[sird_layout::R] = f.r;
        out[sird_layout::D] = f.d;
    }
};

namespace seird_layout {
constexpr std::size_t S = 0, E = 1, I = 2, R = 3, D = 4, size = 5;

inline SeirdVec unpack(const State& u)
{
    return SeirdVec{u[S], u[E], u[I], u[R], u[D]};
}

inline State pack(const SeirdVec& v)
{
    return State{v.s, v.e, v.i, v.r, v.d};
}
} // namespace seird_layout

struct SeirdRhs {
    ParamSchedule schedule;

    void eval(double t, const State& u, const State&, State& out) const
    {
        const ModelParams& p = params_at(schedule, t);
        const SeirdVec f = seird_rhs(seird_layout::unpack(u), p);
        out[seird_layout::S] = f.s;
        out[seird_layout::E] = f.e;
        out[seird_layout::I] = f.i;
        out[seird_layout::R] = f.r;
        out[seird_layout::D] = f.d;
    }
};

namespace linearized_layout {
constexpr std::size_t N = 0, I = 1, R = 2, D = 3, size = 4;

inline LinearizedVec unpack(const State& u)
{
    return LinearizedVec{u[N], u[I], u[R], u[D]};
}

inline State pack(const LinearizedVec& v)
{
    return State{v.n, v.i, v.r, v.d};
}
} // namespace linearized_layout

struct LinearizedDelayRhs {
    ParamSchedule schedule;

    void eval(double t, const State& u, const State& u_lag, State& out) const
    {
        const ModelParams& p = params_at(schedule, t);
        const LinearizedVec f =
            linearized_rhs(linearized_layout::unpack(u), linearized_layout::unpack(u_lag), p);
        out[linearized_layout::N] = f.n;
        out[linearized_layout::I] = f.i;
        out[linearized_layout::R] = f.r;
        out[linearized_layout::D] = f.d;
    }
};

} // namespace sirdde
