// Copyright (c) 2026 the sirdde authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sirdde/core.hpp"
#include "sirdde/integrator.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace sirdde {

/// Compartment values on N+1 uniform nodes over [0, 1], N * dx = 1.
struct Field1D {
    std::vector<double> values;
    double dx = 0.0;

    static Field1D zeros(std::size_t n_cells)
    {
        return Field1D{std::vector<double>(n_cells + 1, 0.0), 1.0 / static_cast<double>(n_cells)};
    }

    std::size_t n_nodes() const { return values.size(); }
};

/// Trapezoidal rule over [0, 1].
inline double integrate_field(std::span<const double> u, double dx)
{
    double sum = 0.5 * (u.front() + u.back());
    for (std::size_t j = 1; j + 1 < u.size(); ++j)
        sum += u[j];
    return sum * dx;
}

inline double integrate_field(const Field1D& f)
{
    return integrate_field(std::span<const double>(f.values), f.dx);
}

/// Arithmetic-mean face weight, floored at zero: the population density can
/// dip below zero in the nonphysical oscillatory regimes, and a negative
/// weight would make the diffusion anti-dissipative and the implicit stage
/// matrix indefinite.
inline double face_weight(double n_left, double n_right)
{
    return std::max(0.5 * (n_left + n_right), 0.0);
}

/// Conservative population-weighted diffusion d/dx (nu n du/dx) with no-flux
/// boundaries. Face fluxes F_{j+1/2} = nu * (n_j + n_{j+1})/2 * (u_{j+1} - u_j)/dx
/// and F at the domain ends set to zero; the boundary nodes own half-size
/// control volumes, so the trapezoid-weighted sum of the result telescopes
/// to zero exactly.
inline void diffusion_operator(std::span<const double> u, std::span<const double> n, double nu,
                               double dx, std::span<double> out)
{
    const std::size_t nn = u.size();
    const double inv_dx2 = 1.0 / (dx * dx);
    double flux_left = 0.0; // F_{j-1/2} / dx, running
    for (std::size_t j = 0; j + 1 < nn; ++j) {
        const double flux_right = nu * face_weight(n[j], n[j + 1]) * (u[j + 1] - u[j]) * inv_dx2;
        out[j] = (j == 0) ? 2.0 * flux_right : flux_right - flux_left;
        flux_left = flux_right;
    }
    out[nn - 1] = -2.0 * flux_left;
}

/// Initial susceptible density: a major, a moderate and a lesser population
/// center plus a smooth background.
inline double initial_susceptible_density(double x)
{
    const double bump = std::exp(-std::pow(x + 1.0, 4));
    const double major = std::exp(-(x - 0.35) * (x - 0.35) / 1e-2);
    const double plateau = (std::exp(-std::pow(x - 0.62, 4) / 1e-5) +
                            std::exp(-std::pow(x - 0.52, 4) / 1e-5) +
                            std::exp(-std::pow(x - 0.42, 4) / 1e-5)) / 8.0;
    const double lesser = std::exp(-std::pow(x - 0.735, 4) / 1e-5) / 4.0;
    return bump + major + plateau + lesser;
}

/// Initial infected density: outbreak centered in the lesser population
/// center with a small secondary seed.
inline double initial_infected_density(double x)
{
    return std::exp(-std::pow(x - 0.75, 4) / 1e-5) / 20.0 +
           std::exp(-std::pow(x - 0.55, 4) / 1e-5) / 200.0;
}

struct PdeState {
    Field1D s, i, r, d;
};

inline PdeState initial_conditions(std::size_t n_cells)
{
    PdeState st{Field1D::zeros(n_cells), Field1D::zeros(n_cells), Field1D::zeros(n_cells),
                Field1D::zeros(n_cells)};
    for (std::size_t j = 0; j <= n_cells; ++j) {
        const double x = static_cast<double>(j) * st.s.dx;
        st.s.values[j] = initial_susceptible_density(x);
        st.i.values[j] = initial_infected_density(x);
    }
    return st;
}

namespace detail {

/// Tridiagonal solve (Thomas algorithm); diag and rhs are clobbered.
inline void solve_tridiagonal(std::span<const double> lower, std::span<double> diag,
                              std::span<const double> upper, std::span<double> rhs,
                              std::span<double> x)
{
    const std::size_t n = diag.size();
    for (std::size_t j = 1; j < n; ++j) {
        const double w = lower[j] / diag[j - 1];
        diag[j] -= w * upper[j - 1];
        rhs[j] -= w * rhs[j - 1];
    }
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t j = n - 1; j-- > 0;)
        x[j] = (rhs[j] - upper[j] * x[j + 1]) / diag[j];
}

/// Row-major 4x4 block for the coupled-stage Newton solve.
using Block4 = std::array<double, 16>;

/// Gauss-Jordan inverse with partial pivoting; false on a singular block.
inline bool invert4(Block4 m, Block4& inv)
{
    inv = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int row = col + 1; row < 4; ++row)
            if (std::abs(m[row * 4 + col]) > std::abs(m[piv * 4 + col]))
                piv = row;
        if (m[piv * 4 + col] == 0.0)
            return false;
        if (piv != col)
            for (int k = 0; k < 4; ++k) {
                std::swap(m[piv * 4 + k], m[col * 4 + k]);
                std::swap(inv[piv * 4 + k], inv[col * 4 + k]);
            }
        const double d = 1.0 / m[col * 4 + col];
        for (int k = 0; k < 4; ++k) {
            m[col * 4 + k] *= d;
            inv[col * 4 + k] *= d;
        }
        for (int row = 0; row < 4; ++row) {
            if (row == col)
                continue;
            const double w = m[row * 4 + col];
            if (w == 0.0)
                continue;
            for (int k = 0; k < 4; ++k) {
                m[row * 4 + k] -= w * m[col * 4 + k];
                inv[row * 4 + k] -= w * inv[col * 4 + k];
            }
        }
    }
    return true;
}

inline void matmul4(const Block4& a, const Block4& b, Block4& out)
{
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k)
                s += a[r * 4 + k] * b[k * 4 + c];
            out[r * 4 + c] = s;
        }
}

inline void matvec4(const Block4& a, const std::array<double, 4>& x, std::array<double, 4>& out)
{
    for (int r = 0; r < 4; ++r)
        out[r] = a[r * 4] * x[0] + a[r * 4 + 1] * x[1] + a[r * 4 + 2] * x[2] + a[r * 4 + 3] * x[3];
}

} // namespace detail

/// Semi-discrete delay SIRD reaction-diffusion system on [0, 1], flat state
/// layout [s | i | r | d] with n_cells + 1 nodes per compartment. Provides
/// its own implicit-stage solver: reaction terms are iterated Picard-style
/// while diffusion, with the population weight n frozen at the previous
/// iterate, is solved implicitly per compartment by tridiagonal elimination;
/// a block-tridiagonal Newton solve of the fully coupled stage system takes
/// over if the fixed-point iteration loses contractivity.
class DelaySirdPde {
public:
    DelaySirdPde(ParamSchedule schedule, std::size_t n_cells)
        : schedule_(std::move(schedule)), n_cells_(n_cells), nn_(n_cells + 1),
          dx_(1.0 / static_cast<double>(n_cells))
    {
        if (n_cells < 2)
            throw config_error("DelaySirdPde: need at least 2 cells");
    }

    std::size_t state_size() const { return 4 * nn_; }
    std::size_t n_nodes() const { return nn_; }
    double dx() const { return dx_; }

    std::span<const double> s(const State& u) const { return {u.data(), nn_}; }
    std::span<const double> i(const State& u) const { return {u.data() + nn_, nn_}; }
    std::span<const double> r(const State& u) const { return {u.data() + 2 * nn_, nn_}; }
    std::span<const double> d(const State& u) const { return {u.data() + 3 * nn_, nn_}; }

    State pack(const PdeState& st) const
    {
        State u(state_size());
        for (std::size_t j = 0; j < nn_; ++j) {
            u[j] = st.s.values[j];
            u[nn_ + j] = st.i.values[j];
            u[2 * nn_ + j] = st.r.values[j];
            u[3 * nn_ + j] = st.d.values[j];
        }
        return u;
    }

    void eval(double t, const State& u, const State& u_lag, State& out) const
    {
        rhs_fixed(params_at(schedule_, t), u, u_lag, out);
    }

    /// Solves u = rhs_const + coeff * F(t, u, u_lag) by two nested Picard
    /// loops. The inner loop iterates the reaction terms to tolerance with
    /// the population weight n frozen; each pass solves
    /// (I - coeff * D_nu[n]) u_c = rhs_const_c + coeff * react_c per
    /// diffusing compartment. The outer loop refreshes the frozen weight,
    /// with damping: in the nonphysical regimes n crosses zero at isolated
    /// nodes and an undamped refresh chatters across the face-weight floor.
    /// Where even the damped weight iteration loses contractivity (steep
    /// spatial oscillations in the unstable regimes), a block-tridiagonal
    /// Newton solve of the full coupled stage system takes over.
    void solve_stage(double t, double coeff, const State& rhs_const, const State& u_lag, State& u,
                     const IntegrateOptions& opts) const
    {
        const ModelParams& p = params_at(schedule_, t);
        const State guess = u;
        State v = u;
        State react(state_size());
        std::vector<double> lower(nn_), diag(nn_), upper(nn_), rhs(nn_);
        scratch_n(v);
        std::vector<double> weight = n_;
        double prev_wdelta = std::numeric_limits<double>::infinity();
        double theta = 1.0;
        constexpr int max_outer = 40;
        for (int outer = 0; outer < max_outer; ++outer) {
            n_ = weight;
            double delta = 0.0;
            bool inner_done = false;
            for (int it = 0; it < opts.picard_max_iter; ++it) {
                reaction(p, v, u_lag, react);
                const std::array<std::pair<double, std::size_t>, 3> diffusing = {
                    {{p.nu_s, 0}, {p.nu_i, nn_}, {p.nu_r, 2 * nn_}}};
                for (const auto& [nu, off] : diffusing) {
                    assemble_implicit(nu, coeff, lower, diag, upper);
                    for (std::size_t j = 0; j < nn_; ++j)
                        rhs[j] = rhs_const[off + j] + coeff * react[off + j];
                    detail::solve_tridiagonal(lower, diag, upper, rhs,
                                              std::span<double>(u.data() + off, nn_));
                }
                for (std::size_t j = 0; j < nn_; ++j)
                    u[3 * nn_ + j] = rhs_const[3 * nn_ + j] + coeff * react[3 * nn_ + j];

                delta = 0.0;
                double unorm = 0.0;
                for (std::size_t j = 0; j < u.size(); ++j) {
                    if (!std::isfinite(u[j])) // NaN must poison the norms
                        delta = std::numeric_limits<double>::infinity();
                    delta = std::max(delta, std::abs(u[j] - v[j]));
                    unorm = std::max(unorm, std::abs(u[j]));
                }
                v = u;
                if (delta <= opts.picard_tol * std::max(unorm, 1.0)) {
                    inner_done = true;
                    break;
                }
            }
            if (!inner_done) {
                u = guess;
                if (newton_stage(p, coeff, rhs_const, u_lag, u, opts))
                    return;
                throw convergence_error("PDE stage iteration did not converge at t = " +
                                        std::to_string(t) + " (last increment " +
                                        std::to_string(delta) + ")");
            }

            scratch_n(v);
            double wdelta = 0.0, wnorm = 0.0;
            for (std::size_t j = 0; j < nn_; ++j) {
                wdelta = std::max(wdelta, std::abs(n_[j] - weight[j]));
                wnorm = std::max(wnorm, std::abs(n_[j]));
            }
            if (wdelta <= opts.picard_tol * std::max(wnorm, 1.0))
                return;
            if (wdelta > 0.5 * prev_wdelta)
                theta = std::max(0.5 * theta, 0.125);
            prev_wdelta = wdelta;
            for (std::size_t j = 0; j < nn_; ++j)
                weight[j] = theta * n_[j] + (1.0 - theta) * weight[j];
        }
        u = guess;
        if (newton_stage(p, coeff, rhs_const, u_lag, u, opts))
            return;
        throw convergence_error("PDE stage iteration did not converge at t = " +
                                std::to_string(t));
    }

private:
    // Allee factor (1 - A/n), regularized so that vanishing population does
    // not fault; the contact terms themselves vanish with s*i.
    static double allee_factor(double A, double n)
    {
        if (A == 0.0)
            return 1.0;
        return 1.0 - A / std::max(n, 1e-12);
    }

    /// Right-hand side with the parameters fixed (as eval, without the
    /// schedule lookup); leaves n_ holding the population of u.
    void rhs_fixed(const ModelParams& p, const State& u, const State& u_lag, State& out) const
    {
        scratch_n(u);
        reaction(p, u, u_lag, out);
        add_diffusion(p.nu_s, u.data(), out.data());
        add_diffusion(p.nu_i, u.data() + nn_, out.data() + nn_);
        add_diffusion(p.nu_r, u.data() + 2 * nn_, out.data() + 2 * nn_);
        // deceased: no diffusion
    }

    /// 4x4 Jacobian of the pointwise reaction terms at node j with respect
    /// to (s, i, r, d); requires scratch_n(u). The delayed terms are stage
    /// constants and contribute nothing.
    void react_jacobian(const ModelParams& p, const State& u, const State& u_lag, std::size_t j,
                        detail::Block4& jb) const
    {
        const double s = u[j];
        const double i = u[nn_ + j];
        const double i_lag = u_lag[nn_ + j];
        const double n = n_[j];
        double af = 1.0, dafdn = 0.0;
        if (p.allee_A != 0.0) {
            const double nf = std::max(n, 1e-12);
            af = 1.0 - p.allee_A / nf;
            dafdn = n > 1e-12 ? p.allee_A / (nf * nf) : 0.0;
        }
        const double q = p.beta_e * s * i + p.beta_i * s * i_lag;
        const double dc_ds = af * (p.beta_e * i + p.beta_i * i_lag) + dafdn * q;
        const double dc_di = af * p.beta_e * s + dafdn * q;
        const double dc_dr = dafdn * q;
        jb = {p.alpha - dc_ds - p.mu,
              p.alpha - dc_di,
              p.alpha - dc_dr,
              0.0,
              dc_ds,
              dc_di - p.mu,
              dc_dr,
              0.0,
              0.0,
              0.0,
              -p.mu,
              0.0,
              0.0,
              0.0,
              0.0,
              0.0};
    }

    /// Semismooth Newton on the full coupled stage system
    /// G(u) = u - rhs_const - coeff * F(u) = 0, with the exact
    /// block-tridiagonal Jacobian including the diffusion dependence on the
    /// population weight. The face-weight floor makes G piecewise smooth;
    /// the clamped side uses the zero subgradient. Residual-guarded step
    /// halving; the increment criterion matches the Picard tolerance.
    bool newton_stage(const ModelParams& p, double coeff, const State& rhs_const,
                      const State& u_lag, State& u, const IntegrateOptions& opts) const
    {
        const std::size_t sz = state_size();
        State g(sz), trial(sz), gt(sz);
        std::vector<detail::Block4> sub(nn_), diag(nn_), sup(nn_), inv(nn_);
        std::vector<std::array<double, 4>> rhs(nn_), delta(nn_);
        const double inv_dx2 = 1.0 / (dx_ * dx_);
        const std::array<double, 3> nus = {p.nu_s, p.nu_i, p.nu_r};

        const auto resid = [&](const State& w, State& out) {
            rhs_fixed(p, w, u_lag, out);
            double norm = 0.0;
            for (std::size_t k = 0; k < sz; ++k) {
                out[k] = w[k] - rhs_const[k] - coeff * out[k];
                // NaN must poison the norm (std::max would silently drop it)
                if (!std::isfinite(out[k]))
                    return std::numeric_limits<double>::infinity();
                norm = std::max(norm, std::abs(out[k]));
            }
            return norm;
        };

        double gnorm = resid(u, g);
        constexpr int max_newton = 50;
        for (int it = 0; it < max_newton; ++it) {
            if (!std::isfinite(gnorm))
                return false;
            // J = I - coeff * (J_react + J_diff); n_ currently matches u
            for (std::size_t j = 0; j < nn_; ++j) {
                detail::Block4 jr;
                react_jacobian(p, u, u_lag, j, jr);
                detail::Block4& a = sub[j];
                detail::Block4& b = diag[j];
                detail::Block4& c = sup[j];
                a.fill(0.0);
                c.fill(0.0);
                for (int k = 0; k < 16; ++k)
                    b[k] = -coeff * jr[k];
                for (int k = 0; k < 4; ++k)
                    b[5 * k] += 1.0;
                const double scale = (j == 0 || j + 1 == nn_) ? 2.0 : 1.0;
                for (int comp = 0; comp < 3; ++comp) {
                    if (nus[comp] == 0.0)
                        continue;
                    const double cnu = coeff * scale * nus[comp] * inv_dx2;
                    const std::size_t off = static_cast<std::size_t>(comp) * nn_;
                    const double f_l = j > 0 ? face_weight(n_[j - 1], n_[j]) : 0.0;
                    const double f_r = j + 1 < nn_ ? face_weight(n_[j], n_[j + 1]) : 0.0;
                    const double g_l = (j > 0 && n_[j - 1] + n_[j] > 0.0) ? 0.5 : 0.0;
                    const double g_r = (j + 1 < nn_ && n_[j] + n_[j + 1] > 0.0) ? 0.5 : 0.0;
                    const double du_l = j > 0 ? u[off + j] - u[off + j - 1] : 0.0;
                    const double du_r = j + 1 < nn_ ? u[off + j + 1] - u[off + j] : 0.0;
                    // same-compartment coupling through u
                    a[comp * 4 + comp] -= cnu * f_l;
                    b[comp * 4 + comp] += cnu * (f_l + f_r);
                    c[comp * 4 + comp] -= cnu * f_r;
                    // coupling through the face weights, n = s + i + r
                    for (int m = 0; m < 3; ++m) {
                        a[comp * 4 + m] += cnu * g_l * du_l;
                        b[comp * 4 + m] -= cnu * (g_r * du_r - g_l * du_l);
                        c[comp * 4 + m] -= cnu * g_r * du_r;
                    }
                }
                rhs[j] = {-g[j], -g[nn_ + j], -g[2 * nn_ + j], -g[3 * nn_ + j]};
            }
            // block Thomas elimination
            for (std::size_t j = 0; j < nn_; ++j) {
                if (j > 0) {
                    detail::Block4 fac, tmp;
                    detail::matmul4(sub[j], inv[j - 1], fac);
                    detail::matmul4(fac, sup[j - 1], tmp);
                    for (int k = 0; k < 16; ++k)
                        diag[j][k] -= tmp[k];
                    std::array<double, 4> fr;
                    detail::matvec4(fac, rhs[j - 1], fr);
                    for (int k = 0; k < 4; ++k)
                        rhs[j][k] -= fr[k];
                }
                if (!detail::invert4(diag[j], inv[j]))
                    return false;
            }
            detail::matvec4(inv[nn_ - 1], rhs[nn_ - 1], delta[nn_ - 1]);
            for (std::size_t j = nn_ - 1; j-- > 0;) {
                std::array<double, 4> cr;
                detail::matvec4(sup[j], delta[j + 1], cr);
                for (int k = 0; k < 4; ++k)
                    cr[k] = rhs[j][k] - cr[k];
                detail::matvec4(inv[j], cr, delta[j]);
            }
            // residual-guarded step
            double step = 1.0;
            double tnorm = 0.0;
            for (int half = 0;; ++half) {
                for (std::size_t j = 0; j < nn_; ++j)
                    for (int k = 0; k < 4; ++k)
                        trial[static_cast<std::size_t>(k) * nn_ + j] =
                            u[static_cast<std::size_t>(k) * nn_ + j] + step * delta[j][k];
                tnorm = resid(trial, gt);
                if ((std::isfinite(tnorm) && tnorm <= gnorm) || half >= 6)
                    break;
                step *= 0.5;
            }
            double dnorm = 0.0, unorm = 0.0;
            for (std::size_t j = 0; j < nn_; ++j)
                for (int k = 0; k < 4; ++k)
                    dnorm = std::max(dnorm, step * std::abs(delta[j][k]));
            u = trial;
            g = gt;
            gnorm = tnorm;
            for (std::size_t k = 0; k < sz; ++k)
                unorm = std::max(unorm, std::abs(u[k]));
            if (std::isfinite(gnorm) && dnorm <= opts.picard_tol * std::max(unorm, 1.0))
                return true;
        }
        return false;
    }

    void scratch_n(const State& u) const
    {
        n_.resize(nn_);
        for (std::size_t j = 0; j < nn_; ++j)
            n_[j] = u[j] + u[nn_ + j] + u[2 * nn_ + j];
    }

    /// Pointwise reaction terms; requires scratch_n(u) to have been called.
    void reaction(const ModelParams& p, const State& u, const State& u_lag, State& out) const
    {
        for (std::size_t j = 0; j < nn_; ++j) {
            const double s = u[j];
            const double i = u[nn_ + j];
            const double r = u[2 * nn_ + j];
            const double i_lag = u_lag[nn_ + j];
            const double n = n_[j];
            const double contact =
                allee_factor(p.allee_A, n) * (p.beta_e * s * i + p.beta_i * s * i_lag);
            out[j] = p.alpha * n - contact - p.mu * s;
            out[nn_ + j] = contact - (p.phi_d + p.phi_r) * i_lag - p.mu * i;
            out[2 * nn_ + j] = p.phi_r * i_lag - p.mu * r;
            out[3 * nn_ + j] = p.phi_d * i_lag;
        }
    }

    void add_diffusion(double nu, const double* u, double* out) const
    {
        if (nu == 0.0)
            return;
        diff_.resize(nn_);
        diffusion_operator(std::span<const double>(u, nn_), n_, nu, dx_, diff_);
        for (std::size_t j = 0; j < nn_; ++j)
            out[j] += diff_[j];
    }

    /// Rows of (I - coeff * D_nu[n]) with the frozen weight n_.
    void assemble_implicit(double nu, double coeff, std::vector<double>& lower,
                           std::vector<double>& diag, std::vector<double>& upper) const
    {
        const double c = coeff * nu / (dx_ * dx_);
        for (std::size_t j = 0; j < nn_; ++j) {
            const double face_l = j > 0 ? face_weight(n_[j - 1], n_[j]) : 0.0;
            const double face_r = j + 1 < nn_ ? face_weight(n_[j], n_[j + 1]) : 0.0;
            const double scale = (j == 0 || j + 1 == nn_) ? 2.0 : 1.0; // half control volumes
            lower[j] = -scale * c * face_l;
            upper[j] = -scale * c * face_r;
            diag[j] = 1.0 + scale * c * (face_l + face_r);
        }
    }

    ParamSchedule schedule_;
    std::size_t n_cells_;
    std::size_t nn_;
    double dx_;
    mutable std::vector<double> n_;
    mutable std::vector<double> diff_;
};

struct PdeTotals {
    std::vector<double> times;
    std::vector<double> s, i, r, d, n;
};

struct PdeSnapshot {
    double time = 0.0;
    State state;
};

struct PdeRunResult {
    PdeTotals totals;
    std::vector<PdeSnapshot> snapshots;
};

/// Integrates the semi-discrete system with a constant-in-time field history
/// equal to the initial state, recording spatially integrated totals every
/// step and full fields at the requested snapshot times (matched to the
/// nearest grid point).
inline PdeRunResult run_pde(const DelaySirdPde& pde, const State& initial, const TimeGrid& grid,
                            double sigma_delay, const std::vector<double>& snapshot_times = {},
                            IntegrateOptions opts = {})
{
    PdeRunResult res;
    auto& tot = res.totals;
    const double dx = pde.dx();
    std::vector<bool> taken(snapshot_times.size(), false);
    integrate_observe(
        pde, constant_history(initial), grid, sigma_delay,
        [&](double t, const State& u) {
            tot.times.push_back(t);
            tot.s.push_back(integrate_field(pde.s(u), dx));
            tot.i.push_back(integrate_field(pde.i(u), dx));
            tot.r.push_back(integrate_field(pde.r(u), dx));
            tot.d.push_back(integrate_field(pde.d(u), dx));
            tot.n.push_back(tot.s.back() + tot.i.back() + tot.r.back());
            for (std::size_t k = 0; k < snapshot_times.size(); ++k) {
                if (!taken[k] && std::abs(t - snapshot_times[k]) <= grid.dt / 2.0) {
                    res.snapshots.push_back({t, u});
                    taken[k] = true;
                }
            }
        },
        opts);
    return res;
}

} // namespace sirdde
