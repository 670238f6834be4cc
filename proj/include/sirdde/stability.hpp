// Copyright (c) 2026 the sirdde authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sirdde/core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace sirdde {

/// Point in the (a, b) plane of the rescaled scalar delay equation
/// y'(t) = a y(t) + b y(t-1), with a = alpha*tau, b = beta*tau.
struct CharPoint {
    double a = 0.0;
    double b = 0.0;
};

struct CharRoot {
    int branch = 0;
    std::complex<double> value;
};

/// Characteristic roots sorted by descending real part; the rightmost root
/// determines asymptotic stability.
struct RootSet {
    std::vector<CharRoot> roots;
    std::size_t rightmost = 0;

    const CharRoot& rightmost_root() const { return roots[rightmost]; }
};

enum class StabilityCriterion { rightmost_root, theorem_bound, contractivity };

struct StabilityVerdict {
    bool stable = false;
    double margin = 0.0;     // distance of the rightmost root from the axis, or bound slack
    bool oscillatory = false;
    StabilityCriterion criterion_used = StabilityCriterion::rightmost_root;
    bool conclusive = true;  // contractivity is sufficient only; false means "fall back"

    bool marginal() const { return std::abs(margin) < 1e-8; }
};

/// Branch k of the Lambert W function: solves w e^w = c.
inline std::complex<double> lambert_w(int k, std::complex<double> c)
{
    using C = std::complex<double>;
    constexpr double e = std::numbers::e;
    constexpr double pi = std::numbers::pi;

    if (c == 0.0) {
        if (k == 0)
            return 0.0;
        throw config_error("lambert_w: c = 0 has no finite root on branch " + std::to_string(k));
    }

    // Initial guess per branch, then Halley refinement.
    C w;
    const C p2 = 2.0 * (e * c + 1.0);
    if (k == 0 && std::abs(c) <= 0.3) {
        w = c * (1.0 - c + 1.5 * c * c);
    }
    else if ((k == 0 || k == -1) && std::abs(p2) < 0.5) {
        // series about the branch point c = -1/e
        C p = std::sqrt(p2);
        if (k == -1)
            p = -p;
        w = -1.0 + p - p * p / 3.0 + (11.0 / 72.0) * p * p * p;
    }
    else if (k == -1 && c.imag() == 0.0 && c.real() < 0.0 && c.real() > -1.0 / e) {
        const double l = std::log(-c.real());
        w = C(l - std::log(-l), 0.0);
    }
    else {
        C l1 = std::log(c) + C(0.0, 2.0 * pi * static_cast<double>(k));
        if (std::abs(l1) < 0.5) // c near 1 on the principal branch
            w = C(0.5671432904097838, 0.0);
        else
            w = l1 - std::log(l1);
    }

    for (int it = 0; it < 80; ++it) {
        const C ew = std::exp(w);
        const C f = w * ew - c;
        const C wp1 = w + 1.0;
        const C dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= dw;
        if (std::abs(dw) <= 1e-16 * (1.0 + std::abs(w)))
            break;
    }
    return w;
}

/// The 2*k_max + 1 characteristic roots of lambda = a + b e^(-lambda)
/// nearest the real axis, via the branch-indexed Lambert W solutions of
/// (lambda - a) e^(lambda - a) = b e^(-a), each polished by complex Newton
/// iteration on the characteristic equation itself.
inline RootSet characteristic_roots(CharPoint p, int k_max = 25)
{
    RootSet rs;
    if (p.b == 0.0) {
        rs.roots.push_back({0, {p.a, 0.0}});
        rs.rightmost = 0;
        return rs;
    }
    if (k_max < 1)
        throw config_error("characteristic_roots: k_max must be >= 1");

    const std::complex<double> c = p.b * std::exp(std::complex<double>(-p.a, 0.0));
    rs.roots.reserve(static_cast<std::size_t>(2 * k_max + 1));
    for (int k = -k_max; k <= k_max; ++k) {
        std::complex<double> lam = p.a + lambert_w(k, c);
        for (int it = 0; it < 12; ++it) {
            const auto g = lam - p.a - p.b * std::exp(-lam);
            if (std::abs(g) < 1e-13)
                break;
            lam -= g / (1.0 + p.b * std::exp(-lam));
        }
        if (std::abs(lam - p.a - p.b * std::exp(-lam)) > 1e-10)
            throw convergence_error("characteristic root on branch " + std::to_string(k) +
                                    " did not converge");
        rs.roots.push_back({k, lam});
    }
    std::sort(rs.roots.begin(), rs.roots.end(), [](const CharRoot& x, const CharRoot& y) {
        if (x.value.real() != y.value.real())
            return x.value.real() > y.value.real();
        return std::abs(x.value.imag()) < std::abs(y.value.imag());
    });
    rs.rightmost = 0;
    return rs;
}

/// Parametric boundary of the stability region, phi in (0, pi):
/// (a, b) = (phi cot phi, -phi / sin phi).
inline CharPoint boundary_curve(double phi)
{
    if (!(phi > 0.0) || !(phi < std::numbers::pi))
        throw std::domain_error("boundary_curve: phi must lie in (0, pi)");
    return CharPoint{phi * std::cos(phi) / std::sin(phi), -phi / std::sin(phi)};
}

/// Stability of (a, b) from the rightmost characteristic root.
inline StabilityVerdict is_stable(CharPoint p, int k_max = 25)
{
    const RootSet rs = characteristic_roots(p, k_max);
    const auto lam = rs.rightmost_root().value;
    StabilityVerdict v;
    v.criterion_used = StabilityCriterion::rightmost_root;
    v.margin = -lam.real();
    v.stable = lam.real() < 0.0;
    v.oscillatory = std::abs(lam.imag()) > 1e-9;
    return v;
}

/// Sufficient stability bound for the linearized delay system:
/// stable if [(alpha - mu < 0) or (alpha = mu = 0)] and
/// (phi_d + phi_r) * sigma < pi/2. Oscillatory rightmost roots when
/// (phi_d + phi_r) * sigma >= 1/e.
inline StabilityVerdict theorem31_check(const ModelParams& p)
{
    if (!(p.sigma_delay > 0.0))
        throw config_error("theorem31_check: sigma_delay must be > 0");
    const double prod = (p.phi_d + p.phi_r) * p.sigma_delay;
    StabilityVerdict v;
    v.criterion_used = StabilityCriterion::theorem_bound;
    const bool growth_ok = (p.alpha - p.mu < 0.0) || (p.alpha == 0.0 && p.mu == 0.0);
    v.margin = std::numbers::pi / 2.0 - prod;
    v.stable = growth_ok && v.margin > 0.0;
    v.oscillatory = prod >= 1.0 / std::numbers::e;
    return v;
}

/// Delay-independent contractivity condition a(t) + |b(t)| < 0 applied to
/// the linearized infected equation with the Allee term, with delta = s/n
/// treated as a worst-case constant over [delta_min, delta_max]. Sufficient
/// but not necessary: a failed check is inconclusive, not unstable.
inline StabilityVerdict contractivity_check(const ModelParams& p, double delta_min = 0.0,
                                            double delta_max = 1.0)
{
    // a + |b| = -mu - A delta (beta_e - beta_i) + phi_d + phi_r, worst case
    // at the delta minimizing A delta (beta_e - beta_i).
    const double gain_min = p.allee_A * (p.beta_e - p.beta_i) *
                            (p.beta_e >= p.beta_i ? delta_min : delta_max);
    const double worst = -p.mu - gain_min + p.phi_d + p.phi_r;
    StabilityVerdict v;
    v.criterion_used = StabilityCriterion::contractivity;
    v.margin = -worst;
    v.stable = worst < 0.0;
    v.conclusive = v.stable;
    v.oscillatory = false;
    return v;
}

} // namespace sirdde
