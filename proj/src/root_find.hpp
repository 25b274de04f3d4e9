// Small wrappers around boost.math scalar root finding / minimization.
#pragma once

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace dynsolve::detail {

// Bracketed root via TOMS 748. Requires f(lo), f(hi) of opposite sign.
template <class F>
double bracketed_root(F&& f, double lo, double hi, double flo, double fhi,
                      const std::string& what) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!(flo * fhi < 0.0)) throw std::runtime_error("no sign change for " + what);
    std::uintmax_t it = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                               boost::math::tools::eps_tolerance<double>(52), it);
    return 0.5 * (r.first + r.second);
}

// Expands geometrically around x0 inside [lo_hard, hi_hard] until f changes
// sign; falls back to a uniform scan of the whole interval. With best_effort,
// a rootless equation yields the scanned argmin of |f| instead of an error,
// so iteration maps stay evaluable on transient iterates that momentarily
// leave the equation's solvable region.
template <class F>
double expanding_root(F&& f, double x0, double lo_hard, double hi_hard, const std::string& what,
                      bool best_effort = false) {
    x0 = std::clamp(x0, lo_hard, hi_hard);
    double f0 = f(x0);
    if (f0 == 0.0) return x0;
    double best_x = x0, best_f = std::isfinite(f0) ? std::abs(f0) : INFINITY;
    auto consider = [&](double x, double fx) {
        if (std::isfinite(fx) && std::abs(fx) < best_f) {
            best_f = std::abs(fx);
            best_x = x;
        }
    };
    double step = 1e-3 * (hi_hard - lo_hard);
    double lo = x0, hi = x0, flo = f0, fhi = f0;
    for (int k = 0; k < 60; ++k) {
        if (hi < hi_hard) {
            hi = std::min(hi_hard, hi + step);
            fhi = f(hi);
            consider(hi, fhi);
            if (std::isfinite(fhi) && flo * fhi < 0.0) return bracketed_root(f, lo, hi, flo, fhi, what);
        }
        if (lo > lo_hard) {
            lo = std::max(lo_hard, lo - step);
            flo = f(lo);
            consider(lo, flo);
            if (std::isfinite(flo) && flo * fhi < 0.0) return bracketed_root(f, lo, hi, flo, fhi, what);
        }
        step *= 2.0;
        if (lo <= lo_hard && hi >= hi_hard) break;
    }
    // uniform scan fallback
    const int n = 200;
    double prev_x = lo_hard, prev_f = f(lo_hard);
    consider(prev_x, prev_f);
    for (int i = 1; i <= n; ++i) {
        const double x = lo_hard + (hi_hard - lo_hard) * i / n;
        const double fx = f(x);
        consider(x, fx);
        if (std::isfinite(prev_f) && std::isfinite(fx) && prev_f * fx <= 0.0)
            return bracketed_root(f, prev_x, x, prev_f, fx, what);
        prev_x = x;
        prev_f = fx;
    }
    if (best_effort && std::isfinite(best_f)) return best_x;
    throw std::runtime_error("inner solver failed to bracket a root for " + what);
}

// Newton with steps clamped to [lo, hi]; falls back to bracketing when it
// stalls. fg returns (f, f').
template <class FG, class F>
double newton_root(FG&& fg, F&& f, double x0, double lo, double hi, double tol, int max_iter,
                   const std::string& what) {
    double x = std::clamp(x0, lo, hi);
    for (int it = 0; it < max_iter; ++it) {
        auto [fv, dv] = fg(x);
        if (!std::isfinite(fv) || !std::isfinite(dv) || dv == 0.0) break;
        const double xn = std::clamp(x - fv / dv, lo, hi);
        if (std::abs(fv) <= tol || std::abs(xn - x) <= tol * (1.0 + std::abs(x))) return xn;
        x = xn;
    }
    return expanding_root(f, x, lo, hi, what);
}

} // namespace dynsolve::detail
