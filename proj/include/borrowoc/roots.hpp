#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace borrowoc {

/// Grow [lo, hi] geometrically until f changes sign across it.
/// Returns false if no sign change is found within max_expansions.
template <class F>
bool expand_to_bracket(const F& f, double& lo, double& hi, double& flo, double& fhi,
                       int max_expansions = 200, double growth = 1.6) {
    if (!(lo < hi)) throw std::invalid_argument("expand_to_bracket: lo must be < hi");
    flo = f(lo);
    fhi = f(hi);
    double width = hi - lo;
    for (int i = 0; i < max_expansions; ++i) {
        if ((flo <= 0.0 && fhi >= 0.0) || (flo >= 0.0 && fhi <= 0.0)) return true;
        width *= growth;
        if (std::abs(flo) < std::abs(fhi)) {
            lo -= width;
            flo = f(lo);
        } else {
            hi += width;
            fhi = f(hi);
        }
    }
    return (flo <= 0.0 && fhi >= 0.0) || (flo >= 0.0 && fhi <= 0.0);
}

/// Brent's method on a bracketing interval. flo/fhi are f at the endpoints
/// (pass precomputed values to avoid re-evaluation).
template <class F>
double brent_root(const F& f, double a, double b, double fa, double fb,
                  double xtol = 1e-12, int max_iter = 200) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw std::invalid_argument("brent_root: endpoints do not bracket a root");

    double c = a, fc = fa, d = b - a, e = d;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int iter = 0; iter < max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa; d = b - a; e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) { // secant
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else { // inverse quadratic
                q = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d; d = p / q;
            } else {
                d = xm; e = d;
            }
        } else {
            d = xm; e = d;
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol1) ? d : std::copysign(tol1, xm);
        fb = f(b);
    }
    return b;
}

template <class F>
double brent_root(const F& f, double a, double b, double xtol = 1e-12, int max_iter = 200) {
    return brent_root(f, a, b, f(a), f(b), xtol, max_iter);
}

/// Evaluate f on an n-point uniform grid over [lo, hi] and report whether it
/// is nondecreasing up to `slack`. On failure *where (if non-null) receives
/// the grid abscissa of the first violation.
template <class F>
bool scan_nondecreasing(const F& f, double lo, double hi, int n = 512,
                        double slack = 1e-11, double* where = nullptr) {
    double prev = f(lo);
    for (int i = 1; i < n; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
        const double cur = f(x);
        if (cur < prev - slack) {
            if (where) *where = x;
            return false;
        }
        prev = std::max(prev, cur);
    }
    return true;
}

/// Golden-section search for the extremum of f on [lo, hi].
/// maximize=true looks for a maximum. Returns (argext, f(argext)).
template <class F>
std::pair<double, double> golden_section(const F& f, double lo, double hi,
                                         bool maximize, double xtol = 1e-9) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    const double sign = maximize ? 1.0 : -1.0;
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = sign * f(x1), f2 = sign * f(x2);
    while (hi - lo > xtol) {
        if (f1 < f2) {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = sign * f(x2);
        } else {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = sign * f(x1);
        }
    }
    const double xm = 0.5 * (lo + hi);
    return {xm, f(xm)};
}

} // namespace borrowoc
