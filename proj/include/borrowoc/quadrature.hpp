#pragma once

#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace borrowoc {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0; // accumulated error estimate
    int panels = 0;         // panels in the final subdivision
    bool converged = true;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair (QUADPACK dqk15 abscissae/weights).
inline constexpr double kKronrodX[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGaussW[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
inline void gauss_kronrod_15(const F& f, double a, double b, double& value, double& error) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int j = 0; j < 7; ++j) {
        fv[j] = f(c - h * kKronrodX[j]);
        fv[14 - j] = f(c + h * kKronrodX[j]);
    }
    fv[7] = f(c);
    double kron = kKronrodW[7] * fv[7];
    double gauss = kGaussW[3] * fv[7];
    for (int j = 0; j < 7; ++j) {
        kron += kKronrodW[j] * (fv[j] + fv[14 - j]);
        if (j % 2 == 1) gauss += kGaussW[j / 2] * (fv[j] + fv[14 - j]);
    }
    value = kron * h;
    error = std::abs((kron - gauss) * h);
}

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

} // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over the finite interval
/// [a, b] to an absolute tolerance. Refines the segment with the largest
/// error estimate until the accumulated estimate drops below abs_tol or the
/// panel budget is exhausted.
template <class F>
QuadResult integrate(const F& f, double a, double b, double abs_tol = 1e-8,
                     int max_panels = 4096) {
    QuadResult out;
    if (!(std::isfinite(a) && std::isfinite(b)))
        throw std::invalid_argument("integrate: limits must be finite");
    if (a == b) return out;

    std::priority_queue<detail::Segment> heap;
    detail::Segment s{a, b, 0.0, 0.0};
    detail::gauss_kronrod_15(f, a, b, s.value, s.error);
    double total = s.value, toterr = s.error;
    heap.push(s);
    int panels = 1;
    while (toterr > abs_tol && panels < max_panels) {
        detail::Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) { // interval exhausted at double precision
            heap.push(worst);
            break;
        }
        detail::Segment left{worst.a, mid, 0.0, 0.0};
        detail::Segment right{mid, worst.b, 0.0, 0.0};
        detail::gauss_kronrod_15(f, left.a, left.b, left.value, left.error);
        detail::gauss_kronrod_15(f, right.a, right.b, right.value, right.error);
        total += left.value + right.value - worst.value;
        toterr += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    out.value = total;
    out.abs_error = toterr;
    out.panels = panels;
    out.converged = toterr <= abs_tol;
    return out;
}

/// Gauss-Legendre nodes/weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence. n >= 1.
inline std::vector<std::pair<double, double>> gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    std::vector<std::pair<double, double>> out(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        out[i] = {-x, w};
        out[n - 1 - i] = {x, w};
    }
    return out;
}

/// Gauss-Legendre rule mapped onto [a, b].
inline std::vector<std::pair<double, double>> gauss_legendre(int n, double a, double b) {
    auto base = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (auto& [x, w] : base) {
        x = c + h * x;
        w *= h;
    }
    return base;
}

} // namespace borrowoc
