#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "borrowoc/design.hpp"
#include "borrowoc/design_prior.hpp"
#include "borrowoc/mixture.hpp"
#include "borrowoc/quadrature.hpp"
#include "borrowoc/roots.hpp"

namespace borrowoc {

enum class Method { quadrature, monte_carlo };

inline std::string to_string(Method m) {
    return m == Method::quadrature ? "quadrature" : "monte_carlo";
}

/// Named metric value plus a numerical-error estimate and the method that
/// produced it (n_reps/seed populated on the Monte Carlo path only).
struct MetricReport {
    std::string name;
    double value = 0.0;
    double abs_error = 0.0;
    Method method = Method::quadrature;
    long n_reps = 0;
    std::uint64_t seed = 0;
};

struct CurvePoint {
    double truth = 0.0;
    double value = 0.0;
};

namespace detail {

/// Probability that a normal observation N(theta, se^2) lands on the success
/// side of the threshold.
inline double success_side_prob(double threshold, double theta, double se, Direction dir) {
    const double p = norm_cdf((threshold - theta) / se);
    return dir == Direction::greater ? 1.0 - p : p;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Conditional power
// ---------------------------------------------------------------------------

/// CP(delta) for a contrast-borrowing design with a precomputed success
/// boundary.
inline double conditional_power(const ContrastBorrowDesign& d, double delta, double ystar) {
    return detail::success_side_prob(ystar, delta, d.s_new, d.rule.direction);
}

inline double conditional_power(const ContrastBorrowDesign& d, double delta) {
    return conditional_power(d, delta, critical_value(d));
}

/// CP(theta_c, theta_t) for a control-borrowing design: the treatment-arm
/// success probability integrated over the control-arm sampling
/// distribution, with the boundary supplied per observed control mean.
inline double conditional_power(const ControlBorrowDesign& d, double theta_c, double theta_t,
                                const CriticalCurve& curve, double tol = 1e-6) {
    const double se_c = d.se_c(), se_t = d.se_t();
    auto integrand = [&](double yc) {
        return detail::success_side_prob(curve(yc), theta_t, se_t, d.rule.direction) *
               norm_pdf(yc, theta_c, se_c);
    };
    return integrate(integrand, theta_c - 12.0 * se_c, theta_c + 12.0 * se_c, tol).value;
}

inline double conditional_power(const ControlBorrowDesign& d, double theta_c, double theta_t,
                                double tol = 1e-6) {
    return conditional_power(d, theta_c, theta_t, CriticalCurve(d), tol);
}

// ---------------------------------------------------------------------------
// Classical (pointwise frequentist) type I error
// ---------------------------------------------------------------------------

inline double classical_type1(const ContrastBorrowDesign& d) {
    return conditional_power(d, d.rule.delta_null);
}

/// Pointwise classical type I error across true control values, with the
/// treatment mean locked to theta_c + delta_null.
inline std::vector<CurvePoint> classical_type1_curve(const ControlBorrowDesign& d, double lo,
                                                     double hi, int points, double tol = 1e-6) {
    if (points < 2) throw std::invalid_argument("classical_type1_curve: need >= 2 points");
    const CriticalCurve curve(d);
    std::vector<CurvePoint> out(points);
    for (int i = 0; i < points; ++i) {
        const double tc = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
        out[i] = {tc, conditional_power(d, tc, tc + d.rule.delta_null, curve, tol)};
    }
    return out;
}

/// Contrast-borrowing: a single rate, independent of drift.
inline std::vector<CurvePoint> classical_type1_curve(const ContrastBorrowDesign& d) {
    return {{d.rule.delta_null, classical_type1(d)}};
}

// ---------------------------------------------------------------------------
// Averaged metrics over a design prior
// ---------------------------------------------------------------------------

namespace detail {

inline MetricReport quad_report(std::string name, const QuadResult& q) {
    MetricReport r;
    r.name = std::move(name);
    r.value = std::min(std::max(q.value, 0.0), 1.0);
    r.abs_error = q.abs_error;
    r.method = Method::quadrature;
    return r;
}

/// Averaged CP over a plain-mixture design prior for the control mode.
/// The theta_c integral against each design-prior component is a Gaussian
/// conjugate identity, which collapses the nested integral to one dimension:
///   A = int dybar_c sum_k w_k N(ybar_c; mu_k, sd_k^2 + se_c^2)
///         * S((ystar(ybar_c) - delta* - m_k(ybar_c)) / sqrt(se_t^2 + v_k))
/// with m_k, v_k the conjugate posterior mean/variance of theta_c under
/// component k, and one boundary root-find per quadrature node.
inline QuadResult average_cp_control_mixture(const ControlBorrowDesign& d, const MixtureNormal& p,
                                             double delta_star, double tol) {
    const CriticalCurve curve(d);
    const double sc = d.se_c(), st = d.se_t();
    const std::size_t n = p.size();
    std::vector<double> vk(n), pred_sd(n), tail_sd(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double pv = p.components()[k].sd * p.components()[k].sd;
        vk[k] = 1.0 / (1.0 / pv + 1.0 / (sc * sc));
        pred_sd[k] = std::sqrt(pv + sc * sc);
        tail_sd[k] = std::sqrt(st * st + vk[k]);
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = 0; k < n; ++k) {
        lo = std::min(lo, p.components()[k].mean - 12.0 * pred_sd[k]);
        hi = std::max(hi, p.components()[k].mean + 12.0 * pred_sd[k]);
    }
    auto integrand = [&](double yc) {
        const double ystar = curve(yc);
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const auto& c = p.components()[k];
            const double pv = c.sd * c.sd;
            const double mk = vk[k] * (c.mean / pv + yc / (sc * sc));
            acc += p.weights()[k] * norm_pdf(yc, c.mean, pred_sd[k]) *
                   success_side_prob(ystar, mk + delta_star, tail_sd[k], d.rule.direction);
        }
        return acc;
    };
    return integrate(integrand, lo, hi, tol);
}

} // namespace detail

/// Average of the conditional power over a design prior: the general design
/// evaluation metric. Control mode places the design prior on theta_c and
/// locks theta_t = theta_c + delta_star; contrast mode places it on delta
/// and ignores delta_star. Spike-and-slab priors belong to upper_bound_fp.
inline MetricReport average_metric(const ControlBorrowDesign& d, const DesignPrior& prior,
                                   double delta_star, double tol = 1e-6) {
    if (const auto* m = prior.get_if<MixtureNormal>()) {
        return detail::quad_report("average_metric",
                                   detail::average_cp_control_mixture(d, *m, delta_star, tol));
    }
    if (const auto* t = prior.get_if<TruncatedMixture>()) {
        const CriticalCurve curve(d);
        auto integrand = [&](double tc) {
            return t->density(tc) * conditional_power(d, tc, tc + delta_star, curve, tol);
        };
        return detail::quad_report(
            "average_metric", integrate(integrand, t->support_lo(12.0), t->cut(), tol));
    }
    if (const auto* pm = prior.get_if<PointMass>()) {
        MetricReport r;
        r.name = "average_metric";
        r.value = conditional_power(d, pm->location, pm->location + delta_star, tol);
        r.abs_error = tol;
        return r;
    }
    throw std::invalid_argument(
        "average_metric: spike-and-slab design priors are handled by upper_bound_fp");
}

inline MetricReport average_metric(const ContrastBorrowDesign& d, const DesignPrior& prior,
                                   double tol = 1e-6) {
    if (const auto* pm = prior.get_if<PointMass>()) {
        MetricReport r;
        r.name = "average_metric";
        r.value = conditional_power(d, pm->location);
        r.abs_error = 1e-12;
        return r;
    }
    if (prior.get_if<SpikeAndSlab>())
        throw std::invalid_argument(
            "average_metric: spike-and-slab design priors are handled by upper_bound_fp");
    const double ystar = critical_value(d);
    if (const auto* m = prior.get_if<MixtureNormal>()) {
        auto integrand = [&](double delta) {
            return conditional_power(d, delta, ystar) * m->density(delta);
        };
        return detail::quad_report(
            "average_metric", integrate(integrand, m->support_lo(12.0), m->support_hi(12.0), tol));
    }
    const auto* t = prior.get_if<TruncatedMixture>();
    auto integrand = [&](double delta) {
        return conditional_power(d, delta, ystar) * t->density(delta);
    };
    return detail::quad_report("average_metric",
                               integrate(integrand, t->support_lo(12.0), t->cut(), tol));
}

// ---------------------------------------------------------------------------
// Null-averaged and pre-posterior metrics (contrast borrowing)
// ---------------------------------------------------------------------------

namespace detail {

struct NullTail {
    double integral = 0.0;  // int_{null side} CP(delta) p(delta) d delta
    double null_mass = 0.0; // Pr(delta on null side) under p
    double abs_error = 0.0;
};

/// Shared quadrature for the null-side joint integral of (success, truth).
inline NullTail null_tail_integral(const ContrastBorrowDesign& d, const MixtureNormal& p,
                                   double tol) {
    const ContrastBorrowDesign r = d.reflected_greater();
    const MixtureNormal q = d.rule.direction == Direction::less ? p.negated() : p;
    NullTail out;
    out.null_mass = q.cdf(r.rule.delta_null);
    if (!(out.null_mass > 0.0))
        throw std::domain_error(
            "average_type1_null: design prior has zero mass on the null side, so the "
            "normalizing constant Pr(delta on null side) vanishes");
    const double ystar = critical_value(r);
    auto integrand = [&](double delta) {
        return conditional_power(r, delta, ystar) * q.density(delta);
    };
    const double lo = std::min(q.support_lo(12.0), r.rule.delta_null);
    const QuadResult qr = integrate(integrand, lo, r.rule.delta_null, tol);
    out.integral = std::min(std::max(qr.value, 0.0), out.null_mass);
    out.abs_error = qr.abs_error;
    return out;
}

} // namespace detail

/// Average type I error with respect to the normalized analysis-style design
/// prior truncated to the null side of delta_null.
inline MetricReport average_type1_null(const ContrastBorrowDesign& d, const MixtureNormal& p,
                                       double tol = 1e-6) {
    const auto t = detail::null_tail_integral(d, p, tol);
    MetricReport r;
    r.name = "average_type1_null";
    r.value = t.integral / t.null_mass;
    r.abs_error = t.abs_error / t.null_mass;
    return r;
}

/// Pre-posterior probability of a false positive: the joint probability that
/// the true effect is null-or-harmful and the study succeeds. Also evaluated
/// as average_type1_null x null mass; the two routes must agree to 1e-10.
inline MetricReport preposterior_fp(const ContrastBorrowDesign& d, const MixtureNormal& p,
                                    double tol = 1e-6) {
    const auto t = detail::null_tail_integral(d, p, tol);
    const double direct = t.integral;
    const double via_average = (t.integral / t.null_mass) * t.null_mass;
    if (std::abs(direct - via_average) > 1e-10)
        throw std::logic_error("preposterior_fp: normalization identity violated");
    MetricReport r;
    r.name = "preposterior_fp";
    r.value = direct;
    r.abs_error = t.abs_error;
    return r;
}

/// Closed-form upper bound on preposterior_fp: classical type I error times
/// the prior probability of a null-or-harmful effect (the spike weight for
/// spike-and-slab design priors).
inline MetricReport upper_bound_fp(const ContrastBorrowDesign& d, const DesignPrior& prior,
                                   double tol = 1e-6) {
    (void)tol;
    double null_mass = 0.0;
    if (const auto* m = prior.get_if<MixtureNormal>()) {
        null_mass = d.rule.direction == Direction::greater ? m->cdf(d.rule.delta_null)
                                                           : 1.0 - m->cdf(d.rule.delta_null);
    } else if (const auto* s = prior.get_if<SpikeAndSlab>()) {
        null_mass = s->spike_weight;
    } else {
        throw std::invalid_argument(
            "upper_bound_fp: design prior must be a mixture or spike-and-slab");
    }
    MetricReport r;
    r.name = "upper_bound_fp";
    r.value = classical_type1(d) * null_mass;
    r.abs_error = 1e-12;
    return r;
}

/// Joint (truth, decision) probabilities for a contrast-borrowing design.
struct DecisionTable {
    double p_fp = 0.0; // success and null/harmful
    double p_tp = 0.0; // success and beneficial
    double p_tn = 0.0; // failure and null/harmful
    double p_fn = 0.0; // failure and beneficial
    double correct() const { return p_tp + p_tn; }
    double sum() const { return p_fp + p_tp + p_tn + p_fn; }
};

inline DecisionTable decision_table(const ContrastBorrowDesign& d, const MixtureNormal& p,
                                    double tol = 1e-6) {
    const ContrastBorrowDesign r = d.reflected_greater();
    const MixtureNormal q = d.rule.direction == Direction::less ? p.negated() : p;
    const double null_mass = q.cdf(r.rule.delta_null);
    const double ystar = critical_value(r);
    auto integrand = [&](double delta) {
        return conditional_power(r, delta, ystar) * q.density(delta);
    };
    DecisionTable t;
    if (null_mass > 0.0) {
        const double lo = std::min(q.support_lo(12.0), r.rule.delta_null);
        t.p_fp = std::min(std::max(integrate(integrand, lo, r.rule.delta_null, tol).value, 0.0),
                          null_mass);
    }
    if (null_mass < 1.0) {
        const double hi = std::max(q.support_hi(12.0), r.rule.delta_null);
        t.p_tp = std::min(std::max(integrate(integrand, r.rule.delta_null, hi, tol).value, 0.0),
                          1.0 - null_mass);
    }
    t.p_tn = null_mass - t.p_fp;
    t.p_fn = (1.0 - null_mass) - t.p_tp;
    return t;
}

/// Tail mass of the prior beyond delta_null in the benefit direction.
inline double prior_prob_benefit(const MixtureNormal& p, double delta_null, Direction dir) {
    return tail_prob(p, delta_null, dir);
}

// ---------------------------------------------------------------------------
// Extremum scan over the control-parameter range
// ---------------------------------------------------------------------------

enum class Extremum { max, min };

/// Coarse grid scan of CP(theta_c, theta_c + delta_star) followed by a
/// golden-section polish around the best cell.
inline std::pair<double, double> scan_extremum(const ControlBorrowDesign& d, double lo, double hi,
                                               Extremum which, double delta_star,
                                               double tol = 1e-6, int coarse_points = 101) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
        throw std::invalid_argument("scan_extremum: need a finite range");
    const CriticalCurve curve(d);
    auto f = [&](double tc) { return conditional_power(d, tc, tc + delta_star, curve, tol); };
    const bool maximize = which == Extremum::max;
    int best = 0;
    double best_val = maximize ? -1.0 : 2.0;
    std::vector<double> xs(coarse_points);
    for (int i = 0; i < coarse_points; ++i) {
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / (coarse_points - 1);
        const double v = f(xs[i]);
        if (maximize ? v > best_val : v < best_val) {
            best = i;
            best_val = v;
        }
    }
    const double a = xs[std::max(0, best - 1)];
    const double b = xs[std::min(coarse_points - 1, best + 1)];
    auto [x, v] = golden_section(f, a, b, maximize, 1e-7 * (hi - lo));
    if (maximize ? best_val > v : best_val < v) return {xs[best], best_val};
    return {x, v};
}

} // namespace borrowoc
