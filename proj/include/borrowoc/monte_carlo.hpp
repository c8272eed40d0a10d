#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "borrowoc/design.hpp"
#include "borrowoc/design_prior.hpp"
#include "borrowoc/metrics.hpp"
#include "borrowoc/rng.hpp"

namespace borrowoc {

/// Options for the simulation path. `stream` keeps independent metrics on
/// independent, reproducible substreams of the same seed.
struct McOptions {
    long n_reps = 1'000'000;
    std::uint64_t seed = 20240817;
    std::uint64_t stream = 0;

    void validate() const {
        if (n_reps < 1) throw std::invalid_argument("McOptions: n_reps must be >= 1");
    }
};

namespace mc {

namespace detail {

inline MetricReport binomial_report(std::string name, double successes, long n,
                                    const McOptions& opt) {
    MetricReport r;
    r.name = std::move(name);
    r.value = successes / static_cast<double>(n);
    r.abs_error = std::sqrt(std::max(r.value * (1.0 - r.value), 0.0) / n);
    r.method = Method::monte_carlo;
    r.n_reps = n;
    r.seed = opt.seed;
    return r;
}

} // namespace detail

/// Simulated CP(delta): draw data from the sampling model at fixed truth and
/// apply the success rule through the posterior (not the boundary), keeping
/// this path independent of the quadrature machinery.
inline MetricReport conditional_power(const ContrastBorrowDesign& d, double delta, McOptions opt) {
    opt.validate();
    StreamRng rng(opt.seed, opt.stream);
    long hits = 0;
    for (long i = 0; i < opt.n_reps; ++i)
        hits += is_success(d, rng.normal(delta, d.s_new));
    return detail::binomial_report("conditional_power", static_cast<double>(hits), opt.n_reps, opt);
}

inline MetricReport conditional_power(const ControlBorrowDesign& d, double theta_c, double theta_t,
                                      McOptions opt) {
    opt.validate();
    StreamRng rng(opt.seed, opt.stream);
    long hits = 0;
    for (long i = 0; i < opt.n_reps; ++i) {
        const double yt = rng.normal(theta_t, d.se_t());
        const double yc = rng.normal(theta_c, d.se_c());
        hits += is_success(d, yt, yc);
    }
    return detail::binomial_report("conditional_power", static_cast<double>(hits), opt.n_reps, opt);
}

/// Simulated averaged metric: draw truth from the design prior, then data,
/// then apply the success rule.
inline MetricReport average_metric(const ContrastBorrowDesign& d, const DesignPrior& prior,
                                   McOptions opt) {
    opt.validate();
    StreamRng rng(opt.seed, opt.stream);
    long hits = 0;
    for (long i = 0; i < opt.n_reps; ++i) {
        const double delta = prior.sample(rng);
        hits += is_success(d, rng.normal(delta, d.s_new));
    }
    return detail::binomial_report("average_metric", static_cast<double>(hits), opt.n_reps, opt);
}

inline MetricReport average_metric(const ControlBorrowDesign& d, const DesignPrior& prior,
                                   double delta_star, McOptions opt) {
    opt.validate();
    StreamRng rng(opt.seed, opt.stream);
    long hits = 0;
    for (long i = 0; i < opt.n_reps; ++i) {
        const double tc = prior.sample(rng);
        const double yt = rng.normal(tc + delta_star, d.se_t());
        const double yc = rng.normal(tc, d.se_c());
        hits += is_success(d, yt, yc);
    }
    return detail::binomial_report("average_metric", static_cast<double>(hits), opt.n_reps, opt);
}

inline MetricReport average_type1_null(const ContrastBorrowDesign& d, const MixtureNormal& p,
                                       McOptions opt) {
    opt.validate();
    const ContrastBorrowDesign r = d.reflected_greater();
    const MixtureNormal q = d.rule.direction == Direction::less ? p.negated() : p;
    const TruncatedMixture null_prior = truncate_below(q, r.rule.delta_null);
    StreamRng rng(opt.seed, opt.stream);
    long hits = 0;
    for (long i = 0; i < opt.n_reps; ++i) {
        const double delta = null_prior.sample(rng);
        hits += is_success(r, rng.normal(delta, r.s_new));
    }
    return detail::binomial_report("average_type1_null", static_cast<double>(hits), opt.n_reps,
                                   opt);
}

inline MetricReport preposterior_fp(const ContrastBorrowDesign& d, const MixtureNormal& p,
                                    McOptions opt) {
    opt.validate();
    const ContrastBorrowDesign r = d.reflected_greater();
    const MixtureNormal q = d.rule.direction == Direction::less ? p.negated() : p;
    StreamRng rng(opt.seed, opt.stream);
    long hits = 0;
    for (long i = 0; i < opt.n_reps; ++i) {
        const double delta = q.sample(rng);
        if (delta <= r.rule.delta_null && is_success(r, rng.normal(delta, r.s_new))) ++hits;
    }
    return detail::binomial_report("preposterior_fp", static_cast<double>(hits), opt.n_reps, opt);
}

struct DecisionTableMc {
    DecisionTable table;
    DecisionTable std_errors;
    long n_reps = 0;
    std::uint64_t seed = 0;
};

inline DecisionTableMc decision_table(const ContrastBorrowDesign& d, const MixtureNormal& p,
                                      McOptions opt) {
    opt.validate();
    const ContrastBorrowDesign r = d.reflected_greater();
    const MixtureNormal q = d.rule.direction == Direction::less ? p.negated() : p;
    StreamRng rng(opt.seed, opt.stream);
    long fp = 0, tp = 0, tn = 0, fn = 0;
    for (long i = 0; i < opt.n_reps; ++i) {
        const double delta = q.sample(rng);
        const bool success = is_success(r, rng.normal(delta, r.s_new));
        const bool null_side = delta <= r.rule.delta_null;
        if (success)
            (null_side ? fp : tp) += 1;
        else
            (null_side ? tn : fn) += 1;
    }
    const double n = static_cast<double>(opt.n_reps);
    DecisionTableMc out;
    out.table = {fp / n, tp / n, tn / n, fn / n};
    auto se = [n](double v) { return std::sqrt(std::max(v * (1.0 - v), 0.0) / n); };
    out.std_errors = {se(out.table.p_fp), se(out.table.p_tp), se(out.table.p_tn),
                      se(out.table.p_fn)};
    out.n_reps = opt.n_reps;
    out.seed = opt.seed;
    return out;
}

} // namespace mc
} // namespace borrowoc
