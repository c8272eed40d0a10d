#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "borrowoc/grid_density.hpp"
#include "borrowoc/mixture.hpp"
#include "borrowoc/normal.hpp"
#include "borrowoc/quadrature.hpp"

namespace borrowoc {

struct HistoricalStudy {
    std::string label;
    double estimate = 0.0;
    double se = 1.0;
};

/// Normal-normal hierarchical model configuration. The between-study sd tau
/// carries a half-normal prior with scale tau_prior_scale, integrated by
/// Gauss-Legendre quadrature on (0, 10 * scale); fixed_tau pins tau instead
/// (fixed_tau = 0 recovers the fixed-effect limit). mu_prior defaults to
/// flat.
struct HierarchyConfig {
    double tau_prior_scale = 1.0;
    int tau_grid_size = 64;
    std::optional<NormalComponent> mu_prior;
    std::optional<double> fixed_tau;
    int predictive_grid_size = 2001;

    void validate() const {
        if (!fixed_tau) {
            if (!(tau_prior_scale > 0.0) || !std::isfinite(tau_prior_scale))
                throw std::invalid_argument("HierarchyConfig: tau_prior_scale must be > 0");
            if (tau_grid_size < 16)
                throw std::invalid_argument("HierarchyConfig: tau_grid_size must be >= 16");
        } else if (!(*fixed_tau >= 0.0)) {
            throw std::invalid_argument("HierarchyConfig: fixed_tau must be >= 0");
        }
        if (predictive_grid_size < 64)
            throw std::invalid_argument("HierarchyConfig: predictive_grid_size must be >= 64");
    }
};

namespace detail {

struct TauNode {
    double tau = 0.0;
    double weight = 0.0;   // posterior mass of this node
    double mu_hat = 0.0;   // conditional posterior mean of mu
    double mu_var = 0.0;   // conditional posterior variance of mu
};

/// Conditional posterior of mu and the profile log marginal likelihood at a
/// fixed tau. Flat mu-prior unless cfg.mu_prior is set.
inline TauNode tau_node(std::span<const HistoricalStudy> data, const HierarchyConfig& cfg,
                        double tau) {
    TauNode node;
    node.tau = tau;
    double prec = 0.0, wsum = 0.0;
    for (const auto& s : data) {
        const double v = s.se * s.se + tau * tau;
        prec += 1.0 / v;
        wsum += s.estimate / v;
    }
    if (cfg.mu_prior) {
        const double v0 = cfg.mu_prior->sd * cfg.mu_prior->sd;
        prec += 1.0 / v0;
        wsum += cfg.mu_prior->mean / v0;
    }
    node.mu_var = 1.0 / prec;
    node.mu_hat = wsum / prec;
    double ll = -0.5 * std::log(prec);
    for (const auto& s : data) {
        const double v = s.se * s.se + tau * tau;
        const double r = s.estimate - node.mu_hat;
        ll += -0.5 * std::log(v) - 0.5 * r * r / v;
    }
    if (cfg.mu_prior) {
        const double v0 = cfg.mu_prior->sd * cfg.mu_prior->sd;
        const double r = cfg.mu_prior->mean - node.mu_hat;
        ll += -0.5 * r * r / v0;
    }
    node.weight = ll; // log-scale for now; caller renormalizes
    return node;
}

inline std::vector<TauNode> tau_posterior(std::span<const HistoricalStudy> data,
                                          const HierarchyConfig& cfg) {
    std::vector<TauNode> nodes;
    if (cfg.fixed_tau) {
        nodes.push_back(tau_node(data, cfg, *cfg.fixed_tau));
        nodes.back().weight = 1.0;
        return nodes;
    }
    const double tau_max = 10.0 * cfg.tau_prior_scale;
    const auto rule = gauss_legendre(cfg.tau_grid_size, 0.0, tau_max);
    nodes.reserve(rule.size());
    double max_log = -std::numeric_limits<double>::infinity();
    std::vector<double> logw(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const auto [tau, qw] = rule[i];
        nodes.push_back(tau_node(data, cfg, tau));
        const double half_normal = -0.5 * tau * tau / (cfg.tau_prior_scale * cfg.tau_prior_scale);
        logw[i] = nodes.back().weight + half_normal + std::log(qw);
        max_log = std::max(max_log, logw[i]);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        nodes[i].weight = std::exp(logw[i] - max_log);
        sum += nodes[i].weight;
    }
    for (auto& n : nodes) n.weight /= sum;
    return nodes;
}

} // namespace detail

/// Predictive density of a new study's true parameter under the hierarchical
/// model: p(theta_new | y) = int N(theta_new; mu_hat(tau), mu_var(tau) +
/// tau^2) p(tau | y) dtau, evaluated on a uniform grid spanning the
/// node-level hulls.
inline GriddedDensity map_predictive(std::span<const HistoricalStudy> data,
                                     const HierarchyConfig& cfg) {
    cfg.validate();
    if (data.empty()) throw std::domain_error("map_predictive: at least one study required");
    for (const auto& s : data)
        if (!(s.se > 0.0) || !std::isfinite(s.se) || !std::isfinite(s.estimate))
            throw std::domain_error("map_predictive: study '" + s.label +
                                    "' needs finite estimate and se > 0");

    const auto nodes = detail::tau_posterior(data, cfg);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    const double max_w = [&] {
        double m = 0.0;
        for (const auto& n : nodes) m = std::max(m, n.weight);
        return m;
    }();
    for (const auto& n : nodes) {
        if (n.weight < 1e-14 * max_w) continue;
        const double s = std::sqrt(n.mu_var + n.tau * n.tau);
        lo = std::min(lo, n.mu_hat - 10.0 * s);
        hi = std::max(hi, n.mu_hat + 10.0 * s);
    }
    std::vector<double> x(cfg.predictive_grid_size), pdf(cfg.predictive_grid_size);
    for (int i = 0; i < cfg.predictive_grid_size; ++i) {
        x[i] = lo + (hi - lo) * static_cast<double>(i) / (cfg.predictive_grid_size - 1);
        double d = 0.0;
        for (const auto& n : nodes)
            d += n.weight * norm_pdf(x[i], n.mu_hat, std::sqrt(n.mu_var + n.tau * n.tau));
        pdf[i] = d;
    }
    return GriddedDensity(std::move(x), std::move(pdf));
}

struct MixtureFit {
    MixtureNormal mixture;
    double kl = 0.0;               // achieved KL(density || mixture) on the grid
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace; // weighted log-likelihood per iteration
};

/// Weighted EM fit of a K-component normal mixture to a gridded density,
/// minimizing the discretized KL(density || mixture). Deterministic
/// quantile-spaced initialization.
inline MixtureFit fit_mixture(const GriddedDensity& density, int k, int max_iter = 1000,
                              double rel_tol = 1e-12) {
    if (k < 1 || k > 6) throw std::invalid_argument("fit_mixture: K must lie in [1,6]");
    const auto& x = density.grid();
    const auto& mass = density.node_masses();
    const std::size_t n = x.size();

    const double spread = std::sqrt(density.variance());
    const double sd_floor = std::max(1e-10 * spread, 1e-12);

    std::vector<double> w(k, 1.0 / k), mu(k), sd(k, std::max(spread, sd_floor));
    {
        // quantile-spaced means via the tabulated CDF
        std::size_t j = 0;
        for (int c = 0; c < k; ++c) {
            const double q = (c + 0.5) / k;
            while (j + 1 < n && density.cdf(x[j]) < q) ++j;
            mu[c] = x[j];
        }
    }

    std::vector<double> resp(n * k);
    double prev_ll = -std::numeric_limits<double>::infinity();
    MixtureFit out{MixtureNormal::single(0, 1)};
    for (int iter = 1; iter <= max_iter; ++iter) {
        // E-step
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double m = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double lp = std::log(w[c]) + norm_logpdf(x[i], mu[c], sd[c]);
                resp[i * k + c] = lp;
                m = std::max(m, lp);
            }
            double s = 0.0;
            for (int c = 0; c < k; ++c) {
                resp[i * k + c] = std::exp(resp[i * k + c] - m);
                s += resp[i * k + c];
            }
            for (int c = 0; c < k; ++c) resp[i * k + c] /= s;
            ll += mass[i] * (m + std::log(s));
        }
        out.objective_trace.push_back(ll);
        // M-step
        for (int c = 0; c < k; ++c) {
            double wc = 0.0, mc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double r = mass[i] * resp[i * k + c];
                wc += r;
                mc += r * x[i];
            }
            wc = std::max(wc, 1e-12);
            mc /= wc;
            double vc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = x[i] - mc;
                vc += mass[i] * resp[i * k + c] * d * d;
            }
            vc /= wc;
            w[c] = wc;
            mu[c] = mc;
            sd[c] = std::max(std::sqrt(vc), sd_floor);
        }
        double wsum = 0.0;
        for (double v : w) wsum += v;
        for (double& v : w) v /= wsum;

        out.iterations = iter;
        if (std::abs(ll - prev_ll) <= rel_tol * (1.0 + std::abs(ll))) {
            out.converged = true;
            break;
        }
        prev_ll = ll;
    }

    std::vector<NormalComponent> comps(k);
    for (int c = 0; c < k; ++c) comps[c] = {mu[c], sd[c]};
    out.mixture = MixtureNormal(std::move(w), std::move(comps));
    // discretized KL(p || q)
    double kl = 0.0;
    const auto& pdf = density.values();
    for (std::size_t i = 0; i < n; ++i) {
        if (pdf[i] <= 0.0 || mass[i] <= 0.0) continue;
        kl += mass[i] * (std::log(pdf[i]) - std::log(std::max(out.mixture.density(x[i]), 1e-320)));
    }
    out.kl = kl;
    return out;
}

} // namespace borrowoc
