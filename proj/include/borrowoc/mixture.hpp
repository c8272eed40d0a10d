#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "borrowoc/normal.hpp"
#include "borrowoc/rng.hpp"

namespace borrowoc {

struct NormalComponent {
    double mean = 0.0;
    double sd = 1.0;
};

/// Finite mixture of normal components. The universal representation for
/// analysis priors, posteriors and (untruncated) design priors. Immutable
/// after construction; all operations are pure.
class MixtureNormal {
public:
    /// Validates weights (each in (0,1], summing to 1 within 1e-9 before
    /// exact renormalization) and sds (> 0, finite). Zero-weight components
    /// are dropped with a warning on stderr.
    MixtureNormal(std::vector<double> weights, std::vector<NormalComponent> components) {
        if (weights.size() != components.size())
            throw std::invalid_argument("MixtureNormal: weights/components size mismatch");
        if (weights.empty())
            throw std::invalid_argument("MixtureNormal: at least one component required");
        double sum = 0.0;
        for (std::size_t k = 0; k < weights.size(); ++k) {
            const double w = weights[k];
            if (!std::isfinite(w) || w < 0.0 || w > 1.0)
                throw std::invalid_argument("MixtureNormal: weights must lie in [0,1]");
            if (w == 0.0) {
                std::cerr << "MixtureNormal: dropping zero-weight component " << k << "\n";
                continue;
            }
            const auto& c = components[k];
            if (!(c.sd > 0.0) || !std::isfinite(c.sd) || !std::isfinite(c.mean))
                throw std::invalid_argument("MixtureNormal: component sd must be finite and > 0");
            weights_.push_back(w);
            components_.push_back(c);
            sum += w;
        }
        if (weights_.empty())
            throw std::invalid_argument("MixtureNormal: all weights are zero");
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("MixtureNormal: weights must sum to 1");
        for (double& w : weights_) w /= sum;
    }

    static MixtureNormal single(double mean, double sd) {
        return MixtureNormal({1.0}, {{mean, sd}});
    }

    std::size_t size() const noexcept { return components_.size(); }
    const std::vector<NormalComponent>& components() const noexcept { return components_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    double density(double x) const {
        double d = 0.0;
        for (std::size_t k = 0; k < size(); ++k)
            d += weights_[k] * norm_pdf(x, components_[k].mean, components_[k].sd);
        return d;
    }

    double cdf(double x) const {
        if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
        double p = 0.0;
        for (std::size_t k = 0; k < size(); ++k)
            p += weights_[k] * norm_cdf(x, components_[k].mean, components_[k].sd);
        return p;
    }

    double mean() const {
        double m = 0.0;
        for (std::size_t k = 0; k < size(); ++k) m += weights_[k] * components_[k].mean;
        return m;
    }

    /// Law-of-total-variance mixture variance.
    double variance() const {
        const double m = mean();
        double v = 0.0;
        for (std::size_t k = 0; k < size(); ++k) {
            const double d = components_[k].mean - m;
            v += weights_[k] * (components_[k].sd * components_[k].sd + d * d);
        }
        return v;
    }

    /// Moment-based effective sample size: sigma_ref^2 / variance.
    double ess(double sigma_ref) const {
        if (!(sigma_ref > 0.0)) throw std::domain_error("ess: sigma_ref must be > 0");
        return sigma_ref * sigma_ref / variance();
    }

    /// Hull endpoints covering every component to n_sd standard deviations.
    double support_lo(double n_sd = 12.0) const {
        double lo = std::numeric_limits<double>::infinity();
        for (const auto& c : components_) lo = std::min(lo, c.mean - n_sd * c.sd);
        return lo;
    }
    double support_hi(double n_sd = 12.0) const {
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& c : components_) hi = std::max(hi, c.mean + n_sd * c.sd);
        return hi;
    }

    /// Inverse CDF. Brackets from the component hull (expanding when the
    /// requested tail lies beyond it), then runs bisection safeguarded
    /// Newton until the CDF residual and the bracket collapse.
    double quantile(double p) const {
        if (!(p > 0.0 && p < 1.0) || !std::isfinite(p))
            throw std::domain_error("quantile: p must lie in (0,1)");
        double lo = support_lo(10.0), hi = support_hi(10.0);
        while (cdf(lo) > p) lo -= (hi - lo);
        while (cdf(hi) < p) hi += (hi - lo);
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            const double fx = cdf(x) - p;
            if (fx > 0.0) hi = x; else lo = x;
            const double scale = std::max(1.0, std::abs(x));
            if (std::abs(fx) < 1e-15 || hi - lo < 1e-13 * scale) break;
            const double dens = density(x);
            double next = (dens > 0.0) ? x - fx / dens : x;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi); // Newton left the bracket
            x = next;
        }
        return x;
    }

    /// Conjugate update against one normal observation ybar with standard
    /// error se. Component means/sds update by normal-normal conjugacy; the
    /// weights are re-weighted by the marginal likelihoods, renormalized in
    /// log space so prior-data conflict cannot underflow the update.
    /// Component count is preserved.
    MixtureNormal posterior_update(double ybar, double se) const {
        if (!(se > 0.0) || !std::isfinite(se))
            throw std::domain_error("posterior_update: se must be finite and > 0");
        if (!std::isfinite(ybar))
            throw std::domain_error("posterior_update: ybar must be finite");
        const std::size_t n = size();
        std::vector<NormalComponent> comps(n);
        std::vector<double> logw(n);
        const double data_prec = 1.0 / (se * se);
        for (std::size_t k = 0; k < n; ++k) {
            const double pv = components_[k].sd * components_[k].sd;
            const double v = 1.0 / (1.0 / pv + data_prec);
            comps[k].mean = v * (components_[k].mean / pv + ybar * data_prec);
            comps[k].sd = std::sqrt(v);
            logw[k] = std::log(weights_[k]) +
                      norm_logpdf(ybar, components_[k].mean, std::sqrt(pv + se * se));
        }
        const double m = *std::max_element(logw.begin(), logw.end());
        std::vector<double> w(n);
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            w[k] = std::max(std::exp(logw[k] - m), DBL_MIN); // keep K fixed
            sum += w[k];
        }
        for (double& wk : w) wk /= sum;
        return MixtureNormal(Raw{}, std::move(w), std::move(comps));
    }

    /// Translate every component mean by c.
    MixtureNormal shifted(double c) const {
        auto comps = components_;
        for (auto& comp : comps) comp.mean += c;
        return MixtureNormal(Raw{}, weights_, std::move(comps));
    }

    /// Distribution of -X.
    MixtureNormal negated() const {
        auto comps = components_;
        for (auto& comp : comps) comp.mean = -comp.mean;
        return MixtureNormal(Raw{}, weights_, std::move(comps));
    }

    double sample(StreamRng& rng) const {
        const std::size_t k = rng.categorical(weights_);
        return rng.normal(components_[k].mean, components_[k].sd);
    }

private:
    struct Raw {}; // bypass public validation for internally-constructed values
    MixtureNormal(Raw, std::vector<double> w, std::vector<NormalComponent> c)
        : components_(std::move(c)), weights_(std::move(w)) {}

    std::vector<NormalComponent> components_;
    std::vector<double> weights_;
};

/// A mixture restricted to the lower tail (-inf, cut], renormalized.
/// Stores the normalizing mass cdf(base, cut) for pre-posterior metrics.
class TruncatedMixture {
public:
    TruncatedMixture(MixtureNormal base, double cut)
        : base_(std::move(base)), cut_(cut), mass_(base_.cdf(cut)) {
        if (!std::isfinite(cut)) throw std::domain_error("truncate_below: cut must be finite");
        if (!(mass_ > 0.0)) throw std::domain_error("truncate_below: zero mass below cut");
    }

    const MixtureNormal& base() const noexcept { return base_; }
    double cut() const noexcept { return cut_; }
    /// Mass of the untruncated mixture below the cut.
    double normalizer() const noexcept { return mass_; }

    double density(double x) const { return x <= cut_ ? base_.density(x) / mass_ : 0.0; }
    double cdf(double x) const { return x >= cut_ ? 1.0 : base_.cdf(x) / mass_; }

    double support_lo(double n_sd = 12.0) const { return std::min(base_.support_lo(n_sd), cut_); }
    double support_hi(double n_sd = 12.0) const { return std::min(base_.support_hi(n_sd), cut_); }

    double sample(StreamRng& rng) const { return base_.quantile(rng.uniform() * mass_); }

private:
    MixtureNormal base_;
    double cut_;
    double mass_;
};

inline TruncatedMixture truncate_below(const MixtureNormal& m, double cut) {
    return TruncatedMixture(m, cut);
}

/// Rescale existing weights by (1 - w_robust) and append a vague component
/// N(robust_mean, robust_sd^2) with weight w_robust.
inline MixtureNormal robustify(const MixtureNormal& m, double w_robust, double robust_mean,
                               double robust_sd) {
    if (!(w_robust > 0.0 && w_robust < 1.0))
        throw std::domain_error("robustify: w_robust must lie in (0,1)");
    if (!(robust_sd > 0.0) || !std::isfinite(robust_sd) || !std::isfinite(robust_mean))
        throw std::domain_error("robustify: robust component must be finite with sd > 0");
    std::vector<double> w = m.weights();
    std::vector<NormalComponent> comps = m.components();
    for (double& wk : w) wk *= 1.0 - w_robust;
    w.push_back(w_robust);
    comps.push_back({robust_mean, robust_sd});
    return MixtureNormal(std::move(w), std::move(comps));
}

} // namespace borrowoc
