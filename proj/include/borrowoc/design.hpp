#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

#include "borrowoc/mixture.hpp"
#include "borrowoc/normal.hpp"
#include "borrowoc/roots.hpp"

namespace borrowoc {

enum class Direction { greater, less };

inline std::string to_string(Direction d) { return d == Direction::greater ? "greater" : "less"; }

/// Success rule: declare success when the posterior probability that the
/// contrast lies beyond delta_null (in `direction`) reaches `confidence`.
struct SuccessRule {
    double delta_null = 0.0;
    Direction direction = Direction::greater;
    double confidence = 0.975;

    void validate() const {
        if (!(confidence > 0.5 && confidence < 1.0))
            throw std::invalid_argument("SuccessRule: confidence must lie in (0.5, 1)");
        if (!std::isfinite(delta_null))
            throw std::invalid_argument("SuccessRule: delta_null must be finite");
    }
};

/// Two-arm design borrowing on the control response. Arm data are observed
/// means with known sampling sd sigma; each arm carries its own analysis
/// prior for the true arm mean.
struct ControlBorrowDesign {
    int n_t = 1;
    int n_c = 1;
    double sigma = 1.0;
    MixtureNormal prior_t;
    MixtureNormal prior_c;
    SuccessRule rule;

    ControlBorrowDesign(int nt, int nc, double sig, MixtureNormal pt, MixtureNormal pc,
                        SuccessRule r)
        : n_t(nt), n_c(nc), sigma(sig), prior_t(std::move(pt)), prior_c(std::move(pc)), rule(r) {
        if (n_t < 1 || n_c < 1)
            throw std::invalid_argument("ControlBorrowDesign: sample sizes must be >= 1");
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw std::invalid_argument("ControlBorrowDesign: sigma must be finite and > 0");
        rule.validate();
    }

    double se_t() const { return sigma / std::sqrt(static_cast<double>(n_t)); }
    double se_c() const { return sigma / std::sqrt(static_cast<double>(n_c)); }

    /// Reflected design (x -> -x on both arms) whose rule direction is
    /// `greater`; lets boundary internals assume a single orientation.
    ControlBorrowDesign reflected_greater() const {
        if (rule.direction == Direction::greater) return *this;
        return ControlBorrowDesign(n_t, n_c, sigma, prior_t.negated(), prior_c.negated(),
                                   {-rule.delta_null, Direction::greater, rule.confidence});
    }
};

/// One-sample design borrowing on the treatment contrast: the observed
/// contrast estimate has known standard error s_new.
struct ContrastBorrowDesign {
    double s_new = 1.0;
    MixtureNormal prior_delta;
    SuccessRule rule;

    ContrastBorrowDesign(double s, MixtureNormal prior, SuccessRule r)
        : s_new(s), prior_delta(std::move(prior)), rule(r) {
        if (!(s_new > 0.0) || !std::isfinite(s_new))
            throw std::invalid_argument("ContrastBorrowDesign: s_new must be finite and > 0");
        rule.validate();
    }

    ContrastBorrowDesign reflected_greater() const {
        if (rule.direction == Direction::greater) return *this;
        return ContrastBorrowDesign(s_new, prior_delta.negated(),
                                    {-rule.delta_null, Direction::greater, rule.confidence});
    }
};

using Design = std::variant<ControlBorrowDesign, ContrastBorrowDesign>;

/// Raised when the posterior success probability fails its monotonicity scan
/// and boundary-based evaluation would be unsound; callers should fall back
/// to the Monte Carlo path.
class MonotonicityError : public std::runtime_error {
public:
    explicit MonotonicityError(const std::string& what) : std::runtime_error(what) {}
};

inline double tail_prob(const MixtureNormal& dist, double threshold, Direction dir) {
    const double p = dist.cdf(threshold);
    return dir == Direction::greater ? 1.0 - p : p;
}

inline double posterior_success_prob(const ContrastBorrowDesign& d, double ybar) {
    if (!std::isfinite(ybar))
        throw std::domain_error("posterior_success_prob: data must be finite");
    const MixtureNormal post = d.prior_delta.posterior_update(ybar, d.s_new);
    return tail_prob(post, d.rule.delta_null, d.rule.direction);
}

/// Posterior Pr(success) for the control-borrowing design: each arm updates
/// independently, and the contrast posterior is the exact K_t x K_c mixture
/// of component differences, so the tail mass is analytic.
inline double posterior_success_prob(const ControlBorrowDesign& d, double ybar_t, double ybar_c) {
    if (!std::isfinite(ybar_t) || !std::isfinite(ybar_c))
        throw std::domain_error("posterior_success_prob: data must be finite");
    const MixtureNormal post_t = d.prior_t.posterior_update(ybar_t, d.se_t());
    const MixtureNormal post_c = d.prior_c.posterior_update(ybar_c, d.se_c());
    double p = 0.0;
    for (std::size_t i = 0; i < post_t.size(); ++i) {
        const auto& ct = post_t.components()[i];
        for (std::size_t j = 0; j < post_c.size(); ++j) {
            const auto& cc = post_c.components()[j];
            const double m = ct.mean - cc.mean;
            const double s = std::sqrt(ct.sd * ct.sd + cc.sd * cc.sd);
            const double tail = norm_cdf((d.rule.delta_null - m) / s);
            p += post_t.weights()[i] * post_c.weights()[j] *
                 (d.rule.direction == Direction::greater ? 1.0 - tail : tail);
        }
    }
    return p;
}

inline bool is_success(const ContrastBorrowDesign& d, double ybar) {
    return posterior_success_prob(d, ybar) >= d.rule.confidence;
}

inline bool is_success(const ControlBorrowDesign& d, double ybar_t, double ybar_c) {
    return posterior_success_prob(d, ybar_t, ybar_c) >= d.rule.confidence;
}

namespace detail {

/// Root of g - confidence on a bracket expanded from [lo, hi].
template <class G>
double boundary_root(const G& g, double conf, double lo, double hi, const char* what) {
    auto f = [&](double y) { return g(y) - conf; };
    double flo, fhi;
    if (!expand_to_bracket(f, lo, hi, flo, fhi))
        throw MonotonicityError(std::string(what) + ": no success boundary found in scan range");
    return brent_root(f, lo, hi, flo, fhi, 1e-10);
}

} // namespace detail

/// Observed-contrast threshold at which the success rule flips. The success
/// region is {ybar >= ystar} for direction `greater` and {ybar <= ystar} for
/// `less`. Monotonicity of the posterior success probability is verified on
/// a 512-point scan over the prior-predictive hull before root-finding.
inline double critical_value(const ContrastBorrowDesign& d) {
    const ContrastBorrowDesign r = d.reflected_greater();
    // prior predictive hull of the observed contrast
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = 0; k < r.prior_delta.size(); ++k) {
        const auto& c = r.prior_delta.components()[k];
        const double s = std::sqrt(c.sd * c.sd + r.s_new * r.s_new);
        lo = std::min(lo, c.mean - 12.0 * s);
        hi = std::max(hi, c.mean + 12.0 * s);
    }
    auto g = [&](double y) { return posterior_success_prob(r, y); };
    double where = 0.0;
    if (!scan_nondecreasing(g, lo, hi, 512, 1e-11, &where))
        throw MonotonicityError(
            "critical_value: posterior success probability is not monotone in the observed "
            "contrast near " + std::to_string(where) + "; use the Monte Carlo path");
    const double root = detail::boundary_root(g, r.rule.confidence, lo, hi, "critical_value");
    return d.rule.direction == Direction::greater ? root : -root;
}

/// Treatment-arm success boundary as a function of the observed control
/// mean, for control-borrowing designs. Verifies monotonicity in the
/// treatment data once at construction (scanned at three control-data
/// anchors); evaluations are then independent root-finds, safe to run in
/// parallel.
class CriticalCurve {
public:
    explicit CriticalCurve(const ControlBorrowDesign& d)
        : refl_(d.reflected_greater()), flip_(d.rule.direction == Direction::less) {
        const double se_c = refl_.se_c();
        const double clo = refl_.prior_c.support_lo(12.0) - 12.0 * se_c;
        const double chi = refl_.prior_c.support_hi(12.0) + 12.0 * se_c;
        for (double yc : {clo, 0.5 * (clo + chi), chi}) {
            auto g = [&](double yt) { return posterior_success_prob(refl_, yt, yc); };
            const double center = anchor(yc);
            const double span = 12.0 * wide_scale();
            double where = 0.0;
            if (!scan_nondecreasing(g, center - span, center + span, 512, 1e-11, &where))
                throw MonotonicityError(
                    "critical_curve: posterior success probability is not monotone in the "
                    "treatment data near ybar_t=" + std::to_string(where) +
                    "; use the Monte Carlo path");
        }
    }

    /// ybar_t* such that the posterior success probability equals the
    /// confidence at the given observed control mean (original orientation).
    double operator()(double ybar_c) const {
        const double yc = flip_ ? -ybar_c : ybar_c;
        auto g = [&](double yt) { return posterior_success_prob(refl_, yt, yc); };
        const double center = anchor(yc);
        const double w = local_scale(yc);
        const double root = detail::boundary_root(g, refl_.rule.confidence, center - 3.0 * w,
                                                  center + 3.0 * w, "critical_curve");
        return flip_ ? -root : root;
    }

private:
    // Moment-matched normal approximation gives the bracket center: treat
    // both posteriors as single normals and solve for the boundary.
    double anchor(double yc) const {
        const double st2 = refl_.se_t() * refl_.se_t();
        const double z = norm_quantile(refl_.rule.confidence);
        const MixtureNormal post_c = refl_.prior_c.posterior_update(yc, refl_.se_c());
        return refl_.rule.delta_null + post_c.mean() + z * std::sqrt(st2 + post_c.variance());
    }
    double local_scale(double yc) const {
        const MixtureNormal post_c = refl_.prior_c.posterior_update(yc, refl_.se_c());
        return std::sqrt(refl_.se_t() * refl_.se_t() + post_c.variance());
    }
    double wide_scale() const {
        double s = refl_.se_t();
        for (const auto& c : refl_.prior_c.components()) s = std::max(s, c.sd);
        return std::min(s, 64.0 * (refl_.se_t() + refl_.se_c()));
    }

    ControlBorrowDesign refl_;
    bool flip_;
};

} // namespace borrowoc
