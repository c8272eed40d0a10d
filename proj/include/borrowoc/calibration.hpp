#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "borrowoc/design.hpp"
#include "borrowoc/design_prior.hpp"
#include "borrowoc/metrics.hpp"
#include "borrowoc/roots.hpp"

namespace borrowoc {

enum class CalibrationMetric { average_type1, average_type1_null, preposterior_fp, upper_bound_fp };

inline std::string to_string(CalibrationMetric m) {
    switch (m) {
        case CalibrationMetric::average_type1: return "average_type1";
        case CalibrationMetric::average_type1_null: return "average_type1_null";
        case CalibrationMetric::preposterior_fp: return "preposterior_fp";
        default: return "upper_bound_fp";
    }
}

enum class FreeParameter { robust_weight, n_t, n_c, s_new_scale };

inline std::string to_string(FreeParameter p) {
    switch (p) {
        case FreeParameter::robust_weight: return "robust_weight";
        case FreeParameter::n_t: return "n_t";
        case FreeParameter::n_c: return "n_c";
        default: return "s_new_scale";
    }
}

/// Robust-mixture analysis prior split into its informative part and the
/// vague hedge, so the borrowing weight w (on the informative part) can be
/// varied by the calibration search. w = 0 degenerates to the pure robust
/// component, w = 1 to the informative mixture alone.
struct RobustPriorSpec {
    MixtureNormal informative;
    double robust_mean = 0.0;
    double robust_sd = 1.0;
    double weight_informative = 0.5;

    MixtureNormal build(double w) const {
        if (!(w >= 0.0 && w <= 1.0))
            throw std::domain_error("RobustPriorSpec: weight must lie in [0,1]");
        if (w <= 0.0) return MixtureNormal::single(robust_mean, robust_sd);
        if (w >= 1.0) return informative;
        return robustify(informative, 1.0 - w, robust_mean, robust_sd);
    }
    MixtureNormal build() const { return build(weight_informative); }
};

struct ParameterGrid {
    FreeParameter param = FreeParameter::robust_weight;
    double lo = 0.0;
    double hi = 1.0;
    int steps = 11; // number of grid points

    std::vector<double> points() const {
        if (steps < 1) throw std::invalid_argument("ParameterGrid: steps must be >= 1");
        if (steps == 1 || lo == hi) return {lo};
        std::vector<double> out(steps);
        for (int i = 0; i < steps; ++i)
            out[i] = lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
        return out;
    }
};

struct CalibrationRequest {
    Design base;
    std::optional<RobustPriorSpec> prior_spec; // required when robust_weight is free
    std::vector<ParameterGrid> grids;
    CalibrationMetric metric = CalibrationMetric::average_type1;
    DesignPrior design_prior;
    double target = 0.025;
    double delta_alt = 0.0; // alternative at which the efficiency side is reported
    double quad_tol = 1e-6;

    void validate() const {
        if (!(target > 0.0 && target < 1.0))
            throw std::invalid_argument("CalibrationRequest: target must lie in (0,1)");
        if (grids.empty()) throw std::invalid_argument("CalibrationRequest: empty grid");
        for (const auto& g : grids)
            if (g.param == FreeParameter::robust_weight && !prior_spec)
                throw std::invalid_argument(
                    "CalibrationRequest: robust_weight grid requires a robustified prior spec");
    }
};

struct FrontierEntry {
    std::vector<double> values; // one per grid dimension, in grid order
    double metric = 0.0;
    double power = 0.0;
};

struct CalibrationResult {
    std::vector<std::string> param_names;
    std::vector<FrontierEntry> frontier; // admissible points, sorted by power desc
    double min_metric = 1.0;             // smallest metric over the whole grid
    std::vector<double> min_metric_at;
};

namespace detail {

inline Design apply_parameters(const CalibrationRequest& req,
                               const std::vector<double>& values) {
    Design d = req.base;
    std::optional<double> w;
    for (std::size_t i = 0; i < req.grids.size(); ++i) {
        const double v = values[i];
        switch (req.grids[i].param) {
            case FreeParameter::robust_weight:
                w = v;
                break;
            case FreeParameter::n_t:
            case FreeParameter::n_c: {
                auto* ctrl = std::get_if<ControlBorrowDesign>(&d);
                if (!ctrl)
                    throw std::invalid_argument("calibrate: n_t/n_c apply to control designs");
                const int n = std::max(1, static_cast<int>(std::lround(v)));
                d = ControlBorrowDesign(
                    req.grids[i].param == FreeParameter::n_t ? n : ctrl->n_t,
                    req.grids[i].param == FreeParameter::n_c ? n : ctrl->n_c, ctrl->sigma,
                    ctrl->prior_t, ctrl->prior_c, ctrl->rule);
                break;
            }
            case FreeParameter::s_new_scale: {
                auto* con = std::get_if<ContrastBorrowDesign>(&d);
                if (!con)
                    throw std::invalid_argument("calibrate: s_new_scale applies to contrast designs");
                if (!(v > 0.0))
                    throw std::invalid_argument("calibrate: s_new_scale must be > 0");
                d = ContrastBorrowDesign(con->s_new * v, con->prior_delta, con->rule);
                break;
            }
        }
    }
    if (w) {
        const MixtureNormal prior = req.prior_spec->build(*w);
        if (auto* con = std::get_if<ContrastBorrowDesign>(&d)) {
            d = ContrastBorrowDesign(con->s_new, prior, con->rule);
        } else {
            auto& ctrl = std::get<ControlBorrowDesign>(d);
            d = ControlBorrowDesign(ctrl.n_t, ctrl.n_c, ctrl.sigma, ctrl.prior_t, prior,
                                    ctrl.rule);
        }
    }
    return d;
}

inline double evaluate_metric(const CalibrationRequest& req, const Design& d) {
    const double tol = req.quad_tol;
    if (const auto* con = std::get_if<ContrastBorrowDesign>(&d)) {
        switch (req.metric) {
            case CalibrationMetric::average_type1:
                return average_metric(*con, req.design_prior, tol).value;
            case CalibrationMetric::average_type1_null:
            case CalibrationMetric::preposterior_fp: {
                const auto* m = req.design_prior.get_if<MixtureNormal>();
                if (!m)
                    throw std::invalid_argument(
                        "calibrate: null/pre-posterior metrics need a mixture design prior");
                return req.metric == CalibrationMetric::average_type1_null
                           ? average_type1_null(*con, *m, tol).value
                           : preposterior_fp(*con, *m, tol).value;
            }
            case CalibrationMetric::upper_bound_fp:
                return upper_bound_fp(*con, req.design_prior, tol).value;
        }
    }
    const auto& ctrl = std::get<ControlBorrowDesign>(d);
    if (req.metric != CalibrationMetric::average_type1)
        throw std::invalid_argument(
            "calibrate: control-borrowing designs support the average_type1 metric");
    return average_metric(ctrl, req.design_prior, ctrl.rule.delta_null, tol).value;
}

inline double evaluate_power(const CalibrationRequest& req, const Design& d) {
    const double tol = req.quad_tol;
    if (const auto* con = std::get_if<ContrastBorrowDesign>(&d))
        return conditional_power(*con, req.delta_alt);
    const auto& ctrl = std::get<ControlBorrowDesign>(d);
    return average_metric(ctrl, req.design_prior, req.delta_alt, tol).value;
}

inline std::optional<std::size_t> grid_index(const CalibrationRequest& req, FreeParameter p) {
    for (std::size_t i = 0; i < req.grids.size(); ++i)
        if (req.grids[i].param == p) return i;
    return std::nullopt;
}

} // namespace detail

/// Grid search over the requested design space: every grid point whose
/// metric is within the target forms the admissible frontier, annotated with
/// the metric and the power at the requested alternative, sorted by power
/// descending (ties: larger borrowing weight, then smaller total sample
/// size). An empty frontier is a valid result; min_metric reports the best
/// achievable level for infeasibility diagnostics.
inline CalibrationResult calibrate(const CalibrationRequest& req) {
    req.validate();
    CalibrationResult out;
    std::vector<std::vector<double>> axes;
    for (const auto& g : req.grids) {
        out.param_names.push_back(to_string(g.param));
        axes.push_back(g.points());
    }
    std::vector<std::size_t> idx(axes.size(), 0);
    const auto wi = detail::grid_index(req, FreeParameter::robust_weight);
    const auto nti = detail::grid_index(req, FreeParameter::n_t);
    const auto nci = detail::grid_index(req, FreeParameter::n_c);
    bool done = false;
    while (!done) {
        std::vector<double> values(axes.size());
        for (std::size_t i = 0; i < axes.size(); ++i) values[i] = axes[i][idx[i]];
        const Design d = detail::apply_parameters(req, values);
        const double m = detail::evaluate_metric(req, d);
        if (m < out.min_metric) {
            out.min_metric = m;
            out.min_metric_at = values;
        }
        if (m <= req.target + 1e-12)
            out.frontier.push_back({values, m, detail::evaluate_power(req, d)});
        // advance the cartesian index
        done = true;
        for (std::size_t i = 0; i < axes.size(); ++i) {
            if (++idx[i] < axes[i].size()) {
                done = false;
                break;
            }
            idx[i] = 0;
        }
    }
    std::stable_sort(out.frontier.begin(), out.frontier.end(),
                     [&](const FrontierEntry& a, const FrontierEntry& b) {
                         if (a.power != b.power) return a.power > b.power;
                         if (wi && a.values[*wi] != b.values[*wi])
                             return a.values[*wi] > b.values[*wi];
                         double na = 0.0, nb = 0.0;
                         if (nti) { na += a.values[*nti]; nb += b.values[*nti]; }
                         if (nci) { na += a.values[*nci]; nb += b.values[*nci]; }
                         return na < nb;
                     });
    return out;
}

struct MaxWeightResult {
    std::optional<double> weight;  // largest admissible borrowing weight
    bool monotone = true;          // metric passed the monotone-in-w scan
    double metric_at_weight = 0.0;
    std::vector<std::pair<double, double>> grid; // (w, metric)
};

/// Largest informative-component weight w keeping the chosen metric within
/// the target: grid bracketing plus bisection to 1e-4. If the metric is not
/// monotone in w on the grid, falls back to reporting the largest admissible
/// grid point (monotone = false).
inline MaxWeightResult max_weight_for_bound(const CalibrationRequest& req, int grid_points = 21,
                                            double wtol = 1e-4) {
    if (!req.prior_spec)
        throw std::invalid_argument("max_weight_for_bound: a robustified prior spec is required");
    CalibrationRequest r = req;
    r.grids = {{FreeParameter::robust_weight, 0.0, 1.0, 2}}; // validated placeholder
    r.validate();
    auto metric_at = [&](double w) {
        const Design d = detail::apply_parameters(r, {w});
        return detail::evaluate_metric(r, d);
    };
    MaxWeightResult out;
    out.grid.reserve(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        const double w = static_cast<double>(i) / (grid_points - 1);
        out.grid.emplace_back(w, metric_at(w));
    }
    for (std::size_t i = 1; i < out.grid.size(); ++i)
        if (out.grid[i].second < out.grid[i - 1].second - 1e-9) out.monotone = false;

    int last_ok = -1;
    for (std::size_t i = 0; i < out.grid.size(); ++i)
        if (out.grid[i].second <= req.target + 1e-12) last_ok = static_cast<int>(i);
    if (!out.monotone) {
        if (last_ok >= 0) {
            out.weight = out.grid[last_ok].first;
            out.metric_at_weight = out.grid[last_ok].second;
        }
        return out;
    }
    if (last_ok < 0) return out; // infeasible even at w = 0
    if (last_ok == grid_points - 1) {
        out.weight = 1.0;
        out.metric_at_weight = out.grid.back().second;
        return out;
    }
    double lo = out.grid[last_ok].first, hi = out.grid[last_ok + 1].first;
    while (hi - lo > wtol) {
        const double mid = 0.5 * (lo + hi);
        (metric_at(mid) <= req.target ? lo : hi) = mid;
    }
    out.weight = lo;
    out.metric_at_weight = metric_at(lo);
    return out;
}

} // namespace borrowoc
