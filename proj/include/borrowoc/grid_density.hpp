#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "borrowoc/rng.hpp"

namespace borrowoc {

/// Probability density tabulated on a strictly increasing grid, normalized
/// by trapezoid mass at construction. Supports interpolation, CDF lookup and
/// inverse-CDF sampling; the per-node trapezoid masses drive weighted EM
/// fits.
class GriddedDensity {
public:
    GriddedDensity(std::vector<double> x, std::vector<double> pdf)
        : x_(std::move(x)), pdf_(std::move(pdf)) {
        if (x_.size() != pdf_.size() || x_.size() < 2)
            throw std::invalid_argument("GriddedDensity: need >= 2 grid points");
        for (std::size_t i = 0; i + 1 < x_.size(); ++i)
            if (!(x_[i] < x_[i + 1]))
                throw std::invalid_argument("GriddedDensity: grid must be strictly increasing");
        for (double p : pdf_)
            if (!(p >= 0.0) || !std::isfinite(p))
                throw std::invalid_argument("GriddedDensity: density values must be finite and >= 0");
        double mass = 0.0;
        for (std::size_t i = 0; i + 1 < x_.size(); ++i)
            mass += 0.5 * (pdf_[i] + pdf_[i + 1]) * (x_[i + 1] - x_[i]);
        if (!(mass > 0.0)) throw std::invalid_argument("GriddedDensity: zero total mass");
        for (double& p : pdf_) p /= mass;
        cdf_.resize(x_.size());
        cdf_[0] = 0.0;
        for (std::size_t i = 1; i < x_.size(); ++i)
            cdf_[i] = cdf_[i - 1] + 0.5 * (pdf_[i] + pdf_[i - 1]) * (x_[i] - x_[i - 1]);
        // node masses: half the adjacent trapezoids
        node_mass_.assign(x_.size(), 0.0);
        for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
            const double m = 0.5 * (pdf_[i] + pdf_[i + 1]) * (x_[i + 1] - x_[i]);
            node_mass_[i] += 0.5 * m;
            node_mass_[i + 1] += 0.5 * m;
        }
    }

    const std::vector<double>& grid() const noexcept { return x_; }
    const std::vector<double>& values() const noexcept { return pdf_; }
    const std::vector<double>& node_masses() const noexcept { return node_mass_; }

    double lo() const noexcept { return x_.front(); }
    double hi() const noexcept { return x_.back(); }

    /// Linear interpolation; zero outside the grid.
    double value(double x) const {
        if (x <= x_.front() || x >= x_.back()) {
            if (x == x_.front()) return pdf_.front();
            if (x == x_.back()) return pdf_.back();
            return 0.0;
        }
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
        const double t = (x - x_[i]) / (x_[i + 1] - x_[i]);
        return pdf_[i] + t * (pdf_[i + 1] - pdf_[i]);
    }

    double cdf(double x) const {
        if (x <= x_.front()) return 0.0;
        if (x >= x_.back()) return 1.0;
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
        const double h = x - x_[i];
        const double p = value(x);
        return std::min(1.0, cdf_[i] + 0.5 * (pdf_[i] + p) * h);
    }

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < x_.size(); ++i) m += node_mass_[i] * x_[i];
        return m;
    }

    double variance() const {
        const double m = mean();
        double v = 0.0;
        for (std::size_t i = 0; i < x_.size(); ++i) {
            const double d = x_[i] - m;
            v += node_mass_[i] * d * d;
        }
        return v;
    }

    /// Inverse-CDF sampling with linear interpolation within cells.
    double sample(StreamRng& rng) const {
        const double u = rng.uniform() * cdf_.back();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
        if (i == 0) return x_.front();
        if (i >= x_.size()) return x_.back();
        --i;
        const double du = u - cdf_[i];
        const double cell = cdf_[i + 1] - cdf_[i];
        const double t = cell > 0.0 ? du / cell : 0.5;
        return x_[i] + t * (x_[i + 1] - x_[i]);
    }

private:
    std::vector<double> x_, pdf_, cdf_, node_mass_;
};

} // namespace borrowoc
