#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

#include "borrowoc/mixture.hpp"
#include "borrowoc/rng.hpp"

namespace borrowoc {

struct PointMass {
    double location = 0.0;
};

/// Point mass at the null plus a beneficial-effect slab; the design prior
/// shape behind the closed-form upper bound on the pre-posterior
/// false-positive probability.
struct SpikeAndSlab {
    double spike_location = 0.0;
    double spike_weight = 0.0;
    MixtureNormal slab;
};

/// Distribution over true parameter values used to evaluate a design's
/// operating characteristics (distinct from the analysis prior).
class DesignPrior {
public:
    using Value = std::variant<MixtureNormal, TruncatedMixture, PointMass, SpikeAndSlab>;

    DesignPrior(MixtureNormal m) : value_(std::move(m)) {}
    DesignPrior(TruncatedMixture t) : value_(std::move(t)) {}
    DesignPrior(PointMass p) : value_(p) {
        if (!std::isfinite(p.location))
            throw std::invalid_argument("DesignPrior: point mass location must be finite");
    }
    DesignPrior(SpikeAndSlab s) : value_(std::move(s)) {
        const auto& ss = std::get<SpikeAndSlab>(value_);
        if (!(ss.spike_weight >= 0.0 && ss.spike_weight <= 1.0))
            throw std::invalid_argument("DesignPrior: spike weight must lie in [0,1]");
        if (!std::isfinite(ss.spike_location))
            throw std::invalid_argument("DesignPrior: spike location must be finite");
    }

    const Value& value() const noexcept { return value_; }

    template <class T>
    const T* get_if() const noexcept {
        return std::get_if<T>(&value_);
    }

    std::string kind() const {
        switch (value_.index()) {
            case 0: return "mixture";
            case 1: return "truncated_mixture";
            case 2: return "point_mass";
            default: return "spike_and_slab";
        }
    }

    double sample(StreamRng& rng) const {
        return std::visit(
            [&rng](const auto& v) -> double {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, MixtureNormal>) return v.sample(rng);
                else if constexpr (std::is_same_v<T, TruncatedMixture>) return v.sample(rng);
                else if constexpr (std::is_same_v<T, PointMass>) return v.location;
                else
                    return rng.uniform() < v.spike_weight ? v.spike_location : v.slab.sample(rng);
            },
            value_);
    }

private:
    Value value_;
};

} // namespace borrowoc
