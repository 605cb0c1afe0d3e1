#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cosim/rng.hpp"
#include "cosim/util.hpp"

namespace cosim {

/// One weighted Beta component of a trait distribution.
struct BetaComponent {
    double weight = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
};

/// A named trait distribution over [0,1]: a Beta mixture. The eight shipped
/// profiles (four per trait) use a single component except the polarized
/// ones, which mix two opposed unimodal components.
struct DistributionProfile {
    std::string name;
    std::vector<BetaComponent> components;

    void validate() const {
        if (components.empty()) throw ConfigError("profile '" + name + "': no components");
        double wsum = 0.0;
        for (const auto& c : components) {
            if (c.weight < 0.0) throw ConfigError("profile '" + name + "': negative weight");
            if (c.alpha <= 0.0 || c.beta <= 0.0)
                throw ConfigError("profile '" + name + "': Beta shape parameters must be positive");
            wsum += c.weight;
        }
        if (std::abs(wsum - 1.0) > 1e-9)
            throw ConfigError("profile '" + name + "': mixture weights must sum to 1");
    }
};

enum class TraitKind { AOT, PI };

inline const char* trait_kind_name(TraitKind k) { return k == TraitKind::AOT ? "AOT" : "PI"; }

/// The eight named profiles. Low/liberal lean toward 0, high/conservative
/// toward 1, center is symmetric, polarized mixes both extremes.
inline DistributionProfile profile_by_name(const std::string& name) {
    const BetaComponent low{1.0, 2.0, 5.0};
    const BetaComponent center{1.0, 5.0, 5.0};
    const BetaComponent high{1.0, 5.0, 2.0};
    const std::vector<BetaComponent> polarized{{0.5, 8.0, 2.0}, {0.5, 2.0, 8.0}};

    DistributionProfile p;
    p.name = name;
    if (name == "aot_low" || name == "pi_liberal") p.components = {low};
    else if (name == "aot_center" || name == "pi_center") p.components = {center};
    else if (name == "aot_high" || name == "pi_conservative") p.components = {high};
    else if (name == "aot_polarized" || name == "pi_polarized") p.components = polarized;
    else throw ConfigError("unknown distribution profile: " + name);
    return p;
}

/// Draw one trait score in [0,1] from a profile.
inline double sample_trait(const DistributionProfile& profile, Rng& rng) {
    profile.validate();
    const BetaComponent* chosen = &profile.components.front();
    if (profile.components.size() > 1) {
        double u = rng.uniform01();
        double acc = 0.0;
        for (const auto& c : profile.components) {
            acc += c.weight;
            if (u < acc) {
                chosen = &c;
                break;
            }
            chosen = &c;  // weight rounding: fall through to last
        }
    }
    return rng.beta(chosen->alpha, chosen->beta);
}

}  // namespace cosim
