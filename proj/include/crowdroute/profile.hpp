#pragma once

#include <stdexcept>
#include <string>

#include "crowdroute/instance.hpp"
#include "crowdroute/reward.hpp"

namespace crowdroute {

/// Size class plus the hyperparameters tuned for it.
struct Profile {
    std::string name;
    int n_requests = 50;
    int n_crowdsourcees = 22;
    int episode_length = 85;
    PenaltyConfig penalty{0.1, 0.2, 0.15, false};
    int tabu_tenure = 3;
    double termination_threshold = -25.0;
    double epsilon_decay = 0.001;
};

inline Profile medium_profile() { return {"medium", 50, 22, 85, {0.1, 0.2, 0.15, false}, 3, -25.0, 0.001}; }

inline Profile large_profile() { return {"large", 200, 70, 300, {0.25, 0.15, 0.2, false}, 12, -175.0, 0.002}; }

/// Half-size medium problem used for quick local experiments.
inline Profile desk_profile() {
    Profile p = medium_profile();
    p.name = "desk";
    p.n_requests = 25;
    p.n_crowdsourcees = 11;
    return p;
}

inline Profile profile_by_name(const std::string& name) {
    if (name == "medium") return medium_profile();
    if (name == "large") return large_profile();
    if (name == "desk") return desk_profile();
    throw std::invalid_argument("unknown profile '" + name + "' (expected medium, large or desk)");
}

}  // namespace crowdroute
