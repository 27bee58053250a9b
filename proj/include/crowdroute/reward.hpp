#pragma once

#include <span>

#include "crowdroute/plan.hpp"

namespace crowdroute {

/// Penalty weights of the penalized routing cost. rho and phi only ever appear as a product.
struct PenaltyConfig {
    double vartheta = 0.1;  // per minute of late delivery
    double tau = 0.2;       // per minute of overtime
    double rho_phi = 0.15;  // per capacity violation
    // Printed form chi = min(eta, 0), which never penalizes overtime. Off by default.
    bool literal_chi = false;
};

inline double overtime_term(const RouteSummary& s, const PenaltyConfig& cfg) {
    return cfg.literal_chi ? std::min(static_cast<double>(s.capacity_violations), 0.0) : s.overtime;
}

/// Penalty part of the routing cost only (the quantity accumulated as "cumulative penalty").
inline double route_penalty(const ProblemInstance& inst, const RouteSummary& s, const PenaltyConfig& cfg) {
    return inst.beta_c * (cfg.vartheta * s.violation + cfg.tau * overtime_term(s, cfg) +
                          cfg.rho_phi * static_cast<double>(s.capacity_violations));
}

/// beta_c (d + vartheta v + tau chi + rho_phi eta).
inline double penalized_route_cost(const ProblemInstance& inst, const RouteSummary& s, const PenaltyConfig& cfg) {
    return inst.beta_c * s.duration + route_penalty(inst, s, cfg);
}

/// Reward of inserting request j into a route whose duration went from `duration_before`
/// (zero for a new route) to `duration_after`.
inline double insertion_reward(const ProblemInstance& inst, double duration_before, double duration_after, int j) {
    return inst.beta_c * duration_before + inst.beta_b * backup_round_trip(inst, inst.requests[j]) -
           inst.beta_c * duration_after;
}

/// Penalized routing cost before minus after, summed over the routes touched by a move.
inline double move_reward(const ProblemInstance& inst, std::span<const RouteSummary> before,
                          std::span<const RouteSummary> after, const PenaltyConfig& cfg) {
    double c1 = 0.0, c2 = 0.0;
    for (const auto& s : before) c1 += penalized_route_cost(inst, s, cfg);
    for (const auto& s : after) c2 += penalized_route_cost(inst, s, cfg);
    return c1 - c2;
}

}  // namespace crowdroute
