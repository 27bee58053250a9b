#pragma once

#include <algorithm>
#include <vector>

#include "crowdroute/plan.hpp"

namespace crowdroute {

/// Flat encoding of the location, request-time and courier-time state components.
///
/// Layout: for each request j (11 values) pickup xy, delivery xy, successor-of-pickup xy,
/// predecessor-of-delivery xy, slack, unused service, occupation; then for each crowdsourcee
/// k (8 values) origin xy, first visited node xy, duration, lateness, remaining time,
/// capacity violations.
struct StateVector {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    friend bool operator==(const StateVector&, const StateVector&) = default;
};

inline constexpr int kFeaturesPerRequest = 11;
inline constexpr int kFeaturesPerCrowdsourcee = 8;
inline constexpr double kTimeHorizon = 240.0;  // minutes
inline constexpr double kFeatureClip = 2.0;

constexpr std::size_t state_size(int n_requests, int n_crowdsourcees) {
    return static_cast<std::size_t>(kFeaturesPerRequest * n_requests + kFeaturesPerCrowdsourcee * n_crowdsourcees);
}

inline StateVector encode_state(const PlanState& plan) {
    const ProblemInstance& inst = plan.instance();
    const int n_j = inst.num_requests();
    StateVector state;
    state.values.reserve(state_size(n_j, inst.num_crowdsourcees()));
    auto& v = state.values;

    const double side = inst.area_side;
    auto put_point = [&](Point p) {
        v.push_back(p.x / side);
        v.push_back(p.y / side);
    };
    auto put_time = [&](double t) { v.push_back(std::clamp(t / kTimeHorizon, -kFeatureClip, kFeatureClip)); };

    for (int j = 0; j < n_j; ++j) {
        const Request& r = inst.requests[j];
        put_point(r.pickup);
        put_point(r.delivery);
        if (plan.is_assigned(j)) {
            const Route& route = plan.route(plan.route_of(j));
            const auto [p, d] = plan.positions(j);
            put_point(location(inst, route[p + 1]));
            put_point(location(inst, route[d - 1]));
        } else {
            put_point(r.pickup);
            put_point(r.delivery);
        }
        const RequestMetrics m = request_metrics(plan, j);
        put_time(m.slack);
        put_time(m.unused_service);
        put_time(m.occupation);
    }
    for (int k = 0; k < inst.num_crowdsourcees(); ++k) {
        const Crowdsourcee& c = inst.crowdsourcees[k];
        const Route& route = plan.route(k);
        const RouteSchedule& s = plan.schedule(k);
        put_point(c.origin);
        put_point(route.size() > 1 ? location(inst, route[1]) : c.origin);
        put_time(s.duration);
        put_time(s.violation);
        put_time(s.remaining);
        v.push_back(n_j > 0 ? static_cast<double>(s.capacity_violations) / n_j : 0.0);
    }
    return state;
}

}  // namespace crowdroute
