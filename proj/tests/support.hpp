#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "crowdroute/crowdroute.hpp"

namespace testing_support {

using namespace crowdroute;

inline Request request(int id, Point p, Point d, double latest = 120.0, double weight = 1.0, double earliest = 0.0) {
    return {id, p, d, earliest, latest, weight};
}

inline Crowdsourcee courier(int id, Point origin, double t_end = 120.0, double capacity = 10.0, double speed = 10.0) {
    return {id, origin, 0.0, t_end, capacity, speed};
}

inline ProblemInstance make_instance(std::vector<Request> reqs, std::vector<Crowdsourcee> cours) {
    ProblemInstance inst;
    inst.requests = std::move(reqs);
    inst.crowdsourcees = std::move(cours);
    inst.depot = {3.0, 3.0};
    return inst;
}

/// Random tiny scenario with deliberately tight windows so every feasibility condition bites.
inline ProblemInstance random_small_instance(int n_req, int n_cour, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coord(0.0, 6.0), w(1.0, 7.0), late(20.0, 120.0), avail(30.0, 120.0);
    std::vector<Request> reqs;
    for (int j = 0; j < n_req; ++j) reqs.push_back(request(j, {coord(rng), coord(rng)}, {coord(rng), coord(rng)}, late(rng), w(rng)));
    std::vector<Crowdsourcee> cours;
    for (int k = 0; k < n_cour; ++k) cours.push_back(courier(k, {coord(rng), coord(rng)}, avail(rng), 10.0, 10.0));
    return make_instance(std::move(reqs), std::move(cours));
}

/// Uniformly random precedence-valid route over the given requests.
inline Route random_route(int k, const std::vector<int>& reqs, std::mt19937_64& rng) {
    std::vector<NodeRef> nodes;
    for (int j : reqs) {
        nodes.push_back(NodeRef::pickup(j));
        nodes.push_back(NodeRef::delivery(j));
    }
    std::shuffle(nodes.begin(), nodes.end(), rng);
    // Swap any delivery that precedes its pickup.
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].is_delivery())
            for (std::size_t m = i + 1; m < nodes.size(); ++m)
                if (nodes[m].is_pickup() && nodes[m].index == nodes[i].index) std::swap(nodes[i], nodes[m]);
    Route r{NodeRef::origin(k)};
    r.insert(r.end(), nodes.begin(), nodes.end());
    return r;
}

/// Random plan: each request goes to a random route or stays on backup.
inline PlanState random_plan(const ProblemInstance& inst, std::mt19937_64& rng) {
    std::vector<std::vector<int>> on(inst.num_crowdsourcees());
    std::uniform_int_distribution<int> where(-1, inst.num_crowdsourcees() - 1);
    for (int j = 0; j < inst.num_requests(); ++j) {
        const int k = where(rng);
        if (k >= 0) on[k].push_back(j);
    }
    PlanState plan(inst);
    std::vector<std::pair<int, Route>> rows;
    for (int k = 0; k < inst.num_crowdsourcees(); ++k) rows.push_back({k, random_route(k, on[k], rng)});
    plan.set_routes(std::move(rows));
    return plan;
}

// --- independent oracles --------------------------------------------------

inline double naive_minutes(Point a, Point b, double mph) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    return std::sqrt(dx * dx + dy * dy) * 60.0 / mph;
}

inline Point naive_location(const ProblemInstance& inst, NodeRef n) {
    if (n.kind == NodeKind::Origin) return inst.crowdsourcees[n.index].origin;
    if (n.kind == NodeKind::Pickup) return inst.requests[n.index].pickup;
    return inst.requests[n.index].delivery;
}

struct NaiveSchedule {
    double duration = 0, violation = 0, overtime = 0;
    int capacity_violations = 0;
    bool feasible = true;
};

/// Re-simulates a route leg by leg from scratch, written without the library's simulation code.
inline NaiveSchedule naive_schedule(const ProblemInstance& inst, int k, const Route& route) {
    const Crowdsourcee& c = inst.crowdsourcees[k];
    NaiveSchedule out;
    double t = c.t_start, load = 0.0;
    Point at = c.origin;
    for (std::size_t i = 1; i < route.size(); ++i) {
        const NodeRef n = route[i];
        const Request& r = inst.requests[n.index];
        const Point next = naive_location(inst, n);
        t += naive_minutes(at, next, c.speed);
        at = next;
        if (n.kind == NodeKind::Pickup) {
            if (t < r.earliest_pickup) t = r.earliest_pickup;
            load += r.weight;
            if (load > c.capacity) ++out.capacity_violations;
        } else {
            load -= r.weight;
            if (t > r.latest_delivery) out.violation += t - r.latest_delivery;
        }
    }
    out.duration = route.size() > 1 ? t - c.t_start : 0.0;
    const double remaining = (c.t_end - c.t_start) - out.duration;
    out.overtime = remaining < 0 ? -remaining : 0.0;
    out.feasible = out.violation <= 1e-9 && remaining >= -1e-9 && out.capacity_violations == 0;
    return out;
}

/// TSC summed leg by leg.
inline double naive_tsc(const PlanState& plan) {
    const ProblemInstance& inst = plan.instance();
    double cost = 0.0;
    for (int k = 0; k < plan.num_routes(); ++k) cost += inst.beta_c * naive_schedule(inst, k, plan.route(k)).duration;
    for (int j = 0; j < inst.num_requests(); ++j) {
        if (plan.is_assigned(j)) continue;
        const Request& r = inst.requests[j];
        cost += inst.beta_b * (naive_minutes(inst.depot, r.pickup, inst.backup_speed) +
                               naive_minutes(r.pickup, r.delivery, inst.backup_speed) +
                               naive_minutes(r.delivery, inst.depot, inst.backup_speed));
    }
    return cost;
}

/// All precedence-valid orderings of the given request set as routes of courier k.
inline std::vector<Route> all_routes(int k, const std::vector<int>& reqs) {
    std::vector<NodeRef> nodes;
    for (int j : reqs) {
        nodes.push_back(NodeRef::pickup(j));
        nodes.push_back(NodeRef::delivery(j));
    }
    std::sort(nodes.begin(), nodes.end(), [](NodeRef a, NodeRef b) {
        return std::pair(static_cast<int>(a.kind), a.index) < std::pair(static_cast<int>(b.kind), b.index);
    });
    auto key = [](NodeRef n) { return std::pair(static_cast<int>(n.kind), n.index); };
    std::vector<Route> out;
    do {
        bool ok = true;
        for (std::size_t i = 0; i < nodes.size() && ok; ++i)
            if (nodes[i].is_delivery())
                ok = std::any_of(nodes.begin(), nodes.begin() + static_cast<long>(i),
                                 [&](NodeRef m) { return m.is_pickup() && m.index == nodes[i].index; });
        if (!ok) continue;
        Route r{NodeRef::origin(k)};
        r.insert(r.end(), nodes.begin(), nodes.end());
        out.push_back(r);
    } while (std::next_permutation(nodes.begin(), nodes.end(), [&](NodeRef a, NodeRef b) { return key(a) < key(b); }));
    return out;
}

}  // namespace testing_support
