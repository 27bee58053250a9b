#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "crowdroute/errors.hpp"
#include "crowdroute/instance.hpp"

namespace crowdroute {

enum class NodeKind : std::uint8_t { Origin, Pickup, Delivery };

/// One cell of the information array: a crowdsourcee origin or a request endpoint.
struct NodeRef {
    NodeKind kind = NodeKind::Origin;
    int index = 0;

    static constexpr NodeRef origin(int k) { return {NodeKind::Origin, k}; }
    static constexpr NodeRef pickup(int j) { return {NodeKind::Pickup, j}; }
    static constexpr NodeRef delivery(int j) { return {NodeKind::Delivery, j}; }

    bool is_origin() const { return kind == NodeKind::Origin; }
    bool is_pickup() const { return kind == NodeKind::Pickup; }
    bool is_delivery() const { return kind == NodeKind::Delivery; }

    friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

using Route = std::vector<NodeRef>;

inline Point location(const ProblemInstance& inst, NodeRef n) {
    switch (n.kind) {
        case NodeKind::Origin: return inst.crowdsourcees[n.index].origin;
        case NodeKind::Pickup: return inst.requests[n.index].pickup;
        case NodeKind::Delivery: return inst.requests[n.index].delivery;
    }
    return {};
}

inline std::string to_string(NodeRef n) {
    const char tag = n.is_origin() ? 'u' : (n.is_pickup() ? 'p' : 'd');
    return tag + std::to_string(n.index);
}

/// Aggregates of one simulated route. `overtime` is max(-remaining, 0).
struct RouteSummary {
    double duration = 0.0;          // d_k
    double violation = 0.0;         // v_k, total lateness past latest delivery
    double remaining = 0.0;         // tau_k
    int capacity_violations = 0;    // eta_k
    double overtime = 0.0;          // chi_k
    double carrying_time = 0.0;     // time spent with a nonzero load
};

/// Full forward simulation of a route; per-node vectors are aligned with route positions.
struct RouteSchedule : RouteSummary {
    std::vector<double> arrival;
    std::vector<double> service_start;
    std::vector<double> load_after;
};

namespace detail {

// Forward simulation shared by the summary and the full schedule. Service takes no time;
// the courier waits at a pickup until its earliest pickup time.
template <typename OnNode>
RouteSummary simulate(const ProblemInstance& inst, int k, std::span<const NodeRef> route, OnNode&& on_node) {
    const Crowdsourcee& c = inst.crowdsourcees[k];
    RouteSummary s;
    Point here = c.origin;
    double clock = c.t_start;
    double load = 0.0;
    on_node(0, clock, clock, load);
    for (std::size_t i = 1; i < route.size(); ++i) {
        const NodeRef n = route[i];
        const Point next = location(inst, n);
        const double arrival = clock + distance(here, next) / c.speed * 60.0;
        double start = arrival;
        const Request& r = inst.requests[n.index];
        if (load > 0.0) s.carrying_time += arrival - clock;
        if (n.is_pickup()) {
            if (start < r.earliest_pickup) {
                if (load > 0.0) s.carrying_time += r.earliest_pickup - start;
                start = r.earliest_pickup;
            }
            load += r.weight;
            if (load > c.capacity) ++s.capacity_violations;
        } else {
            load -= r.weight;
            s.violation += std::max(start - r.latest_delivery, 0.0);
        }
        on_node(i, arrival, start, load);
        clock = start;
        here = next;
    }
    s.duration = clock - c.t_start;
    s.remaining = c.available_time() - s.duration;
    s.overtime = std::max(-s.remaining, 0.0);
    return s;
}

}  // namespace detail

/// Throws InvalidPlanError unless `route` is Origin(k) followed by complete pickup/delivery pairs
/// with every pickup before its delivery.
inline void validate_route(const ProblemInstance& inst, int k, std::span<const NodeRef> route) {
    if (k < 0 || k >= inst.num_crowdsourcees()) throw InvalidPlanError("crowdsourcee index out of range");
    if (route.empty() || route[0] != NodeRef::origin(k))
        throw InvalidPlanError("route " + std::to_string(k) + " must begin with its origin u" + std::to_string(k));
    if (route.size() > static_cast<std::size_t>(2 * inst.num_requests() + 1))
        throw InvalidPlanError("route " + std::to_string(k) + " exceeds the information-array width");
    for (std::size_t i = 1; i < route.size(); ++i) {
        const NodeRef n = route[i];
        if (n.is_origin()) throw InvalidPlanError("origin node inside route " + std::to_string(k));
        if (n.index < 0 || n.index >= inst.num_requests())
            throw InvalidPlanError("request index out of range in route " + std::to_string(k));
        const NodeRef partner = n.is_pickup() ? NodeRef::delivery(n.index) : NodeRef::pickup(n.index);
        int before = 0, after = 0, same = 0;
        for (std::size_t m = 1; m < route.size(); ++m) {
            if (route[m] == partner) (m < i ? before : after)++;
            if (route[m] == n) ++same;
        }
        if (same != 1 || before + after != 1)
            throw InvalidPlanError("request " + std::to_string(n.index) + " must appear exactly once as a pickup/delivery pair");
        if (n.is_delivery() && before != 1)
            throw InvalidPlanError("delivery of request " + std::to_string(n.index) + " precedes its pickup");
    }
}

/// Aggregates only; no validation. Hot path for move enumeration.
inline RouteSummary evaluate_route(const ProblemInstance& inst, int k, std::span<const NodeRef> route) {
    return detail::simulate(inst, k, route, [](std::size_t, double, double, double) {});
}

/// Validated full schedule of crowdsourcee k's route.
inline RouteSchedule schedule_route(const ProblemInstance& inst, int k, std::span<const NodeRef> route) {
    validate_route(inst, k, route);
    RouteSchedule sched;
    sched.arrival.resize(route.size());
    sched.service_start.resize(route.size());
    sched.load_after.resize(route.size());
    static_cast<RouteSummary&>(sched) =
        detail::simulate(inst, k, route, [&](std::size_t i, double arrival, double start, double load) {
            sched.arrival[i] = arrival;
            sched.service_start[i] = start;
            sched.load_after[i] = load;
        });
    return sched;
}

// Tolerance for comparing simulated times against windows.
inline constexpr double kTimeTolerance = 1e-9;

/// Conditions of route feasibility, numbered as in the usual definition.
enum class FeasibilityCondition : int {
    EarliestPickup = 1,
    LatestDelivery = 2,
    Availability = 3,
    Capacity = 4,
};

struct FeasibilityReport {
    bool feasible = true;
    std::vector<FeasibilityCondition> violated;
    RouteSchedule schedule;
};

inline bool is_feasible(const RouteSummary& s) {
    return s.violation <= kTimeTolerance && s.remaining >= -kTimeTolerance && s.capacity_violations == 0;
}

inline FeasibilityReport check_feasibility(const ProblemInstance& inst, int k, std::span<const NodeRef> route) {
    const RouteSchedule sched = schedule_route(inst, k, route);
    FeasibilityReport report;
    report.schedule = sched;
    auto flag = [&](FeasibilityCondition c) {
        report.feasible = false;
        report.violated.push_back(c);
    };
    bool early = false;
    for (std::size_t i = 1; i < route.size(); ++i)
        if (route[i].is_pickup() && sched.service_start[i] < inst.requests[route[i].index].earliest_pickup - kTimeTolerance)
            early = true;
    if (early) flag(FeasibilityCondition::EarliestPickup);
    if (sched.violation > kTimeTolerance) flag(FeasibilityCondition::LatestDelivery);
    if (sched.remaining < -kTimeTolerance) flag(FeasibilityCondition::Availability);
    if (sched.capacity_violations > 0) flag(FeasibilityCondition::Capacity);
    return report;
}

/// Big-M slack reported for requests already on a route.
inline constexpr double kAssignedSlack = 1e6;

struct RequestMetrics {
    double slack = 0.0;           // s_j
    double unused_service = 0.0;  // b_j
    double occupation = 0.0;      // o_j
    double pickup_time = 0.0;     // t_{p_j}
    double delivery_time = 0.0;   // t_{d_j}
};

enum class PayMode {
    Duration,  // beta_c * d_k per route
    Carrying,  // beta_c * time spent with a nonzero load
};

/// The information array plus the implied backup set. Holds a pointer to its instance,
/// which must outlive it. Schedules are cached per route and refreshed on every set_route.
class PlanState {
public:
    explicit PlanState(const ProblemInstance& inst) : inst_(&inst) {
        const int n_k = inst.num_crowdsourcees();
        routes_.resize(n_k);
        schedules_.resize(n_k);
        for (int k = 0; k < n_k; ++k) {
            routes_[k] = {NodeRef::origin(k)};
            schedules_[k] = schedule_route(inst, k, routes_[k]);
        }
        route_of_.assign(inst.num_requests(), -1);
    }

    const ProblemInstance& instance() const { return *inst_; }
    int num_routes() const { return static_cast<int>(routes_.size()); }
    const Route& route(int k) const { return routes_[k]; }
    const std::vector<Route>& routes() const { return routes_; }
    const RouteSchedule& schedule(int k) const { return schedules_[k]; }

    bool is_idle(int k) const { return routes_[k].size() == 1; }
    int route_of(int j) const { return route_of_[j]; }
    bool is_assigned(int j) const { return route_of_[j] >= 0; }

    std::vector<int> backup_set() const {
        std::vector<int> out;
        for (int j = 0; j < static_cast<int>(route_of_.size()); ++j)
            if (route_of_[j] < 0) out.push_back(j);
        return out;
    }

    std::vector<int> requests_on(int k) const {
        std::vector<int> out;
        for (std::size_t i = 1; i < routes_[k].size(); ++i)
            if (routes_[k][i].is_pickup()) out.push_back(routes_[k][i].index);
        return out;
    }

    /// Replaces row k. Throws InvalidPlanError if the row is malformed or would put a request on two routes.
    void set_route(int k, Route route) { set_routes({{k, std::move(route)}}); }

    /// Replaces several rows at once, so a request may move between them.
    void set_routes(std::vector<std::pair<int, Route>> rows) {
        std::vector<int> owner = route_of_;
        for (const auto& [k, route] : rows)
            for (std::size_t i = 1; i < routes_[k].size(); ++i) owner[routes_[k][i].index] = -1;
        for (const auto& [k, route] : rows) {
            validate_route(*inst_, k, route);
            for (std::size_t i = 1; i < route.size(); ++i) {
                const int j = route[i].index;
                if (owner[j] >= 0 && owner[j] != k)
                    throw InvalidPlanError("request " + std::to_string(j) + " is already on route " + std::to_string(owner[j]));
                owner[j] = k;
            }
        }
        route_of_ = std::move(owner);
        for (auto& [k, route] : rows) {
            schedules_[k] = schedule_route(*inst_, k, route);
            routes_[k] = std::move(route);
        }
    }

    /// Position of the pickup and delivery of request j on its route.
    std::pair<int, int> positions(int j) const {
        const int k = route_of_[j];
        if (k < 0) return {-1, -1};
        int p = -1, d = -1;
        for (std::size_t i = 1; i < routes_[k].size(); ++i) {
            if (routes_[k][i].index != j) continue;
            (routes_[k][i].is_pickup() ? p : d) = static_cast<int>(i);
        }
        return {p, d};
    }

    bool all_routes_feasible() const {
        return std::all_of(schedules_.begin(), schedules_.end(), [](const RouteSchedule& s) { return is_feasible(s); });
    }

    /// True when every cached schedule equals a from-scratch recomputation and the
    /// request partition is consistent.
    bool verify_cache() const {
        std::vector<int> seen(route_of_.size(), -1);
        for (int k = 0; k < num_routes(); ++k) {
            const RouteSchedule fresh = schedule_route(*inst_, k, routes_[k]);
            const RouteSchedule& cached = schedules_[k];
            if (fresh.duration != cached.duration || fresh.violation != cached.violation ||
                fresh.capacity_violations != cached.capacity_violations || fresh.remaining != cached.remaining ||
                fresh.service_start != cached.service_start)
                return false;
            for (std::size_t i = 1; i < routes_[k].size(); ++i) seen[routes_[k][i].index] = k;
        }
        return seen == route_of_;
    }

    std::size_t hash() const {
        std::size_t h = 1469598103934665603ull;
        for (const auto& r : routes_) {
            for (NodeRef n : r) {
                h ^= (static_cast<std::size_t>(n.kind) << 24) ^ static_cast<std::size_t>(n.index);
                h *= 1099511628211ull;
            }
            h ^= 0xffu;
            h *= 1099511628211ull;
        }
        return h;
    }

    friend bool operator==(const PlanState& a, const PlanState& b) { return a.routes_ == b.routes_; }

private:
    const ProblemInstance* inst_;
    std::vector<Route> routes_;
    std::vector<RouteSchedule> schedules_;
    std::vector<int> route_of_;
};

inline RequestMetrics request_metrics(const PlanState& plan, int j) {
    const ProblemInstance& inst = plan.instance();
    const Request& r = inst.requests[j];
    RequestMetrics m;
    const int k = plan.route_of(j);
    if (k < 0) {
        const double to_pickup = travel_time(inst.depot, r.pickup, inst.backup_speed);
        const double direct_backup = travel_time(r.pickup, r.delivery, inst.backup_speed);
        m.slack = (r.latest_delivery - r.earliest_pickup) - travel_time(r.pickup, r.delivery, inst.courier_speed());
        m.pickup_time = r.earliest_pickup + to_pickup;
        m.delivery_time = m.pickup_time + direct_backup;
        m.unused_service = r.latest_delivery - m.delivery_time;
        m.occupation = direct_backup;
        return m;
    }
    const auto [p, d] = plan.positions(j);
    const RouteSchedule& s = plan.schedule(k);
    m.slack = kAssignedSlack;
    m.pickup_time = s.service_start[p];
    m.delivery_time = s.service_start[d];
    m.unused_service = r.latest_delivery - m.delivery_time;
    m.occupation = m.delivery_time - m.pickup_time;
    return m;
}

/// Last delivery minus first pickup on route k; zero for an idle courier.
inline double route_occupation(const PlanState& plan, int k) {
    const Route& route = plan.route(k);
    if (route.size() < 2) return 0.0;
    const RouteSchedule& s = plan.schedule(k);
    double first_pickup = std::numeric_limits<double>::infinity();
    double last_delivery = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < route.size(); ++i) {
        if (route[i].is_pickup()) first_pickup = std::min(first_pickup, s.service_start[i]);
        else last_delivery = std::max(last_delivery, s.service_start[i]);
    }
    return last_delivery - first_pickup;
}

/// Crowdsourcee pay for one route.
inline double courier_cost(const ProblemInstance& inst, const RouteSummary& s, PayMode pay = PayMode::Duration) {
    return inst.beta_c * (pay == PayMode::Duration ? s.duration : s.carrying_time);
}

/// Crowdsourcee pay plus one independent backup round trip per unassigned request.
inline double total_shipping_cost(const PlanState& plan, PayMode pay = PayMode::Duration) {
    const ProblemInstance& inst = plan.instance();
    double cost = 0.0;
    for (int k = 0; k < plan.num_routes(); ++k) cost += courier_cost(inst, plan.schedule(k), pay);
    for (int j = 0; j < inst.num_requests(); ++j)
        if (!plan.is_assigned(j)) cost += inst.beta_b * backup_round_trip(inst, inst.requests[j]);
    return cost;
}

// --- plan dump -----------------------------------------------------------

/// One line per route (`u0 p3 d3`), then `backup: 1 4`.
inline std::string dump_plan(const PlanState& plan) {
    std::ostringstream out;
    for (const Route& r : plan.routes()) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? " " : "") << to_string(r[i]);
        out << '\n';
    }
    out << "backup:";
    for (int j : plan.backup_set()) out << ' ' << j;
    out << '\n';
    return out.str();
}

inline PlanState parse_plan(const ProblemInstance& inst, const std::string& text) {
    PlanState plan(inst);
    std::istringstream in(text);
    std::string line;
    int k = 0;
    bool saw_backup = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("backup:", 0) == 0) {
            saw_backup = true;
            std::istringstream ids(line.substr(7));
            int j;
            while (ids >> j) {
                if (j < 0 || j >= inst.num_requests() || plan.is_assigned(j))
                    throw ParseError("backup", "backup line lists request " + std::to_string(j) + " inconsistently");
            }
            continue;
        }
        if (k >= inst.num_crowdsourcees()) throw ParseError("route", "more route lines than crowdsourcees");
        std::istringstream tokens(line);
        std::string tok;
        Route route;
        while (tokens >> tok) {
            if (tok.size() < 2 || (tok[0] != 'u' && tok[0] != 'p' && tok[0] != 'd'))
                throw ParseError("route", "bad node token '" + tok + "'");
            int idx = 0;
            try {
                idx = std::stoi(tok.substr(1));
            } catch (const std::exception&) {
                throw ParseError("route", "bad node token '" + tok + "'");
            }
            const NodeKind kind = tok[0] == 'u' ? NodeKind::Origin : (tok[0] == 'p' ? NodeKind::Pickup : NodeKind::Delivery);
            route.push_back({kind, idx});
        }
        plan.set_route(k++, std::move(route));
    }
    if (k != inst.num_crowdsourcees() || !saw_backup) throw ParseError("route", "incomplete plan dump");
    return plan;
}

}  // namespace crowdroute
