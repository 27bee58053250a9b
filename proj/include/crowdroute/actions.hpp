#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "crowdroute/plan.hpp"
#include "crowdroute/reward.hpp"
#include "crowdroute/rules.hpp"

namespace crowdroute {

/// Network output order.
enum class ActionType : int { Insertion = 0, IntraRoute = 1, InterRoute = 2, OneExchange = 3, DoNothing = 4 };

inline constexpr int kNumActionTypes = 5;

inline const char* to_string(ActionType a) {
    switch (a) {
        case ActionType::Insertion: return "insertion";
        case ActionType::IntraRoute: return "intra-route";
        case ActionType::InterRoute: return "inter-route";
        case ActionType::OneExchange: return "1-exchange";
        case ActionType::DoNothing: return "do-nothing";
    }
    return "?";
}

struct ActionOutcome {
    ActionType type = ActionType::DoNothing;
    bool applied = false;
    std::vector<int> mutated_routes;     // routes touched by the action
    std::vector<RouteSummary> before;    // aligned with mutated_routes
    std::vector<RouteSummary> after;
    double cost_before = 0.0;            // penalized routing cost over mutated_routes
    double cost_after = 0.0;
    int request = -1;
    int second_request = -1;
    std::string description;
};

/// Everything an action needs besides the plan. `rules` may be null (raw selection criteria);
/// `rng` is only used by the unguided variants.
struct ActionContext {
    RuleSet* rules = nullptr;
    PenaltyConfig penalty;
    double best_tsc = std::numeric_limits<double>::infinity();  // aspiration threshold
    std::mt19937_64* rng = nullptr;

    bool rules_on() const { return rules != nullptr && rules->enabled(); }
};

/// Reward of an outcome: the insertion formula for insertions, penalized cost difference for moves.
inline double action_reward(const ProblemInstance& inst, const ActionOutcome& o, const PenaltyConfig& cfg) {
    if (!o.applied || o.type == ActionType::DoNothing) return 0.0;
    if (o.type == ActionType::Insertion)
        return insertion_reward(inst, o.before.at(0).duration, o.after.at(0).duration, o.request);
    return move_reward(inst, o.before, o.after, cfg);
}

/// Penalty portion of the routing cost over the mutated routes after the action.
inline double action_penalty(const ProblemInstance& inst, const ActionOutcome& o, const PenaltyConfig& cfg) {
    if (!o.applied) return 0.0;
    double p = 0.0;
    for (const auto& s : o.after) p += route_penalty(inst, s, cfg);
    return p;
}

namespace detail {

inline Route without_request(const Route& r, int j) {
    Route out;
    out.reserve(r.size());
    for (NodeRef n : r)
        if (n.is_origin() || n.index != j) out.push_back(n);
    return out;
}

// Places request j so that its pickup lands at final index p and its delivery at final index d.
inline void with_request_at(const Route& base, int j, int p, int d, Route& out) {
    out.clear();
    const int n = static_cast<int>(base.size()) + 2;
    std::size_t b = 0;
    for (int i = 0; i < n; ++i) {
        if (i == p) out.push_back(NodeRef::pickup(j));
        else if (i == d) out.push_back(NodeRef::delivery(j));
        else out.push_back(base[b++]);
    }
}

inline std::pair<int, int> find_request(const Route& r, int j) {
    int p = -1, d = -1;
    for (std::size_t i = 1; i < r.size(); ++i)
        if (r[i].index == j) (r[i].is_pickup() ? p : d) = static_cast<int>(i);
    return {p, d};
}

/// Calls f(candidate) for every placement of request j's pickup at or before its current index
/// and delivery at or before its current index (still after the pickup), except the current one.
template <typename F>
void for_each_earlier_placement(const Route& route, int j, F&& f) {
    const auto [a, b] = find_request(route, j);
    const Route base = without_request(route, j);
    Route cand;
    for (int i = a; i >= 1; --i) {
        for (int d = b; d > i; --d) {
            if (i == a && d == b) continue;
            with_request_at(base, j, i, d, cand);
            f(static_cast<const Route&>(cand));
        }
    }
}

/// Every precedence-valid placement of request j on the route, except the current one.
template <typename F>
void for_each_placement(const Route& route, int j, F&& f) {
    const auto [a, b] = find_request(route, j);
    const Route base = without_request(route, j);
    const int n = static_cast<int>(route.size());
    Route cand;
    for (int i = 1; i < n; ++i) {
        for (int d = i + 1; d < n; ++d) {
            if (i == a && d == b) continue;
            with_request_at(base, j, i, d, cand);
            f(static_cast<const Route&>(cand));
        }
    }
}

inline Point route_anchor(const PlanState& plan, int k) {
    const Route& r = plan.route(k);
    return location(plan.instance(), r.back());
}

/// Couriers ordered by distance from `from` to their route end (origin when idle), ties by id.
inline std::vector<int> couriers_by_distance(const PlanState& plan, Point from, int exclude = -1) {
    std::vector<std::pair<double, int>> order;
    for (int k = 0; k < plan.num_routes(); ++k)
        if (k != exclude) order.push_back({distance(from, route_anchor(plan, k)), k});
    std::sort(order.begin(), order.end());
    std::vector<int> out;
    for (const auto& e : order) out.push_back(e.second);
    return out;
}

inline Route appended(const Route& r, int j) {
    Route out = r;
    out.push_back(NodeRef::pickup(j));
    out.push_back(NodeRef::delivery(j));
    return out;
}

inline constexpr double kImprovementEps = 1e-9;

struct RepositionOptions {
    bool require_feasible = true;
    bool penalized = false;                   // cost function: penalized vs. plain courier pay
    const TabuLedger* tabu = nullptr;         // null: no tabu filter
    const Route* tabu_reference = nullptr;    // adjacencies counted as "new" relative to this row
    double tsc_offset = 0.0;                  // TSC of the plan minus this route's cost
    double best_tsc = std::numeric_limits<double>::infinity();
};

inline double route_cost(const ProblemInstance& inst, const RouteSummary& s, bool penalized, const PenaltyConfig& cfg) {
    return penalized ? penalized_route_cost(inst, s, cfg) : courier_cost(inst, s);
}

/// Step-3 repositioning of request j on route k: the cheapest admissible earlier placement
/// if strictly cheaper than `route` itself, else `route` unchanged.
inline Route reposition(const ProblemInstance& inst, int k, const Route& route, int j, const PenaltyConfig& cfg,
                        const RepositionOptions& opt) {
    Route best = route;
    double best_cost = route_cost(inst, evaluate_route(inst, k, route), opt.penalized, cfg);
    for_each_earlier_placement(route, j, [&](const Route& cand) {
        const RouteSummary s = evaluate_route(inst, k, cand);
        if (opt.require_feasible && !is_feasible(s)) return;
        const double cost = route_cost(inst, s, opt.penalized, cfg);
        if (!(cost < best_cost - kImprovementEps)) return;
        if (opt.tabu && creates_tabu_adjacency(*opt.tabu, *opt.tabu_reference, cand)) {
            const bool aspiration = is_feasible(s) && opt.tsc_offset + courier_cost(inst, s) < opt.best_tsc - kImprovementEps;
            if (!aspiration) return;
        }
        best = cand;
        best_cost = cost;
    });
    return best;
}

inline int argmax_request(const PlanState& plan, const std::vector<int>& candidates, double RequestMetrics::*field) {
    int best = -1;
    double best_val = -std::numeric_limits<double>::infinity();
    for (int j : candidates) {
        const double v = request_metrics(plan, j).*field;
        if (v > best_val) {
            best_val = v;
            best = j;
        }
    }
    return best;
}

inline std::vector<int> assigned_requests(const PlanState& plan) {
    std::vector<int> out;
    for (int j = 0; j < plan.instance().num_requests(); ++j)
        if (plan.is_assigned(j)) out.push_back(j);
    return out;
}

/// Non-idle route with the largest priority key, ties by lowest id.
inline int best_route_by_key(const PlanState& plan, MoveKind kind, int exclude = -1) {
    int best = -1;
    double best_key = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < plan.num_routes(); ++k) {
        if (plan.is_idle(k) || k == exclude) continue;
        const double key = priority_key(kind, plan, k);
        if (best < 0 || key > best_key) {
            best = k;
            best_key = key;
        }
    }
    return best;
}

inline int select_route(const PlanState& plan, ActionContext& ctx, MoveKind kind, int exclude = -1) {
    if (ctx.rules_on()) {
        const auto k = ctx.rules->list(kind).next_route(plan, exclude);
        return k ? *k : -1;
    }
    return best_route_by_key(plan, kind, exclude);
}

/// Commits new rows, fills the outcome and, for guided neighborhood moves under rules,
/// advances and updates the tabu ledger.
inline void commit(PlanState& plan, ActionOutcome& out, std::vector<std::pair<int, Route>> rows,
                   const std::vector<int>& moved, ActionContext& ctx, const MoveKind* tabu_kind) {
    const ProblemInstance& inst = plan.instance();
    std::vector<Route> before_rows, after_rows;
    for (const auto& [k, r] : rows) {
        out.mutated_routes.push_back(k);
        out.before.push_back(plan.schedule(k));
        before_rows.push_back(plan.route(k));
        after_rows.push_back(r);
    }
    plan.set_routes(std::move(rows));
    for (int k : out.mutated_routes) out.after.push_back(plan.schedule(k));
    for (std::size_t i = 0; i < out.before.size(); ++i) {
        out.cost_before += penalized_route_cost(inst, out.before[i], ctx.penalty);
        out.cost_after += penalized_route_cost(inst, out.after[i], ctx.penalty);
    }
    out.applied = true;
    if (tabu_kind && ctx.rules_on()) {
        ctx.rules->tick();
        record_broken_adjacencies(ctx.rules->ledger(*tabu_kind), before_rows, after_rows, moved);
    }
}

inline std::string describe_move(const char* what, int j, int from, int to) {
    std::string s = std::string(what) + " r" + std::to_string(j);
    if (from >= 0) s += " from u" + std::to_string(from);
    if (to >= 0) s += " to u" + std::to_string(to);
    return s;
}

}  // namespace detail

// --- guided actions ------------------------------------------------------

/// Insertion: most urgent unassigned request (smallest slack, ties by id) to the nearest courier
/// route end or idle origin that stays feasible, falling back to farther couriers and then to
/// less urgent requests; finally the pair is repositioned to the cheapest feasible earlier
/// placement. `reposition` = false stops after the insertion itself.
inline ActionOutcome apply_insertion(PlanState& plan, ActionContext& ctx, bool reposition = true) {
    const ProblemInstance& inst = plan.instance();
    ActionOutcome out;
    out.type = ActionType::Insertion;

    std::vector<std::pair<double, int>> pending;
    for (int j : plan.backup_set()) pending.push_back({request_metrics(plan, j).slack, j});
    std::sort(pending.begin(), pending.end());

    for (const auto& [slack, j] : pending) {
        for (int k : detail::couriers_by_distance(plan, inst.requests[j].pickup)) {
            Route cand = detail::appended(plan.route(k), j);
            if (!is_feasible(evaluate_route(inst, k, cand))) continue;
            if (reposition && !plan.is_idle(k)) cand = detail::reposition(inst, k, cand, j, ctx.penalty, {});
            out.request = j;
            out.description = detail::describe_move("insert", j, -1, k);
            detail::commit(plan, out, {{k, std::move(cand)}}, {j}, ctx, nullptr);
            return out;
        }
    }
    out.description = "insert: no feasible insertion";
    return out;
}

/// Intra-route move on the route with the most remaining time (priority-list head under rules):
/// the cheapest feasible, non-tabu earlier relocation of one of its requests, applied only if
/// strictly cheaper than the current route.
inline ActionOutcome apply_intra_route(PlanState& plan, ActionContext& ctx) {
    const ProblemInstance& inst = plan.instance();
    ActionOutcome out;
    out.type = ActionType::IntraRoute;
    const int k = detail::select_route(plan, ctx, MoveKind::IntraRoute);
    if (k < 0) {
        out.description = "intra-route: no assigned route";
        return out;
    }
    const Route& route = plan.route(k);
    const double original = courier_cost(inst, plan.schedule(k));
    const double offset = total_shipping_cost(plan) - original;
    const TabuLedger* ledger = ctx.rules_on() ? &ctx.rules->ledger(MoveKind::IntraRoute) : nullptr;

    Route best;
    int best_j = -1;
    double best_cost = original;
    for (int j : plan.requests_on(k)) {
        detail::for_each_earlier_placement(route, j, [&](const Route& cand) {
            const RouteSummary s = evaluate_route(inst, k, cand);
            if (!is_feasible(s)) return;
            const double cost = courier_cost(inst, s);
            if (!(cost < best_cost - detail::kImprovementEps)) return;
            if (ledger && creates_tabu_adjacency(*ledger, route, cand) &&
                !(offset + cost < ctx.best_tsc - detail::kImprovementEps))
                return;
            best = cand;
            best_cost = cost;
            best_j = j;
        });
    }
    if (ctx.rules_on()) ctx.rules->list(MoveKind::IntraRoute).remove(k);
    if (best_j < 0) {
        out.description = "intra-route u" + std::to_string(k) + ": no improving move";
        return out;
    }
    out.request = best_j;
    out.description = detail::describe_move("intra-route move", best_j, k, k);
    const MoveKind kind = MoveKind::IntraRoute;
    detail::commit(plan, out, {{k, std::move(best)}}, {best_j}, ctx, &kind);
    return out;
}

namespace detail {

// Moves request j off `src` onto the first feasible destination from `order`; the
// destination is repositioned per Step 3 when it was not idle.
inline bool relocate_to_first_feasible(PlanState& plan, ActionContext& ctx, ActionOutcome& out, int j, int src,
                                       const std::vector<int>& order, bool reposition_dest, const MoveKind* tabu_kind) {
    const ProblemInstance& inst = plan.instance();
    const Route src_route = without_request(plan.route(src), j);
    const RouteSummary src_summary = evaluate_route(inst, src, src_route);
    for (int k : order) {
        Route cand = appended(plan.route(k), j);
        if (!is_feasible(evaluate_route(inst, k, cand))) continue;
        if (reposition_dest && !plan.is_idle(k)) {
            RepositionOptions opt;
            if (ctx.rules_on() && tabu_kind) {
                opt.tabu = &ctx.rules->ledger(*tabu_kind);
                opt.tabu_reference = &plan.route(k);
                opt.tsc_offset = total_shipping_cost(plan) - courier_cost(inst, plan.schedule(src)) -
                                 courier_cost(inst, plan.schedule(k)) + courier_cost(inst, src_summary);
                opt.best_tsc = ctx.best_tsc;
            }
            cand = reposition(inst, k, cand, j, ctx.penalty, opt);
        }
        out.request = j;
        out.description = describe_move("inter-route move", j, src, k);
        commit(plan, out, {{src, src_route}, {k, std::move(cand)}}, {j}, ctx, tabu_kind);
        if (ctx.rules_on()) {
            auto& list = ctx.rules->list(MoveKind::InterRoute);
            list.remove(src);
            list.update_key(k, route_occupation(plan, k));
        }
        return true;
    }
    if (ctx.rules_on()) ctx.rules->list(MoveKind::InterRoute).remove(src);
    return false;
}

}  // namespace detail

/// Inter-route move: the assigned request with the largest occupation time (taken from the
/// inter-route priority-list head under rules) goes to the nearest other courier that stays
/// feasible, then is repositioned as in insertion.
inline ActionOutcome apply_inter_route(PlanState& plan, ActionContext& ctx) {
    const ProblemInstance& inst = plan.instance();
    ActionOutcome out;
    out.type = ActionType::InterRoute;

    int j = -1;
    if (ctx.rules_on()) {
        const int src = detail::select_route(plan, ctx, MoveKind::InterRoute);
        if (src >= 0) j = detail::argmax_request(plan, plan.requests_on(src), &RequestMetrics::occupation);
    } else {
        j = detail::argmax_request(plan, detail::assigned_requests(plan), &RequestMetrics::occupation);
    }
    if (j < 0) {
        out.description = "inter-route: no assigned request";
        return out;
    }
    const int src = plan.route_of(j);
    const auto order = detail::couriers_by_distance(plan, inst.requests[j].pickup, src);
    const MoveKind kind = MoveKind::InterRoute;
    if (!detail::relocate_to_first_feasible(plan, ctx, out, j, src, order, true, &kind))
        out.description = "inter-route r" + std::to_string(j) + ": no feasible destination";
    return out;
}

namespace detail {

// Swaps two requests between routes and commits; each incoming request is then placed
// wherever minimizes the penalized cost, feasibility not required.
inline void exchange_and_commit(PlanState& plan, ActionContext& ctx, ActionOutcome& out, int a, int b, bool guided) {
    const ProblemInstance& inst = plan.instance();
    const int ra = plan.route_of(a), rb = plan.route_of(b);
    Route new_a, new_b;
    if (guided) {
        new_a = appended(without_request(plan.route(ra), a), b);
        new_b = appended(without_request(plan.route(rb), b), a);
        RepositionOptions opt;
        opt.require_feasible = false;
        opt.penalized = true;
        const TabuLedger* ledger = ctx.rules_on() ? &ctx.rules->ledger(MoveKind::OneExchange) : nullptr;
        const double others = total_shipping_cost(plan) - courier_cost(inst, plan.schedule(ra)) -
                              courier_cost(inst, plan.schedule(rb));
        if (ledger) {
            opt.tabu = ledger;
            opt.best_tsc = ctx.best_tsc;
            opt.tabu_reference = &plan.route(ra);
            opt.tsc_offset = others + courier_cost(inst, evaluate_route(inst, rb, new_b));
        }
        new_a = reposition(inst, ra, new_a, b, ctx.penalty, opt);
        if (ledger) {
            opt.tabu_reference = &plan.route(rb);
            opt.tsc_offset = others + courier_cost(inst, evaluate_route(inst, ra, new_a));
        }
        new_b = reposition(inst, rb, new_b, a, ctx.penalty, opt);
    } else {
        // Unguided: b takes a's exact positions and vice versa.
        auto swap_in = [](const Route& r, int out_j, int in_j) {
            Route res = r;
            for (auto& n : res)
                if (!n.is_origin() && n.index == out_j) n.index = in_j;
            return res;
        };
        new_a = swap_in(plan.route(ra), a, b);
        new_b = swap_in(plan.route(rb), b, a);
    }
    out.request = a;
    out.second_request = b;
    out.description = "1-exchange r" + std::to_string(a) + " (u" + std::to_string(ra) + ") <-> r" +
                      std::to_string(b) + " (u" + std::to_string(rb) + ")";
    const MoveKind kind = MoveKind::OneExchange;
    commit(plan, out, {{ra, std::move(new_a)}, {rb, std::move(new_b)}}, {a, b}, ctx, guided ? &kind : nullptr);
    if (ctx.rules_on()) {
        ctx.rules->list(MoveKind::OneExchange).remove(ra);
        ctx.rules->list(MoveKind::OneExchange).remove(rb);
    }
}

}  // namespace detail

/// 1-exchange: the request with the largest unused service time and the largest one on a
/// different route (first and second priority-list routes under rules) trade routes.
inline ActionOutcome apply_one_exchange(PlanState& plan, ActionContext& ctx) {
    ActionOutcome out;
    out.type = ActionType::OneExchange;
    int a = -1, b = -1;
    if (ctx.rules_on()) {
        const int r1 = detail::select_route(plan, ctx, MoveKind::OneExchange);
        const int r2 = r1 >= 0 ? detail::select_route(plan, ctx, MoveKind::OneExchange, r1) : -1;
        if (r1 >= 0 && r2 >= 0) {
            a = detail::argmax_request(plan, plan.requests_on(r1), &RequestMetrics::unused_service);
            b = detail::argmax_request(plan, plan.requests_on(r2), &RequestMetrics::unused_service);
        }
    } else {
        const auto assigned = detail::assigned_requests(plan);
        a = detail::argmax_request(plan, assigned, &RequestMetrics::unused_service);
        if (a >= 0) {
            std::vector<int> others;
            for (int j : assigned)
                if (plan.route_of(j) != plan.route_of(a)) others.push_back(j);
            b = detail::argmax_request(plan, others, &RequestMetrics::unused_service);
        }
    }
    if (a < 0 || b < 0) {
        out.description = "1-exchange: fewer than two non-idle routes";
        return out;
    }
    detail::exchange_and_commit(plan, ctx, out, a, b, true);
    return out;
}

inline ActionOutcome apply_do_nothing(const PlanState&) {
    ActionOutcome out;
    out.type = ActionType::DoNothing;
    out.applied = true;
    out.description = "do nothing";
    return out;
}

// --- unguided variants ---------------------------------------------------

namespace detail {

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    // Fisher-Yates with an explicit distribution so sequences do not depend on std::shuffle.
    for (std::size_t i = v.size(); i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(v[i - 1], v[pick(rng)]);
    }
}

inline std::vector<int> all_couriers_except(const PlanState& plan, int exclude) {
    std::vector<int> out;
    for (int k = 0; k < plan.num_routes(); ++k)
        if (k != exclude) out.push_back(k);
    return out;
}

}  // namespace detail

/// Random-choice counterpart of each action type: routes still come from the priority lists
/// (or the raw key without rules), requests and destinations are drawn at random, no tabu.
inline ActionOutcome apply_random_variant(ActionType type, PlanState& plan, ActionContext& ctx) {
    if (!ctx.rng) throw std::invalid_argument("apply_random_variant: context has no RNG");
    std::mt19937_64& rng = *ctx.rng;
    const ProblemInstance& inst = plan.instance();
    ActionOutcome out;
    out.type = type;

    switch (type) {
        case ActionType::Insertion: {
            const auto pending = plan.backup_set();
            if (pending.empty()) {
                out.description = "random insert: nothing unassigned";
                return out;
            }
            const int j = pending[std::uniform_int_distribution<std::size_t>(0, pending.size() - 1)(rng)];
            auto order = detail::all_couriers_except(plan, -1);
            detail::shuffle(order, rng);
            for (int k : order) {
                Route cand = detail::appended(plan.route(k), j);
                if (!is_feasible(evaluate_route(inst, k, cand))) continue;
                out.request = j;
                out.description = detail::describe_move("random insert", j, -1, k);
                detail::commit(plan, out, {{k, std::move(cand)}}, {j}, ctx, nullptr);
                return out;
            }
            out.description = "random insert r" + std::to_string(j) + ": no feasible route";
            return out;
        }
        case ActionType::IntraRoute: {
            const int k = detail::select_route(plan, ctx, MoveKind::IntraRoute);
            if (k < 0) {
                out.description = "random intra-route: no assigned route";
                return out;
            }
            if (ctx.rules_on()) ctx.rules->list(MoveKind::IntraRoute).remove(k);
            const double original = courier_cost(inst, plan.schedule(k));
            auto requests = plan.requests_on(k);
            detail::shuffle(requests, rng);
            for (int j : requests) {
                Route best;
                double best_cost = original;
                detail::for_each_placement(plan.route(k), j, [&](const Route& cand) {
                    const RouteSummary s = evaluate_route(inst, k, cand);
                    if (!is_feasible(s)) return;
                    const double cost = courier_cost(inst, s);
                    if (cost < best_cost - detail::kImprovementEps) {
                        best = cand;
                        best_cost = cost;
                    }
                });
                if (best.empty()) continue;
                out.request = j;
                out.description = detail::describe_move("random intra-route move", j, k, k);
                detail::commit(plan, out, {{k, std::move(best)}}, {j}, ctx, nullptr);
                return out;
            }
            out.description = "random intra-route u" + std::to_string(k) + ": no improving move";
            return out;
        }
        case ActionType::InterRoute: {
            const int src = detail::select_route(plan, ctx, MoveKind::InterRoute);
            if (src < 0) {
                out.description = "random inter-route: no assigned route";
                return out;
            }
            const auto requests = plan.requests_on(src);
            const int j = requests[std::uniform_int_distribution<std::size_t>(0, requests.size() - 1)(rng)];
            auto order = detail::all_couriers_except(plan, src);
            detail::shuffle(order, rng);
            if (!detail::relocate_to_first_feasible(plan, ctx, out, j, src, order, false, nullptr))
                out.description = "random inter-route r" + std::to_string(j) + ": no feasible destination";
            return out;
        }
        case ActionType::OneExchange: {
            const int r1 = detail::select_route(plan, ctx, MoveKind::OneExchange);
            const int r2 = r1 >= 0 ? detail::select_route(plan, ctx, MoveKind::OneExchange, r1) : -1;
            if (r1 < 0 || r2 < 0) {
                out.description = "random 1-exchange: fewer than two non-idle routes";
                return out;
            }
            const auto q1 = plan.requests_on(r1);
            const auto q2 = plan.requests_on(r2);
            const int a = q1[std::uniform_int_distribution<std::size_t>(0, q1.size() - 1)(rng)];
            const int b = q2[std::uniform_int_distribution<std::size_t>(0, q2.size() - 1)(rng)];
            detail::exchange_and_commit(plan, ctx, out, a, b, false);
            return out;
        }
        case ActionType::DoNothing: return apply_do_nothing(plan);
    }
    return out;
}

/// Dispatches one action of the given type, heuristics-guided or unguided.
inline ActionOutcome apply_action(ActionType type, PlanState& plan, ActionContext& ctx, bool guided = true) {
    if (!guided) return apply_random_variant(type, plan, ctx);
    switch (type) {
        case ActionType::Insertion: return apply_insertion(plan, ctx);
        case ActionType::IntraRoute: return apply_intra_route(plan, ctx);
        case ActionType::InterRoute: return apply_inter_route(plan, ctx);
        case ActionType::OneExchange: return apply_one_exchange(plan, ctx);
        case ActionType::DoNothing: return apply_do_nothing(plan);
    }
    return {};
}

}  // namespace crowdroute
