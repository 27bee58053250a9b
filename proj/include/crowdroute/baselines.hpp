#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "crowdroute/actions.hpp"

namespace crowdroute {

struct BaselineReport {
    std::string method;
    double tsc = 0.0;
    double seconds = 0.0;
    std::int64_t iterations = 0;
    std::vector<double> trajectory;  // best feasible TSC after each iteration
};

struct BaselineResult {
    PlanState plan;
    BaselineReport report;
};

/// Repeated insertion without repositioning until no unassigned request fits anywhere.
inline BaselineResult simple_heuristic(const ProblemInstance& inst) {
    const auto t0 = std::chrono::steady_clock::now();
    PlanState plan(inst);
    ActionContext ctx;
    BaselineReport report;
    report.method = "simple";
    report.trajectory.push_back(total_shipping_cost(plan));
    while (apply_insertion(plan, ctx, false).applied) {
        ++report.iterations;
        report.trajectory.push_back(total_shipping_cost(plan));
    }
    report.tsc = total_shipping_cost(plan);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {plan, report};
}

namespace detail {

/// A candidate neighbor: replacement rows plus the requests that moved and where to.
struct Neighbor {
    std::vector<std::pair<int, Route>> rows;
    std::vector<std::pair<int, int>> moves;  // (request, destination route; -1 = backup)
    double delta = 0.0;                      // objective change
};

inline double backup_cost(const ProblemInstance& inst, int j) {
    return inst.beta_b * backup_round_trip(inst, inst.requests[j]);
}

// Relative change of `values` across the trailing window.
inline bool stalled(const std::vector<double>& values, int window, double tolerance) {
    if (static_cast<int>(values.size()) <= window) return false;
    const double then = values[values.size() - 1 - static_cast<std::size_t>(window)];
    const double now = values.back();
    if (then == 0.0) return now == 0.0;
    return std::abs(then - now) / std::abs(then) < tolerance;
}

// Rows after request j leaves its route and is appended to route k, then moved to the
// cheapest feasible earlier placement there.
inline std::pair<Route, Route> relocation_rows(const PlanState& plan, int j, int k, const PenaltyConfig& pen) {
    const ProblemInstance& inst = plan.instance();
    Route dest = appended(plan.route(k), j);
    if (!plan.is_idle(k) && is_feasible(evaluate_route(inst, k, dest))) dest = reposition(inst, k, dest, j, pen, {});
    return {without_request(plan.route(plan.route_of(j)), j), std::move(dest)};
}

// Rows after requests a and b trade routes: each is appended to the other's route and then
// placed where the penalized cost is lowest.
inline std::pair<Route, Route> exchange_rows(const PlanState& plan, int a, int b, const PenaltyConfig& pen) {
    const ProblemInstance& inst = plan.instance();
    const int ra = plan.route_of(a), rb = plan.route_of(b);
    RepositionOptions opt;
    opt.require_feasible = false;
    opt.penalized = true;
    Route na = reposition(inst, ra, appended(without_request(plan.route(ra), a), b), b, pen, opt);
    Route nb = reposition(inst, rb, appended(without_request(plan.route(rb), b), a), a, pen, opt);
    return {std::move(na), std::move(nb)};
}

/// Every feasible neighbor of `plan` under the three move kinds of the action set, with delta
/// measured in TSC: earlier relocation within a route, relocation to another route, and
/// exchange of two requests on different routes.
template <typename F>
void for_each_feasible_neighbor(const PlanState& plan, const PenaltyConfig& pen, F&& f) {
    const ProblemInstance& inst = plan.instance();
    const int n_req = inst.num_requests();
    const int n_cour = plan.num_routes();
    auto cost = [&](int k) { return courier_cost(inst, plan.schedule(k)); };
    Neighbor nb;

    for (int k = 0; k < n_cour; ++k) {
        for (int j : plan.requests_on(k)) {
            for_each_earlier_placement(plan.route(k), j, [&](const Route& cand) {
                const RouteSummary s = evaluate_route(inst, k, cand);
                if (!is_feasible(s)) return;
                nb.rows = {{k, cand}};
                nb.moves = {{j, k}};
                nb.delta = courier_cost(inst, s) - cost(k);
                f(nb);
            });
        }
    }
    for (int j = 0; j < n_req; ++j) {
        const int src = plan.route_of(j);
        if (src < 0) continue;
        for (int k = 0; k < n_cour; ++k) {
            if (k == src) continue;
            auto [from, to] = relocation_rows(plan, j, k, pen);
            const RouteSummary st = evaluate_route(inst, k, to);
            if (!is_feasible(st)) continue;
            const RouteSummary sf = evaluate_route(inst, src, from);
            nb.delta = courier_cost(inst, sf) + courier_cost(inst, st) - cost(src) - cost(k);
            nb.rows = {{src, std::move(from)}, {k, std::move(to)}};
            nb.moves = {{j, k}};
            f(nb);
        }
    }
    for (int a = 0; a < n_req; ++a) {
        const int ra = plan.route_of(a);
        if (ra < 0) continue;
        for (int b = a + 1; b < n_req; ++b) {
            const int rb = plan.route_of(b);
            if (rb < 0 || rb == ra) continue;
            auto [na, nb_row] = exchange_rows(plan, a, b, pen);
            const RouteSummary sa = evaluate_route(inst, ra, na);
            if (!is_feasible(sa)) continue;
            const RouteSummary sb = evaluate_route(inst, rb, nb_row);
            if (!is_feasible(sb)) continue;
            nb.delta = courier_cost(inst, sa) + courier_cost(inst, sb) - cost(ra) - cost(rb);
            nb.rows = {{ra, std::move(na)}, {rb, std::move(nb_row)}};
            nb.moves = {{a, rb}, {b, ra}};
            f(nb);
        }
    }
}

}  // namespace detail

struct RtsParams {
    std::int64_t max_iterations = 1000;
    int min_iterations = 10;
    int window = 10;           // stop when TSC moved less than `tolerance` over this many iterations
    double tolerance = 0.02;
    double initial_tenure = 3.0;
    double tenure_increase = 1.2;  // on revisiting a solution
    double tenure_decrease = 1.1;  // after `relax_after` iterations without a revisit
    int relax_after = 10;
    PenaltyConfig penalty;  // only used to place exchanged requests
};

/// Reactive tabu search from the simple-heuristic solution: best admissible neighbor each
/// iteration; a request may not return to a route it just left while tabu, unless that
/// reaches a new best TSC.
inline BaselineResult reactive_tabu_search(const ProblemInstance& inst, const RtsParams& params = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    PlanState plan = simple_heuristic(inst).plan;
    PlanState best = plan;
    double tsc = total_shipping_cost(plan);
    double best_tsc = tsc;

    const int n_req = inst.num_requests();
    const int n_cols = plan.num_routes() + 1;  // last column: backup
    std::vector<std::int64_t> tabu_until(static_cast<std::size_t>(n_req) * n_cols, 0);
    auto cell = [&](int j, int k) -> std::int64_t& {
        return tabu_until[static_cast<std::size_t>(j) * n_cols + (k < 0 ? n_cols - 1 : k)];
    };
    const double max_tenure = std::max(1.0, static_cast<double>(n_req));
    double tenure = std::clamp(params.initial_tenure, 1.0, max_tenure);
    int since_repeat = 0;
    std::unordered_map<std::size_t, std::int64_t> visited{{plan.hash(), 0}};

    BaselineReport report;
    report.method = "rts";
    std::vector<double> current{tsc};
    for (std::int64_t it = 1; it <= params.max_iterations; ++it) {
        detail::Neighbor chosen;
        bool found = false;
        detail::for_each_feasible_neighbor(plan, params.penalty, [&](const detail::Neighbor& nb) {
            if (found && !(nb.delta < chosen.delta - detail::kImprovementEps)) return;
            bool tabu = false;
            for (const auto& [j, k] : nb.moves) tabu = tabu || cell(j, k) > it;
            if (tabu && !(tsc + nb.delta < best_tsc - detail::kImprovementEps)) return;
            chosen = nb;
            found = true;
        });
        if (!found) break;

        // A request may not go back where it came from for `tenure` iterations.
        const auto t = static_cast<std::int64_t>(std::ceil(tenure));
        for (const auto& [j, k] : chosen.moves) {
            (void)k;
            cell(j, plan.route_of(j)) = it + t + 1;
        }
        plan.set_routes(std::move(chosen.rows));
        tsc = total_shipping_cost(plan);
        if (tsc < best_tsc - detail::kImprovementEps) {
            best_tsc = tsc;
            best = plan;
        }

        auto [pos, inserted] = visited.try_emplace(plan.hash(), it);
        if (!inserted) {
            tenure = std::min(max_tenure, tenure * params.tenure_increase);
            since_repeat = 0;
            pos->second = it;
        } else if (++since_repeat >= params.relax_after) {
            tenure = std::max(1.0, tenure / params.tenure_decrease);
            since_repeat = 0;
        }

        report.iterations = it;
        report.trajectory.push_back(best_tsc);
        current.push_back(tsc);
        if (it >= params.min_iterations && detail::stalled(current, params.window, params.tolerance)) break;
    }
    report.tsc = best_tsc;
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {best, report};
}

struct SaParams {
    std::uint64_t seed = 1;
    double initial_temperature = 0.0;  // <= 0: calibrate from sampled moves
    double target_acceptance = 0.5;    // initial uphill acceptance used for calibration
    int calibration_samples = 60;
    double cooling = 0.95;
    double floor_ratio = 1e-3;         // stop below floor_ratio * initial temperature
    double settle_ratio = 0.05;        // the stall rule only applies below settle_ratio * initial temperature
    int inner_loops = 0;               // (intra, inter, 1-exchange) triples per temperature; <= 0: 2 |J|
    std::int64_t max_iterations = 5000;
    int min_iterations = 10;
    int window = 10;
    double tolerance = 0.02;
    PenaltyConfig penalty;
};

/// Metropolis acceptance probability.
inline double acceptance_probability(double delta, double temperature) {
    if (delta <= 0.0) return 1.0;
    if (temperature <= 0.0) return 0.0;
    return std::exp(-delta / temperature);
}

namespace detail {

// Random neighbors for annealing, built with the same move mechanics. A draw whose rows are
// not all feasible is rejected, so the annealer stays among feasible plans.
class RandomNeighbors {
public:
    RandomNeighbors(const PenaltyConfig& pen, std::mt19937_64& rng) : pen_(pen), rng_(rng) {}

    bool intra(const PlanState& plan, Neighbor& nb) {
        const ProblemInstance& inst = plan.instance();
        const auto assigned = assigned_requests(plan);
        if (assigned.empty()) return false;
        const int j = assigned[pick(assigned.size())];
        const int k = plan.route_of(j);
        std::vector<Route> cands;
        for_each_earlier_placement(plan.route(k), j, [&](const Route& c) { cands.push_back(c); });
        if (cands.empty()) return false;
        Route cand = std::move(cands[pick(cands.size())]);
        const RouteSummary s = evaluate_route(inst, k, cand);
        if (!is_feasible(s)) return false;
        nb.delta = penalized_route_cost(inst, s, pen_) - penalized_route_cost(inst, plan.schedule(k), pen_);
        nb.rows = {{k, std::move(cand)}};
        nb.moves = {{j, k}};
        return true;
    }

    bool inter(const PlanState& plan, Neighbor& nb) {
        const ProblemInstance& inst = plan.instance();
        const auto assigned = assigned_requests(plan);
        if (assigned.empty() || plan.num_routes() < 2) return false;
        const int j = assigned[pick(assigned.size())];
        const int src = plan.route_of(j);
        int k = static_cast<int>(pick(static_cast<std::size_t>(plan.num_routes() - 1)));
        if (k >= src) ++k;
        auto [from, to] = relocation_rows(plan, j, k, pen_);
        const RouteSummary st = evaluate_route(inst, k, to);
        if (!is_feasible(st)) return false;
        nb.delta = penalized_route_cost(inst, evaluate_route(inst, src, from), pen_) + penalized_route_cost(inst, st, pen_) -
                   penalized_route_cost(inst, plan.schedule(src), pen_) - penalized_route_cost(inst, plan.schedule(k), pen_);
        nb.rows = {{src, std::move(from)}, {k, std::move(to)}};
        nb.moves = {{j, k}};
        return true;
    }

    bool exchange(const PlanState& plan, Neighbor& nb) {
        const ProblemInstance& inst = plan.instance();
        const auto assigned = assigned_requests(plan);
        if (assigned.size() < 2) return false;
        const int a = assigned[pick(assigned.size())];
        std::vector<int> others;
        for (int j : assigned)
            if (plan.route_of(j) != plan.route_of(a)) others.push_back(j);
        if (others.empty()) return false;
        const int b = others[pick(others.size())];
        const int ra = plan.route_of(a), rb = plan.route_of(b);
        auto [na, nb_row] = exchange_rows(plan, a, b, pen_);
        const RouteSummary sa = evaluate_route(inst, ra, na), sb = evaluate_route(inst, rb, nb_row);
        if (!is_feasible(sa) || !is_feasible(sb)) return false;
        nb.delta = penalized_route_cost(inst, sa, pen_) + penalized_route_cost(inst, sb, pen_) -
                   penalized_route_cost(inst, plan.schedule(ra), pen_) -
                   penalized_route_cost(inst, plan.schedule(rb), pen_);
        nb.rows = {{ra, std::move(na)}, {rb, std::move(nb_row)}};
        nb.moves = {{a, rb}, {b, ra}};
        return true;
    }

    bool draw(int which, const PlanState& plan, Neighbor& nb) {
        switch (which) {
            case 0: return intra(plan, nb);
            case 1: return inter(plan, nb);
            default: return exchange(plan, nb);
        }
    }

private:
    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

    PenaltyConfig pen_;
    std::mt19937_64& rng_;
};

inline double penalized_plan_cost(const PlanState& plan, const PenaltyConfig& pen) {
    const ProblemInstance& inst = plan.instance();
    double c = 0.0;
    for (int k = 0; k < plan.num_routes(); ++k) c += penalized_route_cost(inst, plan.schedule(k), pen);
    for (int j : plan.backup_set()) c += backup_cost(inst, j);
    return c;
}

}  // namespace detail

/// Simulated annealing from the simple-heuristic solution with geometric cooling. Each
/// temperature runs intra-route, inter-route and 1-exchange moves in that order; the cheapest
/// plan feasible on every route is returned.
inline BaselineResult simulated_annealing(const ProblemInstance& inst, const SaParams& params = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(params.seed);
    PlanState plan = simple_heuristic(inst).plan;
    PlanState best = plan;
    double best_tsc = total_shipping_cost(plan);
    double cost = detail::penalized_plan_cost(plan, params.penalty);
    detail::RandomNeighbors moves(params.penalty, rng);
    detail::Neighbor nb;

    double temperature = params.initial_temperature;
    if (temperature <= 0.0) {
        double uphill = 0.0;
        int n_up = 0;
        for (int i = 0; i < params.calibration_samples; ++i)
            if (moves.draw(i % 3, plan, nb) && nb.delta > 0.0) {
                uphill += nb.delta;
                ++n_up;
            }
        temperature = n_up > 0 ? -(uphill / n_up) / std::log(params.target_acceptance) : 1.0;
    }
    const int inner_loops = params.inner_loops > 0 ? params.inner_loops : std::max(1, 2 * inst.num_requests());
    const double floor = params.floor_ratio * temperature;
    const double settle = params.settle_ratio * temperature;

    BaselineReport report;
    report.method = "sa";
    std::vector<double> current{cost};
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::int64_t it = 1; it <= params.max_iterations && temperature >= floor; ++it) {
        for (int loop = 0; loop < inner_loops; ++loop) {
            for (int which = 0; which < 3; ++which) {
                if (!moves.draw(which, plan, nb)) continue;
                if (nb.delta > 0.0 && unit(rng) >= acceptance_probability(nb.delta, temperature)) continue;
                plan.set_routes(std::move(nb.rows));
                cost += nb.delta;
                if (plan.all_routes_feasible()) {
                    const double tsc = total_shipping_cost(plan);
                    if (tsc < best_tsc - detail::kImprovementEps) {
                        best_tsc = tsc;
                        best = plan;
                    }
                }
            }
        }
        temperature *= params.cooling;
        report.iterations = it;
        report.trajectory.push_back(best_tsc);
        current.push_back(cost);
        if (it >= params.min_iterations && temperature <= settle &&
            detail::stalled(current, params.window, params.tolerance))
            break;
    }
    report.tsc = best_tsc;
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {best, report};
}

}  // namespace crowdroute
