#include <gtest/gtest.h>

#include <map>

#include "support.hpp"

using namespace crowdroute;
using namespace testing_support;

namespace {

// Every placement of request j into `base` (which does not contain j) as (pickup idx, delivery idx).
std::vector<std::tuple<int, int, Route>> placements(const Route& base, int j) {
    std::vector<std::tuple<int, int, Route>> out;
    const int n = static_cast<int>(base.size()) + 2;
    for (int p = 1; p < n; ++p)
        for (int d = p + 1; d < n; ++d) {
            Route r;
            std::size_t src = 0;
            for (int i = 0; i < n; ++i) {
                if (i == p) r.push_back(NodeRef::pickup(j));
                else if (i == d) r.push_back(NodeRef::delivery(j));
                else r.push_back(base[src++]);
            }
            out.emplace_back(p, d, r);
        }
    return out;
}

Route strip(const Route& r, int j) {
    Route out;
    for (NodeRef n : r)
        if (n.is_origin() || n.index != j) out.push_back(n);
    return out;
}

int index_of(const Route& r, NodeRef n) {
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] == n) return static_cast<int>(i);
    return -1;
}

double naive_slack(const ProblemInstance& inst, int j) {
    double speed = 0;
    for (const auto& c : inst.crowdsourcees) speed = std::max(speed, c.speed);
    const Request& r = inst.requests[j];
    return r.latest_delivery - r.earliest_pickup - naive_minutes(r.pickup, r.delivery, speed);
}

// Cheapest feasible duration of request j placed anywhere on k's route (reposition oracle).
double best_placement_duration(const ProblemInstance& inst, int k, const Route& base, int j) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [p, d, r] : placements(base, j)) {
        const auto s = naive_schedule(inst, k, r);
        if (s.feasible) best = std::min(best, s.duration);
    }
    return best;
}

}  // namespace

TEST(Insertion, MatchesBruteForceOracle) {
    std::mt19937_64 rng(101);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto inst = random_small_instance(5, 3, rng);
        PlanState plan = random_plan(inst, rng);
        // oracle: urgency order, then nearest route end, first feasible append
        std::vector<std::pair<double, int>> pending;
        for (int j : plan.backup_set()) pending.push_back({naive_slack(inst, j), j});
        std::sort(pending.begin(), pending.end());
        int want_j = -1, want_k = -1;
        for (const auto& [s, j] : pending) {
            std::vector<std::pair<double, int>> ks;
            for (int k = 0; k < 3; ++k)
                ks.push_back({distance(inst.requests[j].pickup, naive_location(inst, plan.route(k).back())), k});
            std::sort(ks.begin(), ks.end());
            for (const auto& [dist, k] : ks) {
                Route app = plan.route(k);
                app.push_back(NodeRef::pickup(j));
                app.push_back(NodeRef::delivery(j));
                if (naive_schedule(inst, k, app).feasible) {
                    want_j = j;
                    want_k = k;
                    break;
                }
            }
            if (want_j >= 0) break;
        }
        const Route before_k = want_k >= 0 ? plan.route(want_k) : Route{};
        const auto before_hash = plan.hash();
        ActionContext ctx;
        const auto out = apply_insertion(plan, ctx);
        if (want_j < 0) {
            EXPECT_FALSE(out.applied);
            EXPECT_EQ(plan.hash(), before_hash);
            continue;
        }
        ++checked;
        ASSERT_TRUE(out.applied);
        EXPECT_EQ(out.request, want_j);
        EXPECT_EQ(plan.route_of(want_j), want_k);
        const auto s = naive_schedule(inst, want_k, plan.route(want_k));
        EXPECT_TRUE(s.feasible);
        if (before_k.size() > 1) {
            EXPECT_NEAR(s.duration, best_placement_duration(inst, want_k, before_k, want_j), 1e-9);
        }
        EXPECT_EQ(strip(plan.route(want_k), want_j), before_k);
    }
    EXPECT_GT(checked, 100);
}

TEST(Insertion, NothingUnassignedIsNotApplied) {
    const auto inst = make_instance({request(0, {1, 1}, {2, 2})}, {courier(0, {0, 0})});
    PlanState plan(inst);
    plan.set_route(0, {NodeRef::origin(0), NodeRef::pickup(0), NodeRef::delivery(0)});
    ActionContext ctx;
    const auto h = plan.hash();
    EXPECT_FALSE(apply_insertion(plan, ctx).applied);
    EXPECT_EQ(plan.hash(), h);
}

TEST(IntraRoute, MatchesBruteForceOracle) {
    std::mt19937_64 rng(202);
    int applied = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto inst = random_small_instance(5, 2, rng);
        PlanState plan = random_plan(inst, rng);
        int k = -1;
        double key = 0;
        for (int c = 0; c < 2; ++c) {
            if (plan.route(c).size() == 1) continue;
            const auto s = naive_schedule(inst, c, plan.route(c));
            const double rem = inst.crowdsourcees[c].t_end - s.duration;
            if (k < 0 || rem > key) {
                k = c;
                key = rem;
            }
        }
        double want = std::numeric_limits<double>::infinity();
        Route original;
        if (k >= 0) {
            original = plan.route(k);
            const double current = naive_schedule(inst, k, original).duration;
            for (int j : plan.requests_on(k)) {
                const int a = index_of(original, NodeRef::pickup(j)), b = index_of(original, NodeRef::delivery(j));
                for (const auto& [p, d, r] : placements(strip(original, j), j)) {
                    if (p > a || d > b || (p == a && d == b)) continue;
                    const auto s = naive_schedule(inst, k, r);
                    if (s.feasible && s.duration < current - 1e-9) want = std::min(want, s.duration);
                }
            }
        }
        ActionContext ctx;
        const auto h = plan.hash();
        const auto out = apply_intra_route(plan, ctx);
        if (!std::isfinite(want)) {
            EXPECT_FALSE(out.applied);
            EXPECT_EQ(plan.hash(), h);
            continue;
        }
        ++applied;
        ASSERT_TRUE(out.applied);
        EXPECT_EQ(out.mutated_routes, std::vector<int>{k});
        EXPECT_NEAR(naive_schedule(inst, k, plan.route(k)).duration, want, 1e-9);
    }
    EXPECT_GT(applied, 20);
}

TEST(IntraRoute, SingleRequestRouteNotApplied) {
    const auto inst = make_instance({request(0, {1, 1}, {2, 2})}, {courier(0, {0, 0})});
    PlanState plan(inst);
    plan.set_route(0, {NodeRef::origin(0), NodeRef::pickup(0), NodeRef::delivery(0)});
    ActionContext ctx;
    EXPECT_FALSE(apply_intra_route(plan, ctx).applied);
}

TEST(InterRoute, MovesLongestOccupiedRequestToNearestFeasible) {
    std::mt19937_64 rng(303);
    int applied = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto inst = random_small_instance(5, 3, rng);
        PlanState plan = random_plan(inst, rng);
        int j = -1;
        double occ = 0;
        for (int q = 0; q < 5; ++q)
            if (plan.is_assigned(q) && (j < 0 || request_metrics(plan, q).occupation > occ)) {
                j = q;
                occ = request_metrics(plan, q).occupation;
            }
        if (j < 0) continue;
        const int src = plan.route_of(j);
        std::vector<std::pair<double, int>> ks;
        for (int k = 0; k < 3; ++k)
            if (k != src) ks.push_back({distance(inst.requests[j].pickup, naive_location(inst, plan.route(k).back())), k});
        std::sort(ks.begin(), ks.end());
        int want_k = -1;
        for (const auto& [dist, k] : ks) {
            Route app = plan.route(k);
            app.push_back(NodeRef::pickup(j));
            app.push_back(NodeRef::delivery(j));
            if (naive_schedule(inst, k, app).feasible) {
                want_k = k;
                break;
            }
        }
        const Route dest_before = want_k >= 0 ? plan.route(want_k) : Route{};
        ActionContext ctx;
        const auto out = apply_inter_route(plan, ctx);
        if (want_k < 0) {
            EXPECT_FALSE(out.applied);
            continue;
        }
        ++applied;
        ASSERT_TRUE(out.applied);
        EXPECT_EQ(out.request, j);
        EXPECT_EQ(plan.route_of(j), want_k);
        EXPECT_TRUE(naive_schedule(inst, want_k, plan.route(want_k)).feasible);
        if (dest_before.size() > 1) {
            EXPECT_NEAR(naive_schedule(inst, want_k, plan.route(want_k)).duration,
                        best_placement_duration(inst, want_k, dest_before, j), 1e-9);
        }
    }
    EXPECT_GT(applied, 50);
}

TEST(OneExchange, SwapsRequestsBetweenRoutes) {
    std::mt19937_64 rng(404);
    int applied = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto inst = random_small_instance(5, 3, rng);
        PlanState plan = random_plan(inst, rng);
        const PlanState before = plan;
        ActionContext ctx;
        const auto out = apply_one_exchange(plan, ctx);
        int non_idle = 0;
        for (int k = 0; k < 3; ++k) non_idle += before.route(k).size() > 1;
        if (non_idle < 2) {
            EXPECT_FALSE(out.applied);
            continue;
        }
        ASSERT_TRUE(out.applied);
        ++applied;
        const int a = out.request, b = out.second_request;
        EXPECT_EQ(plan.route_of(a), before.route_of(b));
        EXPECT_EQ(plan.route_of(b), before.route_of(a));
        EXPECT_EQ(strip(plan.route(before.route_of(a)), b), strip(before.route(before.route_of(a)), a));
        EXPECT_EQ(plan.backup_set(), before.backup_set());
        // a carries the largest unused service time among assigned requests
        for (int q = 0; q < 5; ++q)
            if (before.is_assigned(q)) {
                EXPECT_LE(request_metrics(before, q).unused_service, request_metrics(before, a).unused_service);
            }
    }
    EXPECT_GT(applied, 100);
}

TEST(Actions, AssignmentPartitionPreserved) {
    std::mt19937_64 rng(505);
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = random_small_instance(6, 3, rng);
        PlanState plan(inst);
        RuleSet rules(inst);
        ActionContext ctx;
        ctx.rules = &rules;
        ctx.rng = &rng;
        for (int step = 0; step < 40; ++step) {
            const auto type = static_cast<ActionType>(std::uniform_int_distribution<int>(0, 4)(rng));
            apply_action(type, plan, ctx, step % 2 == 0);
            int count = static_cast<int>(plan.backup_set().size());
            for (int k = 0; k < 3; ++k) count += static_cast<int>(plan.requests_on(k).size());
            ASSERT_EQ(count, 6);
            for (int k = 0; k < 3; ++k) ASSERT_NO_THROW(check_feasibility(inst, k, plan.route(k)));
        }
    }
}

TEST(Actions, UnappliedLeavesPlanUntouched) {
    std::mt19937_64 rng(606);
    for (int trial = 0; trial < 200; ++trial) {
        const auto inst = random_small_instance(4, 2, rng);
        PlanState plan = random_plan(inst, rng);
        RuleSet rules(inst);
        ActionContext ctx;
        ctx.rules = &rules;
        ctx.rng = &rng;
        for (int t = 0; t < 4; ++t) {
            const auto h = plan.hash();
            const auto out = apply_action(static_cast<ActionType>(t), plan, ctx, trial % 2 == 0);
            if (!out.applied) {
                EXPECT_EQ(plan.hash(), h);
            }
        }
    }
}

TEST(Actions, InsertionNeverCreatesInfeasibleRoute) {
    std::mt19937_64 rng(707);
    for (int trial = 0; trial < 200; ++trial) {
        const auto inst = random_small_instance(6, 2, rng);
        PlanState plan(inst);
        ActionContext ctx;
        ctx.rng = &rng;
        for (int s = 0; s < 8; ++s) {
            apply_action(ActionType::Insertion, plan, ctx, s % 2 == 0);
            for (int k = 0; k < 2; ++k) ASSERT_TRUE(naive_schedule(inst, k, plan.route(k)).feasible);
        }
    }
}

TEST(RandomVariant, InsertionSpreadsOverCouriers) {
    const auto inst =
        make_instance({request(0, {1, 1}, {2, 2})}, {courier(0, {0, 0}), courier(1, {5, 5}), courier(2, {0, 5})});
    std::mt19937_64 rng(77);
    std::map<int, int> hits;
    const int trials = 1000;
    for (int i = 0; i < trials; ++i) {
        PlanState plan(inst);
        ActionContext ctx;
        ctx.rng = &rng;
        ASSERT_TRUE(apply_random_variant(ActionType::Insertion, plan, ctx).applied);
        ++hits[plan.route_of(0)];
    }
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(hits[k] / double(trials), 1.0 / 3.0, 0.05) << "courier " << k;
}

TEST(RandomVariant, NeedsRng) {
    const auto inst = make_instance({request(0, {1, 1}, {2, 2})}, {courier(0, {0, 0})});
    PlanState plan(inst);
    ActionContext ctx;
    EXPECT_THROW(apply_random_variant(ActionType::Insertion, plan, ctx), std::invalid_argument);
}

TEST(Actions, DeterministicGivenSeed) {
    const auto inst = generate_instance(10, 4, 3);
    auto run = [&] {
        std::mt19937_64 rng(5);
        PlanState plan(inst);
        RuleSet rules(inst);
        ActionContext ctx;
        ctx.rules = &rules;
        ctx.rng = &rng;
        std::vector<std::size_t> hashes;
        for (int s = 0; s < 60; ++s) {
            apply_action(static_cast<ActionType>(s % 5), plan, ctx, s % 3 != 0);
            hashes.push_back(plan.hash());
        }
        return hashes;
    };
    EXPECT_EQ(run(), run());
}

TEST(Actions, DoNothingAlwaysApplies) {
    const auto inst = generate_instance(3, 2, 1);
    PlanState plan(inst);
    const auto h = plan.hash();
    const auto out = apply_do_nothing(plan);
    EXPECT_TRUE(out.applied);
    EXPECT_EQ(plan.hash(), h);
}

TEST(Actions, GuidedMovesTickLedgerOnce) {
    const auto inst = generate_instance(12, 4, 9);
    PlanState plan(inst);
    RuleSet rules(inst);
    ActionContext ctx;
    ctx.rules = &rules;
    while (apply_insertion(plan, ctx).applied) {
    }
    EXPECT_EQ(rules.ledger(MoveKind::IntraRoute).max_entry(), 0);
    for (int s = 0; s < 200; ++s) {
        apply_action(static_cast<ActionType>(1 + s % 3), plan, ctx);
        EXPECT_LE(rules.ledger(MoveKind::IntraRoute).max_entry(), rules.config().tabu_tenure);
    }
}
