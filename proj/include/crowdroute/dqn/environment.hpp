#pragma once

#include <cstdint>
#include <random>

#include "crowdroute/actions.hpp"
#include "crowdroute/features.hpp"

namespace crowdroute::dqn {

struct EnvConfig {
    PenaltyConfig penalty;
    RuleConfig rules;
    bool guided = true;  // false: unguided random action variants
};

struct StepResult {
    ActionOutcome outcome;
    double reward = 0.0;
    double penalty = 0.0;  // penalty cost of the touched routes after the action
};

/// One rollout over a single instance: plan, rule state, and the best feasible plan seen.
class Environment {
public:
    Environment(const ProblemInstance& inst, EnvConfig cfg, std::uint64_t seed)
        : cfg_(cfg), plan_(inst), best_plan_(inst), rules_(inst, cfg.rules), rng_(seed) {
        tsc_ = total_shipping_cost(plan_);
        best_tsc_ = tsc_;
    }

    const ProblemInstance& instance() const { return plan_.instance(); }
    const PlanState& plan() const { return plan_; }
    const RuleSet& rules() const { return rules_; }
    StateVector state() const { return encode_state(plan_); }

    double tsc() const { return tsc_; }
    double best_tsc() const { return best_tsc_; }
    const PlanState& best_plan() const { return best_plan_; }

    StepResult step(ActionType type) {
        ActionContext ctx{&rules_, cfg_.penalty, best_tsc_, &rng_};
        StepResult res;
        res.outcome = apply_action(type, plan_, ctx, cfg_.guided);
        res.reward = action_reward(instance(), res.outcome, cfg_.penalty);
        res.penalty = action_penalty(instance(), res.outcome, cfg_.penalty);
        if (res.outcome.applied && !res.outcome.mutated_routes.empty()) {
            tsc_ = total_shipping_cost(plan_);
            if (tsc_ < best_tsc_ && plan_.all_routes_feasible()) {
                best_tsc_ = tsc_;
                best_plan_ = plan_;
            }
        }
        return res;
    }

private:
    EnvConfig cfg_;
    PlanState plan_;
    PlanState best_plan_;
    RuleSet rules_;
    std::mt19937_64 rng_;
    double tsc_ = 0.0;
    double best_tsc_ = 0.0;
};

}  // namespace crowdroute::dqn
