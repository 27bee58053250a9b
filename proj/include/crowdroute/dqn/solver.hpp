#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "crowdroute/dqn/environment.hpp"
#include "crowdroute/dqn/model.hpp"

namespace crowdroute::dqn {

/// Environment settings recorded in a model's fingerprint (penalties, rules, tenure, guided),
/// so a solve runs under the conditions the policy was trained in. Missing keys keep defaults.
inline EnvConfig env_config_for(const QModel& model) {
    std::map<std::string, std::string> kv;
    std::istringstream in(model.fingerprint);
    std::string item;
    while (std::getline(in, item, ';')) {
        const auto eq = item.find('=');
        if (eq != std::string::npos) kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    EnvConfig env;
    try {
        if (kv.count("pen")) {
            std::istringstream pen(kv["pen"]);
            char slash;
            pen >> env.penalty.vartheta >> slash >> env.penalty.tau >> slash >> env.penalty.rho_phi;
        }
        if (kv.count("rules")) env.rules.enabled = kv["rules"] == "1";
        if (kv.count("tenure")) env.rules.tabu_tenure = std::stoi(kv["tenure"]);
        if (kv.count("guided")) env.guided = kv["guided"] == "1";
    } catch (const std::exception&) {
        return EnvConfig{};
    }
    return env;
}

struct SolveConfig {
    int budget = 170;  // maximum number of actions
    EnvConfig env;
    std::uint64_t seed = 1;  // only used by unguided variants
    std::function<void(int step, const StepResult&)> trace;
};

struct SolveReport {
    double initial_tsc = 0.0;
    double tsc = 0.0;  // of the returned (best feasible) plan
    double seconds = 0.0;
    int steps = 0;
    std::array<int, kNumActionTypes> action_counts{};
    bool stopped_early = false;  // policy reached a fixed point before the budget ran out
};

struct SolveResult {
    PlanState plan;
    SolveReport report;
};

/// Single-sample evaluation for rollouts where consecutive states differ in few features: the
/// first-layer pre-activation is updated from the changed columns only and recomputed in full
/// every `refresh` calls to bound rounding drift.
class IncrementalForward {
public:
    explicit IncrementalForward(const Mlp& net, int refresh = 64) : net_(net), refresh_(std::max(1, refresh)) {}

    Eigen::VectorXd operator()(const std::vector<double>& x) {
        const Eigen::MatrixXd& w0 = net_.weights().front();
        if (static_cast<Eigen::Index>(x.size()) != w0.cols())
            throw ProfileError("network expects " + std::to_string(w0.cols()) + " inputs, got " +
                               std::to_string(x.size()));
        const Eigen::Map<const Eigen::VectorXd> v(x.data(), w0.cols());
        bool full = calls_++ % refresh_ == 0;
        if (!full) {
            changed_.clear();
            for (std::size_t i = 0; i < x.size(); ++i)
                if (x[i] != prev_[i]) changed_.push_back(static_cast<Eigen::Index>(i));
            full = changed_.size() * 4 > x.size();
            if (!full)
                for (Eigen::Index i : changed_) z_ += w0.col(i) * (v(i) - prev_[static_cast<std::size_t>(i)]);
        }
        if (full) z_ = w0 * v + net_.biases().front();
        prev_ = x;
        return net_.forward_from_first(z_);
    }

private:
    const Mlp& net_;
    int refresh_;
    std::int64_t calls_ = 0;
    std::vector<double> prev_;
    std::vector<Eigen::Index> changed_;
    Eigen::VectorXd z_;
};

/// Index of the largest entry not excluded by `masked`; ties by lowest index.
inline int masked_argmax(const Eigen::VectorXd& q, const std::array<bool, kNumActionTypes>& masked) {
    int best = -1;
    for (int a = 0; a < kNumActionTypes; ++a)
        if (!masked[a] && (best < 0 || q(a) > q(best))) best = a;
    return best;
}

/// Greedy rollout of a trained policy. Action types whose attempts keep failing without
/// changing the plan are masked until the plan changes; the rollout stops when do-nothing is
/// the best remaining choice. Returns the cheapest plan seen that is feasible on every route.
inline SolveResult solve(const ProblemInstance& inst, const QModel& model, const SolveConfig& cfg) {
    model.check_profile(inst);
    const auto t0 = std::chrono::steady_clock::now();
    Environment env(inst, cfg.env, cfg.seed);
    SolveReport report;
    report.initial_tsc = env.tsc();

    IncrementalForward policy(model.net);
    std::array<int, kNumActionTypes> failures{};
    for (int step = 0; step < cfg.budget; ++step) {
        const StateVector s = env.state();
        const Eigen::VectorXd q = policy(s.values);

        int non_idle = 0;
        for (int k = 0; k < env.plan().num_routes(); ++k) non_idle += env.plan().is_idle(k) ? 0 : 1;
        std::array<bool, kNumActionTypes> masked{};
        for (int a = 0; a < kNumActionTypes; ++a) {
            const bool cycles = cfg.env.rules.enabled && a != static_cast<int>(ActionType::Insertion) &&
                                a != static_cast<int>(ActionType::DoNothing);
            masked[a] = failures[a] >= (cycles ? std::max(1, non_idle) : 1);
        }
        const int a = masked_argmax(q, masked);
        if (a < 0 || a == static_cast<int>(ActionType::DoNothing)) {
            report.stopped_early = true;
            if (a >= 0) ++report.action_counts[a];
            break;
        }
        const StepResult res = env.step(static_cast<ActionType>(a));
        ++report.action_counts[a];
        ++report.steps;
        if (cfg.trace) cfg.trace(step, res);
        if (res.outcome.applied) failures.fill(0);
        else ++failures[a];
    }

    report.tsc = env.best_tsc();
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {env.best_plan(), report};
}

}  // namespace crowdroute::dqn
