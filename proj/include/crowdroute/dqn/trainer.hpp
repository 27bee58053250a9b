#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crowdroute/dqn/environment.hpp"
#include "crowdroute/dqn/mlp.hpp"
#include "crowdroute/dqn/model.hpp"
#include "crowdroute/dqn/replay_buffer.hpp"
#include "crowdroute/profile.hpp"

namespace crowdroute::dqn {

/// Derives independent stream seeds from one master seed.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

struct TrainConfig {
    int n_requests = 50;
    int n_crowdsourcees = 22;
    GeneratorParams generator;

    int max_episodes = 600;
    int episode_length = 85;
    std::int64_t max_steps = 50000;
    std::int64_t min_steps = 10000;  // convergence is not tested before this many steps

    std::size_t replay_capacity = 10000;
    std::size_t minibatch = 100;
    int target_update = 400;
    double gamma = 0.96;
    double learning_rate = 0.001;
    double epsilon_decay = 0.001;
    double termination_threshold = -25.0;
    bool epsilon_reset_per_episode = false;

    int convergence_window = 3000;
    double convergence_tolerance = 0.05;

    std::vector<int> hidden_layers{128, 128, 128};
    EnvConfig env;
    std::uint64_t seed = 1;

    static TrainConfig for_profile(const Profile& p) {
        TrainConfig c;
        c.n_requests = p.n_requests;
        c.n_crowdsourcees = p.n_crowdsourcees;
        c.episode_length = p.episode_length;
        c.env.penalty = p.penalty;
        c.env.rules.tabu_tenure = p.tabu_tenure;
        c.termination_threshold = p.termination_threshold;
        c.epsilon_decay = p.epsilon_decay;
        return c;
    }

    void validate() const {
        if (n_requests <= 0 || n_crowdsourcees <= 0) throw std::invalid_argument("problem size must be positive");
        if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
        if (!(epsilon_decay >= 0.0 && epsilon_decay < 1.0)) throw std::invalid_argument("epsilon decay must lie in [0, 1)");
        if (!(termination_threshold < 0.0)) throw std::invalid_argument("termination threshold must be negative");
        if (minibatch == 0 || replay_capacity < minibatch) throw std::invalid_argument("replay capacity must hold a minibatch");
        if (target_update <= 0 || episode_length <= 0) throw std::invalid_argument("target update / episode length must be positive");
    }

    std::string fingerprint() const {
        std::ostringstream s;
        s << std::setprecision(17) << "J=" << n_requests << ";K=" << n_crowdsourcees << ";T=" << episode_length
          << ";M=" << replay_capacity << ";Msub=" << minibatch << ";delta=" << target_update << ";gamma=" << gamma
          << ";alpha=" << learning_rate << ";xi=" << epsilon_decay << ";K_term=" << termination_threshold
          << ";pen=" << env.penalty.vartheta << "/" << env.penalty.tau << "/" << env.penalty.rho_phi
          << ";rules=" << env.rules.enabled << ";tenure=" << env.rules.tabu_tenure << ";guided=" << env.guided
          << ";seed=" << seed;
        return s.str();
    }
};

/// Multiplicative exploration decay.
inline double epsilon_next(double epsilon, double decay) { return epsilon * (1.0 - decay); }

struct TrainingLogRow {
    std::int64_t step = 0;
    int episode = 0;
    double avg_loss = 0.0;      // running mean over the episode's updates
    double avg_q = 0.0;         // minibatch-mean Q(s, a) of the latest update
    double accum_reward = 0.0;  // reward accumulated since the last early termination
    double cum_penalty = 0.0;   // penalty cost summed over all steps so far
};

enum class StopReason { Converged, StepBudget, EpisodeBudget };

inline const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::Converged: return "converged";
        case StopReason::StepBudget: return "step budget exhausted";
        case StopReason::EpisodeBudget: return "episode budget exhausted";
    }
    return "?";
}

struct TrainingResult {
    QModel model;
    std::vector<TrainingLogRow> log;
    StopReason reason = StopReason::StepBudget;
    std::int64_t steps = 0;
    int episodes = 0;
    int early_terminations = 0;
    double seconds = 0.0;
    std::array<std::int64_t, kNumActionTypes> action_counts{};
};

inline void write_training_log(const std::vector<TrainingLogRow>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "step,episode,avg_loss,avg_q,accum_reward,cum_penalty\n" << std::setprecision(6);
    for (const auto& r : log)
        out << r.step << ',' << r.episode << ',' << r.avg_loss << ',' << r.avg_q << ',' << r.accum_reward << ','
            << r.cum_penalty << '\n';
}

/// Deep Q-learning over freshly generated instances with experience replay and a periodically
/// synchronized target network.
class Trainer {
public:
    explicit Trainer(TrainConfig cfg)
        : cfg_(std::move(cfg)), buffer_(cfg_.replay_capacity),
          explore_rng_(split_seed(cfg_.seed, 1)), sample_rng_(split_seed(cfg_.seed, 2)) {
        cfg_.validate();
        std::vector<int> sizes{static_cast<int>(state_size(cfg_.n_requests, cfg_.n_crowdsourcees))};
        sizes.insert(sizes.end(), cfg_.hidden_layers.begin(), cfg_.hidden_layers.end());
        sizes.push_back(kNumActionTypes);
        online_ = Mlp(sizes, split_seed(cfg_.seed, 0));
        target_ = online_;
        adam_ = Adam(online_, AdamConfig{cfg_.learning_rate});
    }

    /// Called after every environment step.
    std::function<void(const Trainer&)> on_step;
    /// Called every `checkpoint_interval` steps with the current online network.
    std::function<void(std::int64_t step, const QModel&)> on_checkpoint;
    std::int64_t checkpoint_interval = 2500;

    const TrainConfig& config() const { return cfg_; }
    const Mlp& online() const { return online_; }
    const Mlp& target() const { return target_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    double epsilon() const { return epsilon_; }
    std::int64_t global_step() const { return step_; }
    std::int64_t updates() const { return updates_; }
    int last_action() const { return last_action_; }
    const std::vector<double>& penalty_history() const { return penalty_history_; }

    QModel snapshot() const {
        QModel m;
        m.n_requests = cfg_.n_requests;
        m.n_crowdsourcees = cfg_.n_crowdsourcees;
        m.net = online_;
        m.optimizer = adam_;
        m.fingerprint = cfg_.fingerprint();
        return m;
    }

    /// Relative growth of cumulative penalty over the trailing window; 0 when nothing accrued.
    double penalty_relative_change() const {
        const auto w = static_cast<std::size_t>(cfg_.convergence_window);
        if (penalty_history_.size() <= w) return 1.0;
        const double now = penalty_history_.back();
        const double then = penalty_history_[penalty_history_.size() - 1 - w];
        return now > 0.0 ? (now - then) / now : 0.0;
    }

    TrainingResult run() {
        const auto t0 = std::chrono::steady_clock::now();
        TrainingResult result;
        std::optional<StopReason> stop;
        double accum_reward = 0.0;
        double cum_penalty = 0.0;

        int episode = 0;
        for (; episode < cfg_.max_episodes && !stop; ++episode) {
            const ProblemInstance inst = generate_instance(cfg_.n_requests, cfg_.n_crowdsourcees,
                                                           split_seed(cfg_.seed, 1000 + static_cast<std::uint64_t>(episode)),
                                                           cfg_.generator);
            Environment env(inst, cfg_.env, split_seed(cfg_.seed, 3) + static_cast<std::uint64_t>(episode));
            if (cfg_.epsilon_reset_per_episode) epsilon_ = 1.0;
            double negative_reward = 0.0;
            double loss_sum = 0.0;
            int loss_count = 0;
            double last_q = 0.0;

            StateVector state = env.state();
            for (int t = 0; t < cfg_.episode_length; ++t) {
                const int action = choose_action(state);
                epsilon_ = epsilon_next(epsilon_, cfg_.epsilon_decay);
                const StepResult res = env.step(static_cast<ActionType>(action));
                StateVector next = env.state();
                ++result.action_counts[action];
                last_action_ = action;

                if (res.reward < 0.0) negative_reward += res.reward;
                accum_reward += res.reward;
                cum_penalty += res.penalty;
                penalty_history_.push_back(cum_penalty);

                buffer_.push({to_float(state), action, res.reward, to_float(next)});
                ++step_;
                state = std::move(next);

                bool terminate = false;
                if (buffer_.size() > cfg_.minibatch) {
                    if (negative_reward > cfg_.termination_threshold) {
                        const auto [loss, q] = optimize();
                        if (!std::isfinite(loss)) {
                            std::ostringstream msg;
                            msg << "non-finite loss at step " << step_ << " (episode " << episode << ", epsilon "
                                << epsilon_ << ", last reward " << res.reward << ", buffer " << buffer_.size()
                                << ", updates " << updates_ << ")";
                            throw DivergenceError(msg.str());
                        }
                        loss_sum += loss;
                        ++loss_count;
                        last_q = q;
                    } else {
                        terminate = true;
                    }
                }
                if (step_ % cfg_.target_update == 0) target_ = online_;

                result.log.push_back({step_, episode, loss_count ? loss_sum / loss_count : 0.0, last_q, accum_reward,
                                      cum_penalty});
                if (terminate) {
                    ++result.early_terminations;
                    accum_reward = 0.0;
                }
                if (on_step) on_step(*this);
                if (on_checkpoint && checkpoint_interval > 0 && step_ % checkpoint_interval == 0)
                    on_checkpoint(step_, snapshot());

                if (step_ >= cfg_.min_steps && step_ >= cfg_.convergence_window &&
                    penalty_relative_change() < cfg_.convergence_tolerance) {
                    stop = StopReason::Converged;
                } else if (step_ >= cfg_.max_steps) {
                    stop = StopReason::StepBudget;
                }
                if (terminate || stop) break;
            }
        }
        result.reason = stop.value_or(StopReason::EpisodeBudget);
        result.steps = step_;
        result.episodes = episode;
        result.model = snapshot();
        result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return result;
    }

private:
    static std::vector<float> to_float(const StateVector& s) { return {s.values.begin(), s.values.end()}; }

    int choose_action(const StateVector& s) {
        if (std::uniform_real_distribution<double>(0.0, 1.0)(explore_rng_) < epsilon_)
            return std::uniform_int_distribution<int>(0, kNumActionTypes - 1)(explore_rng_);
        const Eigen::VectorXd q = online_.forward(s.values);
        int best = 0;
        for (int a = 1; a < kNumActionTypes; ++a)
            if (q(a) > q(best)) best = a;
        return best;
    }

    // One Adam step on a uniformly sampled minibatch. Returns (loss, mean predicted Q).
    std::pair<double, double> optimize() {
        const auto idx = buffer_.sample_indices(cfg_.minibatch, sample_rng_);
        const auto n = static_cast<Eigen::Index>(online_.input_size());
        const auto b = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd s(n, b), s_next(n, b);
        std::vector<int> actions(idx.size());
        std::vector<double> targets(idx.size());
        for (Eigen::Index i = 0; i < b; ++i) {
            const Experience& e = buffer_.slot(idx[i]);
            s.col(i) = Eigen::Map<const Eigen::VectorXf>(e.state.data(), n).cast<double>();
            s_next.col(i) = Eigen::Map<const Eigen::VectorXf>(e.next_state.data(), n).cast<double>();
            actions[i] = e.action;
        }
        const Eigen::MatrixXd q_next = target_.forward(s_next);
        for (Eigen::Index i = 0; i < b; ++i)
            targets[i] = buffer_.slot(idx[i]).reward + cfg_.gamma * q_next.col(i).maxCoeff();

        Mlp::Cache cache;
        const Eigen::MatrixXd q = online_.forward(s, cache);
        const TdLoss l = td_loss(q, actions, targets);
        adam_.update(online_, online_.backward(cache, l.d_out));
        ++updates_;
        return {l.loss, l.mean_q};
    }

    TrainConfig cfg_;
    Mlp online_;
    Mlp target_;
    Adam adam_;
    ReplayBuffer buffer_;
    std::mt19937_64 explore_rng_;
    std::mt19937_64 sample_rng_;
    double epsilon_ = 1.0;
    std::int64_t step_ = 0;
    std::int64_t updates_ = 0;
    int last_action_ = -1;
    std::vector<double> penalty_history_;
};

inline TrainingResult train(const TrainConfig& cfg) { return Trainer(cfg).run(); }

}  // namespace crowdroute::dqn
