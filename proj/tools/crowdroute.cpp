// Command-line front end: generate, train, solve, benchmark.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "crowdroute/crowdroute.hpp"

namespace fs = std::filesystem;
using namespace crowdroute;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kValidation = 3, kDivergence = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GenerateArgs {
    int n_requests = 50;
    int n_crowdsourcees = 22;
    std::uint64_t seed = 1;
    std::string out;
    bool literal_beta_c = false;
};

struct TrainArgs {
    std::string profile = "medium";
    std::string out = "model.bin";
    std::string log;
    std::uint64_t seed = 1;
    bool no_rules = false;
    bool no_guided = false;
    std::optional<std::int64_t> max_steps, min_steps;
    std::optional<int> max_episodes, episode_length, tenure, target_update;
    std::optional<double> gamma, learning_rate, epsilon_decay, threshold, vartheta, tau, rho_phi;
    std::optional<std::size_t> replay, minibatch;
    std::int64_t checkpoint_every = 0;
    std::string checkpoint_dir;
};

struct SolveArgs {
    std::string model;
    std::string instance;
    int budget = 170;
    std::uint64_t seed = 1;
    bool dump_plan = false;
    bool trace = false;
};

struct BenchArgs {
    std::string model;
    int n_instances = 20;
    std::uint64_t seed = 1;
    std::string methods = "drl,simple,rts,sa";
    std::string out;
    int budget = 170;
    int n_requests = 50;  // without a model only
    int n_crowdsourcees = 22;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

int cmd_generate(const GenerateArgs& a) {
    GeneratorParams gp;
    gp.literal_beta_c = a.literal_beta_c;
    const ProblemInstance inst = generate_instance(a.n_requests, a.n_crowdsourcees, a.seed, gp);
    save_instance(inst, a.out);
    std::cout << "wrote " << a.out << " (" << a.n_requests << " requests, " << a.n_crowdsourcees
              << " crowdsourcees, seed " << a.seed << ")\n";
    return kOk;
}

int cmd_train(const TrainArgs& a) {
    dqn::TrainConfig cfg = dqn::TrainConfig::for_profile(profile_by_name(a.profile));
    cfg.seed = a.seed;
    cfg.env.rules.enabled = !a.no_rules;
    cfg.env.guided = !a.no_guided;
    if (a.max_steps) cfg.max_steps = *a.max_steps;
    if (a.min_steps) cfg.min_steps = *a.min_steps;
    if (a.max_episodes) cfg.max_episodes = *a.max_episodes;
    if (a.episode_length) cfg.episode_length = *a.episode_length;
    if (a.tenure) cfg.env.rules.tabu_tenure = *a.tenure;
    if (a.target_update) cfg.target_update = *a.target_update;
    if (a.gamma) cfg.gamma = *a.gamma;
    if (a.learning_rate) cfg.learning_rate = *a.learning_rate;
    if (a.epsilon_decay) cfg.epsilon_decay = *a.epsilon_decay;
    if (a.threshold) cfg.termination_threshold = *a.threshold;
    if (a.vartheta) cfg.env.penalty.vartheta = *a.vartheta;
    if (a.tau) cfg.env.penalty.tau = *a.tau;
    if (a.rho_phi) cfg.env.penalty.rho_phi = *a.rho_phi;
    if (a.replay) cfg.replay_capacity = *a.replay;
    if (a.minibatch) cfg.minibatch = *a.minibatch;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    dqn::Trainer trainer(cfg);
    if (a.checkpoint_every > 0) {
        const fs::path dir = a.checkpoint_dir.empty() ? fs::path(a.out).parent_path() : fs::path(a.checkpoint_dir);
        if (!dir.empty()) fs::create_directories(dir);
        trainer.checkpoint_interval = a.checkpoint_every;
        trainer.on_checkpoint = [dir](std::int64_t step, const dqn::QModel& m) {
            dqn::save_model(m, (dir / ("checkpoint_" + std::to_string(step) + ".bin")).string());
        };
    }
    const dqn::TrainingResult res = trainer.run();
    dqn::save_model(res.model, a.out);
    const std::string log = a.log.empty() ? a.out + ".log.csv" : a.log;
    dqn::write_training_log(res.log, log);
    std::cout << std::setprecision(6) << "stopped: " << dqn::to_string(res.reason) << "\n"
              << "steps " << res.steps << ", episodes " << res.episodes << ", early terminations "
              << res.early_terminations << ", " << res.seconds << " s\n"
              << "model " << a.out << ", log " << log << "\n";
    return kOk;
}

int cmd_solve(const SolveArgs& a) {
    const ProblemInstance inst = load_instance(a.instance);
    validate(inst);
    const dqn::QModel model = dqn::load_model(a.model);
    dqn::SolveConfig cfg;
    cfg.budget = a.budget;
    cfg.seed = a.seed;
    cfg.env = dqn::env_config_for(model);
    if (a.trace)
        cfg.trace = [](int step, const dqn::StepResult& r) {
            std::cout << "step " << step << ": " << to_string(r.outcome.type) << " -- " << r.outcome.description
                      << " (reward " << r.reward << ")\n";
        };
    std::cout << std::setprecision(6);
    const dqn::SolveResult res = dqn::solve(inst, model, cfg);
    int feasible = 0;
    for (int k = 0; k < res.plan.num_routes(); ++k) feasible += is_feasible(res.plan.schedule(k)) ? 1 : 0;
    std::cout << "tsc " << res.report.tsc << "\n"
              << "initial_tsc " << res.report.initial_tsc << "\n"
              << "feasible_routes " << feasible << "/" << res.plan.num_routes() << "\n"
              << "backup_requests " << res.plan.backup_set().size() << "\n"
              << "steps " << res.report.steps << "\n"
              << "seconds " << res.report.seconds << "\n";
    for (int t = 0; t < kNumActionTypes; ++t)
        std::cout << "count_" << to_string(static_cast<ActionType>(t)) << " " << res.report.action_counts[t] << "\n";
    if (a.dump_plan) std::cout << dump_plan(res.plan);
    return kOk;
}

int cmd_benchmark(const BenchArgs& a) {
    BenchmarkConfig cfg;
    cfg.methods = split(a.methods, ',');
    cfg.n_instances = a.n_instances;
    cfg.first_seed = a.seed;
    cfg.threads = benchmark_threads_from_env();
    cfg.solve.budget = a.budget;
    cfg.n_requests = a.n_requests;
    cfg.n_crowdsourcees = a.n_crowdsourcees;
    std::optional<dqn::QModel> model;
    const bool needs_model = std::find(cfg.methods.begin(), cfg.methods.end(), "drl") != cfg.methods.end();
    if (needs_model) {
        if (a.model.empty()) throw UsageError("method 'drl' needs --model");
        model = dqn::load_model(a.model);
        cfg.n_requests = model->n_requests;
        cfg.n_crowdsourcees = model->n_crowdsourcees;
        cfg.solve.env = dqn::env_config_for(*model);
        cfg.rts.penalty = cfg.sa.penalty = cfg.solve.env.penalty;
    }
    for (const auto& m : cfg.methods)
        if (m != "drl" && m != "simple" && m != "rts" && m != "sa") throw UsageError("unknown method '" + m + "'");
    const auto rows = run_benchmark(cfg, model ? &*model : nullptr);
    const auto summary = summarize(rows);
    if (a.out.empty()) {
        write_benchmark_csv(std::cout, rows);
    } else {
        std::ofstream out(a.out);
        if (!out) throw std::runtime_error("cannot open '" + a.out + "' for writing");
        write_benchmark_csv(out, rows);
        std::cout << "wrote " << a.out << "\n";
    }
    std::cout << "\n";
    write_summary_csv(std::cout, summary);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crowdsourced delivery routing with a deep Q-network over heuristic actions"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "write a random instance file");
    g->add_option("--requests,-n", gen.n_requests, "number of requests")->check(CLI::PositiveNumber);
    g->add_option("--crowdsourcees,-k", gen.n_crowdsourcees, "number of crowdsourcees")->check(CLI::PositiveNumber);
    g->add_option("--seed", gen.seed, "random seed");
    g->add_option("--out,-o", gen.out, "output path")->required();
    g->add_flag("--literal-beta-c", gen.literal_beta_c, "use 0.17 $/min instead of 10 $/h");

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "train a Q-network on freshly generated instances");
    t->add_option("--profile", tr.profile, "medium, large or desk")->check(CLI::IsMember({"medium", "large", "desk"}));
    t->add_option("--out,-o", tr.out, "model output path");
    t->add_option("--log", tr.log, "training log CSV (default <out>.log.csv)");
    t->add_option("--seed", tr.seed, "master seed");
    t->add_flag("--no-rules", tr.no_rules, "disable priority lists and tabu ledgers");
    t->add_flag("--no-guided", tr.no_guided, "use random action variants");
    t->add_option("--max-steps", tr.max_steps);
    t->add_option("--min-steps", tr.min_steps, "steps before the convergence test applies");
    t->add_option("--max-episodes", tr.max_episodes);
    t->add_option("--episode-length", tr.episode_length);
    t->add_option("--tenure", tr.tenure, "tabu tenure");
    t->add_option("--target-update", tr.target_update, "target copy interval in steps");
    t->add_option("--gamma", tr.gamma);
    t->add_option("--learning-rate", tr.learning_rate);
    t->add_option("--epsilon-decay", tr.epsilon_decay);
    t->add_option("--termination-threshold", tr.threshold);
    t->add_option("--vartheta", tr.vartheta, "late-delivery penalty weight");
    t->add_option("--tau", tr.tau, "overtime penalty weight");
    t->add_option("--rho-phi", tr.rho_phi, "capacity penalty weight");
    t->add_option("--replay", tr.replay, "replay memory size");
    t->add_option("--minibatch", tr.minibatch);
    t->add_option("--checkpoint-every", tr.checkpoint_every, "save a checkpoint every N steps");
    t->add_option("--checkpoint-dir", tr.checkpoint_dir);

    SolveArgs so;
    auto* s = app.add_subcommand("solve", "run a trained policy on an instance");
    s->add_option("--model,-m", so.model)->required();
    s->add_option("--instance,-i", so.instance)->required();
    s->add_option("--budget", so.budget, "maximum number of actions")->check(CLI::NonNegativeNumber);
    s->add_option("--seed", so.seed);
    s->add_flag("--dump-plan", so.dump_plan, "print the final routes");
    s->add_flag("--trace-actions", so.trace, "print every action taken");

    BenchArgs be;
    auto* b = app.add_subcommand("benchmark", "compare the policy with the baseline heuristics");
    b->add_option("--model,-m", be.model);
    b->add_option("--instances", be.n_instances)->check(CLI::PositiveNumber);
    b->add_option("--seed", be.seed, "seed of the first instance");
    b->add_option("--methods", be.methods, "comma-separated subset of drl,simple,rts,sa");
    b->add_option("--out,-o", be.out, "CSV path (default stdout)");
    b->add_option("--budget", be.budget, "policy action budget")->check(CLI::NonNegativeNumber);
    b->add_option("--requests,-n", be.n_requests, "instance size when no model is given")->check(CLI::PositiveNumber);
    b->add_option("--crowdsourcees,-k", be.n_crowdsourcees, "instance size when no model is given")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*g) return cmd_generate(gen);
        if (*t) return cmd_train(tr);
        if (*s) return cmd_solve(so);
        if (*b) return cmd_benchmark(be);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kValidation;
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kValidation;
    } catch (const ProfileError& e) {
        std::cerr << "profile mismatch: " << e.what() << "\n";
        return kValidation;
    } catch (const InvalidPlanError& e) {
        std::cerr << "invalid plan: " << e.what() << "\n";
        return kValidation;
    } catch (const DivergenceError& e) {
        std::cerr << "training diverged: " << e.what() << "\n";
        return kDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}
