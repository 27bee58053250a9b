#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "crowdroute/baselines.hpp"
#include "crowdroute/dqn/solver.hpp"

namespace crowdroute {

struct BenchmarkRow {
    std::uint64_t instance_seed = 0;
    std::string method;
    double tsc = 0.0;
    double seconds = 0.0;
    std::int64_t iterations = 0;
};

struct MethodSummary {
    std::string method;
    int wins = 0;           // instances where this method has the strict minimum TSC
    double mean_tsc = 0.0;
    double mean_gap = 0.0;  // mean of (tsc - best tsc on the instance) / best, in percent
    double mean_seconds = 0.0;
    double median_tsc = 0.0;
    double median_seconds = 0.0;
};

struct BenchmarkConfig {
    int n_requests = 50;
    int n_crowdsourcees = 22;
    int n_instances = 20;
    std::uint64_t first_seed = 1;
    std::vector<std::string> methods{"drl", "simple", "rts", "sa"};
    GeneratorParams generator;
    dqn::SolveConfig solve;
    RtsParams rts;
    SaParams sa;
    unsigned threads = 1;
};

/// Worker count from CROWDROUTE_THREADS, defaulting to 1.
inline unsigned benchmark_threads_from_env() {
    const char* v = std::getenv("CROWDROUTE_THREADS");
    if (!v) return 1;
    const long n = std::strtol(v, nullptr, 10);
    return n > 0 ? static_cast<unsigned>(n) : 1;
}

inline BenchmarkRow run_method(const std::string& method, const ProblemInstance& inst, std::uint64_t seed,
                               const dqn::QModel* model, const BenchmarkConfig& cfg) {
    BenchmarkRow row{seed, method, 0.0, 0.0, 0};
    if (method == "drl") {
        if (!model) throw std::invalid_argument("method 'drl' needs a model");
        const auto res = dqn::solve(inst, *model, cfg.solve);
        row.tsc = res.report.tsc;
        row.seconds = res.report.seconds;
        row.iterations = res.report.steps;
        return row;
    }
    BaselineReport rep;
    if (method == "simple") rep = simple_heuristic(inst).report;
    else if (method == "rts") rep = reactive_tabu_search(inst, cfg.rts).report;
    else if (method == "sa") {
        SaParams p = cfg.sa;
        p.seed = seed;
        rep = simulated_annealing(inst, p).report;
    } else throw std::invalid_argument("unknown method '" + method + "'");
    row.tsc = rep.tsc;
    row.seconds = rep.seconds;
    row.iterations = rep.iterations;
    return row;
}

/// Runs every method on every seeded instance; rows are ordered by instance, then method.
inline std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& cfg, const dqn::QModel* model) {
    const std::size_t n_methods = cfg.methods.size();
    std::vector<BenchmarkRow> rows(static_cast<std::size_t>(cfg.n_instances) * n_methods);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < cfg.n_instances; i = next++) {
            const std::uint64_t seed = cfg.first_seed + static_cast<std::uint64_t>(i);
            const ProblemInstance inst = generate_instance(cfg.n_requests, cfg.n_crowdsourcees, seed, cfg.generator);
            for (std::size_t m = 0; m < n_methods; ++m)
                rows[static_cast<std::size_t>(i) * n_methods + m] = run_method(cfg.methods[m], inst, seed, model, cfg);
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.n_instances)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

namespace detail {

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

inline std::vector<MethodSummary> summarize(const std::vector<BenchmarkRow>& rows) {
    std::vector<std::string> order;
    std::map<std::uint64_t, std::vector<const BenchmarkRow*>> by_instance;
    for (const auto& r : rows) {
        if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
        by_instance[r.instance_seed].push_back(&r);
    }
    std::map<std::string, std::vector<double>> tsc, secs, gaps;
    std::map<std::string, int> wins;
    for (const auto& [seed, group] : by_instance) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto* r : group) best = std::min(best, r->tsc);
        int n_best = 0;
        const BenchmarkRow* winner = nullptr;
        for (const auto* r : group)
            if (r->tsc == best) {
                ++n_best;
                winner = r;
            }
        if (n_best == 1) ++wins[winner->method];
        for (const auto* r : group) {
            tsc[r->method].push_back(r->tsc);
            secs[r->method].push_back(r->seconds);
            gaps[r->method].push_back(best > 0.0 ? 100.0 * (r->tsc - best) / best : 0.0);
        }
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    std::vector<MethodSummary> out;
    for (const auto& m : order)
        out.push_back({m, wins[m], mean(tsc[m]), mean(gaps[m]), mean(secs[m]), detail::median(tsc[m]),
                       detail::median(secs[m])});
    return out;
}

inline void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
    out << "instance_seed,method,tsc,seconds,iterations\n" << std::setprecision(6);
    for (const auto& r : rows)
        out << r.instance_seed << ',' << r.method << ',' << r.tsc << ',' << r.seconds << ',' << r.iterations << '\n';
}

inline void write_summary_csv(std::ostream& out, const std::vector<MethodSummary>& summary) {
    out << "method,wins,mean_tsc,mean_gap_percent,mean_seconds,median_tsc,median_seconds\n" << std::setprecision(6);
    for (const auto& s : summary)
        out << s.method << ',' << s.wins << ',' << s.mean_tsc << ',' << s.mean_gap << ',' << s.mean_seconds << ','
            << s.median_tsc << ',' << s.median_seconds << '\n';
}

}  // namespace crowdroute
