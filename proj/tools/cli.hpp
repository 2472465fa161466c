#pragma once
// Command-line front end. Exit codes: 0 success, 2 usage or input error,
// 3 runtime failure.

#include "nsar/nsar.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

namespace nsar::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_runtime = 3;
inline constexpr std::uint64_t default_seed = 7;

inline unsigned default_workers() { return std::max(1U, std::thread::hardware_concurrency()); }

/// "0.7,0.5,0.5" -> {0.7, 0.5, 0.5}
inline std::vector<double> parse_means(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        std::string item = text.substr(start, end - start);
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        while (!item.empty() && item.back() == ' ') item.pop_back();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size())
            throw Error(Errc::bad_config, "cannot parse mean \"" + item + "\"");
        out.push_back(v);
        start = end + 1;
    }
    return out;
}

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    unsigned workers = default_workers();
    std::string out = "results.csv";
    std::string jsonl;

    std::uint64_t t = 0;
    std::size_t k = 0;
    double p = 1.0;
    std::string means;
    std::size_t m = 1;
    double delta = 0.05;

    std::string out_dir = "replication";
    std::uint64_t trials = 4000;
    std::uint64_t rerun_trials = 20000;
};

inline int cmd_schedule(const Options& o, std::ostream& out) {
    const auto s = schedule(o.t, o.k, o.p);
    out << "T=" << s.t << " K=" << s.k << " p=" << format_double(s.p) << " C_p=" << format_double(s.cp) << "\n";
    out << "r\t|A_r|\tn_r\tpulls\n";
    for (std::size_t r = 1; r < s.n.size(); ++r) {
        const auto size = s.k - r + 1;
        out << r << '\t' << size << '\t' << s.n[r] << '\t' << size * (s.n[r] - s.n[r - 1]) << "\n";
    }
    out << "total\t" << s.total_pulls() << "\n";
    return exit_ok;
}

inline int cmd_bound(const Options& o, std::ostream& out) {
    const auto instance = make_instance(parse_means(o.means), ArmKind::bernoulli, o.m);
    const auto profile = gaps(instance);
    const auto report = h_measures(profile, o.p);
    const double bound = prop1_bound(o.t, instance.k(), o.p, profile);

    out << "K=" << instance.k() << " M=" << instance.m() << " T=" << o.t << " p=" << format_double(o.p) << "\n";
    out << "H1 = " << format_double(report.h1) << "\n";
    out << "H2 = " << format_double(report.h2) << "\n";
    out << "H(p) = " << format_double(report.hp) << "\n";
    out << "C_p = " << format_double(report.cp) << "\n";
    out << "logbar_K = " << format_double(report.logbar_k) << "\n";
    out << "bound = " << format_double(bound) << (bound > 1.0 ? "  (vacuous, > 1)" : "") << "\n";

    if (instance.m() == 1) {
        const auto t1 = table1_constants(profile, o.p);
        out << "single-arm decay constants (beta * exp(-T/alpha)):\n";
        out << "  SR  alpha = " << format_double(t1.successive_rejects.alpha)
            << "  beta = " << format_double(t1.successive_rejects.beta) << "\n";
        out << "  SH  alpha = " << format_double(t1.sequential_halving.alpha)
            << "  beta = " << format_double(t1.sequential_halving.beta) << "\n";
        out << "  NSE alpha = " << format_double(t1.nonlinear_elimination.alpha)
            << "  beta = " << format_double(t1.nonlinear_elimination.beta) << "\n";
    }
    const auto scores = complexity_scores(profile, o.p, o.delta);
    out << "sample-complexity order (delta=" << format_double(o.delta) << ", comparators only, no constants):\n";
    out << "  SAR = " << format_double(scores.sar) << "\n";
    out << "  AT-LUCB = " << format_double(scores.at_lucb) << "\n";
    out << "  NSAR = " << format_double(scores.nsar) << "\n";
    if (o.p == 1.0) out << "NSAR = SAR (p=1)\n";
    return exit_ok;
}

inline int cmd_classify(const Options& o, std::ostream& out) {
    const auto instance = make_instance(parse_means(o.means), ArmKind::bernoulli, o.m);
    out << regime_classify(gaps(instance)).label() << "\n";
    return exit_ok;
}

inline int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
    std::vector<ExperimentConfig> configs;
    try {
        configs = load_config(o.config_path);
        for (auto& c : configs) {
            if (o.seed) c.master_seed = *o.seed;
            validate(c);
        }
    } catch (const Error& ex) {
        err << "config error: " << ex.what() << "\n";
        return exit_usage;
    }
    try {
        const auto rows = run_grid(configs, o.workers);
        persist(rows, o.out, o.jsonl);
        out << "wrote " << rows.size() << " rows to " << o.out << "\n";
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return exit_runtime;
    }
    return exit_ok;
}

inline int cmd_replicate(const Options& o, std::ostream& out, std::ostream& err) {
    try {
        namespace fs = std::filesystem;
        fs::create_directories(o.out_dir);
        ReplicationOptions opts;
        opts.trials = o.trials;
        opts.master_seed = o.seed.value_or(default_seed);
        opts.workers = o.workers;
        // escalation only at full scale; smaller runs just report INCONCLUSIVE
        opts.rerun_trials = o.trials >= 4000 ? o.rerun_trials : 0;
        const auto result = replicate(opts, [&err](const ResultRow& row) {
            err << "setup " << row.config.setup_id << " M=" << row.config.m << " "
                << algorithm_label(row.config.algorithm) << " trials=" << row.estimate.trials
                << " p_hat=" << format_double(row.estimate.p_hat) << "\n";
        });
        const fs::path dir(o.out_dir);
        persist(result.rows, dir / "results.csv", dir / "results.jsonl");
        if (!result.rerun_rows.empty()) persist(result.rerun_rows, dir / "results_rerun.csv");
        const auto report = replication_report(result);
        std::ofstream(dir / "report.txt", std::ios::binary | std::ios::trunc) << report;
        out << report;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return exit_runtime;
    }
    return exit_ok;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Fixed-budget top-M arm identification with nonlinear accept/reject schedules"};
    app.require_subcommand(1);
    Options o;
    std::uint64_t seed_flag = 0;

    auto* simulate = app.add_subcommand("simulate", "run every experiment in a JSON config and write a CSV");
    simulate->add_option("config", o.config_path, "experiment config (JSON)")->required();
    auto* sim_seed = simulate->add_option("--seed", seed_flag, "override the config's master seed");
    simulate->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    simulate->add_option("--out", o.out, "CSV output path");
    simulate->add_option("--jsonl", o.jsonl, "optional JSON-lines mirror");

    auto* sched = app.add_subcommand("schedule", "print the per-round pull schedule");
    sched->add_option("--t", o.t, "total budget T")->required();
    sched->add_option("--k", o.k, "number of arms K")->required();
    sched->add_option("--p", o.p, "nonlinearity exponent in (0,2]");

    auto* bound = app.add_subcommand("bound", "error bound, hardness measures and complexity comparators");
    bound->add_option("--means", o.means, "comma-separated arm means")->required();
    bound->add_option("--m", o.m, "number of top arms M")->required();
    bound->add_option("--t", o.t, "total budget T")->required();
    bound->add_option("--p", o.p, "nonlinearity exponent in (0,2]");
    bound->add_option("--delta", o.delta, "confidence level for the complexity comparators");

    auto* classify = app.add_subcommand("classify", "gap-regime label and recommended exponent range");
    classify->add_option("--means", o.means, "comma-separated arm means")->required();
    classify->add_option("--m", o.m, "number of top arms M")->required();

    auto* rep = app.add_subcommand("replicate", "run the K=50 benchmark grid and evaluate its claims");
    rep->add_option("--out-dir", o.out_dir, "output directory");
    rep->add_option("--trials", o.trials, "trials per configuration")->check(CLI::PositiveNumber);
    auto* rep_seed = rep->add_option("--seed", seed_flag, "master seed (default 7)");
    rep->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    rep->add_option("--rerun-trials", o.rerun_trials, "trials for panels left open (0 disables)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& ex) {
        err << ex.what() << "\n";
        return exit_usage;
    }
    if (sim_seed->count() > 0 || rep_seed->count() > 0) o.seed = seed_flag;

    try {
        if (*simulate) return cmd_simulate(o, out, err);
        if (*rep) return cmd_replicate(o, out, err);
        if (*sched) return cmd_schedule(o, out);
        if (*bound) return cmd_bound(o, out);
        if (*classify) return cmd_classify(o, out);
    } catch (const Error& ex) {
        err << ex.what() << "\n";
        return exit_usage;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return exit_runtime;
    }
    return exit_usage;
}

} // namespace nsar::cli
