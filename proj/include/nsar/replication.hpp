#pragma once
/*
The K = 50 benchmark grid: six setups x M in {2, 4} x seven identifiers
(NSAR at p in {0.7, 0.85, 1.1, 1.2, 1.3}, SAR, UNI), budget ceil(H1), and the
qualitative claims checked against it:

  (a) UNI has the largest error in every panel;
  (b) setup 1: NSAR p=0.7 and p=0.85 each beat SAR;
  (c) setups 2, 3, 6: at least two of p in {1.1, 1.2, 1.3} beat SAR;
  (d) setups 4, 5: the same two-of-three condition.

"Beat" means disjoint 95% Wilson intervals in the right direction. Panels
whose verdict is still open are rerun with more trials when an escalation
budget is given; anything still open after that counts as FAIL.
*/

#include "nsar/harness.hpp"
#include "nsar/io.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace nsar {

inline const std::vector<double>& grid_exponents() {
    static const std::vector<double> ps = {0.7, 0.85, 1.1, 1.2, 1.3};
    return ps;
}

inline std::vector<AlgorithmSpec> grid_algorithms() {
    std::vector<AlgorithmSpec> out;
    for (double p : grid_exponents()) out.push_back(AlgorithmSpec::nsar(p));
    out.push_back(AlgorithmSpec::sar());
    out.push_back(AlgorithmSpec::uni());
    return out;
}

/// 84 configurations ordered by setup, then M, then algorithm.
inline std::vector<ExperimentConfig> benchmark_grid(std::uint64_t trials, std::uint64_t master_seed) {
    std::vector<ExperimentConfig> grid;
    for (int id = 1; id <= max_setup_id; ++id)
        for (std::size_t m : {std::size_t{2}, std::size_t{4}})
            for (const auto& algorithm : grid_algorithms()) {
                ExperimentConfig c;
                c.setup_id = id;
                c.k = 50;
                c.m = m;
                c.algorithm = algorithm;
                c.trials = trials;
                c.budget = Budget::from_h1();
                c.master_seed = master_seed;
                c.beta_instances = BetaInstances::fixed;
                grid.push_back(std::move(c));
            }
    return grid;
}

using Progress = std::function<void(const ResultRow&)>;

inline std::vector<ResultRow> run_grid(const std::vector<ExperimentConfig>& configs, unsigned workers,
                                       const Progress& progress = {}) {
    std::vector<ResultRow> rows;
    rows.reserve(configs.size());
    for (const auto& c : configs) {
        rows.push_back({c, run_experiment(c, workers)});
        if (progress) progress(rows.back());
    }
    return rows;
}

enum class Verdict { pass, fail, inconclusive };

inline std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

enum class Comparison { lower, higher, overlap };

/// Position of `a` relative to `b` by 95% Wilson intervals.
inline Comparison compare(const ErrorEstimate& a, const ErrorEstimate& b) {
    if (a.ci_high < b.ci_low) return Comparison::lower;
    if (a.ci_low > b.ci_high) return Comparison::higher;
    return Comparison::overlap;
}

struct PanelKey {
    int setup_id = 0;
    std::size_t m = 0;
    auto operator<=>(const PanelKey&) const = default;
};

/// The seven estimates of one (setup, M) panel, keyed by algorithm label.
using Panel = std::map<std::string, ErrorEstimate>;

inline std::string algorithm_label(const AlgorithmSpec& a) {
    if (a.kind != AlgorithmKind::nsar) return a.name();
    std::ostringstream s;
    s << "NSAR(p=" << a.p << ")";
    return s.str();
}

inline std::map<PanelKey, Panel> panels(const std::vector<ResultRow>& rows) {
    std::map<PanelKey, Panel> out;
    for (const auto& r : rows) out[{r.config.setup_id, r.config.m}][algorithm_label(r.config.algorithm)] = r.estimate;
    return out;
}

struct PanelVerdict {
    PanelKey panel;
    Verdict verdict = Verdict::inconclusive;
    std::string detail;
    std::uint64_t trials = 0;
};

struct ClaimResult {
    char id = 'a';
    std::string statement;
    std::vector<PanelVerdict> panels;

    Verdict verdict() const {
        bool open = false;
        for (const auto& p : panels) {
            if (p.verdict == Verdict::fail) return Verdict::fail;
            open = open || p.verdict == Verdict::inconclusive;
        }
        return open ? Verdict::inconclusive : Verdict::pass;
    }
};

namespace detail {

inline std::string nsar_label(double p) { return algorithm_label(AlgorithmSpec::nsar(p)); }

// Every listed algorithm must sit strictly below `reference` (or above when
// `reference_highest`).
inline PanelVerdict all_of(const Panel& panel, const std::string& reference, const std::vector<std::string>& others,
                           bool reference_highest) {
    PanelVerdict v;
    std::ostringstream detail;
    bool open = false;
    bool wrong = false;
    for (const auto& name : others) {
        const auto c = reference_highest ? compare(panel.at(reference), panel.at(name))
                                         : compare(panel.at(name), panel.at(reference));
        const bool right = reference_highest ? c == Comparison::higher : c == Comparison::lower;
        const bool opposite = reference_highest ? c == Comparison::lower : c == Comparison::higher;
        wrong = wrong || opposite;
        open = open || c == Comparison::overlap;
        detail << name << (right ? ":ok " : opposite ? ":reversed " : ":overlap ");
    }
    v.verdict = wrong ? Verdict::fail : open ? Verdict::inconclusive : Verdict::pass;
    v.detail = detail.str();
    v.trials = panel.at(reference).trials;
    return v;
}

inline PanelVerdict two_of_three(const Panel& panel) {
    PanelVerdict v;
    std::ostringstream detail;
    int better = 0;
    int worse_or_tied = 0;
    for (double p : {1.1, 1.2, 1.3}) {
        const auto c = compare(panel.at(nsar_label(p)), panel.at("SAR"));
        better += c == Comparison::lower ? 1 : 0;
        worse_or_tied += c == Comparison::higher ? 1 : 0;
        detail << nsar_label(p)
               << (c == Comparison::lower ? ":beats " : c == Comparison::higher ? ":loses " : ":overlap ");
    }
    v.verdict = better >= 2 ? Verdict::pass : worse_or_tied >= 2 ? Verdict::fail : Verdict::inconclusive;
    v.detail = detail.str();
    v.trials = panel.at("SAR").trials;
    return v;
}

} // namespace detail

inline std::vector<ClaimResult> evaluate_claims(const std::map<PanelKey, Panel>& all) {
    std::vector<ClaimResult> claims = {
        {'a', "UNI has the highest error among implemented algorithms in every setup", {}},
        {'b', "setup 1: NSAR p=0.7 and p=0.85 each beat SAR", {}},
        {'c', "setups 2, 3, 6: at least two of p in {1.1,1.2,1.3} beat SAR", {}},
        {'d', "setups 4, 5: at least two of p in {1.1,1.2,1.3} beat SAR", {}},
    };
    std::vector<std::string> non_uni;
    for (const auto& a : grid_algorithms())
        if (a.kind != AlgorithmKind::uni) non_uni.push_back(algorithm_label(a));

    for (const auto& [key, panel] : all) {
        auto tag = [&](PanelVerdict v) {
            v.panel = key;
            return v;
        };
        claims[0].panels.push_back(tag(detail::all_of(panel, "UNI", non_uni, true)));
        if (key.setup_id == 1)
            claims[1].panels.push_back(
                tag(detail::all_of(panel, "SAR", {detail::nsar_label(0.7), detail::nsar_label(0.85)}, false)));
        if (key.setup_id == 2 || key.setup_id == 3 || key.setup_id == 6)
            claims[2].panels.push_back(tag(detail::two_of_three(panel)));
        if (key.setup_id == 4 || key.setup_id == 5) claims[3].panels.push_back(tag(detail::two_of_three(panel)));
    }
    return claims;
}

struct ReplicationOptions {
    std::uint64_t trials = 4000;
    std::uint64_t master_seed = 7;
    unsigned workers = 1;
    std::uint64_t rerun_trials = 20000; // 0 disables escalation
};

struct Replication {
    std::vector<ResultRow> rows;       // base grid
    std::vector<ResultRow> rerun_rows; // escalated panels
    std::vector<ClaimResult> claims;
    ReplicationOptions options;
};

inline Replication replicate(const ReplicationOptions& options, const Progress& progress = {}) {
    Replication out;
    out.options = options;
    out.rows = run_grid(benchmark_grid(options.trials, options.master_seed), options.workers, progress);

    auto all = panels(out.rows);
    auto claims = evaluate_claims(all);

    if (options.rerun_trials > options.trials) {
        std::vector<PanelKey> open;
        for (const auto& claim : claims)
            for (const auto& p : claim.panels)
                if (p.verdict == Verdict::inconclusive && std::find(open.begin(), open.end(), p.panel) == open.end())
                    open.push_back(p.panel);
        std::sort(open.begin(), open.end());
        std::vector<ExperimentConfig> again;
        for (const auto& c : benchmark_grid(options.rerun_trials, options.master_seed))
            if (std::find(open.begin(), open.end(), PanelKey{c.setup_id, c.m}) != open.end()) again.push_back(c);
        out.rerun_rows = run_grid(again, options.workers, progress);
        for (const auto& [key, panel] : panels(out.rerun_rows)) all[key] = panel;
        claims = evaluate_claims(all);
        for (auto& claim : claims)
            for (auto& p : claim.panels)
                if (p.verdict == Verdict::inconclusive) {
                    p.verdict = Verdict::fail;
                    p.detail += "(still overlapping after rerun)";
                }
    }
    out.claims = std::move(claims);
    return out;
}

inline std::string replication_report(const Replication& r) {
    std::ostringstream out;
    out << "Top-M identification benchmark: K=50, M in {2,4}, budget ceil(H1), Bernoulli rewards\n"
        << "trials=" << r.options.trials << " master_seed=" << r.options.master_seed
        << " rerun_trials=" << (r.options.rerun_trials > r.options.trials ? r.options.rerun_trials : 0) << "\n"
        << "AT-LUCB is not implemented; its bars and its comparisons are omitted.\n"
        << "Setups 4/5 use one Beta-drawn instance per (setup, M), shared by all algorithms.\n\n";

    auto table = [&](const std::vector<ResultRow>& rows, const char* title) {
        if (rows.empty()) return;
        out << title << "\n";
        for (const auto& [key, panel] : panels(rows)) {
            const auto& any = panel.begin()->second;
            out << "setup " << key.setup_id << ", M=" << key.m << ", T=" << (any.t ? std::to_string(*any.t) : "varies")
                << ", trials=" << any.trials << "\n";
            for (const auto& a : grid_algorithms()) {
                const auto& e = panel.at(algorithm_label(a));
                out << "  " << std::left << std::setw(14) << algorithm_label(a) << std::right << std::fixed
                    << std::setprecision(4) << " p_hat=" << e.p_hat << "  95% CI [" << e.ci_low << ", " << e.ci_high
                    << "]\n";
            }
        }
        out << "\n";
    };
    table(r.rows, "Misidentification frequency");
    table(r.rerun_rows, "Escalated panels");

    out << "Claims\n";
    for (const auto& claim : r.claims) {
        out << "(" << claim.id << ") " << to_string(claim.verdict()) << "  " << claim.statement << "\n";
        for (const auto& p : claim.panels)
            out << "    setup " << p.panel.setup_id << " M=" << p.panel.m << " [" << p.trials
                << " trials]: " << to_string(p.verdict) << "  " << p.detail << "\n";
    }
    return out.str();
}

} // namespace nsar
