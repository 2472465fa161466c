#pragma once
/*
Seeded Monte Carlo runner for misidentification experiments.

Trial i of a configuration draws its rewards from a stream whose seed is a
fixed function of (master seed, setup, K, M, algorithm, i). Trials share no
mutable state and the result is an integer error count, so any number of
workers and any scheduling produce the same estimate.
*/

#include "nsar/algorithms.hpp"
#include "nsar/bandit.hpp"
#include "nsar/complexity.hpp"
#include "nsar/error.hpp"
#include "nsar/seed.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace nsar {

inline constexpr int max_setup_id = 6;

/// The six benchmark environments (Bernoulli arms). Setups 4 and 5 draw their
/// means from Beta(2,2) and Beta(5,5) using `seed`; the others ignore it.
inline BanditInstance generate_setup(int id, std::size_t k, std::size_t m, std::uint64_t seed = 0) {
    if (id < 1 || id > max_setup_id) throw Error(Errc::bad_setup_id, "setup id must be 1..6, got " + std::to_string(id));
    if (k < 2 || m < 1 || m >= k) throw Error(Errc::bad_dimensions, "need K >= 2 and 1 <= M < K");
    const std::size_t need = id == 2 ? 2 * m : id == 3 ? 3 * m : id == 6 ? m + 1 : m;
    if (need >= k)
        throw Error(Errc::bad_dimensions,
                    "setup " + std::to_string(id) + " needs more than " + std::to_string(need) + " arms");

    std::vector<double> means;
    switch (id) {
    case 4: means = sample_beta_means(k, 2.0, 2.0, seed, m); break;
    case 5: means = sample_beta_means(k, 5.0, 5.0, seed, m); break;
    default: {
        means.assign(k, 0.5);
        std::fill_n(means.begin(), m, 0.7);
        if (id == 2 || id == 3) std::fill_n(means.begin() + static_cast<std::ptrdiff_t>(m), m, 0.66);
        if (id == 3) std::fill_n(means.begin() + static_cast<std::ptrdiff_t>(2 * m), m, 0.62);
        if (id == 6) means[m] = 0.68;
    }
    }
    return make_instance(std::move(means), ArmKind::bernoulli, m);
}

inline bool is_beta_setup(int id) { return id == 4 || id == 5; }

/// ceil(H1) of the instance's true gaps. Gaps of decimal means such as
/// 0.7 - 0.5 carry representation error, so H1 is shaved by a relative 1e-9
/// before rounding up; otherwise an exact 1250 would become 1251.
inline std::uint64_t ceil_h1_budget(const BanditInstance& instance) {
    const double h = h1(gaps(instance));
    if (!(h < 1e18)) throw Error(Errc::budget_too_small, "H1 budget is not representable");
    return static_cast<std::uint64_t>(std::ceil(h * (1.0 - 1e-9)));
}

enum class BetaInstances { fixed, per_trial };

struct Budget {
    bool ceil_h1 = true;
    std::uint64_t t = 0; // explicit budget when !ceil_h1

    static Budget from_h1() { return {true, 0}; }
    static Budget exact(std::uint64_t t) { return {false, t}; }
    bool operator==(const Budget&) const = default;
};

struct ExperimentConfig {
    int setup_id = 1;          // 0 means explicit `means`
    std::vector<double> means; // only for setup_id == 0
    ArmKind kind = ArmKind::bernoulli;
    std::size_t k = 50;
    std::size_t m = 2;
    AlgorithmSpec algorithm = AlgorithmSpec::sar();
    std::uint64_t trials = 4000;
    Budget budget = Budget::from_h1();
    std::uint64_t master_seed = 7;
    BetaInstances beta_instances = BetaInstances::fixed;

    bool operator==(const ExperimentConfig&) const = default;
};

struct ErrorEstimate {
    std::uint64_t errors = 0;
    std::uint64_t trials = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::optional<std::uint64_t> t; // empty when the budget varies per trial
    std::uint64_t digest = 0;
    double wall_ms = 0.0;
};

/// p_hat with a 95% Wilson score interval.
inline ErrorEstimate estimate_error(std::uint64_t errors, std::uint64_t n) {
    if (n < 1 || errors > n)
        throw Error(Errc::bad_counts, "need 0 <= errors <= n and n >= 1 (errors=" + std::to_string(errors) +
                                          ", n=" + std::to_string(n) + ")");
    constexpr double z = 1.96;
    const double nn = static_cast<double>(n);
    const double ph = static_cast<double>(errors) / nn;
    const double denom = 1.0 + z * z / nn;
    const double centre = (ph + z * z / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(ph * (1.0 - ph) / nn + z * z / (4.0 * nn * nn));

    ErrorEstimate e;
    e.errors = errors;
    e.trials = n;
    e.p_hat = ph;
    e.ci_low = errors == 0 ? 0.0 : std::clamp(centre - half, 0.0, ph);
    e.ci_high = errors == n ? 1.0 : std::clamp(centre + half, ph, 1.0);
    return e;
}

/// FNV-1a over the configuration fields that determine the result.
inline std::uint64_t config_digest(const ExperimentConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](std::uint64_t word) {
        for (int i = 0; i < 8; ++i) {
            h ^= (word >> (8 * i)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    feed(static_cast<std::uint64_t>(c.setup_id));
    feed(c.means.size());
    for (double mu : c.means) feed(std::bit_cast<std::uint64_t>(mu));
    feed(static_cast<std::uint64_t>(c.kind));
    feed(c.k);
    feed(c.m);
    feed(static_cast<std::uint64_t>(c.algorithm.kind));
    feed(std::bit_cast<std::uint64_t>(c.algorithm.p));
    feed(c.trials);
    feed(c.budget.ceil_h1 ? 1 : 0);
    feed(c.budget.t);
    feed(c.master_seed);
    feed(static_cast<std::uint64_t>(c.beta_instances));
    return h;
}

namespace detail {

// Seed root for everything an instance depends on; independent of algorithm
// and trial count so that every algorithm faces the same environment.
inline std::uint64_t instance_root(const ExperimentConfig& c) {
    std::uint64_t s = seed::derive(c.master_seed, static_cast<std::uint64_t>(c.setup_id));
    s = seed::derive(s, std::uint64_t{c.k});
    s = seed::derive(s, std::uint64_t{c.m});
    for (double mu : c.means) s = seed::derive(s, mu);
    return seed::derive(s, std::uint64_t{0x1257a7ce});
}

inline std::uint64_t stream_root(const ExperimentConfig& c) {
    std::uint64_t s = seed::derive(instance_root(c), static_cast<std::uint64_t>(c.algorithm.kind));
    return seed::derive(s, c.algorithm.p);
}

} // namespace detail

/// Reward-stream seed of trial i. Injective in i for a fixed configuration.
inline std::uint64_t trial_seed(const ExperimentConfig& c, std::uint64_t i) {
    return seed::derive(detail::stream_root(c), i);
}

/// The instance used by every trial, or by trial i when beta setups are drawn
/// per trial.
inline BanditInstance experiment_instance(const ExperimentConfig& c, std::uint64_t trial = 0) {
    if (c.setup_id == 0) return make_instance(c.means, c.kind, c.m);
    std::uint64_t s = detail::instance_root(c);
    if (is_beta_setup(c.setup_id) && c.beta_instances == BetaInstances::per_trial) s = seed::derive(s, trial);
    return generate_setup(c.setup_id, c.k, c.m, s);
}

inline bool instance_varies(const ExperimentConfig& c) {
    return c.setup_id != 0 && is_beta_setup(c.setup_id) && c.beta_instances == BetaInstances::per_trial;
}

inline std::uint64_t resolve_budget(const ExperimentConfig& c, const BanditInstance& instance) {
    return c.budget.ceil_h1 ? ceil_h1_budget(instance) : c.budget.t;
}

/// True iff trial i misidentifies the top-M set.
inline bool run_trial(const ExperimentConfig& c, const BanditInstance& instance, std::uint64_t t,
                      std::uint64_t i) {
    RewardStream stream(instance, trial_seed(c, i));
    const Recommendation rec = identify(c.algorithm, stream, t, Audit::none);
    return rec.accepted_set() != true_top_m(instance);
}

inline void validate(const ExperimentConfig& c) {
    if (c.trials < 1) throw Error(Errc::bad_config, "trials must be >= 1");
    if (c.setup_id < 0 || c.setup_id > max_setup_id) throw Error(Errc::bad_setup_id, "setup id must be 0..6");
    if (c.setup_id == 0 && c.means.size() != c.k) throw Error(Errc::bad_config, "K does not match the mean vector");
    if (c.algorithm.kind == AlgorithmKind::nsar) check_exponent(c.algorithm.p);
    if (!c.budget.ceil_h1) {
        const bool uni = c.algorithm.kind == AlgorithmKind::uni;
        if (uni ? c.budget.t < c.k : c.budget.t <= c.k)
            throw Error(Errc::budget_too_small, "budget T=" + std::to_string(c.budget.t) + " is too small for K=" +
                                                    std::to_string(c.k));
    }
}

inline ErrorEstimate run_experiment(const ExperimentConfig& c, unsigned workers = 1) {
    validate(c);
    const auto start = std::chrono::steady_clock::now();
    workers = std::max(1U, workers);

    const bool varies = instance_varies(c);
    std::optional<BanditInstance> shared;
    std::optional<std::uint64_t> shared_t;
    if (!varies) {
        shared = experiment_instance(c);
        shared_t = resolve_budget(c, *shared);
    }

    struct Outcome {
        std::uint64_t errors = 0;
        std::uint64_t failed_trial = std::numeric_limits<std::uint64_t>::max();
        std::string message;
    };
    auto work = [&](std::uint64_t first, std::uint64_t stride, Outcome& out) {
        for (std::uint64_t i = first; i < c.trials; i += stride) {
            try {
                if (varies) {
                    const BanditInstance instance = experiment_instance(c, i);
                    out.errors += run_trial(c, instance, resolve_budget(c, instance), i) ? 1 : 0;
                } else {
                    out.errors += run_trial(c, *shared, *shared_t, i) ? 1 : 0;
                }
            } catch (const std::exception& ex) {
                out.failed_trial = i;
                out.message = ex.what();
                return;
            }
        }
    };

    const auto n_workers = static_cast<std::uint64_t>(std::min<std::uint64_t>(workers, c.trials));
    std::vector<Outcome> outcomes(n_workers);
    if (n_workers == 1) {
        work(0, 1, outcomes[0]);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (std::uint64_t w = 0; w < n_workers; ++w)
            pool.emplace_back([&, w] { work(w, n_workers, outcomes[w]); });
    }

    std::uint64_t errors = 0;
    const Outcome* failure = nullptr;
    for (const auto& o : outcomes) {
        errors += o.errors;
        if (o.failed_trial != std::numeric_limits<std::uint64_t>::max() &&
            (failure == nullptr || o.failed_trial < failure->failed_trial))
            failure = &o;
    }
    if (failure != nullptr)
        throw Error(Errc::bad_config, "trial " + std::to_string(failure->failed_trial) + ": " + failure->message);

    ErrorEstimate e = estimate_error(errors, c.trials);
    e.t = shared_t;
    e.digest = config_digest(c);
    e.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return e;
}

struct HoeffdingResult {
    double empirical_freq = 0.0;
    double bound = 0.0; // 2 exp(-2 n eps^2)
    double slack = 0.0; // 3 sqrt(bound / trials)
    bool passed = false;
};

/// Frequency of |mean of n Bernoulli(mu) draws - mu| > eps against the
/// two-sided Hoeffding bound.
inline HoeffdingResult hoeffding_check(double mu, std::uint64_t n, double eps, std::uint64_t trials,
                                       std::uint64_t seed_value) {
    const auto instance = make_instance({mu, mu == 0.0 ? 1.0 : 0.0}, ArmKind::bernoulli, 1);
    std::uint64_t exceed = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        RewardStream stream(instance, seed::derive(seed_value, i));
        const double mean = stream.pull_sum(0, n) / static_cast<double>(n);
        exceed += std::abs(mean - mu) > eps ? 1 : 0;
    }
    HoeffdingResult r;
    r.empirical_freq = trials == 0 ? 0.0 : static_cast<double>(exceed) / static_cast<double>(trials);
    r.bound = 2.0 * std::exp(-2.0 * static_cast<double>(n) * eps * eps);
    r.slack = trials == 0 ? 0.0 : 3.0 * std::sqrt(r.bound / static_cast<double>(trials));
    r.passed = r.empirical_freq <= r.bound + r.slack;
    return r;
}

} // namespace nsar
