#pragma once
/*
Stochastic bandit instances and reproducible reward streams.

An instance is a vector of K expected rewards in [0,1] together with the
number M of top arms to identify. Arms keep the indices they were given; the
means are not required to be sorted, only the boundary between the M-th and
(M+1)-th largest mean must be strict so that the top-M set is unique.

Every arm owns an independent counter-based stream: the j-th reward of arm a
is a function of (master seed, a, j) alone, so the order in which arms are
pulled never changes what any arm returns.
*/

#include "nsar/error.hpp"
#include "nsar/seed.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace nsar {

enum class ArmKind { bernoulli, point_mass };

/// Arm indices sorted by descending mean, ties by ascending index.
inline std::vector<std::size_t> rank_by_mean(std::span<const double> means) {
    std::vector<std::size_t> order(means.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return means[a] > means[b]; });
    return order;
}

class BanditInstance {
public:
    BanditInstance(std::vector<double> means, std::vector<ArmKind> kinds, std::size_t m)
        : means_(std::move(means)), kinds_(std::move(kinds)), m_(m) {
        const auto k = means_.size();
        if (k < 2 || m_ < 1 || m_ >= k)
            throw Error(Errc::bad_dimensions, "need K >= 2 and 1 <= M < K (K=" + std::to_string(k) +
                                                  ", M=" + std::to_string(m_) + ")");
        if (kinds_.size() != k)
            throw Error(Errc::bad_dimensions, "one distribution tag per arm required");
        for (std::size_t i = 0; i < k; ++i) {
            if (!(means_[i] >= 0.0 && means_[i] <= 1.0))
                throw Error(Errc::mean_out_of_range,
                            "mean of arm " + std::to_string(i) + " is outside [0,1]");
        }
        order_ = rank_by_mean(means_);
        if (!(means_[order_[m_ - 1]] > means_[order_[m_]]))
            throw Error(Errc::ambiguous_top_m, "M-th and (M+1)-th largest means are equal");
    }

    std::size_t k() const noexcept { return means_.size(); }
    std::size_t m() const noexcept { return m_; }
    double mean(std::size_t arm) const { return means_.at(arm); }
    ArmKind kind(std::size_t arm) const { return kinds_.at(arm); }
    std::span<const double> means() const noexcept { return means_; }
    std::span<const ArmKind> kinds() const noexcept { return kinds_; }

    /// Arms by decreasing mean (ties by index); the first M form the top-M set.
    std::span<const std::size_t> ranking() const noexcept { return order_; }

    double mth_mean() const noexcept { return means_[order_[m_ - 1]]; }
    double next_mean() const noexcept { return means_[order_[m_]]; }

    bool operator==(const BanditInstance&) const = default;

private:
    std::vector<double> means_;
    std::vector<ArmKind> kinds_;
    std::size_t m_;
    std::vector<std::size_t> order_;
};

inline BanditInstance make_instance(std::vector<double> means, ArmKind kind, std::size_t m) {
    std::vector<ArmKind> kinds(means.size(), kind);
    return BanditInstance(std::move(means), std::move(kinds), m);
}

/// Top-M arm indices in ascending index order.
inline std::vector<std::size_t> true_top_m(const BanditInstance& instance) {
    auto ranking = instance.ranking();
    std::vector<std::size_t> top(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(instance.m()));
    std::sort(top.begin(), top.end());
    return top;
}

namespace detail {

inline bool boundary_tied(std::span<const double> values, std::size_t m) {
    if (m == 0 || m >= values.size()) return false;
    auto order = rank_by_mean(values);
    return !(values[order[m - 1]] > values[order[m]]);
}

} // namespace detail

/// K means drawn i.i.d. from Beta(alpha, beta). With m > 0 the whole vector is
/// redrawn (from the next derived seed) until the top-m boundary is strict.
inline std::vector<double> sample_beta_means(std::size_t k, double alpha, double beta, std::uint64_t seed,
                                             std::size_t m = 0) {
    if (k < 2) throw Error(Errc::bad_dimensions, "need k >= 2");
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
        throw Error(Errc::bad_shape_params, "beta shape parameters must be positive and finite");

    std::vector<double> values(k);
    for (std::uint64_t attempt = 0;; ++attempt) {
        std::mt19937_64 rng(seed::derive(seed, attempt));
        std::gamma_distribution<double> ga(alpha, 1.0);
        std::gamma_distribution<double> gb(beta, 1.0);
        bool inside = true;
        for (auto& v : values) {
            const double x = ga(rng);
            const double y = gb(rng);
            v = x / (x + y);
            inside = inside && v > 0.0 && v < 1.0;
        }
        if (inside && !detail::boundary_tied(values, m)) return values;
    }
}

struct PullLedger {
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    PullLedger() = default;
    explicit PullLedger(std::size_t k) : counts(k, 0) {}

    void record(std::size_t arm, std::uint64_t n) {
        counts[arm] += n;
        total += n;
    }

    bool operator==(const PullLedger&) const = default;
};

/// Running reward sums and pull counts. Means of unpulled arms are undefined.
class EmpiricalState {
public:
    explicit EmpiricalState(std::size_t k) : sums_(k, 0.0), counts_(k, 0) {}

    void add(std::size_t arm, double reward_sum, std::uint64_t n) {
        sums_[arm] += reward_sum;
        counts_[arm] += n;
    }

    std::optional<double> mean(std::size_t arm) const {
        if (counts_.at(arm) == 0) return std::nullopt;
        return sums_[arm] / static_cast<double>(counts_[arm]);
    }

    double sum(std::size_t arm) const { return sums_.at(arm); }
    std::uint64_t count(std::size_t arm) const { return counts_.at(arm); }
    std::size_t k() const noexcept { return sums_.size(); }

private:
    std::vector<double> sums_;
    std::vector<std::uint64_t> counts_;
};

/// Reward source for one trial. Holds a pointer to the instance, which must
/// outlive the stream. Movable, not meant for concurrent use.
class RewardStream {
public:
    RewardStream(const BanditInstance& instance, std::uint64_t master_seed)
        : instance_(&instance), master_seed_(master_seed), keys_(instance.k()), draws_(instance.k(), 0),
          ledger_(instance.k()) {
        for (std::size_t a = 0; a < keys_.size(); ++a) keys_[a] = seed::derive(master_seed, std::uint64_t{a});
    }

    double pull(std::size_t arm) { return pull_sum(arm, 1); }

    /// Sum of the next n rewards of `arm`; equivalent to n calls of pull().
    double pull_sum(std::size_t arm, std::uint64_t n) {
        check_arm(arm);
        const double mu = instance_->mean(arm);
        const std::uint64_t start = draws_[arm];
        draws_[arm] += n;
        ledger_.record(arm, n);
        if (instance_->kind(arm) == ArmKind::point_mass) {
            double s = 0.0;
            for (std::uint64_t j = 0; j < n; ++j) s += mu;
            return s;
        }
        const std::uint64_t key = keys_[arm];
        std::uint64_t ones = 0;
        for (std::uint64_t j = start; j < start + n; ++j)
            ones += seed::to_unit(seed::mix(key + (j + 1) * seed::golden_gamma)) < mu ? 1 : 0;
        return static_cast<double>(ones);
    }

    const BanditInstance& instance() const noexcept { return *instance_; }
    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t draws(std::size_t arm) const { return draws_.at(arm); }
    const PullLedger& ledger() const noexcept { return ledger_; }

private:
    void check_arm(std::size_t arm) const {
        if (arm >= keys_.size())
            throw Error(Errc::bad_arm_index, "arm " + std::to_string(arm) + " out of range");
    }

    const BanditInstance* instance_;
    std::uint64_t master_seed_;
    std::vector<std::uint64_t> keys_;
    std::vector<std::uint64_t> draws_;
    PullLedger ledger_;
};

} // namespace nsar
