#pragma once
/*
Fixed-budget top-M identification: nonlinear sequential accepts and rejects
(NSAR), its linear special case SAR (p = 1), and uniform allocation (UNI).

NSAR runs K-1 rounds over a shrinking active set A_r. In round r every active
arm is topped up to n_r pulls, the active arms are ranked by empirical mean
(sigma_r), and with m_r arms still to accept the empirical gaps are

  mu(sigma(l)) - mu(sigma(m_r+1))   for l <= m_r
  mu(sigma(m_r)) - mu(sigma(l))     for l >  m_r.

The arm with the largest gap is deactivated; it is accepted iff its mean is
strictly above mu(sigma(m_r+1)). The last surviving arm is accepted iff one
acceptance is still outstanding.

Choices the pseudo-code leaves open:
  - sigma breaks equal means by ascending arm index;
  - among equal largest gaps the bottom-ranked arm sigma(|A_r|) wins if it is
    one of them (rejection preferred), otherwise sigma(1);
  - m_r = 0 rejects sigma(|A_r|); m_r = |A_r| accepts sigma(1).
*/

#include "nsar/bandit.hpp"
#include "nsar/complexity.hpp"
#include "nsar/error.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nsar {

enum class Decision { accepted, rejected };

/// How the deactivated arm was chosen.
enum class Rule {
    largest_gap,
    forced_reject, // m_r == 0
    forced_accept, // m_r == |A_r|
};

struct RoundRecord {
    std::size_t round = 0;
    std::vector<std::size_t> active; // A_r in ascending index order
    std::uint64_t n = 0;             // cumulative pulls per active arm
    std::vector<std::size_t> sigma;  // active arms by decreasing empirical mean
    std::vector<double> means;       // aligned with sigma
    std::vector<double> gaps;        // aligned with sigma; empty for forced rules
    std::size_t deactivated = 0;
    std::size_t position = 0; // index of `deactivated` in sigma
    Decision decision = Decision::rejected;
    Rule rule = Rule::largest_gap;
    std::size_t m_before = 0;
    std::size_t m_after = 0;

    bool operator==(const RoundRecord&) const = default;
};

struct Recommendation {
    std::vector<std::size_t> accepted; // acceptance order J_1 .. J_M
    std::vector<RoundRecord> audit;
    PullLedger ledger;
    std::optional<std::size_t> survivor;
    bool survivor_accepted = false;

    std::vector<std::size_t> accepted_set() const {
        auto s = accepted;
        std::sort(s.begin(), s.end());
        return s;
    }

    bool operator==(const Recommendation&) const = default;
};

enum class Audit { full, none };

/// Empirical gaps for means already sorted in decreasing order, 1 <= m < L.
inline std::vector<double> empirical_gaps(std::span<const double> sorted_means, std::size_t m) {
    const auto len = sorted_means.size();
    if (m == 0 || m >= len)
        throw Error(Errc::degenerate_m, "m=" + std::to_string(m) + " has no gap split for " +
                                            std::to_string(len) + " arms");
    std::vector<double> gaps(len);
    const double upper = sorted_means[m - 1];
    const double lower = sorted_means[m];
    for (std::size_t l = 0; l < len; ++l) gaps[l] = l < m ? sorted_means[l] - lower : upper - sorted_means[l];
    return gaps;
}

namespace detail {

inline std::size_t pick_largest_gap(std::span<const double> gaps) {
    const double best = *std::max_element(gaps.begin(), gaps.end());
    if (gaps.back() == best) return gaps.size() - 1;
    return static_cast<std::size_t>(std::find(gaps.begin(), gaps.end(), best) - gaps.begin());
}

} // namespace detail

inline Recommendation nsar_run(RewardStream& stream, std::uint64_t t, double p, Audit audit = Audit::full) {
    const BanditInstance& instance = stream.instance();
    const std::size_t k = instance.k();
    const BudgetSchedule plan = schedule(t, k, p);

    Recommendation rec;
    rec.ledger = PullLedger(k);
    EmpiricalState state(k);

    std::vector<std::size_t> active(k);
    for (std::size_t a = 0; a < k; ++a) active[a] = a;
    std::size_t m = instance.m();

    std::vector<std::size_t> sigma;
    std::vector<double> means;
    std::vector<double> gaps;
    for (std::size_t r = 1; r < k; ++r) {
        const std::uint64_t top_up = plan.n[r] - plan.n[r - 1];
        for (std::size_t a : active) {
            state.add(a, stream.pull_sum(a, top_up), top_up);
            rec.ledger.record(a, top_up);
        }

        sigma = active;
        std::stable_sort(sigma.begin(), sigma.end(),
                         [&](std::size_t a, std::size_t b) { return *state.mean(a) > *state.mean(b); });
        means.resize(sigma.size());
        for (std::size_t l = 0; l < sigma.size(); ++l) means[l] = *state.mean(sigma[l]);

        const std::size_t len = sigma.size();
        std::size_t pos = 0;
        Rule rule = Rule::largest_gap;
        bool accept = false;
        gaps.clear();
        if (m == 0) {
            pos = len - 1;
            rule = Rule::forced_reject;
        } else if (m == len) {
            pos = 0;
            rule = Rule::forced_accept;
            accept = true;
        } else {
            gaps = empirical_gaps(means, m);
            pos = detail::pick_largest_gap(gaps);
            accept = means[pos] > means[m];
        }

        const std::size_t arm = sigma[pos];
        const std::size_t m_before = m;
        if (accept) {
            rec.accepted.push_back(arm);
            --m;
        }
        if (audit == Audit::full) {
            RoundRecord round;
            round.round = r;
            round.active = active;
            round.n = plan.n[r];
            round.sigma = sigma;
            round.means = means;
            round.gaps = gaps;
            round.deactivated = arm;
            round.position = pos;
            round.decision = accept ? Decision::accepted : Decision::rejected;
            round.rule = rule;
            round.m_before = m_before;
            round.m_after = m;
            rec.audit.push_back(std::move(round));
        }
        active.erase(std::find(active.begin(), active.end(), arm));
    }

    rec.survivor = active.front();
    rec.survivor_accepted = m == 1;
    if (rec.survivor_accepted) rec.accepted.push_back(active.front());
    return rec;
}

inline Recommendation sar_run(RewardStream& stream, std::uint64_t t, Audit audit = Audit::full) {
    return nsar_run(stream, t, 1.0, audit);
}

/// floor(T/K) pulls per arm, one extra for the first T mod K arms; returns the
/// M best empirical means (ties by lower index).
inline Recommendation uni_run(RewardStream& stream, std::uint64_t t) {
    const BanditInstance& instance = stream.instance();
    const std::size_t k = instance.k();
    if (t < k) throw Error(Errc::budget_too_small, "uniform allocation needs T >= K");

    Recommendation rec;
    rec.ledger = PullLedger(k);
    std::vector<double> means(k);
    const std::uint64_t base = t / k;
    const std::uint64_t extra = t % k;
    for (std::size_t a = 0; a < k; ++a) {
        const std::uint64_t n = base + (a < extra ? 1 : 0);
        means[a] = stream.pull_sum(a, n) / static_cast<double>(n);
        rec.ledger.record(a, n);
    }
    const auto order = rank_by_mean(means);
    rec.accepted.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(instance.m()));
    return rec;
}

enum class AlgorithmKind { nsar, sar, uni };

struct AlgorithmSpec {
    AlgorithmKind kind = AlgorithmKind::nsar;
    double p = 1.0; // used by NSAR only

    static AlgorithmSpec nsar(double p) { return {AlgorithmKind::nsar, p}; }
    static AlgorithmSpec sar() { return {AlgorithmKind::sar, 1.0}; }
    static AlgorithmSpec uni() { return {AlgorithmKind::uni, 1.0}; }

    std::string name() const {
        switch (kind) {
        case AlgorithmKind::nsar: return "NSAR";
        case AlgorithmKind::sar: return "SAR";
        case AlgorithmKind::uni: return "UNI";
        }
        return "?";
    }

    bool operator==(const AlgorithmSpec&) const = default;
};

/// Common entry point for every fixed-budget identifier.
inline Recommendation identify(const AlgorithmSpec& spec, RewardStream& stream, std::uint64_t t,
                               Audit audit = Audit::full) {
    switch (spec.kind) {
    case AlgorithmKind::nsar: return nsar_run(stream, t, spec.p, audit);
    case AlgorithmKind::sar: return sar_run(stream, t, audit);
    case AlgorithmKind::uni: return uni_run(stream, t);
    }
    throw Error(Errc::bad_config, "unknown algorithm");
}

} // namespace nsar
