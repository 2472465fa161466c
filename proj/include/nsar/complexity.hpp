#pragma once
/*
Gap profiles, hardness measures and the closed-form quantities that go with
the nonlinear accept/reject schedule.

For an instance with top-M boundary at means mu_(M) > mu_(M+1) (ranked), the
gap of an arm is

  own mean - mu_(M+1)   if the arm is ranked in the top M,
  mu_(M) - own mean     otherwise.

With the gaps sorted ascending as d_1 <= ... <= d_K:

  H1   = sum_i d_i^-2
  H(p) = max_{i >= 2} i^p / d_i^2        (H2 = H(1))
  C_p  = 2^-p + sum_{r=2}^{K} r^-p        (C_1 = logbar K)
  n_r  = ceil((T - K) / (C_p (K - r + 1)^p)),  r = 1 .. K-1

and the misidentification probability of the schedule-driven algorithm is at
most 2 K^2 exp(-(T - K) / (8 C_p H(p))).
*/

#include "nsar/bandit.hpp"
#include "nsar/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nsar {

inline void check_exponent(double p) {
    if (!(p > 0.0 && p <= 2.0)) throw Error(Errc::bad_exponent, "p must lie in (0,2], got " + std::to_string(p));
}

struct GapProfile {
    std::vector<double> delta;        // by arm index
    std::vector<double> delta_sorted; // ascending
    std::size_t m = 0;                // 0 when built from raw gaps without an M

    std::size_t k() const noexcept { return delta.size(); }

    /// Profile from explicit gap values, e.g. for synthetic families.
    static GapProfile from_gaps(std::vector<double> gaps, std::size_t m = 0) {
        if (gaps.size() < 2) throw Error(Errc::bad_dimensions, "need at least two gaps");
        for (double g : gaps)
            if (!(g > 0.0) || !std::isfinite(g)) throw Error(Errc::bad_dimensions, "gaps must be positive and finite");
        GapProfile profile;
        profile.delta_sorted = gaps;
        std::sort(profile.delta_sorted.begin(), profile.delta_sorted.end());
        profile.delta = std::move(gaps);
        profile.m = m;
        return profile;
    }
};

inline GapProfile gaps(const BanditInstance& instance) {
    const double upper = instance.mth_mean();
    const double lower = instance.next_mean();
    auto ranking = instance.ranking();
    std::vector<double> delta(instance.k());
    for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
        const std::size_t arm = ranking[pos];
        delta[arm] = pos < instance.m() ? instance.mean(arm) - lower : upper - instance.mean(arm);
    }
    return GapProfile::from_gaps(std::move(delta), instance.m());
}

inline double c_p(std::size_t k, double p) {
    if (k < 2) throw Error(Errc::bad_dimensions, "need k >= 2");
    if (!(p > 0.0)) throw Error(Errc::bad_exponent, "p must be positive");
    auto term = [p](double r) { return p == 1.0 ? 1.0 / r : std::pow(r, -p); };
    double sum = term(2.0);
    for (std::size_t r = 2; r <= k; ++r) sum += term(static_cast<double>(r));
    return sum;
}

/// 0.5 + sum_{i=2}^{k} 1/i. Same terms in the same order as c_p(k, 1).
inline double logbar(std::size_t k) {
    if (k < 2) throw Error(Errc::bad_dimensions, "need k >= 2");
    double sum = 0.5;
    for (std::size_t i = 2; i <= k; ++i) sum += 1.0 / static_cast<double>(i);
    return sum;
}

struct ComplexityReport {
    double h1 = 0.0;
    double h2 = 0.0;
    double hp = 0.0;
    double p = 1.0;
    double cp = 0.0;
    double logbar_k = 0.0;
};

namespace detail {

// max over sorted positions i = 2..K of i^p / d_i^2. At p == 1 the factor is
// i itself, which makes H(1) and H2 the same computation.
inline double h_nonlinear(std::span<const double> sorted, double p) {
    double best = 0.0;
    for (std::size_t i = 2; i <= sorted.size(); ++i) {
        const double weight = p == 1.0 ? static_cast<double>(i) : std::pow(static_cast<double>(i), p);
        const double d = sorted[i - 1];
        best = std::max(best, weight / (d * d));
    }
    return best;
}

} // namespace detail

inline double h1(const GapProfile& profile) {
    double sum = 0.0;
    for (double d : profile.delta) sum += 1.0 / (d * d);
    return sum;
}

inline double h_p(const GapProfile& profile, double p) {
    check_exponent(p);
    return detail::h_nonlinear(profile.delta_sorted, p);
}

inline ComplexityReport h_measures(const GapProfile& profile, double p) {
    check_exponent(p);
    ComplexityReport report;
    report.h1 = h1(profile);
    report.h2 = detail::h_nonlinear(profile.delta_sorted, 1.0);
    report.hp = detail::h_nonlinear(profile.delta_sorted, p);
    report.p = p;
    report.cp = c_p(profile.k(), p);
    report.logbar_k = logbar(profile.k());
    return report;
}

struct BudgetSchedule {
    std::uint64_t t = 0;
    std::size_t k = 0;
    double p = 1.0;
    double cp = 0.0;
    std::vector<std::uint64_t> n; // n[0] = 0, n[r] for r = 1 .. k-1

    /// Pulls used by a complete run: sum over rounds of |A_r| (n_r - n_{r-1}),
    /// which telescopes to n_{K-1} + sum_r n_r.
    std::uint64_t total_pulls() const {
        std::uint64_t total = 0;
        for (std::size_t r = 1; r < n.size(); ++r) total += (k - r + 1) * (n[r] - n[r - 1]);
        return total;
    }

    bool operator==(const BudgetSchedule&) const = default;
};

inline BudgetSchedule schedule(std::uint64_t t, std::size_t k, double p) {
    if (k < 2) throw Error(Errc::bad_dimensions, "need k >= 2");
    check_exponent(p);
    if (t <= k)
        throw Error(Errc::budget_too_small,
                    "budget T=" + std::to_string(t) + " must exceed K=" + std::to_string(k));
    BudgetSchedule s;
    s.t = t;
    s.k = k;
    s.p = p;
    s.cp = c_p(k, p);
    s.n.assign(k, 0);
    const double spare = static_cast<double>(t - k);
    for (std::size_t r = 1; r < k; ++r) {
        const double share = spare / (s.cp * std::pow(static_cast<double>(k - r + 1), p));
        s.n[r] = static_cast<std::uint64_t>(std::ceil(share));
    }
    return s;
}

/// Raw (unclamped) upper bound on the misidentification probability.
inline double prop1_bound(std::uint64_t t, std::size_t k, double p, const GapProfile& profile) {
    check_exponent(p);
    if (profile.k() != k) throw Error(Errc::bad_dimensions, "profile size does not match k");
    if (t <= k) throw Error(Errc::budget_too_small, "budget must exceed K");
    const double kk = static_cast<double>(k);
    const double exponent = static_cast<double>(t - k) / (8.0 * c_p(k, p) * h_p(profile, p));
    return 2.0 * kk * kk * std::exp(-exponent);
}

struct DecayConstants {
    double alpha = 0.0;
    double beta = 0.0;
};

/// Single-best-arm bounds of the form beta * exp(-T / alpha).
struct SingleArmConstants {
    DecayConstants successive_rejects;
    DecayConstants sequential_halving;
    DecayConstants nonlinear_elimination;
};

inline SingleArmConstants table1_constants(const GapProfile& profile, double p) {
    if (profile.m != 1) throw Error(Errc::not_single_arm, "single-arm constants need an M=1 profile");
    check_exponent(p);
    const double k = static_cast<double>(profile.k());
    const double h2 = detail::h_nonlinear(profile.delta_sorted, 1.0);
    const double hp = detail::h_nonlinear(profile.delta_sorted, p);
    const double lb = logbar(profile.k());
    const double cp = c_p(profile.k(), p);

    SingleArmConstants out;
    out.successive_rejects = {h2 * lb, 0.5 * k * (k - 1.0) * std::exp(k / (h2 * lb))};
    out.sequential_halving = {8.0 * h2 * std::log2(k), 3.0 * std::log2(k)};
    out.nonlinear_elimination = {hp * cp, (k - 1.0) * std::exp(k / (hp * cp))};
    return out;
}

/// Order-level sample-complexity comparators (no hidden constants). Only
/// meaningful relative to each other, never as pull counts.
struct ComplexityScores {
    double sar = 0.0;
    double at_lucb = 0.0;
    double nsar = 0.0;
};

inline ComplexityScores complexity_scores(const GapProfile& profile, double p, double delta) {
    check_exponent(p);
    if (!(delta > 0.0 && delta < 1.0)) throw Error(Errc::bad_dimensions, "confidence delta must lie in (0,1)");
    const auto k = profile.k();
    const double log_k = std::log(static_cast<double>(k) / delta);
    const double h2 = detail::h_nonlinear(profile.delta_sorted, 1.0);
    const double hp = detail::h_nonlinear(profile.delta_sorted, p);
    const double hone = h1(profile);
    return {h2 * logbar(k) * log_k, hone * std::log(hone / delta), hp * c_p(k, p) * log_k};
}

enum class Regime { regime_1, regime_2, unclassified };

inline constexpr std::string_view to_string(Regime r) {
    switch (r) {
    case Regime::regime_1: return "regime-1";
    case Regime::regime_2: return "regime-2";
    case Regime::unclassified: return "unclassified";
    }
    return "unclassified";
}

struct RegimeReport {
    Regime regime = Regime::unclassified;
    std::string recommended_p; // "(0,1)", "(1,2]" or empty
    std::size_t competitive = 0;
    double spread = 1.0; // largest gap over smallest

    std::string label() const {
        if (regime == Regime::unclassified) return "unclassified";
        return std::string(to_string(regime)) + ", recommend p in " + recommended_p;
    }
};

/// Shape classifier for the two families where p != 1 pays off.
/// regime-2: a few competitive arms, i.e. spread >= 4 and between 1 and
///           max(3, K/4) gaps at or below half the largest gap.
/// regime-1: at least 90% of the gaps within 10% of the largest gap.
/// The cutoffs are calibrated, not derived: the asymptotic families only say
/// "few" and "most".
inline RegimeReport regime_classify(const GapProfile& profile) {
    const auto& d = profile.delta_sorted;
    const double k = static_cast<double>(d.size());
    const double smallest = d.front();
    const double largest = d.back();

    RegimeReport report;
    report.spread = largest / smallest;
    report.competitive = static_cast<std::size_t>(
        std::count_if(d.begin(), d.end(), [&](double g) { return g <= 0.5 * largest; }));
    const auto near_top = static_cast<std::size_t>(
        std::count_if(d.begin(), d.end(), [&](double g) { return largest - g <= 0.1 * largest; }));

    if (report.spread >= 4.0 && report.competitive >= 1 &&
        static_cast<double>(report.competitive) <= std::max(3.0, 0.25 * k)) {
        report.regime = Regime::regime_2;
        report.recommended_p = "(1,2]";
    } else if (static_cast<double>(near_top) >= 0.9 * k) {
        report.regime = Regime::regime_1;
        report.recommended_p = "(0,1)";
    }
    return report;
}

} // namespace nsar
