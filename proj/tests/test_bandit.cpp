#include "nsar/bandit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace nsar;

namespace {

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected nsar::Error";
    return Errc::io_error;
}

} // namespace

TEST(MakeInstance, MinimalTwoArms) {
    const auto inst = make_instance({0.7, 0.5}, ArmKind::bernoulli, 1);
    EXPECT_EQ(inst.k(), 2u);
    EXPECT_EQ(inst.m(), 1u);
}

TEST(MakeInstance, TieInsideTopBlockIsAllowed) {
    const auto inst = make_instance({0.7, 0.7, 0.5}, ArmKind::bernoulli, 2);
    EXPECT_DOUBLE_EQ(inst.mth_mean() - inst.next_mean(), 0.7 - 0.5);
}

TEST(MakeInstance, KeepsGivenIndices) {
    const auto inst = make_instance({0.2, 0.9, 0.4}, ArmKind::point_mass, 1);
    EXPECT_EQ(inst.mean(0), 0.2);
    EXPECT_EQ(inst.mean(1), 0.9);
    EXPECT_EQ(inst.ranking()[0], 1u);
}

TEST(MakeInstance, Errors) {
    EXPECT_EQ(code_of([] { make_instance({0.7, 0.5, 0.5}, ArmKind::bernoulli, 2); }), Errc::ambiguous_top_m);
    EXPECT_EQ(code_of([] { make_instance({0.7, 1.2}, ArmKind::bernoulli, 1); }), Errc::mean_out_of_range);
    EXPECT_EQ(code_of([] { make_instance({-0.1, 0.5}, ArmKind::bernoulli, 1); }), Errc::mean_out_of_range);
    EXPECT_EQ(code_of([] { make_instance({std::nan(""), 0.5}, ArmKind::bernoulli, 1); }), Errc::mean_out_of_range);
    EXPECT_EQ(code_of([] { make_instance({0.7, 0.5}, ArmKind::bernoulli, 2); }), Errc::bad_dimensions);
    EXPECT_EQ(code_of([] { make_instance({0.7, 0.5}, ArmKind::bernoulli, 0); }), Errc::bad_dimensions);
    EXPECT_EQ(code_of([] { make_instance({0.7}, ArmKind::bernoulli, 1); }), Errc::bad_dimensions);
}

TEST(TrueTopM, Examples) {
    std::vector<double> setup1(50, 0.5);
    setup1[0] = setup1[1] = 0.7;
    EXPECT_EQ(true_top_m(make_instance(setup1, ArmKind::bernoulli, 2)), (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(true_top_m(make_instance({0.5, 0.7}, ArmKind::bernoulli, 1)), (std::vector<std::size_t>{1}));

    std::vector<double> setup6(50, 0.5);
    setup6[0] = 0.7;
    setup6[1] = 0.68;
    EXPECT_EQ(true_top_m(make_instance(setup6, ArmKind::bernoulli, 1)), (std::vector<std::size_t>{0}));
}

TEST(TrueTopM, TiesBelowBoundaryDoNotMatter) {
    const auto inst = make_instance({0.3, 0.3, 0.9, 0.3, 0.8}, ArmKind::bernoulli, 2);
    EXPECT_EQ(true_top_m(inst), (std::vector<std::size_t>{2, 4}));
}

TEST(SampleBetaMeans, DeterministicAndInsideUnitInterval) {
    const auto a = sample_beta_means(50, 2.0, 2.0, 99);
    const auto b = sample_beta_means(50, 2.0, 2.0, 99);
    EXPECT_EQ(a, b);
    ASSERT_EQ(a.size(), 50u);
    for (double v : a) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
    EXPECT_NE(a, sample_beta_means(50, 2.0, 2.0, 100));
}

TEST(SampleBetaMeans, MomentsMatchShape) {
    // Beta(a,a) has mean 1/2 and variance 1/(4(2a+1)): 0.05 for a=2, 1/44 for a=5.
    double sum = 0.0, sq22 = 0.0, sq55 = 0.0;
    const int seeds = 400;
    for (int s = 0; s < seeds; ++s) {
        for (double v : sample_beta_means(50, 2.0, 2.0, s)) {
            sum += v;
            sq22 += (v - 0.5) * (v - 0.5);
        }
        for (double v : sample_beta_means(50, 5.0, 5.0, s)) sq55 += (v - 0.5) * (v - 0.5);
    }
    const double n = 50.0 * seeds;
    EXPECT_NEAR(sum / n, 0.5, 0.005);
    EXPECT_NEAR(sq22 / n, 0.05, 0.003);
    EXPECT_NEAR(sq55 / n, 1.0 / 44.0, 0.0015);
    EXPECT_LT(sq55, sq22);
}

TEST(SampleBetaMeans, RedrawGuaranteesStrictBoundary) {
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto v = sample_beta_means(50, 2.0, 2.0, s, 4);
        EXPECT_NO_THROW(make_instance(v, ArmKind::bernoulli, 4));
    }
    EXPECT_TRUE(detail::boundary_tied(std::vector<double>{0.9, 0.4, 0.4}, 2));
    EXPECT_FALSE(detail::boundary_tied(std::vector<double>{0.9, 0.4, 0.4}, 1));
}

TEST(SampleBetaMeans, BadShape) {
    EXPECT_EQ(code_of([] { sample_beta_means(10, 0.0, 2.0, 1); }), Errc::bad_shape_params);
    EXPECT_EQ(code_of([] { sample_beta_means(10, 2.0, -1.0, 1); }), Errc::bad_shape_params);
}

TEST(Pull, DegenerateArms) {
    const auto inst = BanditInstance({0.9, 1.0, 0.0}, {ArmKind::point_mass, ArmKind::bernoulli, ArmKind::bernoulli}, 1);
    RewardStream stream(inst, 5);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(stream.pull(0), 0.9);
        EXPECT_EQ(stream.pull(1), 1.0);
        EXPECT_EQ(stream.pull(2), 0.0);
    }
}

TEST(Pull, BernoulliLawOfLargeNumbers) {
    for (double mu : {0.5, 0.1, 0.7}) {
        const auto inst = make_instance({mu, mu == 0.7 ? 0.2 : 0.9}, ArmKind::bernoulli, 1);
        RewardStream stream(inst, 2024);
        const std::uint64_t n = 100000;
        double sum = 0.0;
        for (std::uint64_t i = 0; i < n; ++i) {
            const double r = stream.pull(0);
            ASSERT_TRUE(r == 0.0 || r == 1.0);
            sum += r;
        }
        const double mean = sum / static_cast<double>(n);
        EXPECT_LE(std::abs(mean - mu), 5.0 * std::sqrt(mu * (1.0 - mu) / static_cast<double>(n)));
        if (mu == 0.5) {
            EXPECT_NEAR(mean, 0.5, 0.01);
        }
    }
}

TEST(Pull, BadArmIndex) {
    const auto inst = make_instance({0.7, 0.5}, ArmKind::bernoulli, 1);
    RewardStream stream(inst, 1);
    EXPECT_EQ(code_of([&] { stream.pull(2); }), Errc::bad_arm_index);
    EXPECT_EQ(stream.ledger().total, 0u);
}

// Property: per-arm sequences do not depend on how pulls are interleaved.
TEST(RewardStream, InterleavingInvariance) {
    std::mt19937_64 gen(31);
    for (int round = 0; round < 50; ++round) {
        std::uniform_int_distribution<std::size_t> kdist(2, 8);
        const std::size_t k = kdist(gen);
        std::vector<double> means(k);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto& m : means) m = u(gen);
        means[0] = 0.999;
        means[1] = 0.001;
        const auto inst = make_instance(means, ArmKind::bernoulli, 1);
        const std::uint64_t seed = gen();

        std::vector<std::vector<double>> sequential(k);
        RewardStream a(inst, seed);
        for (std::size_t arm = 0; arm < k; ++arm)
            for (int j = 0; j < 40; ++j) sequential[arm].push_back(a.pull(arm));

        std::vector<std::vector<double>> shuffled(k);
        RewardStream b(inst, seed);
        std::vector<std::size_t> order;
        for (std::size_t arm = 0; arm < k; ++arm) order.insert(order.end(), 40, arm);
        std::shuffle(order.begin(), order.end(), gen);
        for (std::size_t arm : order) shuffled[arm].push_back(b.pull(arm));

        EXPECT_EQ(sequential, shuffled);
        EXPECT_EQ(a.ledger(), b.ledger());
    }
}

TEST(RewardStream, PullSumMatchesSinglePulls) {
    const auto inst = make_instance({0.3, 0.6, 0.55}, ArmKind::bernoulli, 1);
    RewardStream a(inst, 77), b(inst, 77);
    double singles = 0.0;
    for (int i = 0; i < 123; ++i) singles += a.pull(1);
    EXPECT_EQ(b.pull_sum(1, 100) + b.pull_sum(1, 23), singles);
    EXPECT_EQ(a.draws(1), 123u);
    EXPECT_EQ(b.draws(1), 123u);
}

TEST(PullLedger, TotalIsConserved) {
    const auto inst = make_instance({0.3, 0.6, 0.55, 0.1}, ArmKind::bernoulli, 2);
    RewardStream stream(inst, 3);
    std::mt19937_64 gen(8);
    std::uint64_t n = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto arm = gen() % 4;
        const auto count = gen() % 5;
        stream.pull_sum(arm, count);
        n += count;
        const auto& ledger = stream.ledger();
        ASSERT_EQ(ledger.total, n);
        ASSERT_EQ(std::accumulate(ledger.counts.begin(), ledger.counts.end(), std::uint64_t{0}), n);
    }
}

TEST(EmpiricalState, UndefinedMeanWithoutPulls) {
    EmpiricalState state(3);
    EXPECT_FALSE(state.mean(0).has_value());
    state.add(0, 3.0, 4);
    ASSERT_TRUE(state.mean(0).has_value());
    EXPECT_DOUBLE_EQ(*state.mean(0), 0.75);
    EXPECT_FALSE(state.mean(1).has_value());
}
