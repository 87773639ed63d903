#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "zeus/error.hpp"
#include "zeus/mock_backend.hpp"
#include "zeus/uncertainty.hpp"

namespace zeus {
namespace {

using testing::TempDir;

std::vector<std::string> repeat(std::initializer_list<std::pair<const char*, int>> counts) {
    std::vector<std::string> out;
    for (const auto& [a, n] : counts) out.insert(out.end(), static_cast<std::size_t>(n), a);
    return out;
}

TEST(ConfidenceScores, SingleClass) {
    const auto s = confidence_scores(repeat({{"8", 15}}), TaskKind::numeric());
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].answer, "8");
    EXPECT_EQ(s[0].confidence, 1.0);
}

TEST(ConfidenceScores, CountRatio) {
    const auto s = confidence_scores(repeat({{"9", 6}, {"8", 9}}), TaskKind::numeric());
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0].answer, "8");
    EXPECT_DOUBLE_EQ(s[0].confidence, 0.6);
    EXPECT_DOUBLE_EQ(s[1].confidence, 0.4);
}

TEST(ConfidenceScores, AllDistinct) {
    std::vector<std::string> answers;
    for (int i = 0; i < 15; ++i) answers.push_back(std::to_string(i));
    const auto s = confidence_scores(answers, TaskKind::numeric());
    ASSERT_EQ(s.size(), 15u);
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(s[i].answer, std::to_string(i));
        EXPECT_DOUBLE_EQ(s[i].confidence, 1.0 / 15.0);
    }
}

TEST(ConfidenceScores, EqualClassesMerge) {
    const std::vector<std::string> answers{"1234.5", "1234.50", "<unparseable>", "<unparseable>", "7"};
    const auto s = confidence_scores(answers, TaskKind::numeric());
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].answer, "1234.5");
    EXPECT_EQ(s[0].count, 2u);
    EXPECT_EQ(s[1].answer, "<unparseable>");
    EXPECT_EQ(s[1].count, 2u);
}

TEST(ConfidenceScores, EmptyRejected) {
    EXPECT_THROW(confidence_scores(std::vector<std::string>{}, TaskKind::numeric()), ValidationError);
}

TEST(PredictiveEntropy, Examples) {
    const std::vector<AnswerScore> one{{"A", 15, 1.0}};
    EXPECT_EQ(predictive_entropy(one), 0.0);
    const std::vector<AnswerScore> two{{"A", 9, 0.6}, {"B", 6, 0.4}};
    EXPECT_NEAR(predictive_entropy(two), 0.6730116670092564, 1e-12);
    std::vector<AnswerScore> uniform;
    for (int i = 0; i < 15; ++i) uniform.push_back({std::to_string(i), 1, 1.0 / 15.0});
    EXPECT_NEAR(predictive_entropy(uniform), 2.708050201102210, 1e-12);
}

TEST(PredictiveEntropy, RejectsBadDistributions) {
    const std::vector<AnswerScore> short_sum{{"A", 1, 0.5}};
    EXPECT_THROW(predictive_entropy(short_sum), ValidationError);
    const std::vector<AnswerScore> negative{{"A", 1, 1.5}, {"B", 1, -0.5}};
    EXPECT_THROW(predictive_entropy(negative), ValidationError);
}

std::vector<UncertaintyEstimate> with_entropies(std::initializer_list<double> hs) {
    std::vector<UncertaintyEstimate> out;
    int i = 0;
    for (double h : hs) {
        UncertaintyEstimate e;
        e.question_id = "q" + std::to_string(i++);
        e.entropy = h;
        e.pool_size = 15;
        out.push_back(e);
    }
    return out;
}

TEST(DatasetStats, MeanAndPopulationStddev) {
    const auto s = dataset_stats(with_entropies({0.0, 0.5, 1.0, 1.5, 2.0}));
    EXPECT_NEAR(s.mean, 1.0, 1e-12);
    EXPECT_NEAR(s.stddev, 0.70710678118654752, 1e-12);
    EXPECT_EQ(s.count, 5u);
    ASSERT_EQ(s.histogram.counts.size(), 30u);
    ASSERT_EQ(s.histogram.bin_edges.size(), 31u);
    EXPECT_NEAR(s.histogram.bin_edges.back(), std::log(15.0), 1e-12);
    std::size_t total = 0;
    for (auto c : s.histogram.counts) total += c;
    EXPECT_EQ(total, 5u);
}

TEST(DatasetStats, DegeneratePools) {
    const auto s = dataset_stats(with_entropies({0.0, 0.0, 0.0}));
    EXPECT_EQ(s.mean, 0.0);
    EXPECT_EQ(s.stddev, 0.0);
}

TEST(Histogram, UpperValueInLastBin) {
    const std::vector<double> v{0.0, 1.0, 2.0};
    const auto h = make_histogram(v, 2.0, 4);
    EXPECT_EQ(h.counts, (std::vector<std::size_t>{1, 0, 1, 1}));
}

TEST(Estimate, FromPool) {
    AnswerPool pool;
    pool.question_id = "q";
    for (const auto* a : {"8", "8", "9"}) {
        GenerationRecord r;
        r.normalized_answer = a;
        pool.records.push_back(r);
    }
    const auto e = estimate(pool, TaskKind::numeric());
    EXPECT_EQ(e.question_id, "q");
    EXPECT_EQ(e.modal_answer, "8");
    EXPECT_DOUBLE_EQ(e.modal_confidence, 2.0 / 3.0);
    EXPECT_EQ(e.pool_size, 3u);
    EXPECT_EQ(e.n_unique(), 2u);
}

TEST(EstimateAll, ErrorNamesQuestion) {
    std::vector<AnswerPool> pools(1);
    pools[0].question_id = "empty-one";
    try {
        estimate_all(pools, TaskKind::numeric());
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("empty-one"), std::string::npos);
    }
}

TEST(EstimatesFile, RoundTrip) {
    TempDir dir;
    auto es = with_entropies({0.1, 0.6730116670092564, 2.0});
    for (auto& e : es) {
        e.modal_answer = "8";
        e.modal_confidence = 1.0 / 3.0;
    }
    save_estimates(dir / "e.jsonl", es);
    const auto back = load_estimates(dir / "e.jsonl");
    ASSERT_EQ(back.size(), 3u);
    for (std::size_t i = 0; i < es.size(); ++i) {
        EXPECT_EQ(back[i].question_id, es[i].question_id);
        EXPECT_EQ(back[i].entropy, es[i].entropy);
        EXPECT_EQ(back[i].modal_confidence, es[i].modal_confidence);
        EXPECT_EQ(back[i].pool_size, 15u);
    }
}

TEST(StatsFile, RoundTripIsExact) {
    TempDir dir;
    const auto s = dataset_stats(with_entropies({0.1, 0.7, 1.3, 2.2}));
    save_stats(dir / "s.json", s);
    EXPECT_EQ(load_stats(dir / "s.json"), s);
}

TEST(TempPerb, DegenerateIsZeroAndDeterministic) {
    const auto qs = testing::numbered_questions(1);
    MockScenario s;
    s.default_rules.push_back(testing::catch_all_rule({{"8", 1.0}}));
    MockGenerator gen(s, qs);
    EXPECT_EQ(temp_perb_entropy(qs[0], "", 15, 1.0, TaskKind::numeric(), gen), 0.0);

    MockScenario mixed;
    mixed.seed = 3;
    mixed.default_rules.push_back(testing::catch_all_rule({{"8", 0.5}, {"9", 0.5}}));
    MockGenerator a(mixed, qs);
    MockGenerator b(mixed, qs);
    EXPECT_EQ(temp_perb_entropy(qs[0], "", 30, 1.0, TaskKind::numeric(), a),
              temp_perb_entropy(qs[0], "", 30, 1.0, TaskKind::numeric(), b));
}

TEST(TempPerb, SeveralTemperaturesPool) {
    const auto qs = testing::numbered_questions(1);
    MockScenario s;
    MockRule cold = testing::catch_all_rule({{"1", 1.0}});
    cold.temperature = 0.0;
    s.default_rules = {cold, testing::catch_all_rule({{"2", 1.0}})};
    MockGenerator gen(s, qs);
    TempPerbConfig c;
    c.temperatures = {0.0, 1.0};
    c.samples_per_temperature = 5;
    const auto r = temp_perb(qs[0], "", c, TaskKind::numeric(), gen);
    EXPECT_EQ(r.samples, 10u);
    EXPECT_NEAR(r.entropy, std::log(2.0), 1e-12);
}

}  // namespace
}  // namespace zeus
