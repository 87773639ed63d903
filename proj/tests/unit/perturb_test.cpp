#include <gtest/gtest.h>

#include <memory>
#include <set>

#include "test_support.hpp"
#include "zeus/cache.hpp"
#include "zeus/error.hpp"
#include "zeus/mock_backend.hpp"
#include "zeus/perturb.hpp"

namespace zeus {
namespace {

using testing::TempDir;

TEST(PerturbationPlan, DefaultPoolIsFifteen) {
    const auto plan = default_plan();
    EXPECT_EQ(plan.pool_size(), 15u);
    EXPECT_EQ(plan.trigger_phrases.size(), 5u);
    EXPECT_EQ(plan.trigger_phrases[0], "");
    EXPECT_EQ(plan.trigger_phrases[1], "Let's think step by step.");
    EXPECT_NO_THROW(plan.validate());
}

TEST(PerturbationPlan, RephraseOnlyPlan) {
    auto plan = default_plan();
    plan.original_samples_per_trigger = 0;
    plan.rephrased_samples_per_trigger = 1;
    plan.rephrase_count = 3;
    EXPECT_EQ(plan.pool_size(), 15u);
}

TEST(PerturbationPlan, Validation) {
    auto plan = default_plan();
    plan.high_temperature = 2.5;
    EXPECT_THROW(plan.validate(), ValidationError);
    plan = default_plan();
    plan.trigger_phrases.clear();
    EXPECT_THROW(plan.validate(), ValidationError);
    plan = default_plan();
    plan.original_samples_per_trigger = -1;
    EXPECT_THROW(plan.validate(), ValidationError);
    plan = default_plan();
    plan.original_samples_per_trigger = 0;
    plan.rephrase_count = 0;
    EXPECT_THROW(plan.validate(), ValidationError);
}

TEST(PerturbationPlan, FingerprintTracksFields) {
    auto a = default_plan();
    auto b = default_plan();
    EXPECT_EQ(a.fingerprint(), b.fingerprint());
    b.low_temperature = 0.1;
    EXPECT_NE(a.fingerprint(), b.fingerprint());
}

TEST(SamplingPrompt, Format) {
    EXPECT_EQ(sampling_prompt("What?", "Let's think step by step."), "Q: What?\nA: Let's think step by step.");
    EXPECT_EQ(sampling_prompt("What?", ""), "Q: What?\nA:");
}

struct MockSetup {
    std::vector<Question> questions = testing::numbered_questions(3);
    std::shared_ptr<MockGenerator> mock;
    std::shared_ptr<CountingGenerator> counting;

    explicit MockSetup(MockScenario s) {
        mock = std::make_shared<MockGenerator>(std::move(s), questions);
        counting = std::make_shared<CountingGenerator>(mock);
    }
};

MockScenario degenerate() {
    MockScenario s;
    s.default_rules.push_back(testing::catch_all_rule({{"8", 1.0}}));
    return s;
}

TEST(RephraseQuestion, OneRequestPerQuestion) {
    MockSetup m(degenerate());
    const auto out = rephrase_question(m.questions[0], default_plan(), *m.counting);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].text, "Rephrased: " + m.questions[0].text);
    EXPECT_FALSE(out[0].empty);
    EXPECT_FALSE(out[0].identical_to_original);
    EXPECT_EQ(m.counting->calls(), 1u);
}

TEST(RephraseQuestion, FlagsUnchangedText) {
    auto s = degenerate();
    s.rephrase_template = "{question}";
    MockSetup m(s);
    EXPECT_TRUE(rephrase_question(m.questions[0], default_plan(), *m.counting)[0].identical_to_original);
}

TEST(CollectPool, DefaultPlanShape) {
    MockSetup m(testing::random_scenario(testing::numbered_questions(3), 9));
    PoolContext ctx{m.counting.get(), nullptr, nullptr, 0};
    const auto pool = collect_pool(m.questions[0], default_plan(), TaskKind::numeric(), ctx);
    ASSERT_EQ(pool.pool_size(), 15u);
    int hot = 0, cold = 0;
    std::set<std::string> rephrased_triggers;
    for (const auto& r : pool.records) {
        if (r.variant.temperature == 1.0) ++hot;
        if (r.variant.temperature == 0.0) ++cold;
        if (r.variant.kind == VariantKind::rephrased) rephrased_triggers.insert(r.variant.trigger);
        EXPECT_EQ(r.question_id, "q0");
    }
    EXPECT_EQ(hot, 10);
    EXPECT_EQ(cold, 5);
    EXPECT_EQ(rephrased_triggers.size(), 5u);
    for (std::size_t i = 1; i < pool.records.size(); ++i) {
        EXPECT_NE(canonical_order(pool.records[i - 1], pool.records[i]), std::weak_ordering::greater);
    }
    ASSERT_EQ(pool.rephrasings.size(), 1u);
}

TEST(CollectPool, DegenerateDistributionGivesIdenticalAnswers) {
    MockSetup m(degenerate());
    PoolContext ctx{m.counting.get(), nullptr, nullptr, 0};
    const auto pool = collect_pool(m.questions[1], default_plan(), TaskKind::numeric(), ctx);
    for (const auto& r : pool.records) EXPECT_EQ(r.normalized_answer, "8");
}

TEST(CollectPool, WarmStoreAndCacheMakeNoCalls) {
    TempDir dir;
    const auto plan = default_plan();
    auto run = [&](std::size_t* calls) {
        MockSetup m(testing::random_scenario(testing::numbered_questions(3), 4));
        auto cache = std::make_shared<ResponseCache>(dir / "cache");
        CachingGenerator gen(m.counting, cache);
        PoolStore store(dir / "cache");
        PoolContext ctx{&gen, nullptr, &store, 0};
        auto pools = collect_pools(m.questions, plan, TaskKind::numeric(), ctx);
        *calls = m.counting->calls();
        return pools;
    };
    std::size_t cold = 0, warm = 0;
    const auto first = run(&cold);
    const auto second = run(&warm);
    EXPECT_GT(cold, 0u);
    EXPECT_EQ(warm, 0u);
    EXPECT_EQ(first, second);
    for (std::size_t i = 0; i < first.size(); ++i) EXPECT_EQ(pool_to_jsonl(first[i]), pool_to_jsonl(second[i]));
}

TEST(CollectPool, ResponseCacheAloneAlsoAvoidsCalls) {
    TempDir dir;
    const auto plan = default_plan();
    std::size_t calls[2];
    for (auto& c : calls) {
        MockSetup m(degenerate());
        CachingGenerator gen(m.counting, std::make_shared<ResponseCache>(dir.path()));
        PoolContext ctx{&gen, nullptr, nullptr, 0};
        collect_pool(m.questions[0], plan, TaskKind::numeric(), ctx);
        c = m.counting->calls();
    }
    EXPECT_GT(calls[0], 0u);
    EXPECT_EQ(calls[1], 0u);
}

TEST(CollectPool, FailedSlotsAreNamed) {
    const auto qs = testing::numbered_questions(1);
    auto gen = std::make_shared<testing::ScriptedGenerator>([](const GenerationRequest& r) -> std::vector<std::string> {
        if (r.prompt.find("logically") != std::string::npos) throw ProtocolError("boom");
        if (r.prompt.starts_with("Rephrase")) return {"Other words"};
        return std::vector<std::string>(static_cast<std::size_t>(r.n_samples), "The answer is 1.");
    });
    PoolContext ctx{gen.get(), nullptr, nullptr, 0};
    try {
        collect_pool(qs[0], default_plan(), TaskKind::numeric(), ctx);
        FAIL() << "expected PoolIncompleteError";
    } catch (const PoolIncompleteError& e) {
        EXPECT_EQ(e.missing_slots().size(), 3u);
        EXPECT_EQ(e.cause(), "boom");
    }
}

TEST(CollectPool, ShortResponseIsAnError) {
    const auto qs = testing::numbered_questions(1);
    auto gen = std::make_shared<testing::ScriptedGenerator>([](const GenerationRequest& r) -> std::vector<std::string> {
        if (r.prompt.starts_with("Rephrase")) return {"Other words"};
        return {"The answer is 1."};
    });
    PoolContext ctx{gen.get(), nullptr, nullptr, 0};
    EXPECT_THROW(collect_pool(qs[0], default_plan(), TaskKind::numeric(), ctx), PoolIncompleteError);
}

}  // namespace
}  // namespace zeus
