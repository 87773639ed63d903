#include <gtest/gtest.h>

#include <memory>
#include <mutex>

#include "test_support.hpp"
#include "zeus/answer.hpp"
#include "zeus/error.hpp"
#include "zeus/eval.hpp"
#include "zeus/mock_backend.hpp"

namespace zeus {
namespace {

using testing::ScriptedGenerator;

TEST(MethodSpec, ParseAndName) {
    EXPECT_EQ(MethodSpec::parse("zero-shot-cot").kind, MethodKind::ZeroShotCoT);
    EXPECT_EQ(MethodSpec::parse("AutoCoT").name(), "AutoCoT");
    const auto z = MethodSpec::parse("ZEUS(very hard)");
    EXPECT_EQ(z.kind, MethodKind::Zeus);
    EXPECT_EQ(z.strategy, Strategy::VeryHard);
    EXPECT_EQ(z.name(), "ZEUS(VeryHard)");
    EXPECT_THROW(MethodSpec::parse("ZEUS(Medium)"), ValidationError);
    EXPECT_THROW(MethodSpec::parse("Oracle"), ValidationError);
    const auto list = MethodSpec::parse_list("ZeroShot, FewShot,ZEUS(Hard)");
    ASSERT_EQ(list.size(), 3u);
    EXPECT_EQ(list[2].name(), "ZEUS(Hard)");
    EXPECT_FALSE(list[0].needs_demos());
    EXPECT_TRUE(list[1].needs_demos());
}

std::vector<Question> test_questions(std::size_t n) { return testing::numbered_questions(n, "t"); }

MockScenario gold_scenario(const std::vector<Question>& qs, std::size_t wrong_every = 0) {
    MockScenario s;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const bool wrong = wrong_every != 0 && i % wrong_every == 0;
        MockQuestion mq;
        mq.rules.push_back(testing::catch_all_rule({{wrong ? "100000" : *qs[i].gold_answer, 1.0}}));
        s.questions[qs[i].id] = mq;
    }
    return s;
}

DemonstrationSet one_demo(const Question& q) {
    DemonstrationSet d;
    d.demos.push_back({q.text, "Adding gives the total.", *q.gold_answer, q.id, 0});
    d.rendered_prefix = render_prefix(d.demos);
    return d;
}

TEST(RunInference, AlwaysGoldScoresOneForEveryMethod) {
    auto qs = test_questions(6);
    MockGenerator gen(gold_scenario(qs), qs);
    const std::span<const Question> test(qs.data() + 1, qs.size() - 1);
    const auto demos = one_demo(qs[0]);
    for (const auto* name : {"ZeroShot", "ZeroShotCoT", "FewShot", "AutoCoT", "ManualCoT", "ZEUS(Hard)"}) {
        const auto m = MethodSpec::parse(name);
        const auto r = run_inference(test, m, &demos, TaskKind::numeric(), gen);
        EXPECT_EQ(r.method, m.name());
        EXPECT_EQ(r.mean_accuracy, 1.0) << name;
        EXPECT_EQ(r.run_accuracies.size(), 3u);
        EXPECT_EQ(r.records.size(), test.size() * 3);
    }
}

TEST(RunInference, HalfCorrect) {
    auto qs = test_questions(10);
    MockGenerator gen(gold_scenario(qs, 2), qs);
    const auto r = run_inference(qs, MethodSpec{MethodKind::ZeroShot}, nullptr, TaskKind::numeric(), gen);
    EXPECT_EQ(r.mean_accuracy, 0.5);
    for (double a : r.run_accuracies) EXPECT_EQ(a, r.mean_accuracy);
}

TEST(RunInference, ZeroShotPromptUsesAnswerCue) {
    std::vector<std::string> prompts;
    std::mutex mu;
    ScriptedGenerator gen([&](const GenerationRequest& r) {
        std::lock_guard lock(mu);
        prompts.push_back(r.prompt);
        return std::vector<std::string>(static_cast<std::size_t>(r.n_samples), " 8.");
    });
    const auto qs = testing::numbered_questions(1);
    run_inference(qs, MethodSpec{MethodKind::ZeroShot}, nullptr, TaskKind::numeric(), gen, {1, 1});
    ASSERT_EQ(prompts.size(), 1u);
    EXPECT_EQ(prompts[0], "Q: " + qs[0].text + "\nA: " + answer_cue(TaskKind::numeric()));
}

TEST(RunInference, Errors) {
    auto qs = test_questions(2);
    MockGenerator gen(gold_scenario(qs), qs);
    try {
        run_inference(qs, MethodSpec{MethodKind::ManualCoT}, nullptr, TaskKind::numeric(), gen);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("ManualCoT needs a manual demo file"), std::string::npos);
    }
    qs[1].gold_answer.reset();
    EXPECT_THROW(run_inference(qs, MethodSpec{MethodKind::ZeroShot}, nullptr, TaskKind::numeric(), gen),
                 ValidationError);
}

TEST(Ranking, ArgminAndTies) {
    auto r = make_ranking({{Strategy::Easy, 0.9, {}}, {Strategy::Hard, 0.4, {}}, {Strategy::Moderate, 0.6, {}}});
    EXPECT_EQ(r.chosen_lu, Strategy::Hard);
    EXPECT_FALSE(r.chosen_ha);
    EXPECT_EQ(r.scores[0].strategy, Strategy::Easy);
    EXPECT_EQ(r.scores[1].strategy, Strategy::Moderate);

    auto tie = make_ranking({{Strategy::VeryHard, 0.3, {}}, {Strategy::VeryEasy, 0.3, {}}});
    EXPECT_EQ(tie.chosen_lu, Strategy::VeryEasy);

    const std::vector<std::pair<Strategy, double>> acc{{Strategy::Easy, 0.5}, {Strategy::Hard, 0.7},
                                                        {Strategy::Moderate, 0.7}};
    attach_accuracies(r, acc);
    ASSERT_TRUE(r.chosen_ha);
    EXPECT_EQ(*r.chosen_ha, Strategy::Moderate);
}

TEST(RankStrategies, LowerEntropyWithBetterDemos) {
    auto f = testing::conditioned_fixture(12, 5);
    f.scenario.questions["q0"].demo_quality = 0.95;
    f.scenario.questions["q1"].demo_quality = 0.05;
    MockGenerator gen(f.scenario, f.questions);
    std::vector<std::pair<Strategy, DemonstrationSet>> sets{{Strategy::Easy, one_demo(f.questions[1])},
                                                            {Strategy::Hard, one_demo(f.questions[0])}};
    const std::span<const Question> unlabeled(f.questions.data() + 2, f.questions.size() - 2);
    const auto r = rank_strategies(unlabeled, sets, {}, TaskKind::numeric(), gen);
    ASSERT_EQ(r.scores.size(), 2u);
    EXPECT_LT(r.scores[1].mean_entropy, r.scores[0].mean_entropy);
    EXPECT_EQ(r.chosen_lu, Strategy::Hard);
}

TEST(LeastSquares, HandExample) {
    const std::vector<double> x{0.2, 0.2, 0.8, 0.8};
    const std::vector<double> y{0, 0, 1, 1};
    const auto fit = least_squares(x, y);
    EXPECT_NEAR(fit.slope, 1.0 / 0.6, 1e-9);
    EXPECT_NEAR(fit.slope, 1.6666666666666667, 1e-9);
}

TEST(LeastSquares, CalibratedAndConstant) {
    const std::vector<double> x{0.0, 0.5, 0.5, 1.0};
    EXPECT_NEAR(least_squares(x, std::vector<double>{0, 0, 1, 1}).slope, 1.0, 1e-9);
    EXPECT_EQ(least_squares(x, std::vector<double>{1, 1, 1, 1}).slope, 0.0);
    const auto flat = least_squares(std::vector<double>{0.3, 0.3}, std::vector<double>{0, 1});
    EXPECT_TRUE(flat.degenerate);
    EXPECT_EQ(flat.intercept, 0.5);
}

TEST(SensitivityFit, BinsAndPoints) {
    std::vector<SensitivityPoint> pts{{"a", 0.2, 0}, {"b", 0.2, 0}, {"c", 0.8, 1}, {"d", 0.8, 1}, {"e", 1.0, 1}};
    const auto fit = sensitivity_fit(pts);
    EXPECT_EQ(fit.points.size(), 5u);
    ASSERT_EQ(fit.bins.size(), 3u);
    EXPECT_EQ(fit.bins[2].lo, 0.9);
    EXPECT_EQ(fit.bins[2].count, 1u);
    EXPECT_GT(fit.binned_fit.slope, 0.0);
    EXPECT_THROW(sensitivity_fit({pts[0]}), ValidationError);
}

TEST(SensitivityPoints, ModalAgainstGold) {
    std::vector<UncertaintyEstimate> es(3);
    es[0] = {"a", {}, 0.0, "8", 1.0, 15};
    es[1] = {"b", {}, 0.5, "9", 0.6, 15};
    es[2] = {"c", {}, 0.5, "1", 0.6, 15};
    std::vector<Question> qs{testing::make_question("a", "x", "8"), testing::make_question("b", "y", "8"),
                             testing::make_question("c", "z")};
    const auto pts = sensitivity_points(es, qs, TaskKind::numeric());
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[0].correct, 1.0);
    EXPECT_EQ(pts[1].correct, 0.0);
}

TEST(FewShotDemos, AnswerSources) {
    DemonstrationSet autocot;
    autocot.strategy = "AutoCoT";
    autocot.demos = {{"Q1?", "R1.", "5", "a", 0}, {"Q2?", "R2.", "6", "b", 1}};
    std::vector<Question> qs{testing::make_question("a", "Q1?", "7"), testing::make_question("b", "Q2?")};
    std::vector<UncertaintyEstimate> es(1);
    es[0] = {"b", {}, 0.1, "9", 0.9, 15};
    const auto fs = make_fewshot_demos(autocot, qs, es);
    EXPECT_EQ(fs.strategy, "FewShot");
    EXPECT_EQ(fs.demos[0].answer, "7");
    EXPECT_EQ(fs.demos[1].answer, "9");
    EXPECT_TRUE(fs.demos[0].rationale.empty());
    EXPECT_EQ(fs.answer_source, "mixed");
    EXPECT_EQ(fs.rendered_prefix, "Q: Q1?\nA: The answer is 7.\n\nQ: Q2?\nA: The answer is 9.\n\n");
}

}  // namespace
}  // namespace zeus
