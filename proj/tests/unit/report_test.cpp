#include <gtest/gtest.h>

#include "test_support.hpp"
#include "zeus/error.hpp"
#include "zeus/report.hpp"

namespace zeus {
namespace {

Report full_report() {
    Report r;
    r.model_id = "mock-llm";
    r.dataset = "gsm8k_like_train";
    r.stats = DatasetStats{1.2100096217548093, 0.53021667302293707, 40, Histogram{{0.0, 1.0, 2.0}, {3, 37}}};
    EvalResult e;
    e.method = "ZEUS(Hard)";
    e.run_accuracies = {0.5, 0.5};
    e.mean_accuracy = 0.5;
    e.records = {{"t0", 0, "8", "8", true}, {"t0", 1, "9", "8", false}};
    r.upsert(e);
    r.set_ranking(StrategyRanking{{{Strategy::Easy, 0.1, 0.25}, {Strategy::Hard, 0.3, std::nullopt}},
                                  Strategy::Easy,
                                  std::nullopt});
    SensitivityFit f;
    f.points = {{"a", 0.2, 0.0}, {"b", 0.8, 1.0}};
    f.fit = {1.6666666666666667, -0.33333333333333331, false};
    f.bins = {{0.2, 0.3, 1, 0.2, 0.0}, {0.8, 0.9, 1, 0.8, 1.0}};
    f.binned_fit = f.fit;
    r.sensitivity = f;
    return r;
}

TEST(Report, JsonRoundTripIsExact) {
    const auto r = full_report();
    EXPECT_EQ(report_from_json(report_to_json(r)), r);
}

TEST(Report, UpsertReplacesByName) {
    auto r = full_report();
    EvalResult e;
    e.method = "ZEUS(Hard)";
    e.mean_accuracy = 1.0;
    r.upsert(e);
    ASSERT_EQ(r.methods.size(), 1u);
    EXPECT_EQ(r.methods[0].mean_accuracy, 1.0);
    e.method = "AutoCoT";
    r.upsert(e);
    EXPECT_EQ(r.methods.size(), 2u);
}

TEST(Report, CsvRows) {
    const auto csv = report_to_csv(full_report());
    EXPECT_TRUE(csv.starts_with("section,name,metric,value\n"));
    EXPECT_NE(csv.find("accuracy,ZEUS(Hard),mean,0.5\n"), std::string::npos) << csv;
    EXPECT_NE(csv.find("stats,gsm8k_like_train,mean,1.2100096217548093\n"), std::string::npos) << csv;
    EXPECT_NE(csv.find("strategy,Easy,mean_entropy,0.10000000000000001\n"), std::string::npos) << csv;
}

TEST(Report, EmitWritesBothFiles) {
    testing::TempDir dir;
    emit_report(full_report(), dir / "out");
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / "report.json"));
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / "report.csv"));
    EXPECT_EQ(load_report(dir / "out" / "report.json"), full_report());
}

TEST(Report, EmptyReportRejected) {
    testing::TempDir dir;
    EXPECT_THROW(emit_report(Report{}, dir.path()), ValidationError);
}

TEST(Report, StatsSurviveFileRoundTrip) {
    testing::TempDir dir;
    auto r = full_report();
    emit_report(r, dir.path());
    const auto back = load_report(dir / "report.json");
    ASSERT_TRUE(back.stats);
    EXPECT_EQ(back.stats->mean, 1.2100096217548093);
    EXPECT_EQ(back.stats->stddev, 0.53021667302293707);
}

}  // namespace
}  // namespace zeus
