#include <gtest/gtest.h>

#include <memory>

#include "test_support.hpp"
#include "zeus/cache.hpp"

namespace zeus {
namespace {

using testing::ScriptedGenerator;
using testing::TempDir;

std::shared_ptr<ScriptedGenerator> echo_generator() {
    return std::make_shared<ScriptedGenerator>([](const GenerationRequest& r) {
        std::vector<std::string> out;
        for (int i = 0; i < r.n_samples; ++i) out.push_back(r.prompt + "#" + std::to_string(i));
        return out;
    });
}

TEST(ResponseCache, KeyCoversEveryField) {
    const auto base = ResponseCache::key("m", "p", 1.0, 0, "", std::nullopt);
    EXPECT_EQ(base.size(), 64u);
    EXPECT_EQ(base, ResponseCache::key("m", "p", 1.0, 0, "", std::nullopt));
    EXPECT_NE(base, ResponseCache::key("m2", "p", 1.0, 0, "", std::nullopt));
    EXPECT_NE(base, ResponseCache::key("m", "p2", 1.0, 0, "", std::nullopt));
    EXPECT_NE(base, ResponseCache::key("m", "p", 0.0, 0, "", std::nullopt));
    EXPECT_NE(base, ResponseCache::key("m", "p", 1.0, 1, "", std::nullopt));
    EXPECT_NE(base, ResponseCache::key("m", "p", 1.0, 0, "t", std::nullopt));
    EXPECT_NE(base, ResponseCache::key("m", "p", 1.0, 0, "", 3));
}

TEST(ResponseCache, GetPut) {
    TempDir dir;
    ResponseCache cache(dir.path());
    const auto k = ResponseCache::key("m", "p", 1.0, 0, "", std::nullopt);
    EXPECT_FALSE(cache.get(k));
    cache.put(k, "text with\nnewline");
    EXPECT_EQ(cache.get(k), "text with\nnewline");
}

TEST(CachingGenerator, RepeatedCallHitsCache) {
    TempDir dir;
    auto inner = echo_generator();
    CachingGenerator gen(inner, std::make_shared<ResponseCache>(dir.path()));
    GenerationRequest req;
    req.prompt = "Q: x\nA:";
    req.n_samples = 3;
    const auto first = gen.generate(req);
    const auto second = gen.generate(req);
    EXPECT_EQ(first, second);
    EXPECT_EQ(inner->calls(), 1u);
    EXPECT_EQ(gen.hits(), 1u);
    EXPECT_EQ(gen.misses(), 1u);

    CachingGenerator fresh(inner, std::make_shared<ResponseCache>(dir.path()));
    EXPECT_EQ(fresh.generate(req), first);
    EXPECT_EQ(inner->calls(), 1u);
}

TEST(CachingGenerator, PartialHitForwardsWholeRequest) {
    TempDir dir;
    auto inner = echo_generator();
    CachingGenerator gen(inner, std::make_shared<ResponseCache>(dir.path()));
    GenerationRequest req;
    req.prompt = "p";
    req.n_samples = 2;
    gen.generate(req);
    req.n_samples = 4;
    const auto out = gen.generate(req);
    EXPECT_EQ(out.size(), 4u);
    EXPECT_EQ(inner->calls(), 2u);
}

AnswerPool sample_pool() {
    AnswerPool pool;
    pool.question_id = "q1";
    pool.rephrasings = {{0, "Alt", false, false}};
    for (int i = 0; i < 2; ++i) {
        GenerationRecord r;
        r.question_id = "q1";
        r.variant = {VariantKind::original, 0, "Let's think step by step.", 1.0, 2};
        r.sample_index = i;
        r.rationale = "Line one.\nThe answer is 8.";
        r.raw_answer = "8";
        r.normalized_answer = "8";
        pool.records.push_back(r);
    }
    GenerationRecord r = pool.records[0];
    r.variant = {VariantKind::rephrased, 0, "", 0.0, 1};
    r.sample_index = 0;
    r.normalized_answer = "<unparseable>";
    pool.records.push_back(r);
    return pool;
}

TEST(PoolStore, JsonlRoundTrip) { EXPECT_EQ(pool_from_jsonl(pool_to_jsonl(sample_pool())), sample_pool()); }

TEST(PoolStore, SaveLoadManifest) {
    TempDir dir;
    PoolStore store(dir.path());
    const auto key = PoolStore::key_for("m", "q1", "plan");
    EXPECT_NE(key, PoolStore::key_for("m", "q1", "plan2"));
    EXPECT_FALSE(store.load(key));
    store.save(key, sample_pool(), "m", "plan");
    EXPECT_EQ(store.load(key), sample_pool());
    const auto manifest = PoolStore(dir.path()).manifest();
    ASSERT_EQ(manifest.size(), 1u);
    EXPECT_EQ(manifest.at(key), "q1");
}

}  // namespace
}  // namespace zeus
