#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "zeus/error.hpp"
#include "zeus/hashing.hpp"
#include "zeus/providers.hpp"

namespace zeus {
namespace {

TEST(Hashing, Sha256KnownDigest) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Hashing, Fnv1aKnownValue) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Hashing, SplitMixReferenceSequence) {
    SplitMix64 rng(1234567);
    EXPECT_EQ(rng.next(), 6457827717110365317ULL);
    EXPECT_EQ(rng.next(), 3203168211198807973ULL);
}

TEST(HashingEmbedder, IdenticalTextsIdenticalVectors) {
    HashingEmbedder e;
    const auto a = e.embed_one("Natalia sold clips to 48 of her friends.");
    const auto b = e.embed_one("Natalia sold clips to 48 of her friends.");
    EXPECT_EQ(a, b);
    EXPECT_NEAR(cosine_similarity(a, b), 1.0, 1e-12);
}

TEST(HashingEmbedder, MatchesIndependentImplementation) {
    HashingEmbedder e;
    const auto a = e.embed_one("Natalia sold clips to 48 of her friends in April.");
    const auto b = e.embed_one("What is the boiling point of water at sea level?");
    EXPECT_NEAR(cosine_similarity(a, b), 0.27348170645824377, 1e-12);
    EXPECT_LT(cosine_similarity(a, b), 1.0);
    std::size_t nonzero = 0;
    for (double v : a.values) nonzero += v != 0.0;
    EXPECT_EQ(nonzero, 45u);
}

TEST(HashingEmbedder, CaseInsensitiveUnitNorm) {
    HashingEmbedder e(64);
    const auto a = e.embed_one("Hello World");
    EXPECT_EQ(a.dim(), 64u);
    EXPECT_EQ(a, e.embed_one("hello world"));
    double norm = 0.0;
    for (double v : a.values) norm += v * v;
    EXPECT_NEAR(norm, 1.0, 1e-12);
}

TEST(HashingEmbedder, EmptyTextRejected) {
    HashingEmbedder e;
    EXPECT_THROW(e.embed_one(""), ValidationError);
}

TEST(GenerationRequest, Validation) {
    GenerationRequest r;
    r.prompt = "x";
    EXPECT_NO_THROW(r.validate());
    r.n_samples = 0;
    EXPECT_THROW(r.validate(), ValidationError);
    r.n_samples = 1;
    r.max_tokens = 0;
    EXPECT_THROW(r.validate(), ValidationError);
}

TEST(GenerationRequest, FingerprintDependsOnContent) {
    GenerationRequest a;
    a.prompt = "x";
    GenerationRequest b = a;
    EXPECT_EQ(a.fingerprint(), b.fingerprint());
    b.temperature = 1.0;
    EXPECT_NE(a.fingerprint(), b.fingerprint());
}

TEST(ParallelFor, RunsEveryIndexAndRethrowsLowestFailure) {
    std::vector<std::atomic<int>> hits(50);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);

    std::atomic<int> ran{0};
    try {
        parallel_for(20, 3, [&](std::size_t i) {
            ran++;
            if (i == 7 || i == 12) throw std::runtime_error("fail " + std::to_string(i));
        });
        FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "fail 7");
    }
    EXPECT_EQ(ran.load(), 20);
}

}  // namespace
}  // namespace zeus
