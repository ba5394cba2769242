#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "tokeval/error.hpp"
#include "tokeval/histograms.hpp"

namespace tokeval {
namespace {

TokenDataset grid_dataset(std::uint32_t k, GridLayout layout,
                          std::vector<TokenSequence> sequences) {
  TokenDataset ds;
  ds.codebook.size = k;
  ds.seq_len = static_cast<std::uint32_t>(layout.cells());
  ds.layout = layout;
  ds.sequences = std::move(sequences);
  return ds;
}

TEST(Unigram, Examples) {
  TokenDataset ds;
  ds.codebook.size = 4;
  ds.seq_len = 3;
  ds.sequences = {{0, 0, 1}};
  const auto p = unigram(ds).probs();
  EXPECT_EQ(p, (std::vector<double>{2.0 / 3, 1.0 / 3, 0, 0}));
  ds.sequences.push_back(ds.sequences[0]);
  EXPECT_EQ(unigram(ds).probs(), p);
  EXPECT_EQ(unigram(ds).total_count(), 6u);
}

TEST(Unigram, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto ds = oracle::random_dataset(seed, 13, 4, 6, 30);
    const auto want = oracle::unigram(ds);
    const auto got = unigram(ds, 3).probs();
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-15);
  }
}

TEST(Unigram, EmptyDatasetFails) {
  TokenDataset ds;
  ds.codebook.size = 4;
  ds.seq_len = 1;
  EXPECT_THROW(unigram(ds), Error);
}

TEST(Cooccurrence, HandEnumeratedTwoByTwo) {
  // [[a, b], [a, b]] with a = 0, b = 1
  const auto ds = grid_dataset(2, {2, 2}, {{0, 1, 0, 1}});
  const auto dist = cooccurrence(ds, DisplacementSet::right_down()).distribution();
  ASSERT_EQ(dist.size(), 3u);
  EXPECT_EQ(dist[0].u, 0u);
  EXPECT_EQ(dist[0].v, 0u);
  EXPECT_DOUBLE_EQ(dist[0].prob, 0.25);
  EXPECT_EQ(dist[1].u, 0u);
  EXPECT_EQ(dist[1].v, 1u);
  EXPECT_DOUBLE_EQ(dist[1].prob, 0.5);
  EXPECT_EQ(dist[2].u, 1u);
  EXPECT_EQ(dist[2].v, 1u);
  EXPECT_DOUBLE_EQ(dist[2].prob, 0.25);
}

TEST(Cooccurrence, ConstantGrid) {
  const auto ds = grid_dataset(5, {3, 3}, {TokenSequence(9, 4)});
  const auto dist = cooccurrence(ds, DisplacementSet::right_down()).distribution();
  ASSERT_EQ(dist.size(), 1u);
  EXPECT_EQ(dist[0].u, 4u);
  EXPECT_EQ(dist[0].prob, 1.0);
}

TEST(Cooccurrence, MatchesBruteForce) {
  const auto disp = DisplacementSet::parse("right,down,diag,-1:1");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto ds = oracle::random_dataset(100 + seed, 9, 8, 16, 5);
    const auto want = oracle::cooccurrence(ds, disp);
    const auto got = cooccurrence(ds, disp, 2).distribution();
    ASSERT_EQ(got.size(), want.size());
    double sum = 0;
    for (const auto& e : got) {
      EXPECT_NEAR(e.prob, want.at({e.u, e.v}), 1e-12);
      sum += e.prob;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Cooccurrence, RequiresLayoutAndReachableDisplacements) {
  auto ds = oracle::random_dataset(1, 4, 2, 2, 3);
  EXPECT_THROW(cooccurrence(ds, DisplacementSet::parse("3:0")), Error);
  ds.layout.reset();
  EXPECT_THROW(cooccurrence(ds, DisplacementSet::right_down()), Error);
}

TEST(DisplacementSet, Validation) {
  EXPECT_THROW(DisplacementSet(std::vector<Displacement>{}), Error);
  EXPECT_THROW(DisplacementSet({{0, 0}}), Error);
  EXPECT_THROW(DisplacementSet({{1, 0}, {-1, 0}}), Error);
  EXPECT_THROW(DisplacementSet({{1, 0}, {1, 0}}), Error);
  EXPECT_THROW(DisplacementSet::parse("up-ish"), Error);
  EXPECT_EQ(DisplacementSet::parse("right,down"), DisplacementSet::right_down());
}

TEST(Merge, SplitEqualsWhole) {
  const auto ds = oracle::random_dataset(77, 11, 4, 4, 41);
  const auto disp = DisplacementSet::right_down();
  std::vector<TokenDataset> parts(4, ds.empty_like());
  for (std::size_t i = 0; i < ds.size(); ++i) parts[i % 4].sequences.push_back(ds.sequences[i]);

  UnigramHistogram u(ds.codebook);
  SparseCooccurrence c(ds.codebook, disp);
  for (const auto& p : parts) {
    u = merge_unigram(u, unigram(p));
    c = merge_cooc(c, cooccurrence(p, disp));
  }
  EXPECT_EQ(u, unigram(ds));
  EXPECT_EQ(c.distribution().size(), cooccurrence(ds, disp).distribution().size());
  EXPECT_EQ(c, cooccurrence(ds, disp));

  // commutative
  EXPECT_EQ(merge_cooc(cooccurrence(parts[0], disp), cooccurrence(parts[1], disp)),
            merge_cooc(cooccurrence(parts[1], disp), cooccurrence(parts[0], disp)));
  // identity
  EXPECT_EQ(merge_unigram(unigram(ds), UnigramHistogram(ds.codebook)), unigram(ds));
}

TEST(Merge, MismatchedCodebookFails) {
  const auto a = oracle::random_dataset(1, 4, 2, 2, 2);
  const auto b = oracle::random_dataset(1, 5, 2, 2, 2);
  EXPECT_THROW(merge_unigram(unigram(a), unigram(b)), Error);
}

TEST(Statistics, IndependentOfOrderAndThreads) {
  auto ds = oracle::random_dataset(5, 16, 8, 8, 50);
  const auto disp = DisplacementSet::right_down();
  const auto u = unigram(ds, 1);
  const auto c = cooccurrence(ds, disp, 1);
  std::reverse(ds.sequences.begin(), ds.sequences.end());
  EXPECT_EQ(unigram(ds, 4), u);
  EXPECT_EQ(cooccurrence(ds, disp, 3), c);
}

}  // namespace
}  // namespace tokeval
