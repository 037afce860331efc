#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pcsft/rng.hpp"

namespace pcsft {
namespace {

TEST(NormalStream, SameKeySameSequence) {
  NormalStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int i = 0; i < 100; ++i) {
    const double x = a.next_normal();
    EXPECT_EQ(x, b.next_normal());
    EXPECT_NE(x, c.next_normal());
    EXPECT_NE(x, d.next_normal());
  }
}

TEST(NormalStream, UniformRangeAndNormalMoments) {
  NormalStream rng(1, 0);
  Moments m, m4;
  for (int i = 0; i < 200000; ++i) {
    const double u = rng.next_uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  for (int i = 0; i < 200000; ++i) {
    const double x = rng.next_normal();
    m.add(x);
    m4.add(x * x * x * x);
  }
  EXPECT_NEAR(m.mean, 0.0, 4.0 * m.standard_error());
  EXPECT_NEAR(m.variance(), 1.0, 0.015);
  EXPECT_NEAR(m4.mean, 3.0, 4.0 * m4.standard_error());
}

TEST(Moments, MergeEqualsSequential) {
  NormalStream rng(3, 3);
  std::vector<double> xs(1000);
  rng.fill_normal(xs);
  Moments all, left, right;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    all.add(xs[i]);
    (i < 377 ? left : right).add(xs[i]);
  }
  left.merge(right);
  EXPECT_EQ(left.count, all.count);
  EXPECT_NEAR(left.mean, all.mean, 1e-14);
  EXPECT_NEAR(left.variance(), all.variance(), 1e-12);
  Moments empty;
  empty.merge(all);
  EXPECT_EQ(empty.mean, all.mean);
}

TEST(ChunkedReduction, IndependentOfWorkerCount) {
  const std::size_t count = 5 * kChunkSize + 123;
  auto reduce = [&](unsigned workers) {
    std::vector<Moments> parts(chunk_count(count));
    for_each_chunk(count, workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
      Moments m;
      for (std::size_t i = begin; i < end; ++i) m.add(NormalStream(11, i).next_normal());
      parts[c] = m;
    });
    return pairwise_merge(parts);
  };
  const Moments one = reduce(1);
  EXPECT_EQ(one.count, count);
  for (unsigned w : {2u, 3u, 8u}) {
    const Moments many = reduce(w);
    EXPECT_EQ(many.mean, one.mean) << "workers=" << w;
    EXPECT_EQ(many.m2, one.m2) << "workers=" << w;
  }
}

TEST(Fnv1a, KnownVector) {
  // Reference values of 64-bit FNV-1a.
  EXPECT_EQ(fnv1a("", 0), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a", 1), 0xaf63dc4c8601ec8cULL);
}

}  // namespace
}  // namespace pcsft
