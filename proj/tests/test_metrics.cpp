#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "lvseg/metrics.hpp"

using namespace lvseg;

namespace {

BinaryMask square(int size, int x0, int y0, int w, int h) {
  BinaryMask m(size, size);
  for (int y = y0; y < y0 + h; ++y)
    for (int x = x0; x < x0 + w; ++x) m.set(x, y, true);
  return m;
}

// Independent all-pairs oracle over boundary pixels (its own boundary test,
// its own distance loops).
struct Oracle {
  double hausdorff = 0.0;
  double apd = 0.0;
  bool valid = false;
};

Oracle brute_force(const BinaryMask& a, const BinaryMask& b, double sx, double sy) {
  auto boundary = [](const BinaryMask& m) {
    std::vector<std::pair<int, int>> pts;
    for (int y = 0; y < m.height; ++y)
      for (int x = 0; x < m.width; ++x) {
        if (!m.get(x, y)) continue;
        const bool edge = x == 0 || x == m.width - 1 || y == 0 || y == m.height - 1;
        if (edge || !m.get(x - 1, y) || !m.get(x + 1, y) || !m.get(x, y - 1) || !m.get(x, y + 1))
          pts.emplace_back(x, y);
      }
    return pts;
  };
  const auto pa = boundary(a), pb = boundary(b);
  Oracle o;
  if (pa.empty() || pb.empty()) return o;
  o.valid = true;
  double max_ab = 0.0, max_ba = 0.0, sum_ab = 0.0, sum_ba = 0.0;
  for (const auto& [x, y] : pa) {
    double best = 1e300;
    for (const auto& [u, v] : pb)
      best = std::min(best, std::hypot((x - u) * sx, (y - v) * sy));
    max_ab = std::max(max_ab, best);
    sum_ab += best;
  }
  for (const auto& [u, v] : pb) {
    double best = 1e300;
    for (const auto& [x, y] : pa)
      best = std::min(best, std::hypot((x - u) * sx, (y - v) * sy));
    max_ba = std::max(max_ba, best);
    sum_ba += best;
  }
  o.hausdorff = std::max(max_ab, max_ba);
  o.apd = (sum_ab / pa.size() + sum_ba / pb.size()) / 2.0;
  return o;
}

BinaryMask random_blobby(int size, uint32_t seed) {
  std::mt19937 rng(seed);
  BinaryMask m(size, size);
  const int blobs = 1 + static_cast<int>(rng() % 3);
  for (int b = 0; b < blobs; ++b) {
    const int cx = static_cast<int>(rng() % static_cast<uint32_t>(size));
    const int cy = static_cast<int>(rng() % static_cast<uint32_t>(size));
    const int r = 2 + static_cast<int>(rng() % 6);
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x)
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.set(x, y, true);
  }
  return m;
}

}  // namespace

TEST_CASE("dice: identity, disjoint, half overlap") {
  const BinaryMask a = square(30, 5, 5, 10, 10);
  CHECK(dice(a, a) == 1.0);
  const BinaryMask far = square(30, 18, 18, 10, 10);
  CHECK(dice(a, far) == 0.0);
  const BinaryMask half = square(30, 10, 5, 10, 10);  // overlap 5x10
  CHECK(dice(a, half) == doctest::Approx(0.5));
  CHECK_THROWS_AS(dice(a, BinaryMask(10, 10)), std::invalid_argument);
}

TEST_CASE("jaccard: identity, the dice cross-check, disjoint") {
  const BinaryMask a = square(30, 5, 5, 10, 10);
  CHECK(jaccard(a, a) == 1.0);
  const BinaryMask half = square(30, 10, 5, 10, 10);
  const double j = jaccard(a, half);
  CHECK(j == doctest::Approx(1.0 / 3.0));
  CHECK(dice(a, half) == doctest::Approx(2.0 * j / (1.0 + j)));
  CHECK(jaccard(a, square(30, 18, 18, 10, 10)) == 0.0);
}

TEST_CASE("both-empty masks score 1 by convention") {
  const BinaryMask e1(8, 8), e2(8, 8);
  CHECK(dice(e1, e2) == 1.0);
  CHECK(jaccard(e1, e2) == 1.0);
  const MetricsReport r = evaluate_pair(e1, e2, {1, 1});
  CHECK(r.both_empty);
  CHECK_FALSE(r.has_distances);
}

TEST_CASE("extract_contour") {
  BinaryMask one(7, 7);
  one.set(3, 4, true);
  const ContourPointList c1 = extract_contour(one);
  REQUIRE(c1.size() == 1);
  CHECK(c1[0].x == 3);
  CHECK(c1[0].y == 4);

  const BinaryMask sq = square(9, 3, 3, 3, 3);
  CHECK(extract_contour(sq).size() == 8);  // all but the center pixel

  // disk r=10: contour pixel count within +-8 of the direct enumeration
  BinaryMask disk(30, 30);
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 30; ++x)
      if ((x - 15) * (x - 15) + (y - 15) * (y - 15) <= 100) disk.set(x, y, true);
  long long enumerated = 0;
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 30; ++x) {
      if (!disk.get(x, y)) continue;
      const double d = std::hypot(x - 15, y - 15);
      if (d > 9.0) ++enumerated;  // outer shell of the disk
    }
  CHECK(std::llabs(static_cast<long long>(extract_contour(disk).size()) - enumerated) <= 8);

  CHECK(extract_contour(BinaryMask(5, 5)).empty());
}

TEST_CASE("hausdorff: trivial and offset cases") {
  const BinaryMask a = square(20, 4, 4, 1, 1);
  const BinaryMask b = square(20, 7, 4, 1, 1);  // unit squares offset by 3 px
  CHECK(hausdorff(a, a, {1, 1}) == 0.0);
  CHECK(hausdorff(a, b, {1, 1}) == doctest::Approx(3.0));
  CHECK(hausdorff(a, b, {2, 1}) == doctest::Approx(6.0));  // x spacing doubles
  CHECK_THROWS_WITH_AS(hausdorff(a, BinaryMask(20, 20), {1, 1}),
                       doctest::Contains("empty"), std::invalid_argument);
}

TEST_CASE("apd: trivial, translated, bounded by hausdorff") {
  const BinaryMask a = square(24, 5, 5, 6, 6);
  const BinaryMask b = square(24, 7, 5, 6, 6);  // translated by 2 px
  CHECK(apd(a, a, {1, 1}) == 0.0);
  CHECK(apd(a, b, {1, 1}) <= hausdorff(a, b, {1, 1}));
  // congruent contours translated along x by 2: every nearest distance is <= 2
  // and the mean equals 2 only for pure horizontal matching; brute-force oracle:
  const Oracle o = brute_force(a, b, 1, 1);
  CHECK(apd(a, b, {1, 1}) == doctest::Approx(o.apd));
  CHECK(hausdorff(a, b, {1, 1}) == doctest::Approx(o.hausdorff));

  // directed mode is the one-sided mean
  const double directed = apd(a, b, {1, 1}, ApdMode::directed);
  CHECK(directed >= 0.0);
  CHECK(directed <= hausdorff(a, b, {1, 1}));
}

TEST_CASE("apd: pure translation of a bar gives exactly the offset") {
  // horizontal 1-px bars offset by 2 px vertically: all nearest distances are 2
  BinaryMask a(20, 20), b(20, 20);
  for (int x = 3; x < 17; ++x) {
    a.set(x, 8, true);
    b.set(x, 10, true);
  }
  CHECK(apd(a, b, {1, 1}) == doctest::Approx(2.0));
}

TEST_CASE("metrics: symmetry and translation invariance") {
  const BinaryMask a = random_blobby(28, 5);
  const BinaryMask b = random_blobby(28, 6);
  if (!a.empty() && !b.empty()) {
    CHECK(dice(a, b) == dice(b, a));
    CHECK(jaccard(a, b) == jaccard(b, a));
    CHECK(hausdorff(a, b, {1.5, 0.8}) == hausdorff(b, a, {1.5, 0.8}));
    CHECK(apd(a, b, {1.5, 0.8}) == doctest::Approx(apd(b, a, {1.5, 0.8})));

    // translate both masks by the same vector inside a larger canvas
    BinaryMask ta(40, 40), tb(40, 40);
    for (int y = 0; y < 28; ++y)
      for (int x = 0; x < 28; ++x) {
        if (a.get(x, y)) ta.set(x + 7, y + 9, true);
        if (b.get(x, y)) tb.set(x + 7, y + 9, true);
      }
    CHECK(dice(ta, tb) == doctest::Approx(dice(a, b)));
    CHECK(jaccard(ta, tb) == doctest::Approx(jaccard(a, b)));
    CHECK(hausdorff(ta, tb, {1, 1}) == doctest::Approx(hausdorff(a, b, {1, 1})));
    CHECK(apd(ta, tb, {1, 1}) == doctest::Approx(apd(a, b, {1, 1})));
  }
}

TEST_CASE("metrics: brute-force equivalence on random small masks") {
  std::mt19937 seeds(2024);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const BinaryMask a = random_blobby(24 + trial % 9, seeds());
    const BinaryMask b = random_blobby(24 + trial % 9, seeds());
    if (a.empty() || b.empty()) continue;
    const Oracle o = brute_force(a, b, 1.25, 0.9);
    REQUIRE(o.valid);
    CHECK(hausdorff(a, b, {1.25, 0.9}) == o.hausdorff);
    CHECK(apd(a, b, {1.25, 0.9}) == doctest::Approx(o.apd).epsilon(1e-12));
    const double d = dice(a, b), j = jaccard(a, b);
    CHECK(std::fabs(d - 2.0 * j / (1.0 + j)) < 1e-12);
    ++checked;
  }
  CHECK(checked >= 40);
}

TEST_CASE("aggregate") {
  MetricsReport r1;
  r1.dice = 0.9;
  r1.jaccard = 0.8;
  r1.apd = 1.0;
  r1.hausdorff = 2.0;
  const MetricsReport only = aggregate({r1});
  CHECK(only.dice == doctest::Approx(0.9));
  CHECK(only.n_pairs == 1);

  MetricsReport r2 = r1;
  r2.dice = 1.0;
  r2.jaccard = 1.0;
  r2.apd = 0.0;
  r2.hausdorff = 0.0;
  const MetricsReport two = aggregate({r1, r2});
  CHECK(two.dice == doctest::Approx(0.95));
  CHECK(two.jaccard == doctest::Approx(0.9));
  CHECK(two.apd == doctest::Approx(0.5));
  CHECK(two.hausdorff == doctest::Approx(1.0));
  CHECK(two.n_pairs == 2);

  CHECK_THROWS_AS(aggregate({}), std::invalid_argument);
}

TEST_CASE("report invariant: dice = 2J/(1+J) and hausdorff >= apd on real pairs") {
  const BinaryMask a = random_blobby(30, 17);
  const BinaryMask b = random_blobby(30, 18);
  if (!a.empty() && !b.empty()) {
    const MetricsReport r = evaluate_pair(a, b, {1, 1});
    CHECK(std::fabs(r.dice - 2.0 * r.jaccard / (1.0 + r.jaccard)) < 1e-12);
    CHECK(r.hausdorff >= r.apd);
  }
}
