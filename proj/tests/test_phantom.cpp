#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "helpers.hpp"
#include "lvseg/morphology.hpp"
#include "lvseg/phantom.hpp"

using namespace lvseg;

namespace {

PhantomSpec clean_spec() {
  PhantomSpec s;
  s.image_size = 120;
  s.cx = 60.0;
  s.cy = 60.0;
  s.pool_radius = 18.0;
  s.wall_thickness = 7.0;
  return s;
}

}  // namespace

TEST_CASE("noise-free flat phantom has exactly three intensity values") {
  const PhantomSlice p = generate_phantom(clean_spec());
  std::set<float> values(p.image.pixels.begin(), p.image.pixels.end());
  REQUIRE(values.size() == 3);
  auto it = values.begin();
  CHECK(*it++ == doctest::Approx(45.0));   // wall (darkest)
  CHECK(*it++ == doctest::Approx(115.0));  // background
  CHECK(*it == doctest::Approx(205.0));    // pool (brightest)
}

TEST_CASE("truth masks partition correctly") {
  PhantomSpec s = clean_spec();
  const PhantomSlice p = generate_phantom(s);

  // pool and wall are disjoint; pool sits inside the wall's hole
  for (size_t i = 0; i < p.truth.pool.bits.size(); ++i)
    CHECK_FALSE((p.truth.pool.bits[i] && p.truth.wall.bits[i]));

  // areas close to the analytic values
  const double pool_expect = std::numbers::pi * s.pool_radius * s.pool_radius;
  const double outer = s.pool_radius + s.wall_thickness;
  const double wall_expect = std::numbers::pi * (outer * outer - s.pool_radius * s.pool_radius);
  CHECK(std::fabs(p.truth.pool.area() - pool_expect) <= 0.05 * pool_expect + 10);
  CHECK(std::fabs(p.truth.wall.area() - wall_expect) <= 0.05 * wall_expect + 10);

  // every pool pixel matches pool intensity, every wall pixel wall intensity
  for (int y = 0; y < s.image_size; ++y)
    for (int x = 0; x < s.image_size; ++x) {
      if (p.truth.pool.get(x, y)) CHECK(p.image.at(x, y) == doctest::Approx(205.0));
      if (p.truth.wall.get(x, y)) CHECK(p.image.at(x, y) == doctest::Approx(45.0));
    }

  // without papillary blobs the hull target equals the hull of the pool
  CHECK(p.truth.pool_with_papillary_hull == convex_hull_mask(p.truth.pool));
  CHECK(testutil::subset_of(p.truth.pool, p.truth.pool_with_papillary_hull));
}

TEST_CASE("papillary blobs carve the pool but not its hull target") {
  PhantomSpec s = clean_spec();
  const PhantomSlice before = generate_phantom(s);
  s.papillary.push_back({0.8, -s.pool_radius * 0.55, 3.0});
  const PhantomSlice after = generate_phantom(s);

  CHECK(after.truth.pool.area() < before.truth.pool.area());
  // blob pixels take the wall intensity
  std::set<float> values(after.image.pixels.begin(), after.image.pixels.end());
  CHECK(values.size() == 3);
  // hull target stays (nearly) the full cavity: blob is interior, hull closes it
  CHECK(after.truth.pool_with_papillary_hull.area() >=
        static_cast<long long>(0.95 * static_cast<double>(before.truth.pool.area())));
  CHECK(testutil::subset_of(after.truth.pool, after.truth.pool_with_papillary_hull));
}

TEST_CASE("rv crescent adds bright pixels outside the wall") {
  PhantomSpec s = clean_spec();
  s.rv = RvCrescent{std::numbers::pi, 9.0, 0.9};
  const PhantomSlice p = generate_phantom(s);
  // crescent takes the pool intensity and sits outside the outer wall radius
  const double outer = s.pool_radius + s.wall_thickness;
  long long bright_outside = 0;
  for (int y = 0; y < s.image_size; ++y)
    for (int x = 0; x < s.image_size; ++x) {
      const double d = std::hypot(x - s.cx, y - s.cy);
      if (d > outer + 0.5 && p.image.at(x, y) == doctest::Approx(205.0)) ++bright_outside;
    }
  CHECK(bright_outside > 50);
  // truth pool is unchanged by the crescent
  const PhantomSlice base = generate_phantom(clean_spec());
  CHECK(p.truth.pool == base.truth.pool);
}

TEST_CASE("intensity spreads widen pool/background while the wall stays narrow") {
  PhantomSpec s = clean_spec();
  s.background_spread = 50.0;
  s.pool_spread = 40.0;
  const PhantomSlice p = generate_phantom(s);

  float wall_min = 1e9f, wall_max = -1e9f;
  float pool_min = 1e9f, pool_max = -1e9f;
  for (int y = 0; y < s.image_size; ++y)
    for (int x = 0; x < s.image_size; ++x) {
      const float v = p.image.at(x, y);
      if (p.truth.wall.get(x, y)) {
        wall_min = std::min(wall_min, v);
        wall_max = std::max(wall_max, v);
      } else if (p.truth.pool.get(x, y)) {
        pool_min = std::min(pool_min, v);
        pool_max = std::max(pool_max, v);
      }
    }
  CHECK(wall_max - wall_min <= 1e-4f);           // wall is still one value
  CHECK(pool_max - pool_min >= 0.5f * 40.0f);    // pool covers a real span
  CHECK(pool_min > wall_max + 20.0f);            // regions stay separated
}

TEST_CASE("noise is deterministic per seed and bounded in effect") {
  PhantomSpec s = clean_spec();
  s.noise_sigma = 6.0;
  s.seed = 99;
  const PhantomSlice a = generate_phantom(s);
  const PhantomSlice b = generate_phantom(s);
  CHECK(a.image.pixels == b.image.pixels);  // bitwise reproducible

  s.seed = 100;
  const PhantomSlice c = generate_phantom(s);
  CHECK(a.image.pixels != c.image.pixels);

  // sample mean over the wall stays near the wall mean
  double sum = 0.0;
  long long n = 0;
  for (int y = 0; y < s.image_size; ++y)
    for (int x = 0; x < s.image_size; ++x)
      if (a.truth.wall.get(x, y)) {
        sum += a.image.at(x, y);
        ++n;
      }
  CHECK(std::fabs(sum / static_cast<double>(n) - 45.0) < 2.0);
}

TEST_CASE("invalid geometry or separation throws") {
  PhantomSpec s = clean_spec();
  s.pool_radius = 70.0;  // outer radius exceeds the image
  CHECK_THROWS_AS(generate_phantom(s), std::invalid_argument);

  s = clean_spec();
  s.noise_sigma = 25.0;  // 4 sigma swallows the wall/background gap
  CHECK_THROWS_AS(generate_phantom(s), std::invalid_argument);

  s = clean_spec();
  s.pool_radius = 0.0;
  CHECK_THROWS_AS(generate_phantom(s), std::invalid_argument);
}

TEST_CASE("suite: count, reproducibility, parameter ranges") {
  const PhantomSpec base = clean_spec();
  const SuiteRanges ranges;
  const auto suite = generate_suite(12, base, ranges, 4242);
  REQUIRE(suite.size() == 12);
  const auto again = generate_suite(12, base, ranges, 4242);
  for (int i = 0; i < 12; ++i) {
    CHECK(suite[static_cast<size_t>(i)].image.pixels ==
          again[static_cast<size_t>(i)].image.pixels);
    const PhantomSpec& sp = suite[static_cast<size_t>(i)].spec;
    CHECK(sp.pool_radius >= ranges.pool_radius_min);
    CHECK(sp.pool_radius <= ranges.pool_radius_max);
    CHECK(sp.wall_thickness >= ranges.wall_thickness_min);
    CHECK(sp.wall_thickness <= ranges.wall_thickness_max);
    CHECK(std::fabs(sp.cx - base.cx) <= ranges.center_jitter);
    CHECK(std::fabs(sp.cy - base.cy) <= ranges.center_jitter);
    CHECK(static_cast<int>(sp.papillary.size()) <= ranges.papillary_max);
  }

  // different master seed gives a different suite
  const auto other = generate_suite(12, base, ranges, 4243);
  bool any_diff = false;
  for (int i = 0; i < 12; ++i)
    if (suite[static_cast<size_t>(i)].image.pixels != other[static_cast<size_t>(i)].image.pixels)
      any_diff = true;
  CHECK(any_diff);
}
