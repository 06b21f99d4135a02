#ifndef LVSEG_PHANTOM_HPP
#define LVSEG_PHANTOM_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "lvseg/image.hpp"

namespace lvseg {

struct PapillaryBlob {
  double angle = 0.0;          // radians, position around the pool
  double radius_offset = 0.0;  // blob center at pool_radius + offset (negative = inside)
  double blob_radius = 3.0;    // px
};

/// Crescent-shaped bright region attached to the outer wall, mimicking a
/// connected right ventricle at the base of the heart.
struct RvCrescent {
  double angle = 0.0;       // attachment angle, radians
  double thickness = 10.0;  // radial extent, px
  double half_angle = 1.0;  // angular half-width, radians
};

/// Dark wedge hugging the outer wall, mimicking the lung signal void next to
/// the heart. Intensity ramps from near black at the wall up to `top` at the
/// wedge's outer rim, so it anchors the intensity minimum well below the wall
/// (min-max normalization never parks the wall mode at the histogram edge)
/// without adding a narrow histogram mode of its own.
struct DarkWedge {
  double angle = 0.0;       // attachment angle, radians
  double thickness = 12.0;  // radial extent, px
  double half_angle = 1.0;  // angular half-width, radians
  double top = 30.0;        // intensity at the outer rim; near 0 at the wall
};

struct PhantomSpec {
  int image_size = 160;
  double cx = 80.0, cy = 80.0;  // LV center, px
  double pool_radius = 20.0;    // px
  double wall_thickness = 8.0;  // px

  // region intensity means on [0,255]; wall sits below both others
  double background_mean = 115.0;
  double wall_mean = 45.0;
  double pool_mean = 205.0;

  // Deterministic intra-region gradients. The wall stays a narrow mode while
  // pool and background spread over a wide intensity span; zero spreads give
  // flat regions (a noise-free, spread-free phantom has exactly 3 values).
  double background_spread = 0.0;
  double pool_spread = 0.0;

  std::vector<PapillaryBlob> papillary;
  std::optional<RvCrescent> rv;
  std::optional<DarkWedge> dark_wedge;

  double noise_sigma = 0.0;
  uint32_t seed = 0;
};

struct PhantomTruth {
  BinaryMask pool;                      // LV cavity minus papillary blobs
  BinaryMask wall;                      // myocardial annulus
  BinaryMask pool_with_papillary_hull;  // convex hull of pool: the evaluation target
};

struct PhantomSlice {
  GrayImage image;
  PhantomTruth truth;
  PhantomSpec spec;
};

/// Deterministic given spec.seed. Throws when the geometry does not fit the
/// image or the intensity separation invariant is violated.
PhantomSlice generate_phantom(const PhantomSpec& spec);

struct SuiteRanges {
  double pool_radius_min = 12.0, pool_radius_max = 30.0;
  double wall_thickness_min = 5.0, wall_thickness_max = 12.0;
  double noise_sigma_min = 0.0, noise_sigma_max = 10.0;
  int papillary_min = 0, papillary_max = 3;
  double background_spread_min = 45.0, background_spread_max = 60.0;
  double pool_spread_min = 25.0, pool_spread_max = 45.0;
  double center_jitter = 10.0;  // px, uniform in both axes
  // every suite phantom carries a dark wedge at a random angle
  double wedge_half_angle_min = 0.8, wedge_half_angle_max = 1.2;
};

/// n phantoms with parameters drawn uniformly from `ranges`, reproducible
/// from master_seed.
std::vector<PhantomSlice> generate_suite(int n, const PhantomSpec& base, const SuiteRanges& ranges,
                                         uint32_t master_seed);

}  // namespace lvseg

#endif
