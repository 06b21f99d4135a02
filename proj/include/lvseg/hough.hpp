#ifndef LVSEG_HOUGH_HPP
#define LVSEG_HOUGH_HPP

#include <vector>

#include "lvseg/image.hpp"

namespace lvseg {

struct Circle {
  double cx = 0.0;
  double cy = 0.0;
  double r = 0.0;
  double score = 0.0;
};

/// Classic circular Hough transform on a binary mask. Boundary pixels
/// (foreground with a background 4-neighbor) vote into an integer-binned
/// (cx, cy, r) accumulator; local maxima with score >= min_score_fraction *
/// 2*pi*r are returned sorted by descending radius, then descending score.
/// Centers are refined by the centroid of the 3x3 accumulator neighborhood.
/// Empty mask yields an empty list; an invalid radius range throws.
std::vector<Circle> detect_circles(const BinaryMask& mask, int r_min, int r_max,
                                   double min_score_fraction);

/// Circle with maximum radius; ties by higher score, then lexicographic
/// (cy, cx). Throws "no circle found" on an empty list.
Circle select_largest(const std::vector<Circle>& circles);

/// Filled disk: foreground iff (x-cx)^2 + (y-cy)^2 <= r^2, clipped to bounds.
BinaryMask rasterize_disk(const Circle& c, int width, int height);

/// Foreground pixels with at least one background 4-neighbor (image border
/// counts as background).
BinaryMask boundary_pixels(const BinaryMask& mask);

}  // namespace lvseg

#endif
