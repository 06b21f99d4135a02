#ifndef LVSEG_METRICS_HPP
#define LVSEG_METRICS_HPP

#include <utility>
#include <vector>

#include "lvseg/image.hpp"

namespace lvseg {

struct PixelSpacing {
  double sx = 1.0;  // mm per pixel, x
  double sy = 1.0;  // mm per pixel, y
};

enum class ApdMode { symmetric, directed };

struct MetricsReport {
  double dice = 0.0;
  double jaccard = 0.0;
  double apd = 0.0;        // mm
  double hausdorff = 0.0;  // mm
  int n_pairs = 1;
  bool both_empty = false;     // both masks empty: overlap scored 1 by convention
  bool has_distances = true;   // false when a contour was empty
};

struct ContourPoint {
  int x, y;
};
using ContourPointList = std::vector<ContourPoint>;

double dice(const BinaryMask& a, const BinaryMask& b);
double jaccard(const BinaryMask& a, const BinaryMask& b);

/// Foreground pixels with a background 4-neighbor, in row-major scan order.
ContourPointList extract_contour(const BinaryMask& m);

/// Symmetric Hausdorff distance between contours, in mm. Throws if either
/// mask is empty.
double hausdorff(const BinaryMask& a, const BinaryMask& b, PixelSpacing spacing);

/// Average contour distance, in mm: symmetric mean of nearest-point
/// distances, or the a->b directed mean in directed mode. Throws if either
/// mask is empty.
double apd(const BinaryMask& a, const BinaryMask& b, PixelSpacing spacing,
           ApdMode mode = ApdMode::symmetric);

/// All four measures for one mask pair. Distance fields are valid only when
/// has_distances is set (both masks non-empty).
MetricsReport evaluate_pair(const BinaryMask& a, const BinaryMask& b, PixelSpacing spacing,
                            ApdMode mode = ApdMode::symmetric);

/// Unweighted mean of each field; distance fields averaged over the reports
/// that carry them. Throws on an empty list.
MetricsReport aggregate(const std::vector<MetricsReport>& reports);

}  // namespace lvseg

#endif
