#ifndef LVSEG_MORPHOLOGY_HPP
#define LVSEG_MORPHOLOGY_HPP

#include "lvseg/image.hpp"

namespace lvseg {

/// Minkowski dilation iterated `iterations` times. Borders clip (outside is
/// background); iterations == 0 copies the input.
BinaryMask dilate(const BinaryMask& m, const StructuringElement& se, int iterations);

/// Pixel-wise AND; throws on dimension mismatch.
BinaryMask intersect(const BinaryMask& a, const BinaryMask& b);

struct ComponentMap {
  std::vector<int> labels;       // 0 = background, components dense from 1
  std::vector<long long> areas;  // areas[k-1] = area of component k
  int width = 0;
  int height = 0;

  int label(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }
  int count() const { return static_cast<int>(areas.size()); }
};

/// Connected-component labeling, connectivity 4 or 8, labels in scan order.
ComponentMap connected_components(const BinaryMask& m, int connectivity);

/// Drops 8-connected components with area < min_area.
BinaryMask remove_small_blobs(const BinaryMask& m, long long min_area);

/// Maximum-area 8-connected component (ties: smallest label); empty in, empty out.
BinaryMask largest_component(const BinaryMask& m);

/// Filled convex hull of all foreground pixel centers (pixel-center-inside
/// rasterization; degenerate hulls rasterize as line segments). Superset of
/// the input; empty in, empty out.
BinaryMask convex_hull_mask(const BinaryMask& m);

}  // namespace lvseg

#endif
