#ifndef LVSEG_PIPELINE_HPP
#define LVSEG_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "lvseg/histogram.hpp"
#include "lvseg/hough.hpp"
#include "lvseg/image.hpp"

namespace lvseg {

struct RoiBox {
  int x = 0, y = 0;  // top-left, px
  int w = 0, h = 0;

  bool contains(int px, int py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }
};

struct PipelineConfig {
  int bins = 256;
  int bandwidth = 10;
  int window_n = 13;
  double r_min_frac = 0.05;
  double r_max_frac = 0.45;
  double min_score_fraction = 0.45;
  double min_area_frac = 0.01;
  double fallback_fraction = 0.4;
  int jobs = 1;
};

enum SliceFlag : unsigned {
  flag_boundary_fallback = 1u << 0,
  flag_no_circle_fallback = 1u << 1,
  flag_empty_result = 1u << 2,
};

/// Per-slice output. All masks are at full source-image dimensions.
struct SliceResult {
  RoiBox roi;
  ThresholdPair thresholds;
  std::optional<Circle> circle;  // in full-image coordinates
  BinaryMask myocardium_mask;    // S_M
  BinaryMask lv_raw_mask;        // S_LV
  BinaryMask localized_mask;     // V_L
  BinaryMask final_mask;
  unsigned flags = 0;

  bool has_flag(SliceFlag f) const { return (flags & f) != 0; }
};

struct CaseResult {
  std::string case_id;
  std::string frame_id;
  std::vector<SliceResult> slices;  // ordered base -> apex
};

/// One spatial slice position: the frame to segment plus (optionally) the
/// frames across the cardiac cycle used by ROI generation.
struct SlicePosition {
  GrayImage target;
  std::vector<GrayImage> cycle_frames;  // empty => single-frame ROI fallback
  std::optional<RoiBox> roi_override;
};

struct CaseInput {
  std::string case_id;
  std::string frame_id;
  std::vector<SlicePosition> slices;
};

/// ROI from temporal variation: per-pixel standard deviation across frames,
/// Otsu-thresholded, largest component centroid; the box is a square of side
/// fallback_fraction * min(image side) centered there. With fewer than two
/// frames (or a flat std map) the box is image-centered. Always succeeds.
RoiBox generate_roi(const std::vector<GrayImage>& frames, double fallback_fraction);

/// S_M: foreground iff t_low < intensity < t_high (strict).
BinaryMask segment_myocardium(const GrayImage& roi_image, const ThresholdPair& t);

/// S_LV: foreground iff intensity < t_low or intensity > t_high (strict).
BinaryMask segment_lv_raw(const GrayImage& roi_image, const ThresholdPair& t);

/// V_L = S_LV intersected with the rasterized circle dilated three times by
/// the 3x3 cross.
BinaryMask localize_lv(const BinaryMask& lv_raw, const Circle& circle);

/// remove_small_blobs -> largest_component -> convex_hull_mask.
BinaryMask postprocess(const BinaryMask& v_l, long long min_area);

SliceResult segment_slice(const GrayImage& image, const RoiBox& roi, const PipelineConfig& config);

CaseResult segment_case(const CaseInput& input, const PipelineConfig& config);

}  // namespace lvseg

#endif
