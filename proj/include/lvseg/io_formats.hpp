#ifndef LVSEG_IO_FORMATS_HPP
#define LVSEG_IO_FORMATS_HPP

#include <map>
#include <string>
#include <vector>

#include "lvseg/image.hpp"
#include "lvseg/metrics.hpp"
#include "lvseg/pipeline.hpp"

namespace lvseg {

// ---- raster images ----

/// PGM (P2/P5, 8/16-bit) or PNG (8/16-bit grayscale), chosen by extension.
/// Malformed input throws with a byte-offset diagnostic.
GrayImage load_grayscale(const std::string& path);

/// Binary mask as an 8-bit image (0/255), PGM or PNG by extension.
void write_mask(const BinaryMask& mask, const std::string& path);
BinaryMask load_mask(const std::string& path);

/// 8-bit grayscale dump of an image (values clamped to [0,255]).
void write_grayscale(const GrayImage& image, const std::string& path);

/// RGB PNG of `image` with the contour pixels of `contour_of` drawn in red.
void write_overlay(const GrayImage& image, const BinaryMask& contour_of, const std::string& path);

// ---- NIfTI-1 volumes ----

struct Volume {
  int nx = 0, ny = 0, nz = 0, nt = 1;
  PixelSpacing spacing;                // pixdim[1], pixdim[2] (mm/px)
  bool spacing_from_header = true;     // false: defaulted to 1.0 with a warning
  std::vector<GrayImage> slices;       // index = t * nz + z

  GrayImage& slice(int z, int t = 0) { return slices[static_cast<size_t>(t) * nz + z]; }
  const GrayImage& slice(int z, int t = 0) const {
    return slices[static_cast<size_t>(t) * nz + z];
  }
};

/// Single-file NIfTI-1 (.nii, optionally gzipped). Supports uint8/int16/
/// uint16/float32, 3-D and 4-D layouts; applies scl_slope/scl_inter.
Volume load_volume(const std::string& path);

/// Writes a single-file .nii. datatype: 2=uint8, 4=int16, 512=uint16,
/// 16=float32. Stored values are (v - scl_inter) / scl_slope.
void save_volume(const std::string& path, const Volume& v, int datatype = 16,
                 double scl_slope = 1.0, double scl_inter = 0.0);

// ---- label maps ----

struct LabelMap {
  std::map<int, std::string> classes;  // label value -> class name

  /// ACDC convention: 0 background, 1 RV, 2 myocardium, 3 LV.
  static LabelMap acdc_default();
  /// Label value for a class name; throws if the class is absent.
  int label_for(const std::string& cls) const;
};

/// Mask of pixels whose rounded label equals the class's label value. Sets
/// *unmapped_seen when a label value outside the map occurs. Throws when the
/// class is absent from the map.
BinaryMask extract_class_mask(const GrayImage& labels, const LabelMap& map,
                              const std::string& cls, bool* unmapped_seen = nullptr);

// ---- run configuration ----

struct RunConfig {
  PipelineConfig pipeline;
  ApdMode apd_mode = ApdMode::symmetric;
  LabelMap label_map = LabelMap::acdc_default();
};

/// JSON config with documented keys (bins, bandwidth, window_n, r_min_frac,
/// r_max_frac, min_score_fraction, min_area_frac, fallback_fraction,
/// apd_mode, label_map); unknown keys are rejected.
RunConfig load_config(const std::string& path);
RunConfig parse_config_json(const std::string& json_text);

// ---- reports ----

struct NamedReport {
  std::string name;
  MetricsReport report;
};

/// Per-slice CSV plus an aggregate JSON with the four headline fields.
void write_report(const std::vector<NamedReport>& per_slice, const std::string& csv_path,
                  const std::string& json_path);

}  // namespace lvseg

#endif
