#include "lvseg/hough.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lvseg {

BinaryMask boundary_pixels(const BinaryMask& mask) {
  BinaryMask out(mask.width, mask.height);
  static const int dx[] = {0, 0, -1, 1};
  static const int dy[] = {-1, 1, 0, 0};
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.get(x, y)) continue;
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k], ny = y + dy[k];
        if (!mask.in_bounds(nx, ny) || !mask.get(nx, ny)) {
          out.set(x, y, true);
          break;
        }
      }
    }
  }
  return out;
}

namespace {

struct Offset {
  int dx, dy;
};

// Unit-width ring of integer offsets at radius r.
std::vector<Offset> ring_offsets(int r) {
  std::vector<Offset> offs;
  for (int dy = -r - 1; dy <= r + 1; ++dy) {
    for (int dx = -r - 1; dx <= r + 1; ++dx) {
      const double d = std::hypot(static_cast<double>(dx), static_cast<double>(dy));
      if (d >= r - 0.5 && d < r + 0.5) offs.push_back({dx, dy});
    }
  }
  return offs;
}

}  // namespace

std::vector<Circle> detect_circles(const BinaryMask& mask, int r_min, int r_max,
                                   double min_score_fraction) {
  const int w = mask.width, h = mask.height;
  if (r_min <= 0 || r_min >= r_max || r_max > std::min(w, h) / 2)
    throw std::invalid_argument("detect_circles: invalid radius range");

  const BinaryMask boundary = boundary_pixels(mask);
  std::vector<Offset> pts;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (boundary.get(x, y)) pts.push_back({x, y});
  if (pts.empty()) return {};

  const int nr = r_max - r_min + 1;
  const size_t plane = static_cast<size_t>(w) * h;
  std::vector<int> acc(plane * nr, 0);

  for (int ri = 0; ri < nr; ++ri) {
    const std::vector<Offset> offs = ring_offsets(r_min + ri);
    int* slab = acc.data() + plane * ri;
    for (const Offset& p : pts) {
      for (const Offset& o : offs) {
        const int cx = p.dx - o.dx, cy = p.dy - o.dy;
        if (cx >= 0 && cx < w && cy >= 0 && cy < h) slab[cy * w + cx] += 1;
      }
    }
  }

  auto cell = [&](int ri, int y, int x) -> int { return acc[plane * ri + static_cast<size_t>(y) * w + x]; };

  std::vector<Circle> found;
  for (int ri = 0; ri < nr; ++ri) {
    const int r = r_min + ri;
    const double threshold = min_score_fraction * 2.0 * std::numbers::pi * r;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int v = cell(ri, y, x);
        if (v < threshold || v <= 0) continue;
        // local maximum over the 26-neighborhood; equal-valued plateaus keep
        // the first cell in (r, y, x) scan order
        bool is_max = true;
        for (int dr = -1; dr <= 1 && is_max; ++dr) {
          if (ri + dr < 0 || ri + dr >= nr) continue;
          for (int dy = -1; dy <= 1 && is_max; ++dy) {
            if (y + dy < 0 || y + dy >= h) continue;
            for (int dx = -1; dx <= 1 && is_max; ++dx) {
              if (x + dx < 0 || x + dx >= w) continue;
              if (dr == 0 && dy == 0 && dx == 0) continue;
              const int nv = cell(ri + dr, y + dy, x + dx);
              const bool precedes = dr < 0 || (dr == 0 && (dy < 0 || (dy == 0 && dx < 0)));
              if (precedes ? nv >= v : nv > v) is_max = false;
            }
          }
        }
        if (!is_max) continue;
        // sub-bin center refinement: centroid of the 3x3 neighborhood at r
        double sw = 0.0, sx = 0.0, sy = 0.0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (y + dy < 0 || y + dy >= h || x + dx < 0 || x + dx >= w) continue;
            const double wgt = cell(ri, y + dy, x + dx);
            sw += wgt;
            sx += wgt * (x + dx);
            sy += wgt * (y + dy);
          }
        }
        Circle c;
        c.cx = sw > 0 ? sx / sw : x;
        c.cy = sw > 0 ? sy / sw : y;
        c.r = r;
        c.score = v;
        found.push_back(c);
      }
    }
  }

  std::sort(found.begin(), found.end(), [](const Circle& a, const Circle& b) {
    if (a.r != b.r) return a.r > b.r;
    if (a.score != b.score) return a.score > b.score;
    if (a.cy != b.cy) return a.cy < b.cy;
    return a.cx < b.cx;
  });
  return found;
}

Circle select_largest(const std::vector<Circle>& circles) {
  if (circles.empty()) throw std::runtime_error("select_largest: no circle found");
  const Circle* best = &circles[0];
  for (const Circle& c : circles) {
    if (c.r > best->r ||
        (c.r == best->r && (c.score > best->score ||
                            (c.score == best->score &&
                             (c.cy < best->cy || (c.cy == best->cy && c.cx < best->cx))))))
      best = &c;
  }
  return *best;
}

BinaryMask rasterize_disk(const Circle& c, int width, int height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("rasterize_disk: bad dimensions");
  BinaryMask out(width, height);
  const int x0 = std::max(0, static_cast<int>(std::floor(c.cx - c.r)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(c.cx + c.r)));
  const int y0 = std::max(0, static_cast<int>(std::floor(c.cy - c.r)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(c.cy + c.r)));
  const double r2 = c.r * c.r;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - c.cx, dy = y - c.cy;
      if (dx * dx + dy * dy <= r2) out.set(x, y, true);
    }
  }
  return out;
}

}  // namespace lvseg
