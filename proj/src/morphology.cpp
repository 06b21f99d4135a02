#include "lvseg/morphology.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace lvseg {

BinaryMask dilate(const BinaryMask& m, const StructuringElement& se, int iterations) {
  if (iterations < 0) throw std::invalid_argument("dilate: negative iterations");
  BinaryMask cur = m;
  for (int it = 0; it < iterations; ++it) {
    BinaryMask next(cur.width, cur.height);
    for (int y = 0; y < cur.height; ++y) {
      for (int x = 0; x < cur.width; ++x) {
        if (!cur.get(x, y)) continue;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (!se.get(dx, dy)) continue;
            const int nx = x + dx, ny = y + dy;
            if (next.in_bounds(nx, ny)) next.set(nx, ny, true);
          }
        }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

BinaryMask intersect(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_size(b)) throw std::invalid_argument("intersect: dimension mismatch");
  BinaryMask out(a.width, a.height);
  for (size_t i = 0; i < a.bits.size(); ++i) out.bits[i] = a.bits[i] & b.bits[i];
  return out;
}

ComponentMap connected_components(const BinaryMask& m, int connectivity) {
  if (connectivity != 4 && connectivity != 8)
    throw std::invalid_argument("connected_components: connectivity must be 4 or 8");
  ComponentMap cm;
  cm.width = m.width;
  cm.height = m.height;
  cm.labels.assign(m.bits.size(), 0);

  static const int dx8[] = {-1, 0, 1, -1, 1, -1, 0, 1};
  static const int dy8[] = {-1, -1, -1, 0, 0, 1, 1, 1};
  static const int dx4[] = {0, -1, 1, 0};
  static const int dy4[] = {-1, 0, 0, 1};
  const int* dx = connectivity == 8 ? dx8 : dx4;
  const int* dy = connectivity == 8 ? dy8 : dy4;
  const int nn = connectivity;

  std::vector<int> stack;
  int next_label = 0;
  for (int y0 = 0; y0 < m.height; ++y0) {
    for (int x0 = 0; x0 < m.width; ++x0) {
      const size_t idx0 = static_cast<size_t>(y0) * m.width + x0;
      if (!m.bits[idx0] || cm.labels[idx0]) continue;
      ++next_label;
      long long area = 0;
      stack.push_back(static_cast<int>(idx0));
      cm.labels[idx0] = next_label;
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        ++area;
        const int x = idx % m.width, y = idx / m.width;
        for (int k = 0; k < nn; ++k) {
          const int nx = x + dx[k], ny = y + dy[k];
          if (!m.in_bounds(nx, ny)) continue;
          const size_t nidx = static_cast<size_t>(ny) * m.width + nx;
          if (m.bits[nidx] && !cm.labels[nidx]) {
            cm.labels[nidx] = next_label;
            stack.push_back(static_cast<int>(nidx));
          }
        }
      }
      cm.areas.push_back(area);
    }
  }
  return cm;
}

BinaryMask remove_small_blobs(const BinaryMask& m, long long min_area) {
  if (min_area < 0) throw std::invalid_argument("remove_small_blobs: negative min_area");
  const ComponentMap cm = connected_components(m, 8);
  BinaryMask out(m.width, m.height);
  for (size_t i = 0; i < m.bits.size(); ++i) {
    const int l = cm.labels[i];
    if (l && cm.areas[static_cast<size_t>(l - 1)] >= min_area) out.bits[i] = 1;
  }
  return out;
}

BinaryMask largest_component(const BinaryMask& m) {
  const ComponentMap cm = connected_components(m, 8);
  BinaryMask out(m.width, m.height);
  if (cm.count() == 0) return out;
  int best = 1;
  for (int k = 2; k <= cm.count(); ++k)
    if (cm.areas[static_cast<size_t>(k - 1)] > cm.areas[static_cast<size_t>(best - 1)]) best = k;
  for (size_t i = 0; i < m.bits.size(); ++i)
    if (cm.labels[i] == best) out.bits[i] = 1;
  return out;
}

namespace {

struct Pt {
  long long x, y;
};

long long cross(const Pt& o, const Pt& a, const Pt& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew monotone chain, hull in counter-clockwise order, no collinear points.
std::vector<Pt> convex_hull(std::vector<Pt> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const Pt& a, const Pt& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Pt& a, const Pt& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  const size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Pt> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  const size_t lower = k + 1;
  for (size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

void rasterize_segment(BinaryMask& out, Pt a, Pt b) {
  // Bresenham
  long long x0 = a.x, y0 = a.y, x1 = b.x, y1 = b.y;
  const long long dx = std::llabs(x1 - x0), dy = -std::llabs(y1 - y0);
  const long long sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  long long err = dx + dy;
  while (true) {
    out.set(static_cast<int>(x0), static_cast<int>(y0), true);
    if (x0 == x1 && y0 == y1) break;
    const long long e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace

BinaryMask convex_hull_mask(const BinaryMask& m) {
  std::vector<Pt> pts;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.get(x, y)) pts.push_back({x, y});
  BinaryMask out(m.width, m.height);
  if (pts.empty()) return out;

  const std::vector<Pt> hull = convex_hull(std::move(pts));
  if (hull.size() == 1) {
    out.set(static_cast<int>(hull[0].x), static_cast<int>(hull[0].y), true);
    return out;
  }
  if (hull.size() == 2) {
    rasterize_segment(out, hull[0], hull[1]);
    // collinear interior foreground pixels must survive (extensivity)
    for (size_t i = 0; i < m.bits.size(); ++i) out.bits[i] |= m.bits[i];
    return out;
  }

  long long minx = hull[0].x, maxx = hull[0].x, miny = hull[0].y, maxy = hull[0].y;
  for (const Pt& p : hull) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  for (long long y = miny; y <= maxy; ++y) {
    for (long long x = minx; x <= maxx; ++x) {
      bool inside = true;
      for (size_t i = 0; i < hull.size() && inside; ++i) {
        const Pt& a = hull[i];
        const Pt& b = hull[(i + 1) % hull.size()];
        if (cross(a, b, {x, y}) < 0) inside = false;
      }
      if (inside) out.set(static_cast<int>(x), static_cast<int>(y), true);
    }
  }
  return out;
}

}  // namespace lvseg
