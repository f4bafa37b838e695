#pragma once

// Overlap (Dice, Jaccard) and boundary (BF score) agreement between a
// segmentation result and a ground-truth mask.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "levelseg/levelset.hpp"

namespace levelseg {

// `as_printed` reproduces the denominators exactly as they appear in the
// original formulas (|Sg| + |Sg|, |Sg + Sg|, a1 a2 / (a1 + a2)). Kept for
// comparison only; `standard` is the metric everyone else reports.
enum class MetricForm { standard, as_printed };

namespace detail {

inline void require_same_grid(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_grid(b)) throw InvalidParameter("masks have different dimensions");
}

struct Overlap {
  std::size_t sr = 0, gt = 0, both = 0;
};

inline Overlap overlap(const BinaryMask& sr, const BinaryMask& gt) {
  require_same_grid(sr, gt);
  Overlap o;
  for (std::size_t i = 0; i < sr.size(); ++i) {
    o.sr += sr[i];
    o.gt += gt[i];
    o.both += sr[i] && gt[i];
  }
  return o;
}

}  // namespace detail

// Both masks empty counts as perfect agreement (1.0).
inline double dice(const BinaryMask& sr, const BinaryMask& gt, MetricForm form = MetricForm::standard) {
  const auto o = detail::overlap(sr, gt);
  if (o.sr + o.gt == 0) return 1.0;
  const double den = form == MetricForm::standard ? double(o.sr + o.gt) : 2.0 * double(o.gt);
  return den > 0 ? 2.0 * double(o.both) / den : 0.0;
}

inline double jaccard(const BinaryMask& sr, const BinaryMask& gt, MetricForm form = MetricForm::standard) {
  const auto o = detail::overlap(sr, gt);
  if (o.sr + o.gt == 0) return 1.0;
  const double den = form == MetricForm::standard ? double(o.sr + o.gt - o.both) : 2.0 * double(o.gt);
  return den > 0 ? double(o.both) / den : 0.0;
}

// Foreground pixels with a 4-neighbor in the background. Pixels outside the
// grid count as background.
inline BinaryMask boundary_pixels(const BinaryMask& m) {
  BinaryMask b(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      if (!m.at(x, y)) continue;
      const bool edge = x == 0 || y == 0 || x == m.width() - 1 || y == m.height() - 1 ||
                        !m.at(x - 1, y) || !m.at(x + 1, y) || !m.at(x, y - 1) || !m.at(x, y + 1);
      b.set(x, y, edge);
    }
  return b;
}

// Exact squared Euclidean distance to the nearest set pixel (separable lower
// envelope of parabolas). Infinity when the mask is empty.
inline std::vector<double> squared_distance_transform(const BinaryMask& m) {
  const int w = m.width(), h = m.height();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(m.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = m[i] ? 0.0 : inf;

  auto pass = [](std::vector<double>& f) {
    const int n = static_cast<int>(f.size());
    std::vector<double> out(n);
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    int k = -1;
    for (int q = 0; q < n; ++q) {
      if (f[q] == inf) continue;
      while (k >= 0) {
        const double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * (q - v[k]));
        if (s > z[k]) {
          ++k;
          v[k] = q;
          z[k] = s;
          z[k + 1] = inf;
          break;
        }
        --k;
      }
      if (k < 0) {
        k = 0;
        v[0] = q;
        z[0] = -inf;
        z[1] = inf;
      }
    }
    if (k < 0) return;  // no finite samples on this line
    int j = 0;
    for (int q = 0; q < n; ++q) {
      while (z[j + 1] < q) ++j;
      out[q] = double(q - v[j]) * (q - v[j]) + f[v[j]];
    }
    f = std::move(out);
  };

  std::vector<double> line;
  for (int x = 0; x < w; ++x) {
    line.resize(h);
    for (int y = 0; y < h; ++y) line[y] = d[static_cast<std::size_t>(y) * w + x];
    pass(line);
    for (int y = 0; y < h; ++y) d[static_cast<std::size_t>(y) * w + x] = line[y];
  }
  for (int y = 0; y < h; ++y) {
    line.assign(d.begin() + static_cast<std::ptrdiff_t>(y) * w, d.begin() + static_cast<std::ptrdiff_t>(y + 1) * w);
    pass(line);
    std::copy(line.begin(), line.end(), d.begin() + static_cast<std::ptrdiff_t>(y) * w);
  }
  return d;
}

inline double default_bf_tolerance(int width, int height) {
  return 0.0075 * std::hypot(double(width), double(height));
}

struct BoundaryMatch {
  double precision = 0.0;  // SR boundary pixels within theta of the GT boundary
  double recall = 0.0;     // GT boundary pixels within theta of the SR boundary
  bool empty_boundary = false;
};

inline BoundaryMatch boundary_match(const BinaryMask& sr, const BinaryMask& gt, double theta) {
  detail::require_same_grid(sr, gt);
  if (!(theta > 0)) throw InvalidParameter("bfscore tolerance must be > 0");
  const BinaryMask bs = boundary_pixels(sr), bg = boundary_pixels(gt);
  const auto ds = squared_distance_transform(bs), dg = squared_distance_transform(bg);
  const double t2 = theta * theta;
  std::size_t ns = 0, ng = 0, hit_s = 0, hit_g = 0;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (bs[i]) {
      ++ns;
      hit_s += dg[i] <= t2;
    }
    if (bg[i]) {
      ++ng;
      hit_g += ds[i] <= t2;
    }
  }
  BoundaryMatch m;
  m.empty_boundary = ns == 0 || ng == 0;
  if (ns == 0 && ng == 0) {
    m.precision = m.recall = 1.0;
    return m;
  }
  m.precision = ns ? double(hit_s) / double(ns) : 0.0;
  m.recall = ng ? double(hit_g) / double(ng) : 0.0;
  return m;
}

inline double bfscore(const BinaryMask& sr, const BinaryMask& gt, double theta,
                      MetricForm form = MetricForm::standard) {
  const BoundaryMatch m = boundary_match(sr, gt, theta);
  const double sum = m.precision + m.recall;
  if (sum == 0.0) return 0.0;
  const double num = m.precision * m.recall;
  return form == MetricForm::standard ? 2.0 * num / sum : num / sum;
}

inline double bfscore(const BinaryMask& sr, const BinaryMask& gt) {
  return bfscore(sr, gt, default_bf_tolerance(sr.width(), sr.height()));
}

struct ScoreReport {
  std::string image_id;
  std::string model;
  double dice = 0.0;
  double jaccard = 0.0;
  double bfscore = 0.0;
  bool vacuous = false;         // both masks empty
  bool empty_boundary = false;  // at least one mask has no boundary
};

inline ScoreReport score(const BinaryMask& sr, const BinaryMask& gt, double theta) {
  ScoreReport r;
  r.dice = dice(sr, gt);
  r.jaccard = jaccard(sr, gt);
  r.bfscore = bfscore(sr, gt, theta);
  r.vacuous = sr.count() == 0 && gt.count() == 0;
  r.empty_boundary = boundary_match(sr, gt, theta).empty_boundary;
  return r;
}

inline ScoreReport score(const BinaryMask& sr, const BinaryMask& gt) {
  return score(sr, gt, default_bf_tolerance(sr.width(), sr.height()));
}

}  // namespace levelseg
