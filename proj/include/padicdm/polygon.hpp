#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "padicdm/rational.hpp"
#include "padicdm/series.hpp"

namespace padicdm {

// Lower convex hull of {(i, v(c_i))} over the coefficients nonzero at
// precision, with the concave function l -> vq(l) = min_i (v(c_i) + i*l).
class ValuationPolygon {
 public:
  using Point = std::pair<int, Rational>;

  explicit ValuationPolygon(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.empty()) throw Error(Errc::ZeroSeries, "no coefficient is nonzero at precision");
    std::sort(points_.begin(), points_.end());
    for (const auto& pt : points_) {
      while (vertices_.size() >= 2) {
        const auto& a = vertices_[vertices_.size() - 2];
        const auto& b = vertices_.back();
        // Drop b when it lies on or above the segment a -> pt.
        Rational lhs = (b.second - a.second) * Rational(pt.first - a.first);
        Rational rhs = (pt.second - a.second) * Rational(b.first - a.first);
        if (lhs >= rhs) {
          vertices_.pop_back();
        } else {
          break;
        }
      }
      vertices_.push_back(pt);
    }
  }

  const std::vector<Point>& points() const { return points_; }
  const std::vector<Point>& vertices() const { return vertices_; }

  Rational vq(const Rational& l) const {
    Rational best = vertices_.front().second + Rational(vertices_.front().first) * l;
    for (const auto& v : vertices_) best = std::min(best, v.second + Rational(v.first) * l);
    return best;
  }

  // Open-disc convention: the smallest index attaining the minimum.
  int right_slope(const Rational& l) const {
    Rational m = vq(l);
    for (const auto& v : vertices_)
      if (v.second + Rational(v.first) * l == m) return v.first;
    return vertices_.front().first;
  }

  // Closed-disc convention: the largest index attaining the minimum.
  int left_slope(const Rational& l) const {
    Rational m = vq(l);
    int best = vertices_.front().first;
    for (const auto& v : vertices_)
      if (v.second + Rational(v.first) * l == m) best = v.first;
    return best;
  }

  // Values of l where the minimizing index changes, ascending.
  std::vector<Rational> breakpoints() const {
    std::vector<Rational> out;
    for (std::size_t k = vertices_.size(); k-- > 1;) {
      const auto& a = vertices_[k - 1];
      const auto& b = vertices_[k];
      out.push_back((a.second - b.second) / Rational(b.first - a.first));
    }
    return out;
  }

 private:
  std::vector<Point> points_;
  std::vector<Point> vertices_;
};

inline ValuationPolygon valuation_polygon(const TruncatedSeries& f) {
  std::vector<ValuationPolygon::Point> pts;
  for (int i = 0; i < f.order(); ++i)
    if (!f[i].is_zero()) pts.emplace_back(i, *f[i].valuation());
  return ValuationPolygon(std::move(pts));
}

enum class RadiusMode { ExactClosedForm, TailSlopeEstimate };

// Radius of convergence |p|^q reported through the exponent q.
struct RadiusEstimate {
  Rational q{0};             // clamped to q >= 0 (radius at most 1)
  Rational q_unclamped{0};   // diagnostic: value before the clamp
  Rational raw{0};           // tail chord slope before rational snapping
  Rational tolerance{0};     // snapping half-width
  RadiusMode mode = RadiusMode::TailSlopeEstimate;
  int window_begin = 0;
  int window_end = 0;
  bool stable = false;
  int nonzero_in_window = 0;
};

inline RadiusEstimate exact_radius(const Rational& q) {
  RadiusEstimate r;
  r.q = std::max(q, Rational(0));
  r.q_unclamped = q;
  r.raw = q;
  r.mode = RadiusMode::ExactClosedForm;
  r.stable = true;
  return r;
}

namespace detail {

struct TailFit {
  Rational raw{0};
  Rational snapped{0};
  int nonzero = 0;
};

inline TailFit tail_fit(const TruncatedSeries& f, int anchor, int lo, int hi, const Rational& tol) {
  TailFit fit;
  Rational v_anchor = *f[anchor].valuation();
  bool any = false;
  for (int j = std::max(lo, anchor + 1); j < hi; ++j) {
    if (f[j].is_zero()) continue;
    Rational slope = (v_anchor - *f[j].valuation()) / Rational(j - anchor);
    if (!any || slope > fit.raw) fit.raw = slope;
    any = true;
    ++fit.nonzero;
  }
  if (any) fit.snapped = simplest_between(fit.raw - tol, fit.raw + tol);
  return fit;
}

}  // namespace detail

// Tail estimate of the convergence exponent over coefficient indices
// [window_begin, window_end). The raw value is the steepest chord from the
// first nonzero coefficient to a coefficient in the window: for coefficient
// valuations -q*j + O(log j) this approaches q from below. It is snapped to
// the simplest rational within (1 + log_p N) / window_begin. Stable means the
// leading three quarters of the window snap to the same value and the window
// holds at least two nonzero coefficients.
inline RadiusEstimate radius_estimate(const TruncatedSeries& f, int window_begin, int window_end) {
  RadiusEstimate r;
  window_begin = std::clamp(window_begin, 0, f.order());
  window_end = std::clamp(window_end, window_begin, f.order());
  r.window_begin = window_begin;
  r.window_end = window_end;
  int anchor = f.first_nonzero();
  if (anchor < 0 || anchor >= window_end - 1 || window_begin >= window_end) return r;
  double horizon = 1.0 + std::log(static_cast<double>(f.order())) /
                             std::log(static_cast<double>(f.field()->p()));
  r.tolerance = rational_floor(horizon / std::max(1, window_begin), 1024);
  detail::TailFit full = detail::tail_fit(f, anchor, window_begin, window_end, r.tolerance);
  r.nonzero_in_window = full.nonzero;
  if (full.nonzero == 0) return r;
  r.raw = full.raw;
  r.q_unclamped = full.snapped;
  r.q = std::max(full.snapped, Rational(0));
  int head_end = window_begin + (3 * (window_end - window_begin)) / 4;
  detail::TailFit head = detail::tail_fit(f, anchor, window_begin, head_end, r.tolerance);
  r.stable = full.nonzero >= 2 && head.nonzero >= 1 && head.snapped == full.snapped;
  return r;
}

inline RadiusEstimate radius_estimate(const TruncatedSeries& f) {
  return radius_estimate(f, f.order() / 2, f.order());
}

}  // namespace padicdm
