#pragma once

// Independent reference computations used to check the library. They favour
// obvious correctness over speed and share no numerical code with it.

#include <cmath>
#include <functional>
#include <vector>

#include "fermi/curve.hpp"

namespace oracle {

using fermi::Vec2;

// Point of the ellipse x^2/a^2 + y^2/b^2 = 1 whose outward normal has angle theta.
inline Vec2 ellipse_point(double a, double b, double theta) {
  double c = std::cos(theta);
  double s = std::sin(theta);
  double d = std::sqrt(a * a * c * c + b * b * s * s);
  return {a * a * c / d, b * b * s / d};
}

inline double ellipse_curvature(double a, double b, double theta) {
  Vec2 p = ellipse_point(a, b, theta);
  // For x^2/a^2 + y^2/b^2 = 1: kappa = 1 / (a^2 b^2 (x^2/a^4 + y^2/b^4)^{3/2}).
  double q = p.x * p.x / (a * a * a * a) + p.y * p.y / (b * b * b * b);
  return 1.0 / (a * a * b * b * std::pow(q, 1.5));
}

// Perimeter of a closed parametric curve by a fine inscribed polygon with
// Richardson extrapolation in the vertex count.
inline double polygon_perimeter(const std::function<Vec2(double)>& p, int n = 100000) {
  auto poly = [&](int m) {
    double s = 0.0;
    Vec2 prev = p(0.0);
    for (int i = 1; i <= m; ++i) {
      Vec2 cur = p(2.0 * M_PI * i / m);
      s += std::hypot(cur.x - prev.x, cur.y - prev.y);
      prev = cur;
    }
    return s;
  };
  double a = poly(n);
  double b = poly(2 * n);
  return b + (b - a) / 3.0;
}

// Nearest point on a parametric curve by dense sampling and golden section.
inline double nearest_theta(const std::function<Vec2(double)>& p, Vec2 q, int samples = 20000) {
  auto d2 = [&](double t) {
    Vec2 r = p(t);
    return (r.x - q.x) * (r.x - q.x) + (r.y - q.y) * (r.y - q.y);
  };
  int best = 0;
  double bd = d2(0.0);
  for (int i = 1; i < samples; ++i) {
    double v = d2(2.0 * M_PI * i / samples);
    if (v < bd) {
      bd = v;
      best = i;
    }
  }
  double h = 2.0 * M_PI / samples;
  double a = (best - 1) * h;
  double b = (best + 1) * h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    if (d2(c) < d2(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  return 0.5 * (a + b);
}

// Graph function of the curve over the tangent line at theta0, evaluated by
// solving for the curve point at tangential coordinate s.
inline double graph_value(const fermi::Curve& c, double theta0, double s) {
  Vec2 p0 = c.position(theta0);
  Vec2 t{-std::sin(theta0), std::cos(theta0)};
  Vec2 n{-std::cos(theta0), -std::sin(theta0)};
  auto tang = [&](double tau) {
    Vec2 r = c.position(theta0 + tau);
    return (r.x - p0.x) * t.x + (r.y - p0.y) * t.y - s;
  };
  double lo = -1.0;
  double hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double m = 0.5 * (lo + hi);
    if (tang(m) < 0.0) {
      lo = m;
    } else {
      hi = m;
    }
  }
  Vec2 r = c.position(theta0 + 0.5 * (lo + hi));
  return (r.x - p0.x) * n.x + (r.y - p0.y) * n.y;
}

// n-th derivative of the graph at 0 by central differences with two
// Richardson steps. Adequate to about 1e-6 for n <= 4.
inline double fd_jet(const fermi::Curve& c, double theta0, int n) {
  auto f = [&](double s) { return graph_value(c, theta0, s); };
  auto central = [&](double h) {
    // Binomial central difference of order n with step h.
    double sum = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= n; ++k) {
      double x = (0.5 * n - k) * h;
      sum += ((k % 2) ? -1.0 : 1.0) * binom * f(x);
      binom = binom * (n - k) / (k + 1);
    }
    return sum / std::pow(h, n);
  };
  double h = n <= 2 ? 4e-3 : (n == 3 ? 1.5e-2 : 4e-2);
  double a = central(h);
  double b = central(0.5 * h);
  double d = central(0.25 * h);
  double ab = b + (b - a) / 3.0;
  double bc = d + (d - b) / 3.0;
  return bc + (bc - ab) / 15.0;
}

}  // namespace oracle

namespace oracle {

// Even-odd rule.
inline bool point_in_polygon(const std::vector<fermi::Vec2>& poly, fermi::Vec2 q) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y > q.y) != (b.y > q.y) && q.x < (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

}  // namespace oracle

namespace oracle {

// Bounding box, in the frame at normal angle psi, of the boundary of the band
// {P(theta) + t u(theta)} over [theta_lo, theta_hi] with |t| <= lam on a
// circle-like support curve; sampled densely, so it sits inside the true box.
struct Box {
  double t_lo, t_hi, n_lo, n_hi;
};

inline Box sampled_band_box(const fermi::Curve& c, double theta_lo, double theta_hi, double lam, double psi,
                            int samples = 400) {
  Vec2 tv{-std::sin(psi), std::cos(psi)};
  Vec2 nv{std::cos(psi), std::sin(psi)};
  Box b{1e300, -1e300, 1e300, -1e300};
  auto add = [&](Vec2 x) {
    double t = x.x * tv.x + x.y * tv.y;
    double n = x.x * nv.x + x.y * nv.y;
    b.t_lo = std::min(b.t_lo, t);
    b.t_hi = std::max(b.t_hi, t);
    b.n_lo = std::min(b.n_lo, n);
    b.n_hi = std::max(b.n_hi, n);
  };
  for (int i = 0; i <= samples; ++i) {
    double th = theta_lo + (theta_hi - theta_lo) * i / samples;
    Vec2 p = c.position(th);
    Vec2 u{std::cos(th), std::sin(th)};
    for (int k = 0; k <= 8; ++k) {
      double t = -lam + 2.0 * lam * k / 8;
      if (k != 0 && k != 8 && i != 0 && i != samples) continue;
      add({p.x + t * u.x, p.y + t * u.y});
    }
  }
  return b;
}

// Normal angles of the two chords of the unit circle with k1 - k2 = p.
inline std::vector<double> circle_chords(Vec2 p) {
  double h = std::hypot(p.x, p.y);
  double half = 0.5 * h;
  double t = std::sqrt(1.0 - half * half);
  Vec2 m{0.5 * p.x, 0.5 * p.y};
  Vec2 perp{-p.y / h, p.x / h};
  std::vector<double> out;
  for (double s : {t, -t}) {
    Vec2 k1{m.x + s * perp.x, m.y + s * perp.y};
    double a = std::atan2(k1.y, k1.x);
    if (a < 0) a += 2 * M_PI;
    out.push_back(a);
  }
  return out;
}

}  // namespace oracle
