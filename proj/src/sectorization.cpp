#include "fermi/sectorization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fermi/errors.hpp"

namespace fermi {

namespace {

constexpr double kAlephUpperSlack = 5e-4;  // accepts decimal spellings of 2/3 such as 0.6667

double angular_distance(double a, double b) { return circular_distance(a, b, kTwoPi); }

// Normal angles in [lo, hi] congruent to alpha modulo step.
void stationary_candidates(double alpha, double step, double lo, double hi, std::vector<double>& out) {
  double k = std::ceil((lo - alpha) / step);
  for (double th = alpha + k * step; th < hi; th += step) {
    if (th > lo) out.push_back(th);
  }
}

template <class F>
double golden_max(F&& f, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < 40; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::max(fc, fd);
}

// Extents of x . dirs[k] over the region boundary.
void boundary_extents(const Curve& c, const ArcRegion& r, const Vec2* dirs, std::size_t ndirs, Interval* out) {
  for (std::size_t k = 0; k < ndirs; ++k) {
    out[k] = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  }
  std::vector<double> cands = {r.theta_lo, r.theta_hi};
  for (std::size_t k = 0; k < ndirs; ++k) {
    stationary_candidates(std::atan2(dirs[k].y, dirs[k].x), kPi, r.theta_lo, r.theta_hi, cands);
  }
  if (c.constant_shell()) {
    for (double th : cands) {
      Vec2 p = c.position(th);
      Vec2 u = unit(th);
      for (std::size_t k = 0; k < ndirs; ++k) {
        double base = dot(p, dirs[k]);
        double off = r.lambda * dot(u, dirs[k]);
        out[k].lo = std::min(out[k].lo, base - std::fabs(off));
        out[k].hi = std::max(out[k].hi, base + std::fabs(off));
      }
    }
    return;
  }
  // Variable shell offsets: sample each boundary curve and refine the best
  // samples; the stationary angles of the constant-offset case seed the search.
  constexpr int kSamples = 9;
  for (int side = 0; side < 2; ++side) {
    auto point = [&](double th) {
      auto [ti, to] = c.shell_offsets(th, r.lambda);
      return c.position(th) + (side == 0 ? ti : to) * unit(th);
    };
    std::vector<double> th(kSamples);
    for (int i = 0; i < kSamples; ++i) th[i] = r.theta_lo + (r.theta_hi - r.theta_lo) * i / (kSamples - 1);
    th.insert(th.end(), cands.begin() + 2, cands.end());
    std::sort(th.begin(), th.end());
    std::vector<Vec2> pts(th.size());
    for (std::size_t i = 0; i < th.size(); ++i) pts[i] = point(th[i]);
    for (std::size_t k = 0; k < ndirs; ++k) {
      const Vec2 v = dirs[k];
      std::size_t imax = 0;
      std::size_t imin = 0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        double f = dot(pts[i], v);
        out[k].lo = std::min(out[k].lo, f);
        out[k].hi = std::max(out[k].hi, f);
        if (f > dot(pts[imax], v)) imax = i;
        if (f < dot(pts[imin], v)) imin = i;
      }
      auto refine = [&](std::size_t i, double sign) {
        double a = th[i == 0 ? 0 : i - 1];
        double b = th[std::min(i + 1, th.size() - 1)];
        if (b - a <= 0.0) return;
        double m = golden_max([&](double t) { return sign * dot(point(t), v); }, a, b);
        if (sign > 0) {
          out[k].hi = std::max(out[k].hi, m);
        } else {
          out[k].lo = std::min(out[k].lo, -m);
        }
      };
      refine(imax, 1.0);
      refine(imin, -1.0);
    }
  }
}

std::string num(double v) { return std::to_string(v); }

}  // namespace

FrameBox region_box(const Curve& c, const ArcRegion& r, const Frame& f) {
  Vec2 dirs[2] = {f.t, f.n};
  Interval out[2];
  boundary_extents(c, r, dirs, 2, out);
  return {out[0], out[1]};
}

Interval region_extent(const Curve& c, const ArcRegion& r, Vec2 v) {
  Interval out;
  boundary_extents(c, r, &v, 1, &out);
  return out;
}

bool region_contains(const Curve& c, const ArcRegion& r, Vec2 q, double slack) {
  const double mid = 0.5 * (r.theta_lo + r.theta_hi);
  auto pr = c.try_project(q, mid);
  if (!pr) return false;
  double th = r.theta_lo + wrap_angle(pr->theta - r.theta_lo);
  // Wrapping can place a point just below theta_lo at the top of the circle.
  if (th > r.theta_hi + slack && th - kTwoPi >= r.theta_lo - slack) th -= kTwoPi;
  if (th < r.theta_lo - slack || th > r.theta_hi + slack) return false;
  if (c.constant_shell()) return std::fabs(pr->offset) <= r.lambda + slack;
  return std::fabs(c.level(q)) <= r.lambda + slack;
}

double region_radius_bound(const Curve& c, const ArcRegion& r, Vec2 center) {
  const double s_lo = c.arclength(r.theta_lo);
  const double s_hi = c.arclength(r.theta_hi);
  const double th_mid = c.theta_at_arclength(0.5 * (s_lo + s_hi));
  double tmax = r.lambda;
  if (!c.constant_shell()) {
    tmax = 0.0;
    for (double th : {r.theta_lo, th_mid, r.theta_hi}) {
      auto [ti, to] = c.shell_offsets(th, r.lambda);
      tmax = std::max({tmax, std::fabs(ti), std::fabs(to)});
    }
    tmax *= 1.25;
  }
  return norm(c.position(th_mid) - center) + 0.5 * (s_hi - s_lo) + tmax;
}

std::vector<Vec2> region_samples(const Curve& c, const ArcRegion& r, int along, int across) {
  if (along < 2 || across < 2) throw std::invalid_argument("region_samples: need at least two samples per axis");
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(along * across));
  for (int i = 0; i < along; ++i) {
    double th = r.theta_lo + (r.theta_hi - r.theta_lo) * i / (along - 1);
    auto [ti, to] = c.shell_offsets(th, r.lambda);
    Vec2 p = c.position(th);
    Vec2 u = unit(th);
    for (int k = 0; k < across; ++k) pts.push_back(p + (ti + (to - ti) * k / (across - 1)) * u);
  }
  return pts;
}

RectEnclosure region_rectangle(const Curve& c, const Sector& s, double ref_theta, double omega) {
  Frame f = Frame::at(ref_theta);
  FrameBox b = region_box(c, s.region(), f);
  RectEnclosure r;
  r.center = s.center_point;
  r.axis_n = f.n;
  r.axis_t = f.t;
  const double cn = f.coord_n(s.center_point);
  const double ct = f.coord_t(s.center_point);
  r.halfwidth_n = std::max(b.n.hi - cn, cn - b.n.lo);
  r.halfwidth_t = std::max(b.t.hi - ct, ct - b.t.lo);
  r.within_window = std::min(angular_distance(s.center_theta, ref_theta),
                             angular_distance(s.center_theta, ref_theta + kPi)) <= omega;
  return r;
}

std::vector<Vec2> region_polygon(const Curve& c, const Sector& s, int m) {
  if (m < 8) throw std::invalid_argument("region_polygon: m must be at least 8");
  std::vector<Vec2> outer;
  std::vector<Vec2> inner;
  for (int i = 0; i < m; ++i) {
    double th = s.theta_lo + (s.theta_hi - s.theta_lo) * i / (m - 1);
    auto [ti, to] = c.shell_offsets(th, s.shell_halfwidth);
    Vec2 p = c.position(th);
    Vec2 u = unit(th);
    outer.push_back(p + to * u);
    inner.push_back(p + ti * u);
  }
  std::vector<Vec2> poly = outer;
  poly.insert(poly.end(), inner.rbegin(), inner.rend());
  return poly;
}

SeparationResult eps_separated_check(const Curve& c, const std::vector<double>& thetas, double eps) {
  SeparationResult res;
  const std::size_t n = thetas.size();
  if (n < 2) return res;
  const double L = c.length();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = std::fmod(c.arclength(wrap_angle(thetas[i])), L);
    s[i] = v < 0.0 ? v + L : v;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });
  // The closest pair on a circle is adjacent in sorted order.
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t a = order[k];
    std::size_t b = order[(k + 1) % n];
    double d = circular_distance(s[a], s[b], L);
    if (d < eps) {
      res.separated = false;
      res.violating_pair = std::make_pair(std::min(a, b), std::max(a, b));
      return res;
    }
  }
  return res;
}

double arc_overlap(double a_lo, double a_hi, double b_lo, double b_hi, double period) {
  const double shift = std::round((a_lo - b_lo) / period) * period;
  double best = 0.0;
  for (int k = -1; k <= 1; ++k) {
    double off = shift + k * period;
    best = std::max(best, std::min(a_hi, b_hi + off) - std::max(a_lo, b_lo + off));
  }
  return best;
}

Sector Sectorization::make_sector(int index, double arc_lo, double arc_hi) const {
  Sector s;
  s.index = index;
  s.arc_lo = arc_lo;
  s.arc_hi = arc_hi;
  s.center_arclength = 0.5 * (arc_lo + arc_hi);
  s.center_theta = curve_.theta_at_arclength(s.center_arclength);
  s.center_point = curve_.position(s.center_theta);
  s.arc_halfwidth = 0.5 * (arc_hi - arc_lo);
  s.extension = extension_;
  s.shell_halfwidth = lambda_;
  s.theta_lo = curve_.theta_at_arclength(arc_lo);
  s.theta_hi = curve_.theta_at_arclength(arc_hi);
  s.ext_theta_lo = curve_.theta_at_arclength(arc_lo - extension_);
  s.ext_theta_hi = curve_.theta_at_arclength(arc_hi + extension_);
  return s;
}

Sectorization Sectorization::build(const Curve& curve, double M, int j, EllRule rule, BuildOptions opts) {
  if (!(M > 1.0)) throw std::invalid_argument("build: M must exceed 1");
  if (j < 2) throw std::invalid_argument("build: j must be at least 2");
  if (!(opts.extension_fraction >= 0.0 && opts.extension_fraction <= 0.125)) {
    throw std::invalid_argument("build: extension fraction must lie in [0, 1/8]");
  }
  Sectorization sig;
  sig.curve_ = curve;
  sig.M_ = M;
  sig.j_ = j;
  sig.rule_ = rule;
  sig.opts_ = opts;
  if (rule.kind == EllRule::Kind::aleph) {
    if (!(rule.value > 0.5 && rule.value <= 2.0 / 3.0 + kAlephUpperSlack)) {
      throw std::invalid_argument("build: aleph must satisfy 1/2 < aleph <= 2/3");
    }
    sig.ell_nominal_ = std::pow(M, -rule.value * j);
  } else {
    if (!(rule.value > 0.0)) throw std::invalid_argument("build: ell must be positive");
    sig.ell_nominal_ = rule.value;
  }
  const double L = curve.length();
  if (sig.ell_nominal_ > 0.25 * L) throw TooCoarse("build: ell " + num(sig.ell_nominal_) + " exceeds L/4");
  if (opts.strict) {
    const double lo = std::pow(M, -(j - 1.5));
    const double hi = std::pow(M, -0.5 * (j - 1));
    if (sig.ell_nominal_ > hi * (1.0 + 1e-12)) throw TooCoarse("build: ell above 1/M^((j-1)/2) in strict mode");
    if (sig.ell_nominal_ < lo * (1.0 - 1e-12)) throw TooFine("build: ell below 1/M^(j-3/2) in strict mode");
  }
  const double nd = std::ceil(L / sig.ell_nominal_ - 1e-9);
  if (nd > static_cast<double>(opts.max_sectors)) {
    throw TooFine("build: " + num(nd) + " sectors exceed the cap of " + std::to_string(opts.max_sectors));
  }
  const std::size_t n = static_cast<std::size_t>(nd);
  sig.ell_ = L / static_cast<double>(n);
  sig.lambda_ = opts.lambda ? *opts.lambda : std::sqrt(2.0) * std::pow(M, -(j - 1));
  if (!(sig.lambda_ >= 0.0)) throw std::invalid_argument("build: Lambda must be non-negative");
  if (sig.lambda_ >= 0.5 * curve.convexity_margin()) {
    throw TooCoarse("build: Lambda must stay below half the minimal radius of curvature");
  }
  sig.extension_ = opts.extension_fraction * sig.ell_;
  sig.sectors_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    sig.sectors_.push_back(sig.make_sector(static_cast<int>(i), sig.ell_ * static_cast<double>(i),
                                           sig.ell_ * static_cast<double>(i + 1)));
  }
  return sig;
}

std::vector<double> Sectorization::center_thetas() const {
  std::vector<double> out;
  out.reserve(sectors_.size());
  for (const auto& s : sectors_) out.push_back(s.center_theta);
  return out;
}

int Sectorization::sector_containing(double theta) const {
  const double L = curve_.length();
  double s = std::fmod(curve_.arclength(wrap_angle(theta)), L);
  if (s < 0.0) s += L;
  auto i = static_cast<std::size_t>(std::floor(s / ell_));
  return static_cast<int>(std::min(i, sectors_.size() - 1));
}

Sector Sectorization::sector_at(double theta) const {
  const double s = curve_.arclength(theta);
  return make_sector(-1, s - 0.5 * ell_, s + 0.5 * ell_);
}

nlohmann::json Sectorization::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["curve"] = curve_.to_json();
  j["M"] = M_;
  j["j"] = j_;
  j["ell_rule"] = {{"kind", rule_.kind == EllRule::Kind::aleph ? "aleph" : "explicit"}, {"value", rule_.value}};
  j["ell"] = ell_;
  j["ell_nominal"] = ell_nominal_;
  j["Lambda"] = lambda_;
  j["extension_fraction"] = opts_.extension_fraction;
  j["strict"] = opts_.strict;
  j["N"] = sectors_.size();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : sectors_) {
    arr.push_back({{"index", s.index},
                   {"center_theta", s.center_theta},
                   {"center_point", {s.center_point.x, s.center_point.y}},
                   {"theta_lo", s.theta_lo},
                   {"theta_hi", s.theta_hi},
                   {"arc_lo", s.arc_lo},
                   {"arc_hi", s.arc_hi}});
  }
  j["sectors"] = arr;
  return j;
}

Sectorization Sectorization::from_json(const nlohmann::json& j) {
  Curve c = Curve::from_json(j.at("curve"));
  const auto& r = j.at("ell_rule");
  EllRule rule = r.at("kind").get<std::string>() == "aleph" ? EllRule::aleph(r.at("value").get<double>())
                                                           : EllRule::explicit_length(r.at("value").get<double>());
  BuildOptions opts;
  opts.lambda = j.at("Lambda").get<double>();
  opts.extension_fraction = j.value("extension_fraction", opts.extension_fraction);
  opts.strict = j.value("strict", false);
  Sectorization sig = build(c, j.at("M").get<double>(), j.at("j").get<int>(), rule, opts);
  if (j.contains("N") && j.at("N").get<std::size_t>() != sig.size()) {
    throw ParseError("sectorization: stored sector count does not match the rebuilt partition");
  }
  return sig;
}

std::vector<std::vector<int>> overlap_map(const Sectorization& sig, const Sectorization& sig_prime) {
  if (!sig.curve().same_as(sig_prime.curve())) throw CurveMismatch("overlap_map: sectorizations use different curves");
  if (sig.ell() > sig_prime.ell() * (1.0 + 1e-12)) {
    throw std::invalid_argument("overlap_map: the first sectorization must be the finer one");
  }
  const double L = sig.curve().length();
  const double ell = sig.ell();
  const int n = static_cast<int>(sig.size());
  const double tol = 1e-12 * ell;
  std::vector<std::vector<int>> out(sig_prime.size());
  for (std::size_t p = 0; p < sig_prime.size(); ++p) {
    const Sector& sp = sig_prime[p];
    const double a = sp.ext_arc_lo() - sig.extension();
    const double b = sp.ext_arc_hi() + sig.extension();
    const long k0 = static_cast<long>(std::floor(a / ell)) - 1;
    const long k1 = static_cast<long>(std::floor(b / ell)) + 1;
    std::vector<int>& list = out[p];
    for (long k = k0; k <= k1; ++k) {
      int idx = static_cast<int>(((k % n) + n) % n);
      const Sector& s = sig[static_cast<std::size_t>(idx)];
      if (arc_overlap(s.ext_arc_lo(), s.ext_arc_hi(), sp.ext_arc_lo(), sp.ext_arc_hi(), L) > tol) list.push_back(idx);
    }
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return out;
}

}  // namespace fermi
