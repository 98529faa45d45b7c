#include "fermi/curve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "curve_impl.hpp"
#include "fermi/errors.hpp"
#include "fermi/taylor.hpp"

namespace fermi {
namespace detail {

namespace {

// Gauss-Legendre, 8 nodes on [-1, 1].
constexpr std::array<double, 8> kGLx = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                        -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                        0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGLw = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                        0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                        0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss_legendre(F&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < kGLx.size(); ++i) s += kGLw[i] * f(mid + half * kGLx[i]);
  return s * half;
}

// Root of f on [lo, hi] given a sign change; fg returns (f, f').
template <class FG>
double newton_bracketed(FG&& fg, double lo, double hi, double x0) {
  double flo = fg(lo).first;
  double fhi = fg(hi).first;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) throw NumericError("newton_bracketed: no sign change in bracket");
  double x = std::clamp(x0, lo, hi);
  for (int it = 0; it < 200; ++it) {
    auto [f, d] = fg(x);
    if (f == 0.0) return x;
    if ((f < 0.0) == (flo < 0.0)) {
      lo = x;
    } else {
      hi = x;
    }
    double xn = x - f / d;
    if (!std::isfinite(xn) || xn <= lo || xn >= hi) xn = 0.5 * (lo + hi);
    if (std::fabs(xn - x) <= 1e-15 * (1.0 + std::fabs(x)) || hi - lo <= 1e-15 * (1.0 + std::fabs(x))) return xn;
    x = xn;
  }
  return x;
}

// Golden section minimum of f on [a, b].
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, int iters = 80) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
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
  double x = 0.5 * (a + b);
  return {x, f(x)};
}

double cos_shift(double x, int k) {
  switch (k & 3) {
    case 0: return std::cos(x);
    case 1: return -std::sin(x);
    case 2: return -std::cos(x);
    default: return std::sin(x);
  }
}

double sin_shift(double x, int k) {
  switch (k & 3) {
    case 0: return std::sin(x);
    case 1: return std::cos(x);
    case 2: return -std::sin(x);
    default: return -std::cos(x);
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void CurveImpl::finalize() {
  table_theta_.resize(kTableSize + 1);
  table_pos_.resize(kTableSize + 1);
  table_arc_.resize(kTableSize + 1);
  for (int i = 0; i <= kTableSize; ++i) {
    double th = kTwoPi * i / kTableSize;
    table_theta_[i] = th;
    table_pos_[i] = position(th);
    table_arc_[i] = arclength(th);
  }
  length = table_arc_[kTableSize];

  constexpr int kSamples = 4096;
  int imin = 0;
  int imax = 0;
  std::vector<double> r(kSamples);
  for (int i = 0; i < kSamples; ++i) {
    r[i] = rho(kTwoPi * i / kSamples);
    if (!std::isfinite(r[i])) throw NotConvex("curve: radius of curvature is not finite");
    if (r[i] < r[imin]) imin = i;
    if (r[i] > r[imax]) imax = i;
  }
  const double h = kTwoPi / kSamples;
  auto [tmin, rmin] = golden_min([&](double t) { return rho(t); }, (imin - 1) * h, (imin + 1) * h, 60);
  auto [tmax, negmax] = golden_min([&](double t) { return -rho(t); }, (imax - 1) * h, (imax + 1) * h, 60);
  (void)tmin;
  (void)tmax;
  margin = std::min(rmin, r[imin]);
  rho_max = std::max(-negmax, r[imax]);
  if (!(margin > 0.0)) throw NotConvex("curve: radius of curvature is not positive everywhere");
}

double CurveImpl::theta_at_arclength(double s) const {
  const double k = std::floor(s / length);
  double r = s - k * length;
  if (r >= length) r = 0.0;
  auto it = std::upper_bound(table_arc_.begin(), table_arc_.end(), r);
  int i = static_cast<int>(it - table_arc_.begin()) - 1;
  i = std::clamp(i, 0, kTableSize - 1);
  double lo = table_theta_[i];
  double hi = table_theta_[i + 1];
  double frac = (r - table_arc_[i]) / (table_arc_[i + 1] - table_arc_[i]);
  double th = newton_bracketed([&](double t) { return std::make_pair(arclength(t) - r, rho(t)); }, lo, hi,
                               lo + frac * (hi - lo));
  return th + kTwoPi * k;
}

std::optional<Projection> CurveImpl::project(Vec2 q, std::optional<double> hint) const {
  auto attempt = [&](double th) -> std::optional<double> {
    for (int it = 0; it < 60; ++it) {
      Vec2 d = q - position(th);
      double f = dot(d, unit_perp(th));
      double fp = -rho(th) - dot(d, unit(th));
      if (!(fp < 0.0)) return std::nullopt;
      double step = std::clamp(-f / fp, -0.3, 0.3);
      th += step;
      if (std::fabs(step) < 1e-14) return th;
    }
    return std::nullopt;
  };
  std::optional<double> th;
  if (hint) th = attempt(*hint);
  if (!th) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < table_pos_.size(); ++i) {
      Vec2 d = q - table_pos_[i];
      double dd = dot(d, d);
      if (dd < bd) {
        bd = dd;
        best = i;
      }
    }
    th = attempt(table_theta_[best]);
    if (th) th = wrap_angle(*th);
  }
  if (!th) return std::nullopt;
  Vec2 d = q - position(*th);
  double off = dot(d, unit(*th));
  if (!(std::fabs(off) < margin * (1.0 - 1e-9))) return std::nullopt;
  return Projection{*th, off};
}

FourierCurve::FourierCurve(std::vector<FourierTerm> terms, CurveOptions opts) : terms_(std::move(terms)) {
  smoothness = opts.smoothness;
  std::sort(terms_.begin(), terms_.end(), [](const FourierTerm& a, const FourierTerm& b) { return a.m < b.m; });
  bool have_zero = false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].m < 0) throw ParseError("support_fourier: negative mode");
    if (i > 0 && terms_[i].m == terms_[i - 1].m) throw ParseError("support_fourier: duplicate mode");
    if (terms_[i].m == 0) {
      have_zero = true;
      a0_ = terms_[i].cos_amp;
    }
    if (terms_[i].m == 1) steiner_ = {terms_[i].cos_amp, terms_[i].sin_amp};
  }
  if (!have_zero || !(a0_ > 0.0)) throw NotConvex("support_fourier: mean radius must be positive");
  interior = steiner_;
  finalize();

  radial_arg_.resize(kTableSize + 1);
  double prev = 0.0;
  for (int i = 0; i <= kTableSize; ++i) {
    Vec2 d = table_pos_[i] - steiner_;
    double a = std::atan2(d.y, d.x);
    if (i > 0) {
      while (a <= prev - kPi) a += kTwoPi;
      while (a > prev + kPi) a -= kTwoPi;
      if (!(a > prev)) throw NotConvex("support_fourier: curve is not star shaped about its Steiner point");
    }
    radial_arg_[i] = a;
    prev = a;
  }
}

double FourierCurve::support(double theta, int k) const {
  double s = 0.0;
  for (const auto& t : terms_) {
    if (t.m == 0) {
      if (k == 0) s += t.cos_amp;
      continue;
    }
    const double x = t.m * theta;
    s += std::pow(static_cast<double>(t.m), k) * (t.cos_amp * cos_shift(x, k) + t.sin_amp * sin_shift(x, k));
  }
  return s;
}

void FourierCurve::support012(double theta, double& h0, double& h1, double& h2) const {
  h0 = h1 = h2 = 0.0;
  for (const auto& t : terms_) {
    if (t.m == 0) {
      h0 += t.cos_amp;
      continue;
    }
    const double m = t.m;
    const double c = std::cos(m * theta);
    const double s = std::sin(m * theta);
    const double v = t.cos_amp * c + t.sin_amp * s;
    h0 += v;
    h1 += m * (t.sin_amp * c - t.cos_amp * s);
    h2 -= m * m * v;
  }
}

Vec2 FourierCurve::position(double theta) const {
  double h0, h1, h2;
  support012(theta, h0, h1, h2);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {h0 * c - h1 * s, h0 * s + h1 * c};
}

double FourierCurve::rho(double theta) const {
  double h0, h1, h2;
  support012(theta, h0, h1, h2);
  return h0 + h2;
}

double FourierCurve::arclength(double theta) const {
  double s = a0_ * theta;
  for (const auto& t : terms_) {
    if (t.m == 0) continue;
    const double x = t.m * theta;
    s += (t.cos_amp * std::sin(x) - t.sin_amp * (std::cos(x) - 1.0)) / t.m;
  }
  return s + support(theta, 1) - support(0.0, 1);
}

double FourierCurve::level(Vec2 q) const {
  Vec2 d = q - steiner_;
  double r = std::sqrt(dot(d, d));
  if (r == 0.0) return -norm(table_pos_[0] - steiner_);
  double psi = std::atan2(d.y, d.x);
  double target = radial_arg_[0] + wrap_angle(psi - radial_arg_[0]);
  auto it = std::upper_bound(radial_arg_.begin(), radial_arg_.end(), target);
  int i = std::clamp(static_cast<int>(it - radial_arg_.begin()) - 1, 0, kTableSize - 1);
  const Vec2 w = (1.0 / r) * d;
  // The table nodes bracket the ray: the angle from w to P - steiner is <= 0
  // at lo and >= 0 at hi, so Newton can run without evaluating the ends.
  double lo = table_theta_[i];
  double hi = table_theta_[i + 1];
  double frac = (target - radial_arg_[i]) / (radial_arg_[i + 1] - radial_arg_[i]);
  double th = lo + frac * (hi - lo);
  Vec2 e;
  for (int it = 0; it < 100; ++it) {
    double h0, h1, h2;
    support012(th, h0, h1, h2);
    const double c = std::cos(th);
    const double s = std::sin(th);
    e = Vec2{h0 * c - h1 * s, h0 * s + h1 * c} - steiner_;
    const double cr = cross(w, e);
    const double dt = dot(w, e);
    const double f = std::fabs(cr) < 0.1 * dt ? std::atan(cr / dt) : std::atan2(cr, dt);
    if (f == 0.0) break;
    if (f < 0.0) {
      lo = th;
    } else {
      hi = th;
    }
    const double fp = (h0 + h2) * (e.x * c + e.y * s) / dot(e, e);
    const double step = f / fp;
    // A step this small moves e by less than its rounding error.
    if (std::fabs(step) <= 1e-15 * (1.0 + std::fabs(th)) || hi - lo <= 1e-15 * (1.0 + std::fabs(th))) break;
    double tn = th - step;
    if (!std::isfinite(tn) || tn <= lo || tn >= hi) tn = 0.5 * (lo + hi);
    th = tn;
  }
  return r - std::sqrt(dot(e, e));
}

std::vector<double> FourierCurve::jet(double theta, int n_max) const {
  const int K = n_max;
  Taylor h(K), hp(K), c(K), s(K);
  double fact = 1.0;
  for (int k = 0; k <= K; ++k) {
    if (k > 0) fact *= k;
    h[k] = support(theta, k) / fact;
    hp[k] = support(theta, k + 1) / fact;
    c[k] = cos_shift(theta, k) / fact;
    s[k] = sin_shift(theta, k) / fact;
  }
  Taylor px = h * c - hp * s;
  Taylor py = h * s + hp * c;
  px[0] = 0.0;
  py[0] = 0.0;
  const Vec2 t = unit_perp(theta);
  const Vec2 n_in = -unit(theta);
  Taylor sig = px * t.x + py * t.y;
  Taylor ph = px * n_in.x + py * n_in.y;
  const double s1 = sig[1];
  Taylor rest = sig;
  rest[1] = 0.0;
  Taylor var = Taylor::variable(K, 0.0);
  Taylor tau = var / s1;
  for (int it = 0; it < K; ++it) tau = (var - rest.compose(tau)) / s1;
  Taylor phi = ph.compose(tau);
  std::vector<double> out;
  for (int n = 2; n <= K; ++n) out.push_back(phi.derivative_at_zero(n));
  return out;
}

nlohmann::json FourierCurve::to_json() const {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& t : terms_) coeffs.push_back({t.m, t.cos_amp, t.sin_amp});
  return {{"kind", "support_fourier"}, {"coeffs", coeffs}};
}

LevelSetCurve::LevelSetCurve(const std::string& expr, CurveOptions opts) : expr_(Expression::parse(expr)) {
  smoothness = opts.smoothness;
  Vec2 c{0.0, 0.0};
  if (!(level(c) < 0.0)) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = -100; i <= 100; ++i) {
      for (int j = -100; j <= 100; ++j) {
        Vec2 q{0.1 * i, 0.1 * j};
        double v = level(q);
        if (v < best) {
          best = v;
          c = q;
        }
      }
    }
    if (!(best < 0.0)) throw NotConvex("dispersion: no interior point found in [-10, 10]^2");
  }
  interior = c;

  constexpr int kRays = 2048;
  ray_theta_.resize(kRays + 1);
  ray_pos_.resize(kRays + 1);
  for (int j = 0; j < kRays; ++j) {
    Vec2 v = unit(kTwoPi * j / kRays);
    double lo = 0.0;
    double hi = 0.25;
    while (!(level(c + hi * v) > 0.0)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e6) throw NotConvex("dispersion: level set is unbounded");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      double mid = 0.5 * (lo + hi);
      if (level(c + mid * v) > 0.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    Vec2 q = c + 0.5 * (lo + hi) * v;
    Hess2 g = hess(q);
    double a = std::atan2(g.gy, g.gx);
    if (j > 0) {
      double prev = ray_theta_[j - 1];
      while (a <= prev - kPi) a += kTwoPi;
      while (a > prev + kPi) a -= kTwoPi;
      if (!(a > prev)) throw NotConvex("dispersion: normal angle is not monotone along the level set");
    }
    ray_theta_[j] = a;
    ray_pos_[j] = q;
  }
  ray_theta_[kRays] = ray_theta_[0] + kTwoPi;
  ray_pos_[kRays] = ray_pos_[0];
  if (!(ray_theta_[kRays] > ray_theta_[kRays - 1])) throw NotConvex("dispersion: level set is not convex");

  arc_nodes_.resize(kArcPanels + 1);
  arc_nodes_[0] = 0.0;
  const double w = kTwoPi / kArcPanels;
  for (int p = 0; p < kArcPanels; ++p) {
    arc_nodes_[p + 1] = arc_nodes_[p] + gauss_legendre([&](double t) { return rho(t); }, p * w, (p + 1) * w);
  }
  finalize();
}

Vec2 LevelSetCurve::position(double theta) const {
  double target = ray_theta_[0] + wrap_angle(theta - ray_theta_[0]);
  auto it = std::upper_bound(ray_theta_.begin(), ray_theta_.end(), target);
  int j = std::clamp(static_cast<int>(it - ray_theta_.begin()) - 1, 0, static_cast<int>(ray_theta_.size()) - 2);
  double frac = (target - ray_theta_[j]) / (ray_theta_[j + 1] - ray_theta_[j]);
  Vec2 q = ray_pos_[j] + frac * (ray_pos_[j + 1] - ray_pos_[j]);
  const double sn = std::sin(theta);
  const double cs = std::cos(theta);
  for (int it = 0; it < 50; ++it) {
    Hess2 h = hess(q);
    double g1 = h.v;
    double g2 = h.gx * sn - h.gy * cs;
    double a = h.gx;
    double b = h.gy;
    double c = h.hxx * sn - h.hxy * cs;
    double d = h.hxy * sn - h.hyy * cs;
    double det = a * d - b * c;
    if (det == 0.0 || !std::isfinite(det)) break;
    Vec2 step{(d * g1 - b * g2) / det, (a * g2 - c * g1) / det};
    q -= step;
    if (norm(step) <= 1e-14 * (1.0 + norm(q))) {
      Hess2 f = hess(q);
      if (f.gx * cs + f.gy * sn <= 0.0) break;
      return q;
    }
  }
  throw NumericError("dispersion: position solve did not converge at theta=" + format_double(theta));
}

double LevelSetCurve::rho(double theta) const {
  Hess2 h = hess(position(theta));
  double g = std::hypot(h.gx, h.gy);
  double num = h.hxx * h.gy * h.gy - 2.0 * h.hxy * h.gx * h.gy + h.hyy * h.gx * h.gx;
  return g * g * g / num;
}

double LevelSetCurve::arclength(double theta) const {
  const double k = std::floor(theta / kTwoPi);
  double r = theta - k * kTwoPi;
  const double w = kTwoPi / kArcPanels;
  int p = std::clamp(static_cast<int>(r / w), 0, kArcPanels - 1);
  double part = gauss_legendre([&](double t) { return rho(t); }, p * w, r);
  return k * arc_nodes_[kArcPanels] + arc_nodes_[p] + part;
}

double LevelSetCurve::shell_offset(Vec2 p, Vec2 u, double target, double t0) const {
  double t = t0;
  for (int it = 0; it < 50; ++it) {
    Hess2 h = hess(p + t * u);
    double f = h.v - target;
    double fp = h.gx * u.x + h.gy * u.y;
    double step = f / fp;
    t -= step;
    if (std::fabs(step) <= 1e-15 * (1.0 + std::fabs(t))) return t;
  }
  throw NumericError("dispersion: shell offset solve did not converge");
}

std::pair<double, double> LevelSetCurve::shell(double theta, double lambda) const {
  Vec2 p = position(theta);
  Vec2 u = unit(theta);
  Hess2 h = hess(p);
  double g = std::hypot(h.gx, h.gy);
  double t_out = shell_offset(p, u, lambda, lambda / g);
  double t_in = shell_offset(p, u, -lambda, -lambda / g);
  return {t_in, t_out};
}

std::vector<double> LevelSetCurve::jet(double theta, int n_max) const {
  const int K = n_max;
  const Vec2 p = position(theta);
  const Vec2 t = unit_perp(theta);
  const Vec2 n_in = -unit(theta);
  Hess2 h = hess(p);
  const double e_phi = h.gx * n_in.x + h.gy * n_in.y;
  Taylor var = Taylor::variable(K, 0.0);
  Taylor phi(K, 0.0);
  for (int it = 0; it <= K + 1; ++it) {
    Taylor x = var * t.x + phi * n_in.x + p.x;
    Taylor y = var * t.y + phi * n_in.y + p.y;
    Taylor e = expr_.eval(x, y);
    phi -= e / e_phi;
    phi[0] = 0.0;
    phi[1] = 0.0;
  }
  std::vector<double> out;
  for (int n = 2; n <= K; ++n) out.push_back(phi.derivative_at_zero(n));
  return out;
}

nlohmann::json LevelSetCurve::to_json() const { return {{"kind", "dispersion"}, {"expr", expr_.source()}}; }

}  // namespace detail

Curve Curve::from_fourier(std::vector<FourierTerm> terms, CurveOptions opts) {
  return Curve(std::make_shared<detail::FourierCurve>(std::move(terms), opts));
}

Curve Curve::from_dispersion(const std::string& expr, CurveOptions opts) {
  return Curve(std::make_shared<detail::LevelSetCurve>(expr, opts));
}

Curve Curve::circle(double radius) { return from_fourier({{0, radius, 0.0}}); }

Curve Curve::ellipse(double a, double b) {
  return from_dispersion("k1^2/" + detail::format_double(a * a) + "+k2^2/" + detail::format_double(b * b) + "-1");
}

Curve Curve::from_json(const nlohmann::json& j) {
  CurveOptions opts;
  if (j.contains("smoothness")) opts.smoothness = j.at("smoothness").get<int>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "support_fourier") {
    std::vector<FourierTerm> terms;
    for (const auto& c : j.at("coeffs")) {
      if (!c.is_array() || c.size() != 3) throw ParseError("support_fourier: each coefficient is [m, a_m, b_m]");
      terms.push_back({c[0].get<int>(), c[1].get<double>(), c[2].get<double>()});
    }
    return from_fourier(std::move(terms), opts);
  }
  if (kind == "dispersion") return from_dispersion(j.at("expr").get<std::string>(), opts);
  throw ParseError("curve: unknown kind '" + kind + "'");
}

nlohmann::json Curve::to_json() const {
  nlohmann::json j = impl_->to_json();
  if (impl_->smoothness != CurveOptions{}.smoothness) j["smoothness"] = impl_->smoothness;
  return j;
}

std::string Curve::fingerprint() const { return impl_->to_json().dump(); }
CurveKind Curve::kind() const { return impl_->kind(); }
int Curve::smoothness() const { return impl_->smoothness; }
double Curve::convexity_margin() const { return impl_->margin; }
double Curve::max_radius_of_curvature() const { return impl_->rho_max; }
double Curve::length() const { return impl_->length; }
Vec2 Curve::interior_point() const { return impl_->interior; }
Vec2 Curve::position(double theta) const { return impl_->position(theta); }
double Curve::radius_of_curvature(double theta) const { return impl_->rho(theta); }
double Curve::arclength(double theta) const { return impl_->arclength(theta); }
double Curve::theta_at_arclength(double s) const { return impl_->theta_at_arclength(s); }
bool Curve::constant_shell() const { return impl_->constant_shell(); }
double Curve::level(Vec2 q) const { return impl_->level(q); }

std::pair<double, double> Curve::shell_offsets(double theta, double lambda) const {
  return impl_->shell(theta, lambda);
}

std::optional<Projection> Curve::try_project(Vec2 q, std::optional<double> theta_hint) const {
  return impl_->project(q, theta_hint);
}

CurvePoint Curve::point(double theta) const {
  CurvePoint p;
  p.theta = theta;
  p.position = position(theta);
  p.tangent = unit_perp(theta);
  p.inward_normal = -unit(theta);
  p.curvature = 1.0 / radius_of_curvature(theta);
  p.arclength = arclength(theta);
  return p;
}

std::vector<double> Curve::graph_jet(double theta, int n_max) const {
  if (n_max < 2) throw std::invalid_argument("graph_jet: n_max must be at least 2");
  if (n_max > impl_->smoothness) {
    throw OrderError("graph_jet: order " + std::to_string(n_max) + " exceeds smoothness " +
                     std::to_string(impl_->smoothness));
  }
  return impl_->jet(theta, n_max);
}

CurvePoint eval(const Curve& c, double theta) { return c.point(theta); }

CurvePoint antipode(const Curve& c, double theta) { return c.point(theta + kPi); }

CurvePoint project(const Curve& c, Vec2 q) {
  auto p = c.try_project(q);
  if (!p) throw AmbiguousProjection("project: point is outside the tube where the projection is unique");
  return c.point(p->theta);
}

std::vector<double> graph_jet(const Curve& c, double theta, int n_max) { return c.graph_jet(theta, n_max); }

namespace {

// First order at which the jets at theta and theta + pi differ. With the
// graph written over the oriented tangent and inward normal at each point, a
// centrally symmetric curve has identical jets at antipodes.
std::optional<int> order_from_jets(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::fabs(a[i] - b[i]) > tol) return static_cast<int>(i) + 2;
  }
  return std::nullopt;
}

}  // namespace

std::optional<int> asymmetry_order(const Curve& c, double theta, int n_max, double tol) {
  return order_from_jets(c.graph_jet(theta, n_max), c.graph_jet(theta + kPi, n_max), tol);
}

AsymmetryCertificate certify(const Curve& c, int n_max, int grid, double tol) {
  if (grid < 8) throw std::invalid_argument("certify: grid too small");
  AsymmetryCertificate cert;
  cert.grid = grid;
  cert.tol = tol;

  std::vector<double> thetas(grid);
  std::vector<Vec2> sums(grid);
  Vec2 mean;
  double scale = 0.0;
  for (int i = 0; i < grid; ++i) {
    thetas[i] = kTwoPi * i / grid;
    sums[i] = antipodal_sum(c, thetas[i]);
    mean += sums[i];
    scale = std::max(scale, norm(c.position(thetas[i])));
  }
  mean = (1.0 / grid) * mean;
  double spread = 0.0;
  for (const auto& s : sums) spread = std::max(spread, norm(s - mean));
  if (spread <= 1e-10 * std::max(1.0, scale)) {
    cert.symmetric = true;
    cert.center = 0.5 * mean;
    return cert;
  }

  int n0 = 0;
  auto consider = [&](double th) {
    auto ord = asymmetry_order(c, th, n_max, tol);
    if (!ord) throw IndeterminateCertificate("certify: jets agree up to order n_max at a point", th);
    if (*ord > n0) {
      n0 = *ord;
      cert.worst_theta = th;
    }
  };
  auto curvature_gap = [&](double th) { return c.graph_jet(th, 2)[0] - c.graph_jet(th + kPi, 2)[0]; };

  std::vector<double> gap(grid);
  for (int i = 0; i < grid; ++i) {
    consider(thetas[i]);
    gap[i] = curvature_gap(thetas[i]);
  }
  // Points where the curvatures at antipodes coincide fall between grid nodes
  // generically; locate them so the maximal order is not missed.
  for (int i = 0; i < grid; ++i) {
    double a = thetas[i];
    double b = (i + 1 < grid) ? thetas[i + 1] : kTwoPi;
    double ga = gap[i];
    double gb = gap[(i + 1) % grid];
    if (ga == 0.0 || (ga < 0.0) == (gb < 0.0)) continue;
    for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
      double m = 0.5 * (a + b);
      double gm = curvature_gap(m);
      if ((gm < 0.0) == (ga < 0.0)) {
        a = m;
        ga = gm;
      } else {
        b = m;
      }
    }
    consider(0.5 * (a + b));
    ++cert.refined_points;
  }
  cert.n0 = n0;
  return cert;
}

Vec2 antipodal_sum(const Curve& c, double theta) { return c.position(theta) + c.position(theta + kPi); }

double antipodal_sum_sublevel_length(const Curve& c, Vec2 center, double eps, int quad_points) {
  if (quad_points < 16) throw std::invalid_argument("sublevel length: too few quadrature points");
  auto g = [&](double th) { return norm(antipodal_sum(c, th) - center) - eps; };
  const int n = quad_points;
  const double h = kTwoPi / n;
  std::vector<double> gv(n + 1);
  for (int i = 0; i <= n; ++i) gv[i] = g(i * h);

  auto root = [&](double a, double b, double ga) {
    for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
      double m = 0.5 * (a + b);
      if ((g(m) <= 0.0) == (ga <= 0.0)) {
        a = m;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  };

  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = i * h;
    const double b = (i + 1) * h;
    const bool ia = gv[i] <= 0.0;
    const bool ib = gv[i + 1] <= 0.0;
    if (ia && ib) {
      total += c.arclength(b) - c.arclength(a);
    } else if (ia != ib) {
      double r = root(a, b, gv[i]);
      total += ia ? c.arclength(r) - c.arclength(a) : c.arclength(b) - c.arclength(r);
    }
  }
  // Small components can hide between nodes where g has a positive local
  // minimum on the grid.
  const double lip = 4.0 * c.max_radius_of_curvature();
  for (int i = 0; i < n; ++i) {
    const double gp = gv[(i + n - 1) % n];
    const double gn = gv[i + 1];
    if (!(gv[i] > 0.0) || gv[i] > gp || gv[i] > gn || gv[i] > lip * h) continue;
    auto [tm, gm] = detail::golden_min(g, (i - 1) * h, (i + 1) * h, 60);
    if (!(gm <= 0.0)) continue;
    // The neighbouring nodes are positive, so the component is inside the cell pair.
    double left = root((i - 1) * h, tm, gp);
    double right = root(tm, (i + 1) * h, gm);
    total += c.arclength(right) - c.arclength(left);
  }
  return total;
}

nlohmann::json certificate_to_json(const AsymmetryCertificate& cert) {
  nlohmann::json j;
  j["symmetric"] = cert.symmetric;
  j["center"] = cert.center ? nlohmann::json::array({cert.center->x, cert.center->y}) : nlohmann::json(nullptr);
  j["n0"] = cert.n0 ? nlohmann::json(*cert.n0) : nlohmann::json(nullptr);
  j["worst_theta"] = cert.worst_theta;
  j["grid"] = cert.grid;
  j["tol"] = cert.tol;
  j["refined_points"] = cert.refined_points;
  j["jet_convention"] = "graph over the oriented tangent, inward normal positive";
  return j;
}

}  // namespace fermi
