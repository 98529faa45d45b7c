#include "fermi/taylor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fermi {

namespace {

int common_order(const Taylor& a, const Taylor& b) {
  if (a.order() != b.order()) throw std::invalid_argument("Taylor: order mismatch");
  return a.order();
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

Taylor::Taylor(int order, double constant) : c_(static_cast<std::size_t>(order) + 1, 0.0) {
  if (order < 0) throw std::invalid_argument("Taylor: negative order");
  c_[0] = constant;
}

Taylor Taylor::variable(int order, double value) {
  Taylor t(order, value);
  if (order >= 1) t.c_[1] = 1.0;
  return t;
}

Taylor Taylor::from_coeffs(std::vector<double> coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("Taylor: empty coefficient list");
  Taylor t;
  t.c_ = std::move(coeffs);
  return t;
}

double Taylor::derivative_at_zero(int k) const { return c_[static_cast<std::size_t>(k)] * factorial(k); }

Taylor Taylor::derivative() const {
  Taylor d(order(), 0.0);
  for (int k = 1; k <= order(); ++k) d.c_[k - 1] = k * c_[k];
  d.c_[order()] = 0.0;  // unknown beyond truncation; callers keep one spare order
  return d;
}

Taylor Taylor::compose(const Taylor& g) const {
  if (g[0] != 0.0) throw std::invalid_argument("Taylor::compose: inner series must vanish at 0");
  const int n = common_order(*this, g);
  Taylor r(n, c_[n]);
  for (int k = n - 1; k >= 0; --k) {
    r = r * g;
    r.c_[0] += c_[k];
  }
  return r;
}

Taylor& Taylor::operator+=(const Taylor& o) {
  common_order(*this, o);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Taylor& Taylor::operator-=(const Taylor& o) {
  common_order(*this, o);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Taylor& Taylor::operator*=(const Taylor& o) {
  *this = *this * o;
  return *this;
}

Taylor& Taylor::operator/=(const Taylor& o) {
  *this = *this / o;
  return *this;
}

Taylor& Taylor::operator+=(double s) {
  c_[0] += s;
  return *this;
}

Taylor& Taylor::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }

Taylor operator*(const Taylor& a, const Taylor& b) {
  const int n = common_order(a, b);
  Taylor r(n, 0.0);
  for (int i = 0; i <= n; ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; i + j <= n; ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

Taylor operator/(const Taylor& a, const Taylor& b) {
  const int n = common_order(a, b);
  if (b[0] == 0.0) throw std::domain_error("Taylor: division by series with zero constant term");
  Taylor q(n, 0.0);
  for (int k = 0; k <= n; ++k) {
    double s = a[k];
    for (int j = 0; j < k; ++j) s -= q[j] * b[k - j];
    q[k] = s / b[0];
  }
  return q;
}

Taylor operator-(Taylor a) { return a *= -1.0; }
Taylor operator+(Taylor a, double s) { return a += s; }
Taylor operator+(double s, Taylor a) { return a += s; }
Taylor operator-(Taylor a, double s) { return a += -s; }
Taylor operator-(double s, const Taylor& a) { return -a + s; }
Taylor operator*(Taylor a, double s) { return a *= s; }
Taylor operator*(double s, Taylor a) { return a *= s; }
Taylor operator/(Taylor a, double s) { return a *= 1.0 / s; }
Taylor operator/(double s, const Taylor& a) { return Taylor(a.order(), s) / a; }

Taylor exp(const Taylor& a) {
  const int n = a.order();
  Taylor e(n, std::exp(a[0]));
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * a[j] * e[k - j];
    e[k] = s / k;
  }
  return e;
}

Taylor log(const Taylor& a) {
  const int n = a.order();
  if (a[0] <= 0.0) throw std::domain_error("Taylor: log of non-positive series");
  Taylor l(n, std::log(a[0]));
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int j = 1; j < k; ++j) s += j * l[j] * a[k - j];
    l[k] = (a[k] - s / k) / a[0];
  }
  return l;
}

Taylor sqrt(const Taylor& a) {
  const int n = a.order();
  if (a[0] <= 0.0) throw std::domain_error("Taylor: sqrt of non-positive series");
  Taylor r(n, std::sqrt(a[0]));
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int j = 1; j < k; ++j) s += r[j] * r[k - j];
    r[k] = (a[k] - s) / (2.0 * r[0]);
  }
  return r;
}

namespace {

void sin_cos(const Taylor& a, Taylor& s, Taylor& c) {
  const int n = a.order();
  s = Taylor(n, std::sin(a[0]));
  c = Taylor(n, std::cos(a[0]));
  for (int k = 1; k <= n; ++k) {
    double ss = 0.0;
    double cc = 0.0;
    for (int j = 1; j <= k; ++j) {
      ss += j * a[j] * c[k - j];
      cc -= j * a[j] * s[k - j];
    }
    s[k] = ss / k;
    c[k] = cc / k;
  }
}

}  // namespace

Taylor sin(const Taylor& a) {
  Taylor s, c;
  sin_cos(a, s, c);
  return s;
}

Taylor cos(const Taylor& a) {
  Taylor s, c;
  sin_cos(a, s, c);
  return c;
}

Taylor pow(const Taylor& a, const Taylor& p) { return exp(p * log(a)); }
Taylor pow(const Taylor& a, double p) { return exp(p * log(a)); }

Hess2 operator+(const Hess2& a, const Hess2& b) {
  Hess2 r;
  r.v = a.v + b.v;
  r.gx = a.gx + b.gx;
  r.gy = a.gy + b.gy;
  r.hxx = a.hxx + b.hxx;
  r.hxy = a.hxy + b.hxy;
  r.hyy = a.hyy + b.hyy;
  return r;
}

Hess2 operator-(const Hess2& a) {
  Hess2 r;
  r.v = -a.v;
  r.gx = -a.gx;
  r.gy = -a.gy;
  r.hxx = -a.hxx;
  r.hxy = -a.hxy;
  r.hyy = -a.hyy;
  return r;
}

Hess2 operator-(const Hess2& a, const Hess2& b) { return a + (-b); }

Hess2 operator*(const Hess2& a, const Hess2& b) {
  Hess2 r;
  r.v = a.v * b.v;
  r.gx = a.gx * b.v + a.v * b.gx;
  r.gy = a.gy * b.v + a.v * b.gy;
  r.hxx = a.hxx * b.v + 2.0 * a.gx * b.gx + a.v * b.hxx;
  r.hxy = a.hxy * b.v + a.gx * b.gy + a.gy * b.gx + a.v * b.hxy;
  r.hyy = a.hyy * b.v + 2.0 * a.gy * b.gy + a.v * b.hyy;
  return r;
}

namespace {

// f(a) given f, f', f'' at a.v.
Hess2 chain(const Hess2& a, double f0, double f1, double f2) {
  Hess2 r;
  r.v = f0;
  r.gx = f1 * a.gx;
  r.gy = f1 * a.gy;
  r.hxx = f2 * a.gx * a.gx + f1 * a.hxx;
  r.hxy = f2 * a.gx * a.gy + f1 * a.hxy;
  r.hyy = f2 * a.gy * a.gy + f1 * a.hyy;
  return r;
}

}  // namespace

Hess2 operator/(const Hess2& a, const Hess2& b) {
  const double inv = 1.0 / b.v;
  return a * chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

Hess2 exp(const Hess2& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}

Hess2 log(const Hess2& a) { return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }

Hess2 sqrt(const Hess2& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

Hess2 sin(const Hess2& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
Hess2 cos(const Hess2& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
Hess2 pow(const Hess2& a, const Hess2& p) { return exp(p * log(a)); }

}  // namespace fermi
