#pragma once

#include <cstddef>
#include <vector>

namespace fermi {

// Truncated power series sum_k c[k] t^k, k = 0..order. Arithmetic is exact up
// to floating point rounding, which is what makes high order curve jets usable.
class Taylor {
 public:
  Taylor() = default;
  explicit Taylor(int order, double constant = 0.0);
  static Taylor variable(int order, double value = 0.0);
  static Taylor from_coeffs(std::vector<double> coeffs);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](std::size_t k) const { return c_[k]; }
  double& operator[](std::size_t k) { return c_[k]; }
  const std::vector<double>& coeffs() const { return c_; }

  // k-th derivative at the expansion point.
  double derivative_at_zero(int k) const;
  Taylor derivative() const;
  // f(g(t)) for g(0) == 0.
  Taylor compose(const Taylor& g) const;

  Taylor& operator+=(const Taylor& o);
  Taylor& operator-=(const Taylor& o);
  Taylor& operator*=(const Taylor& o);
  Taylor& operator/=(const Taylor& o);
  Taylor& operator+=(double s);
  Taylor& operator*=(double s);

 private:
  std::vector<double> c_;
};

Taylor operator+(Taylor a, const Taylor& b);
Taylor operator-(Taylor a, const Taylor& b);
Taylor operator*(const Taylor& a, const Taylor& b);
Taylor operator/(const Taylor& a, const Taylor& b);
Taylor operator-(Taylor a);
Taylor operator+(Taylor a, double s);
Taylor operator+(double s, Taylor a);
Taylor operator-(Taylor a, double s);
Taylor operator-(double s, const Taylor& a);
Taylor operator*(Taylor a, double s);
Taylor operator*(double s, Taylor a);
Taylor operator/(Taylor a, double s);
Taylor operator/(double s, const Taylor& a);

Taylor exp(const Taylor& a);
Taylor log(const Taylor& a);
Taylor sqrt(const Taylor& a);
Taylor sin(const Taylor& a);
Taylor cos(const Taylor& a);
Taylor pow(const Taylor& a, const Taylor& p);
Taylor pow(const Taylor& a, double p);

// Value, gradient and Hessian of a function of two variables, propagated
// through arithmetic by the chain rule.
struct Hess2 {
  double v = 0.0;
  double gx = 0.0;
  double gy = 0.0;
  double hxx = 0.0;
  double hxy = 0.0;
  double hyy = 0.0;

  Hess2() = default;
  Hess2(double value) : v(value) {}  // NOLINT: constants promote implicitly
  static Hess2 var_x(double x) { Hess2 h(x); h.gx = 1.0; return h; }
  static Hess2 var_y(double y) { Hess2 h(y); h.gy = 1.0; return h; }
};

Hess2 operator+(const Hess2& a, const Hess2& b);
Hess2 operator-(const Hess2& a, const Hess2& b);
Hess2 operator-(const Hess2& a);
Hess2 operator*(const Hess2& a, const Hess2& b);
Hess2 operator/(const Hess2& a, const Hess2& b);
Hess2 exp(const Hess2& a);
Hess2 log(const Hess2& a);
Hess2 sqrt(const Hess2& a);
Hess2 sin(const Hess2& a);
Hess2 cos(const Hess2& a);
Hess2 pow(const Hess2& a, const Hess2& p);

// A constant of the same scalar type as `like` (series keep their order).
inline double constant_like(double, double v) { return v; }
inline Taylor constant_like(const Taylor& like, double v) { return Taylor(like.order(), v); }
inline Hess2 constant_like(const Hess2&, double v) { return Hess2(v); }

}  // namespace fermi
