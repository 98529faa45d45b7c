#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fermi/geometry.hpp"

namespace fermi {

enum class CurveKind { support_fourier, dispersion_level_set };

// Term m of a support function h(theta) = sum a_m cos(m theta) + b_m sin(m theta).
struct FourierTerm {
  int m = 0;
  double cos_amp = 0.0;
  double sin_amp = 0.0;
};

struct CurveOptions {
  int smoothness = 8;  // differentiability budget r; jets above r are refused
};

struct CurvePoint {
  double theta = 0.0;  // outward normal angle
  Vec2 position;
  Vec2 tangent;         // counter-clockwise unit tangent
  Vec2 inward_normal;
  double curvature = 0.0;
  double arclength = 0.0;  // measured from theta = 0, unwrapped
};

struct Projection {
  double theta = 0.0;
  double offset = 0.0;  // signed distance along the outward normal
};

namespace detail {
class CurveImpl;
}

// Immutable strictly convex closed curve, parametrized by the angle of the
// outward normal. Copies share the underlying representation.
class Curve {
 public:
  static Curve from_fourier(std::vector<FourierTerm> terms, CurveOptions opts = {});
  static Curve from_dispersion(const std::string& expr, CurveOptions opts = {});
  static Curve circle(double radius = 1.0);
  // Level set k1^2/a^2 + k2^2/b^2 - 1 = 0.
  static Curve ellipse(double a, double b);
  static Curve from_json(const nlohmann::json& j);

  nlohmann::json to_json() const;
  // Canonical text used to decide whether two objects refer to the same curve.
  std::string fingerprint() const;
  bool same_as(const Curve& other) const { return fingerprint() == other.fingerprint(); }

  CurveKind kind() const;
  int smoothness() const;
  // Certified lower bound on the radius of curvature.
  double convexity_margin() const;
  double max_radius_of_curvature() const;
  double length() const;
  Vec2 interior_point() const;

  Vec2 position(double theta) const;
  double radius_of_curvature(double theta) const;
  CurvePoint point(double theta) const;
  double arclength(double theta) const;
  double theta_at_arclength(double s) const;
  // Normal offsets (t_in, t_out) of the shell boundary at theta: t = -/+ Lambda
  // for support curves, e = -/+ Lambda along the normal line for level sets.
  std::pair<double, double> shell_offsets(double theta, double lambda) const;
  bool constant_shell() const;
  // Continuous function that is negative inside, zero on, positive outside.
  double level(Vec2 q) const;
  // Nearest point projection; empty when q is not in the uniqueness tube.
  std::optional<Projection> try_project(Vec2 q, std::optional<double> theta_hint = std::nullopt) const;
  // phi^(2)(0) .. phi^(n_max)(0) of the graph of the curve over its tangent at theta.
  std::vector<double> graph_jet(double theta, int n_max) const;

 private:
  explicit Curve(std::shared_ptr<const detail::CurveImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const detail::CurveImpl> impl_;
};

struct AsymmetryCertificate {
  bool symmetric = false;
  std::optional<Vec2> center;
  std::optional<int> n0;
  double worst_theta = 0.0;
  int grid = 0;
  double tol = 0.0;
  int refined_points = 0;  // zeros of jet differences added to the grid
};

CurvePoint eval(const Curve& c, double theta);
CurvePoint antipode(const Curve& c, double theta);
CurvePoint project(const Curve& c, Vec2 q);
std::vector<double> graph_jet(const Curve& c, double theta, int n_max);
std::optional<int> asymmetry_order(const Curve& c, double theta, int n_max, double tol = 1e-6);
AsymmetryCertificate certify(const Curve& c, int n_max, int grid, double tol = 1e-6);
Vec2 antipodal_sum(const Curve& c, double theta);
double antipodal_sum_sublevel_length(const Curve& c, Vec2 center, double eps, int quad_points = 4096);

nlohmann::json certificate_to_json(const AsymmetryCertificate& cert);

}  // namespace fermi
