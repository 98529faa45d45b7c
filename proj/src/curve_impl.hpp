#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fermi/curve.hpp"
#include "fermi/expression.hpp"

namespace fermi::detail {

class CurveImpl {
 public:
  virtual ~CurveImpl() = default;

  virtual CurveKind kind() const = 0;
  virtual Vec2 position(double theta) const = 0;
  virtual double rho(double theta) const = 0;
  virtual double arclength(double theta) const = 0;
  virtual std::pair<double, double> shell(double theta, double lambda) const = 0;
  virtual bool constant_shell() const = 0;
  virtual double level(Vec2 q) const = 0;
  virtual std::vector<double> jet(double theta, int n_max) const = 0;
  virtual nlohmann::json to_json() const = 0;

  double theta_at_arclength(double s) const;
  std::optional<Projection> project(Vec2 q, std::optional<double> hint) const;

  int smoothness = 8;
  double margin = 0.0;
  double rho_max = 0.0;
  double length = 0.0;
  Vec2 interior;

 protected:
  // Must be called by subclasses once position/rho/arclength work.
  void finalize();

  static constexpr int kTableSize = 1024;
  std::vector<double> table_theta_;
  std::vector<Vec2> table_pos_;
  std::vector<double> table_arc_;
};

class FourierCurve final : public CurveImpl {
 public:
  FourierCurve(std::vector<FourierTerm> terms, CurveOptions opts);

  CurveKind kind() const override { return CurveKind::support_fourier; }
  Vec2 position(double theta) const override;
  double rho(double theta) const override;
  double arclength(double theta) const override;
  std::pair<double, double> shell(double, double lambda) const override { return {-lambda, lambda}; }
  bool constant_shell() const override { return true; }
  double level(Vec2 q) const override;
  std::vector<double> jet(double theta, int n_max) const override;
  nlohmann::json to_json() const override;

  // k-th derivative of the support function.
  double support(double theta, int k) const;
  void support012(double theta, double& h0, double& h1, double& h2) const;

 private:
  std::vector<FourierTerm> terms_;
  double a0_ = 0.0;
  Vec2 steiner_;
  std::vector<double> radial_arg_;  // unwrapped arg(P - steiner) at table nodes
};

class LevelSetCurve final : public CurveImpl {
 public:
  LevelSetCurve(const std::string& expr, CurveOptions opts);

  CurveKind kind() const override { return CurveKind::dispersion_level_set; }
  Vec2 position(double theta) const override;
  double rho(double theta) const override;
  double arclength(double theta) const override;
  std::pair<double, double> shell(double theta, double lambda) const override;
  bool constant_shell() const override { return false; }
  double level(Vec2 q) const override { return expr_.eval(q.x, q.y); }
  std::vector<double> jet(double theta, int n_max) const override;
  nlohmann::json to_json() const override;

 private:
  Hess2 hess(Vec2 q) const { return expr_.eval(Hess2::var_x(q.x), Hess2::var_y(q.y)); }
  double shell_offset(Vec2 p, Vec2 u, double target, double t0) const;

  Expression expr_;
  std::vector<double> ray_theta_;  // unwrapped normal angles at ray hits
  std::vector<Vec2> ray_pos_;
  std::vector<double> arc_nodes_;  // cumulative arclength at theta = 2 pi i / kArcPanels
  static constexpr int kArcPanels = 512;
};

}  // namespace fermi::detail
