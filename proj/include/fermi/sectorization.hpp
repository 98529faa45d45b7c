#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fermi/curve.hpp"
#include "fermi/geometry.hpp"

namespace fermi {

// Two dimensional region {P(theta) + t u(theta) : theta in [theta_lo, theta_hi],
// t between the shell offsets for lambda}.
struct ArcRegion {
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  double lambda = 0.0;
};

struct Sector {
  int index = -1;
  double center_theta = 0.0;
  Vec2 center_point;
  double center_arclength = 0.0;
  double arc_halfwidth = 0.0;
  double extension = 0.0;
  double shell_halfwidth = 0.0;
  // Plain and extended arcs, in unwrapped normal angle and in arclength.
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  double ext_theta_lo = 0.0;
  double ext_theta_hi = 0.0;
  double arc_lo = 0.0;
  double arc_hi = 0.0;

  ArcRegion region() const { return {theta_lo, theta_hi, shell_halfwidth}; }
  ArcRegion region(double lambda) const { return {theta_lo, theta_hi, lambda}; }
  ArcRegion extended_region() const { return {ext_theta_lo, ext_theta_hi, shell_halfwidth}; }
  ArcRegion extended_region(double lambda) const { return {ext_theta_lo, ext_theta_hi, lambda}; }
  double ext_arc_lo() const { return arc_lo - extension; }
  double ext_arc_hi() const { return arc_hi + extension; }
};

struct EllRule {
  enum class Kind { explicit_length, aleph };
  Kind kind = Kind::aleph;
  double value = 2.0 / 3.0;

  static EllRule explicit_length(double ell) { return {Kind::explicit_length, ell}; }
  static EllRule aleph(double a) { return {Kind::aleph, a}; }
};

struct BuildOptions {
  std::optional<double> lambda;       // default sqrt(2) / M^(j-1)
  double extension_fraction = 1.0 / 64.0;
  std::size_t max_sectors = std::size_t{1} << 20;
  bool strict = false;                // enforce 1/M^(j-3/2) <= ell <= 1/M^((j-1)/2)
};

class Sectorization {
 public:
  static Sectorization build(const Curve& curve, double M, int j, EllRule rule, BuildOptions opts = {});
  static Sectorization from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  const Curve& curve() const { return curve_; }
  double base() const { return M_; }
  int scale() const { return j_; }
  EllRule ell_rule() const { return rule_; }
  // Actual sector length L / N, and the length that was requested.
  double ell() const { return ell_; }
  double ell_nominal() const { return ell_nominal_; }
  double lambda() const { return lambda_; }
  double extension() const { return extension_; }
  const BuildOptions& options() const { return opts_; }
  std::size_t size() const { return sectors_.size(); }
  const Sector& operator[](std::size_t i) const { return sectors_[i]; }
  const std::vector<Sector>& sectors() const { return sectors_; }
  std::vector<double> center_thetas() const;

  // Index of the sector whose plain arc contains the point at normal angle theta.
  int sector_containing(double theta) const;
  // A sector of this sectorization's length and width centred at theta; it is
  // not one of the partition's sectors (index -1).
  Sector sector_at(double theta) const;

 private:
  Sector make_sector(int index, double arc_lo, double arc_hi) const;

  Curve curve_ = Curve::circle();
  double M_ = 3.0;
  int j_ = 2;
  EllRule rule_;
  BuildOptions opts_;
  double ell_ = 0.0;
  double ell_nominal_ = 0.0;
  double lambda_ = 0.0;
  double extension_ = 0.0;
  std::vector<Sector> sectors_;
};

// Projections of a region onto the axes of a frame; exact extrema of the
// region's boundary.
FrameBox region_box(const Curve& c, const ArcRegion& r, const Frame& f);
// Extent of x . v over the region.
Interval region_extent(const Curve& c, const ArcRegion& r, Vec2 v);
bool region_contains(const Curve& c, const ArcRegion& r, Vec2 q, double slack = 1e-12);
// Radius about `center` of a disk containing the region (arclength plus shell).
double region_radius_bound(const Curve& c, const ArcRegion& r, Vec2 center);
// Points of the region on a grid of `along` normal lines and `across` levels
// between the shell boundaries (boundaries included).
std::vector<Vec2> region_samples(const Curve& c, const ArcRegion& r, int along, int across = 3);

struct RectEnclosure {
  Vec2 center;
  Vec2 axis_n;
  Vec2 axis_t;
  double halfwidth_n = 0.0;
  double halfwidth_t = 0.0;
  bool within_window = true;  // sector centre within omega of ref_theta or its antipode
};

RectEnclosure region_rectangle(const Curve& c, const Sector& s, double ref_theta, double omega);
std::vector<Vec2> region_polygon(const Curve& c, const Sector& s, int m);

struct SeparationResult {
  bool separated = true;
  std::optional<std::pair<std::size_t, std::size_t>> violating_pair;
};

SeparationResult eps_separated_check(const Curve& c, const std::vector<double>& thetas, double eps);

// Length of the intersection of two arcs on a circle of circumference `period`.
double arc_overlap(double a_lo, double a_hi, double b_lo, double b_hi, double period);

// For each sector s' of sig_prime, the sectors of sig whose extended arcs meet
// the extended arc of s' in a set of positive length.
std::vector<std::vector<int>> overlap_map(const Sectorization& sig, const Sectorization& sig_prime);

}  // namespace fermi
