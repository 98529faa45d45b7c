#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fermi/curve.hpp"
#include "fermi/geometry.hpp"
#include "fermi/sectorization.hpp"

namespace fermi {

// Rect mode replaces every region by its bounding box in one frame and sums the
// boxes; it can only over-report. Sampled mode looks for an explicit witness
// built from grid points of the regions; it can only under-report.
enum class CompatMode { rect, sampled };

struct ModeSpec {
  CompatMode kind = CompatMode::rect;
  int samples_per_sector = 4;  // normal lines per sector in sampled mode (3 levels across each)
  bool rect_prefilter = true;  // skip the witness search when the box test already fails

  static ModeSpec rect() { return {}; }
  static ModeSpec sampled(int along = 4) { return {CompatMode::sampled, along, true}; }
};

std::string mode_name(const ModeSpec& m);

struct Target {
  enum class Kind { sector, translated_sector, point, zero };
  Kind kind = Kind::zero;
  Sector sector;
  Vec2 point;

  static Target of_sector(const Sector& s) { return {Kind::sector, s, {}}; }
  static Target translated(Vec2 q, const Sector& s) { return {Kind::translated_sector, s, q}; }
  static Target at_point(Vec2 q) { return {Kind::point, {}, q}; }
  static Target zero() { return {}; }
  bool is_region() const { return kind == Kind::sector || kind == Kind::translated_sector; }
};

struct CompatibilityQuery {
  std::vector<int> signs;
  std::vector<Sector> free_sectors;
  std::vector<Vec2> fixed_momenta;
  Target target;
  ModeSpec mode;
  bool extended = false;  // use the extended sectors of the free legs
};

// Whether sum_i signs[i] x_i + sum fixed = y is solvable with x_i in the
// sectors (shell half width lambda) and y in the target.
bool compatible(const CompatibilityQuery& q, const Curve& c, double lambda);

// Signs of the 2n-1 leg pattern: n plus signs followed by n-1 minus signs.
std::vector<int> mom_signs(int legs);

struct MomOptions {
  ModeSpec mode;
  // One arclength interval [lo, hi] per leg; a leg only uses sector centres
  // inside its interval (taken modulo the curve length).
  std::optional<std::vector<std::pair<double, double>>> windows;
  bool keep_tuples = false;
  int workers = 1;
};

struct MomResult {
  std::uint64_t count = 0;
  std::optional<std::vector<std::vector<int>>> tuples;
  ModeSpec mode;
  double elapsed_seconds = 0.0;
  std::uint64_t pruned_pairs = 0;
};

nlohmann::json mom_result_to_json(const MomResult& r, const Sectorization& sig);

// Number of leg tuples of sector centres compatible with the target. The
// target is s(p) for Mom (a sector target) or a point q for the tilde variant.
MomResult mom_count(const Sectorization& sig, int legs, const Target& target, const MomOptions& opts = {});
// Plain loop over every tuple, calling the same predicate; for cross-checks.
MomResult mom_count_dense(const Sectorization& sig, int legs, const Target& target, const MomOptions& opts = {});

struct FixedMomentum {
  Vec2 k;
  int sign = 1;
};

struct FixedSector {
  int index = 0;  // sector of sig
  int sign = 1;
};

struct FreeLeg {
  int sign = 1;
  int window = -1;  // sector of the window sectorization, or -1 for none
};

// Assignments of sectors of sig to the free legs such that every windowed leg's
// extended sector overlaps its window's extended sector and the whole
// configuration, with every sector extended, is compatible with total
// momentum zero (rect mode).
std::vector<std::vector<int>> cons_enumerate(const std::vector<FixedMomentum>& fixed,
                                             const std::vector<FixedSector>& fixed_sectors,
                                             const std::vector<FreeLeg>& free, const Sectorization& sig,
                                             const Sectorization* window_sig = nullptr);

struct PairTarget {
  enum class Kind { sector_pair, momentum_plus_sector, momentum_pair };
  Kind kind = Kind::momentum_pair;
  Sector s1;
  Sector s2;
  Vec2 k1;
  Vec2 k2;

  static PairTarget sector_pair(const Sector& a, const Sector& b) { return {Kind::sector_pair, a, b, {}, {}}; }
  static PairTarget momentum_plus_sector(Vec2 k, const Sector& s) {
    return {Kind::momentum_plus_sector, s, {}, k, {}};
  }
  static PairTarget momentum_pair(Vec2 a, Vec2 b) { return {Kind::momentum_pair, {}, {}, a, b}; }
};

// Ordered pairs (s1, s2) of sectors of sig whose extended sector sum meets the
// target set.
std::uint64_t pair_sum_count(const Sectorization& sig, const PairTarget& target, int workers = 1);
std::uint64_t pair_sum_count_dense(const Sectorization& sig, const PairTarget& target);

struct SecantResult {
  // Solutions (theta1, theta2) of e1 P(theta1) + e2 P(theta2) = p.
  std::vector<std::pair<double, double>> solutions;
  // Solutions up to exchanging the two points when the signs agree.
  int count = 0;
  int ordered_count = 0;
  bool tangency = false;
  // With a tangency warning: counts at p shifted by +/- a small step.
  std::optional<int> count_below;
  std::optional<int> count_above;
};

SecantResult secant_count(const Curve& c, Vec2 p, std::array<int, 2> signs, int scan = 20000);

struct LocalizationReport {
  std::vector<std::vector<int>> violations;
  std::vector<std::vector<int>> hypothesis_failed;
  std::size_t checked = 0;
};

// For tuples whose sector centres all lie within omega of k or a(k), with k the
// first leg's centre, checks min(|p - k|, |p - a(k)|) <= C n omega.
LocalizationReport localization_check(const std::vector<std::vector<int>>& tuples, const Sectorization& sig,
                                      Vec2 p, double omega, double C = 20.0);

// Pairs (k1, k2) of sector centres with min(d(k1, k2), d(a(k1), k2)) >= omega1,
// both within omega2 of p or a(p) (arclength distance), and e1 k1 + e2 k2 in the
// rectangle centred at `center` with side a along the normal at p and side b
// along its tangent.
std::uint64_t windowed_pair_count(const Sectorization& sig, double p_theta, std::array<int, 2> signs,
                                  double omega1, double omega2, Vec2 center, double a, double b);

struct WindowSpec {
  std::vector<std::pair<double, double>> arcs;  // arclength intervals of length delta
  double omega = 0.0;                           // three times the max-min separation
  bool valid = false;                           // separation exceeds max(delta, 4 ell)
};

// Separation omega of a family of arclength windows: 3 max_{i != j}
// min(dist(I_i, I_j), dist(I_i, a(I_j))).
WindowSpec window_separation(const Curve& c, const std::vector<std::pair<double, double>>& arcs, double ell);

}  // namespace fermi
