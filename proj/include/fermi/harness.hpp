#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fermi/curve.hpp"
#include "fermi/momentum.hpp"
#include "fermi/sectorization.hpp"

namespace fermi {

inline constexpr int kReportSchemaVersion = 1;

enum class Experiment {
  mom3,
  mom3_tilde,
  mom_windowed,
  pairs,
  norms_1v3,
  norms_channel,
  resect_factors,
  antipodal_sublevel
};

std::string experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& s);  // ParseError on unknown names

// Per-experiment knobs. Unset angles default to the certificate's worst angle.
struct ScanParams {
  std::optional<double> p_theta;  // target angle for mom3 / mom3_tilde / pairs / norms_channel
  int legs = 3;                   // mom_windowed
  double delta = 0.3;             // mom_windowed window length
  int kernels = 100;              // norms_1v3 draws per scale
  int half_width = 2;             // norms_channel window around the Cooper pair
  int resect_ratio_log3 = 1;      // resect_factors: coarse scale is j minus this
  int resect_entries = 40;        // resect_factors: entries per random kernel
  int resect_kernels = 10;        // resect_factors: draws per scale
  int n0 = 3;                     // exponent used on symmetric curves
  std::pair<int, int> eps_range{4, 12};  // antipodal_sublevel: eps = 2^-k
  bool dense_check = true;        // re-run the coarsest scale with the dense enumerator
};

struct ScanConfig {
  Curve curve = Curve::circle();
  double M = 3.0;
  int j_min = 4;
  int j_max = 8;
  EllRule ell_rule = EllRule::aleph(2.0 / 3.0);
  std::vector<double> ell_per_j;     // explicit lengths, one per j, overrides ell_rule
  std::vector<double> lambda_per_j;  // explicit shell widths, one per j
  Experiment experiment = Experiment::mom3;
  ModeSpec mode;
  std::uint64_t seed = 1;
  int workers = 1;
  double budget_seconds = 300.0;
  ScanParams params;

  // Reads the scan JSON; "curve_file" is resolved against base_dir.
  static ScanConfig from_json(const nlohmann::json& j, const std::string& base_dir = ".");
};

struct ScanRow {
  int j = 0;
  double M = 0.0;
  double ell = 0.0;
  double lambda = 0.0;
  double value = 0.0;
  double bound = 0.0;
  std::optional<double> ratio;  // empty for 0 / 0
};

struct ScalingReport {
  std::string experiment;
  std::vector<ScanRow> rows;
  std::optional<double> fitted_slope;  // slope of log(value) against log(1/ell)
  std::optional<double> slope_stderr;
  bool complete = true;
  std::optional<bool> dense_match;    // coarsest scale against the dense enumerator
  std::optional<bool> bracket_ok;     // sampled counts never above rect counts
  std::optional<int> n0;
  std::optional<double> worst_theta;
  bool symmetric_curve = false;
  std::vector<std::string> notes;
};

ScalingReport scaling_scan(const ScanConfig& cfg);

// Least-squares slope of log(value) against log(1/ell) over rows with
// positive values, with its standard error. InsufficientData below 3 rows.
std::pair<double, double> fit_exponent(const std::vector<ScanRow>& rows);
std::pair<double, double> fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct Thresholds {
  double band = 4.0;
  std::optional<double> slope;
  double tol = 0.1;
};

struct Verdict {
  enum class Status { pass, fail, incomplete };
  Status status = Status::pass;
  double band = 0.0;  // max ratio / min ratio
  std::optional<int> offending_j;
  std::string message;
  int exit_code() const { return status == Status::pass ? 0 : status == Status::fail ? 1 : 2; }
};

Verdict verify_bounds(const ScalingReport& r, const Thresholds& t = {});

// CSV with header "version,experiment,j,M,ell,Lambda,value,bound,ratio"; a
// trailing "#incomplete" line marks a partial report.
std::string report_to_csv(const ScalingReport& r);
ScalingReport report_from_csv(const std::string& text);
nlohmann::json report_to_json(const ScalingReport& r);

// Measure of {x in [a, b] : y_lo <= f(x) <= y_hi} for the polynomial with
// coefficients c[0] + c[1] x + ..., by isolating the roots of f - y_lo and
// f - y_hi.
double polynomial_sublevel_measure(const std::vector<double>& coeffs, double a, double b, double y_lo, double y_hi);

struct SublevelReport {
  int n = 0;
  int trials = 0;
  int violations = 0;
  double max_ratio = 0.0;  // largest measure / bound seen
};

// Random degree-n polynomials with |f^(n)| >= b on random intervals against
// random windows of length 2 eps: counts violations of the 2^(n+1) (eps/b)^(1/n)
// bound.
SublevelReport sublevel_lemma_test(int n, int trials, std::uint64_t seed);

}  // namespace fermi
