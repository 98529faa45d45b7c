#include "fermi/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fermi/errors.hpp"
#include "fermi/norms.hpp"

namespace fermi {

namespace {

using Clock = std::chrono::steady_clock;

const std::vector<std::pair<Experiment, std::string>>& experiment_names() {
  static const std::vector<std::pair<Experiment, std::string>> names = {
      {Experiment::mom3, "mom3"},
      {Experiment::mom3_tilde, "mom3_tilde"},
      {Experiment::mom_windowed, "mom_windowed"},
      {Experiment::pairs, "pairs"},
      {Experiment::norms_1v3, "norms_1v3"},
      {Experiment::norms_channel, "norms_channel"},
      {Experiment::resect_factors, "resect_factors"},
      {Experiment::antipodal_sublevel, "antipodal_sublevel"},
  };
  return names;
}

// (1/ell)(1 + (Lambda/ell) log(Lambda/ell^2)), the log clamped at zero.
double mom3_bound(double ell, double lambda) {
  const double lg = std::max(0.0, std::log(lambda / (ell * ell)));
  return (1.0 + (lambda / ell) * lg) / ell;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t row_seed(std::uint64_t seed, int j) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(j)};
  std::uint32_t w[2];
  seq.generate(w, w + 2);
  return (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
}

struct Context {
  const ScanConfig& cfg;
  std::optional<AsymmetryCertificate> cert;
  double theta = 0.7;
  int n0 = 3;
  ScalingReport& report;
};

Sectorization build_sig(const ScanConfig& cfg, int j) {
  BuildOptions o;
  const std::size_t idx = static_cast<std::size_t>(j - cfg.j_min);
  if (!cfg.lambda_per_j.empty()) o.lambda = cfg.lambda_per_j[idx];
  const EllRule rule = cfg.ell_per_j.empty() ? cfg.ell_rule : EllRule::explicit_length(cfg.ell_per_j[idx]);
  return Sectorization::build(cfg.curve, cfg.M, j, rule, o);
}

MomOptions mom_options(const ScanConfig& cfg) {
  MomOptions o;
  o.mode = cfg.mode;
  o.workers = cfg.workers;
  return o;
}

// Counts with the configured mode; in sampled mode the rect count is also
// taken and must not be smaller.
double mom_value(Context& ctx, const Sectorization& sig, int legs, const Target& t, const MomOptions& o,
                 bool dense) {
  const double v = static_cast<double>(mom_count(sig, legs, t, o).count);
  if (o.mode.kind == CompatMode::sampled) {
    MomOptions r = o;
    r.mode = ModeSpec::rect();
    const bool ok = static_cast<double>(mom_count(sig, legs, t, r).count) >= v;
    ctx.report.bracket_ok = ctx.report.bracket_ok.value_or(true) && ok;
  }
  if (dense) {
    MomOptions d = o;
    d.workers = 1;
    ctx.report.dense_match = static_cast<double>(mom_count_dense(sig, legs, t, d).count) == v;
  }
  return v;
}

ScanRow run_row(Context& ctx, const Sectorization& sig, int j, bool coarsest) {
  const ScanConfig& cfg = ctx.cfg;
  const ScanParams& prm = cfg.params;
  const Curve& c = cfg.curve;
  const double ell = sig.ell();
  const double lam = sig.lambda();
  const bool dense = coarsest && prm.dense_check;
  ScanRow row;
  row.j = j;
  row.M = cfg.M;
  row.ell = ell;
  row.lambda = lam;

  switch (cfg.experiment) {
    case Experiment::mom3: {
      row.value = mom_value(ctx, sig, 3, Target::of_sector(sig.sector_at(ctx.theta)), mom_options(cfg), dense);
      row.bound = mom3_bound(ell, lam);
      break;
    }
    case Experiment::mom3_tilde: {
      const Vec2 q = c.position(ctx.theta);
      row.value = mom_value(ctx, sig, 3, Target::at_point(q), mom_options(cfg), dense);
      row.bound = mom3_bound(ell, lam);
      break;
    }
    case Experiment::mom_windowed: {
      const int legs = prm.legs;
      const int n = (legs + 1) / 2;
      // Leg 0 sits at the target; every other plus leg is paired with a minus
      // leg in a window a quarter turn away.
      std::vector<std::pair<double, double>> arcs;
      for (int i = 0; i < legs; ++i) {
        const double th = i == 0 ? ctx.theta : ctx.theta + 0.5 * kPi;
        const double s = c.arclength(th);
        arcs.push_back({s - 0.5 * prm.delta, s + 0.5 * prm.delta});
      }
      const WindowSpec ws = window_separation(c, arcs, ell);
      if (!ws.valid) ctx.report.notes.push_back("j=" + std::to_string(j) + ": windows not separated enough");
      MomOptions o = mom_options(cfg);
      o.windows = arcs;
      row.value = mom_value(ctx, sig, legs, Target::of_sector(sig.sector_at(ctx.theta)), o, dense);
      row.bound = n * n * std::pow(prm.delta / ell + 1.0, 2 * n - 3) * (1.0 + lam / (ell * ws.omega));
      break;
    }
    case Experiment::pairs: {
      const auto target = PairTarget::momentum_pair(c.position(ctx.theta), c.position(ctx.theta + kPi));
      row.value = static_cast<double>(pair_sum_count(sig, target, cfg.workers));
      if (dense) ctx.report.dense_match = static_cast<double>(pair_sum_count_dense(sig, target)) == row.value;
      row.bound = ctx.report.symmetric_curve ? 1.0 / ell : std::pow(ell, 1.0 / ctx.n0) / ell;
      break;
    }
    case Experiment::norms_1v3: {
      std::mt19937_64 rng(row_seed(cfg.seed, j));
      const KernelMask mask = KernelMask::momentum_conserving({1, 1, -1, -1});
      double best = 0.0;
      for (int k = 0; k < prm.kernels; ++k) {
        best = std::max(best, compare_1_vs_3(random_masked_kernel(sig, mask, rng)).ratio);
      }
      row.value = best;
      row.bound = 1.0 / ell;
      break;
    }
    case Experiment::norms_channel: {
      const SectorKernel k = pp_window_kernel(sig, ctx.theta, prm.half_width);
      const double factor = std::pow(ell, 1.0 / ctx.n0) / ell;
      double ratio = 0.0;
      try {
        ratio = channel_vs_3_check(k, ctx.n0, ctx.cert).ratio;
      } catch (const SymmetryError& e) {
        ratio = e.ratio();
      }
      row.value = ratio * factor;
      row.bound = factor;
      break;
    }
    case Experiment::resect_factors: {
      const int jc = j - prm.resect_ratio_log3;
      BuildOptions o;
      const Sectorization coarse = Sectorization::build(c, cfg.M, jc, cfg.ell_rule, o);
      std::mt19937_64 rng(row_seed(cfg.seed, j));
      const KernelMask mask = KernelMask::momentum_conserving({1, 1, -1, -1});
      double best_ratio = -1.0;
      for (int k = 0; k < prm.resect_kernels; ++k) {
        const SectorKernel full = random_masked_kernel(coarse, mask, rng);
        std::vector<std::pair<std::vector<int>, double>> items(full.entries().begin(), full.entries().end());
        std::shuffle(items.begin(), items.end(), rng);
        if (static_cast<int>(items.size()) > prm.resect_entries) items.resize(prm.resect_entries);
        const SectorKernel kk(4, coarse, mask, SectorKernel::Entries(items.begin(), items.end()), false);
        const SectorKernel fine = resectorize(kk, sig);
        const double value = p_norm(fine, 1).value;
        const double r = coarse.ell() / ell;
        const double bound = r * r * (p_norm(kk, 1).value + p_norm(kk, 3).value / coarse.ell());
        if (bound > 0.0 && value / bound > best_ratio) {
          best_ratio = value / bound;
          row.value = value;
          row.bound = bound;
        }
      }
      break;
    }
    case Experiment::antipodal_sublevel:
      break;
  }
  if (row.bound > 0.0 && std::isfinite(row.bound)) row.ratio = row.value / row.bound;
  return row;
}

}  // namespace

std::string experiment_name(Experiment e) {
  for (const auto& [k, v] : experiment_names()) {
    if (k == e) return v;
  }
  return "mom3";
}

Experiment experiment_from_name(const std::string& s) {
  for (const auto& [k, v] : experiment_names()) {
    if (v == s) return k;
  }
  throw ParseError("unknown experiment '" + s + "'");
}

ScanConfig ScanConfig::from_json(const nlohmann::json& j, const std::string& base_dir) {
  ScanConfig cfg;
  try {
    if (j.contains("curve")) {
      cfg.curve = Curve::from_json(j.at("curve"));
    } else if (j.contains("curve_file")) {
      std::filesystem::path p = j.at("curve_file").get<std::string>();
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      std::ifstream in(p);
      if (!in) throw ParseError("scan config: cannot open curve file " + p.string());
      cfg.curve = Curve::from_json(nlohmann::json::parse(in));
    }
    cfg.M = j.value("M", cfg.M);
    if (j.contains("j_range")) {
      cfg.j_min = j.at("j_range").at(0).get<int>();
      cfg.j_max = j.at("j_range").at(1).get<int>();
    }
    if (j.contains("ell_rule")) {
      const auto& r = j.at("ell_rule");
      if (r.contains("aleph")) {
        cfg.ell_rule = EllRule::aleph(r.at("aleph").get<double>());
      } else if (r.contains("explicit")) {
        cfg.ell_per_j = r.at("explicit").get<std::vector<double>>();
      } else {
        throw ParseError("scan config: ell_rule needs 'aleph' or 'explicit'");
      }
    }
    if (j.contains("lambda_rule") && j.at("lambda_rule").contains("explicit")) {
      cfg.lambda_per_j = j.at("lambda_rule").at("explicit").get<std::vector<double>>();
    }
    cfg.experiment = experiment_from_name(j.at("experiment").get<std::string>());
    const std::string mode = j.value("mode", std::string("rect"));
    if (mode == "sampled") {
      cfg.mode = ModeSpec::sampled(j.value("samples_per_sector", 4));
    } else if (mode != "rect") {
      throw ParseError("scan config: unknown mode '" + mode + "'");
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.budget_seconds = j.value("budget_seconds", cfg.budget_seconds);
    if (j.contains("params")) {
      const auto& p = j.at("params");
      ScanParams& q = cfg.params;
      if (p.contains("p_theta")) q.p_theta = p.at("p_theta").get<double>();
      q.legs = p.value("legs", q.legs);
      q.delta = p.value("delta", q.delta);
      q.kernels = p.value("kernels", q.kernels);
      q.half_width = p.value("half_width", q.half_width);
      q.resect_ratio_log3 = p.value("resect_ratio_log3", q.resect_ratio_log3);
      q.resect_entries = p.value("resect_entries", q.resect_entries);
      q.resect_kernels = p.value("resect_kernels", q.resect_kernels);
      q.n0 = p.value("n0", q.n0);
      if (p.contains("eps_range")) q.eps_range = {p.at("eps_range").at(0).get<int>(), p.at("eps_range").at(1).get<int>()};
      q.dense_check = p.value("dense_check", q.dense_check);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scan config: ") + e.what());
  }
  return cfg;
}

ScalingReport scaling_scan(const ScanConfig& cfg) {
  if (cfg.j_min < 2 || cfg.j_max < cfg.j_min) throw MalformedQuery("scan: need 2 <= j_min <= j_max");
  if (!(cfg.M > 1.0)) throw MalformedQuery("scan: M must exceed 1");
  const std::size_t rows = static_cast<std::size_t>(cfg.j_max - cfg.j_min + 1);
  if (!cfg.ell_per_j.empty() && cfg.ell_per_j.size() != rows) {
    throw MalformedQuery("scan: need one explicit ell per scale");
  }
  if (!cfg.lambda_per_j.empty() && cfg.lambda_per_j.size() != rows) {
    throw MalformedQuery("scan: need one explicit Lambda per scale");
  }
  if (cfg.experiment == Experiment::mom_windowed && (cfg.params.legs < 3 || cfg.params.legs % 2 == 0)) {
    throw MalformedQuery("scan: windowed counts need an odd number of legs >= 3");
  }

  const auto t0 = Clock::now();
  ScalingReport report;
  report.experiment = experiment_name(cfg.experiment);
  Context ctx{cfg, std::nullopt, 0.7, cfg.params.n0, report};

  const bool needs_cert = cfg.experiment == Experiment::pairs || cfg.experiment == Experiment::norms_channel ||
                          cfg.experiment == Experiment::antipodal_sublevel;
  if (needs_cert) {
    ctx.cert = certify(cfg.curve, 8, 1024);
    report.symmetric_curve = ctx.cert->symmetric;
    report.worst_theta = ctx.cert->worst_theta;
    if (ctx.cert->n0) ctx.n0 = *ctx.cert->n0;
    report.n0 = ctx.n0;
    ctx.theta = ctx.cert->worst_theta;
    if (report.symmetric_curve) report.notes.push_back("symmetric curve: asymmetric bounds reported, not asserted");
  }
  if (cfg.params.p_theta) ctx.theta = *cfg.params.p_theta;

  auto over_budget = [&] {
    return std::chrono::duration<double>(Clock::now() - t0).count() > cfg.budget_seconds;
  };

  if (cfg.experiment == Experiment::antipodal_sublevel) {
    const Vec2 center = antipodal_sum(cfg.curve, ctx.theta);
    const int n0 = std::max(2, ctx.n0);
    for (int k = cfg.params.eps_range.first; k <= cfg.params.eps_range.second; ++k) {
      if (over_budget()) {
        report.complete = false;
        break;
      }
      ScanRow row;
      row.j = k;
      row.M = cfg.M;
      row.ell = std::ldexp(1.0, -k);
      row.value = antipodal_sum_sublevel_length(cfg.curve, center, row.ell);
      row.bound = std::pow(row.ell, 1.0 / (n0 - 1));
      row.ratio = row.value / row.bound;
      report.rows.push_back(row);
    }
  } else {
    for (int j = cfg.j_min; j <= cfg.j_max; ++j) {
      if (over_budget()) {
        report.complete = false;
        report.notes.push_back("budget exhausted before j=" + std::to_string(j));
        break;
      }
      const Sectorization sig = build_sig(cfg, j);
      report.rows.push_back(run_row(ctx, sig, j, j == cfg.j_min));
    }
  }
  try {
    auto [slope, se] = fit_exponent(report.rows);
    report.fitted_slope = slope;
    report.slope_stderr = se;
  } catch (const InsufficientData&) {
  }
  return report;
}

std::pair<double, double> fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  const std::size_t n = lx.size();
  if (n < 3) throw InsufficientData("fit: need at least three positive points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw InsufficientData("fit: all abscissae coincide");
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - my - slope * (lx[i] - mx);
    ssr += r * r;
  }
  return {slope, std::sqrt(ssr / (static_cast<double>(n) - 2.0) / sxx)};
}

std::pair<double, double> fit_exponent(const std::vector<ScanRow>& rows) {
  std::vector<double> x, y;
  for (const auto& r : rows) {
    x.push_back(1.0 / r.ell);
    y.push_back(r.value);
  }
  return fit_loglog(x, y);
}

Verdict verify_bounds(const ScalingReport& r, const Thresholds& t) {
  Verdict v;
  if (!r.complete) {
    v.status = Verdict::Status::incomplete;
    v.message = "report is incomplete";
    return v;
  }
  std::vector<std::pair<double, int>> ratios;
  for (const auto& row : r.rows) {
    if (row.ratio && *row.ratio > 0.0 && std::isfinite(*row.ratio)) ratios.push_back({*row.ratio, row.j});
  }
  if (ratios.empty()) {
    v.status = Verdict::Status::fail;
    v.message = "no positive ratios";
    return v;
  }
  double lo = ratios.front().first, hi = lo, mean_log = 0.0;
  for (const auto& [x, j] : ratios) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    mean_log += std::log(x);
  }
  mean_log /= static_cast<double>(ratios.size());
  v.band = hi / lo;
  std::ostringstream msg;
  if (v.band > t.band) {
    v.status = Verdict::Status::fail;
    double worst = -1.0;
    for (const auto& [x, j] : ratios) {
      const double d = std::fabs(std::log(x) - mean_log);
      if (d > worst) {
        worst = d;
        v.offending_j = j;
      }
    }
    msg << "ratio band " << v.band << " exceeds " << t.band << " (offending j=" << *v.offending_j << "); ";
  }
  if (t.slope) {
    if (!r.fitted_slope) {
      v.status = Verdict::Status::fail;
      msg << "no fitted slope; ";
    } else if (std::fabs(*r.fitted_slope - *t.slope) > t.tol) {
      v.status = Verdict::Status::fail;
      msg << "slope " << *r.fitted_slope << " differs from " << *t.slope << " by more than " << t.tol << "; ";
    }
  }
  v.message = v.status == Verdict::Status::pass ? "pass" : msg.str();
  return v;
}

std::string report_to_csv(const ScalingReport& r) {
  std::ostringstream out;
  out << "version,experiment,j,M,ell,Lambda,value,bound,ratio\n";
  for (const auto& row : r.rows) {
    out << kReportSchemaVersion << ',' << r.experiment << ',' << row.j << ',' << fmt(row.M) << ',' << fmt(row.ell)
        << ',' << fmt(row.lambda) << ',' << fmt(row.value) << ',' << fmt(row.bound) << ','
        << (row.ratio ? fmt(*row.ratio) : std::string()) << '\n';
  }
  if (!r.complete) out << "#incomplete\n";
  return out.str();
}

ScalingReport report_from_csv(const std::string& text) {
  ScalingReport r;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line == "#incomplete") {
      r.complete = false;
      continue;
    }
    if (!header) {
      if (line != "version,experiment,j,M,ell,Lambda,value,bound,ratio") throw ParseError("report: bad CSV header");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() == 8) f.emplace_back();
    if (f.size() != 9) throw ParseError("report: expected 9 columns in '" + line + "'");
    try {
      if (std::stoi(f[0]) != kReportSchemaVersion) throw ParseError("report: unsupported schema version " + f[0]);
      r.experiment = f[1];
      ScanRow row;
      row.j = std::stoi(f[2]);
      row.M = std::stod(f[3]);
      row.ell = std::stod(f[4]);
      row.lambda = std::stod(f[5]);
      row.value = std::stod(f[6]);
      row.bound = std::stod(f[7]);
      if (!f[8].empty()) row.ratio = std::stod(f[8]);
      r.rows.push_back(row);
    } catch (const std::logic_error&) {
      throw ParseError("report: bad number in '" + line + "'");
    }
  }
  if (!header) throw ParseError("report: missing CSV header");
  try {
    auto [slope, se] = fit_exponent(r.rows);
    r.fitted_slope = slope;
    r.slope_stderr = se;
  } catch (const InsufficientData&) {
  }
  return r;
}

nlohmann::json report_to_json(const ScalingReport& r) {
  nlohmann::json j;
  j["version"] = kReportSchemaVersion;
  j["experiment"] = r.experiment;
  j["complete"] = r.complete;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json x = {{"j", row.j},         {"M", row.M},         {"ell", row.ell},
                        {"Lambda", row.lambda}, {"value", row.value}, {"bound", row.bound}};
    x["ratio"] = row.ratio ? nlohmann::json(*row.ratio) : nlohmann::json(nullptr);
    rows.push_back(std::move(x));
  }
  j["rows"] = std::move(rows);
  j["fitted_slope"] = r.fitted_slope ? nlohmann::json(*r.fitted_slope) : nlohmann::json(nullptr);
  j["slope_stderr"] = r.slope_stderr ? nlohmann::json(*r.slope_stderr) : nlohmann::json(nullptr);
  if (r.dense_match) j["dense_match"] = *r.dense_match;
  if (r.bracket_ok) j["bracket_ok"] = *r.bracket_ok;
  if (r.n0) j["n0"] = *r.n0;
  if (r.worst_theta) j["worst_theta"] = *r.worst_theta;
  j["symmetric_curve"] = r.symmetric_curve;
  j["notes"] = r.notes;
  return j;
}

namespace {

double poly_eval(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

std::vector<double> derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  return d;
}

// Roots in [a, b]: the roots of the derivative split the interval into
// monotone pieces, each bisected to a bracket of relative width 1e-13.
std::vector<double> roots_in(std::vector<double> c, double a, double b) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  std::vector<double> out;
  if (c.size() <= 1) return out;
  if (c.size() == 2) {
    const double x = -c[0] / c[1];
    if (x >= a && x <= b) out.push_back(x);
    return out;
  }
  std::vector<double> pts = {a};
  for (double x : roots_in(derivative(c), a, b)) pts.push_back(x);
  pts.push_back(b);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double lo = pts[i], hi = pts[i + 1];
    double flo = poly_eval(c, lo), fhi = poly_eval(c, hi);
    if (flo == 0.0) {
      out.push_back(lo);
      continue;
    }
    if (i + 2 == pts.size() && fhi == 0.0) {
      out.push_back(hi);
      continue;
    }
    if ((flo < 0.0) == (fhi < 0.0)) continue;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::fabs(lo)); ++it) {
      const double m = 0.5 * (lo + hi);
      const double fm = poly_eval(c, m);
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = m;
        flo = fm;
      } else {
        hi = m;
      }
    }
    out.push_back(0.5 * (lo + hi));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double x, double y) { return std::fabs(x - y) <= 1e-12; }),
            out.end());
  return out;
}

}  // namespace

double polynomial_sublevel_measure(const std::vector<double>& coeffs, double a, double b, double y_lo, double y_hi) {
  if (!(a <= b) || !(y_lo <= y_hi)) throw MalformedQuery("sublevel measure: empty interval");
  std::vector<double> pts = {a, b};
  for (double y : {y_lo, y_hi}) {
    std::vector<double> c = coeffs;
    if (c.empty()) c.push_back(0.0);
    c[0] -= y;
    for (double x : roots_in(c, a, b)) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double u = pts[i], v = pts[i + 1];
    if (v <= u) continue;
    const double f = poly_eval(coeffs, 0.5 * (u + v));
    if (f >= y_lo && f <= y_hi) total += v - u;
  }
  return total;
}

SublevelReport sublevel_lemma_test(int n, int trials, std::uint64_t seed) {
  if (n < 1 || n > 6) throw MalformedQuery("sublevel test: degree must lie in [1, 6]");
  if (trials < 1000) throw MalformedQuery("sublevel test: need at least 1000 trials");
  std::mt19937_64 rng(row_seed(seed, n));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;

  SublevelReport rep;
  rep.n = n;
  rep.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const double b = std::pow(10.0, -2.0 + 4.0 * unit(rng));
    std::vector<double> c(static_cast<std::size_t>(n) + 1);
    const double scale = std::pow(10.0, -1.0 + 2.0 * unit(rng));
    for (int k = 0; k < n; ++k) c[k] = scale * gauss(rng);
    // |f^(n)| = n! |lead| >= b, often with equality up to 5 percent.
    c[n] = (unit(rng) < 0.5 ? -1.0 : 1.0) * (b / fact) * (1.0 + 0.05 * unit(rng));
    const double x0 = -2.0 + 4.0 * unit(rng);
    const double half = std::pow(10.0, -2.0 + 3.0 * unit(rng));
    const double a = x0 - half, bb = x0 + half;
    const double y0 = poly_eval(c, a + (bb - a) * unit(rng)) + scale * 0.1 * gauss(rng);
    const double eps = std::pow(10.0, -7.0 + 7.0 * unit(rng)) * (1.0 + std::fabs(y0));
    const double measure = polynomial_sublevel_measure(c, a, bb, y0 - eps, y0 + eps);
    const double bound = std::pow(2.0, n + 1) * std::pow(eps / b, 1.0 / n);
    rep.max_ratio = std::max(rep.max_ratio, measure / bound);
    if (measure > bound * (1.0 + 1e-9) + 1e-12) ++rep.violations;
  }
  return rep;
}

}  // namespace fermi
