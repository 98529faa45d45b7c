// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failing criteria not listed with --allow-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fermi/curve.hpp"
#include "fermi/errors.hpp"
#include "fermi/harness.hpp"
#include "fermi/momentum.hpp"
#include "fermi/norms.hpp"
#include "fermi/sectorization.hpp"
#include "oracles.hpp"

using namespace fermi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Curve h_curve() { return Curve::from_fourier({{0, 1.0, 0.0}, {3, 0.05, 0.0}}); }

std::vector<std::pair<std::string, Curve>> three_curves() {
  return {{"circle", Curve::circle()}, {"ellipse", Curve::ellipse(2.0, 1.0)}, {"h", h_curve()}};
}

std::string fmt(double x, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

ScanConfig ladder(const Curve& c, Experiment e, int j_min, int j_max) {
  ScanConfig cfg;
  cfg.curve = c;
  cfg.M = 3.0;
  cfg.j_min = j_min;
  cfg.j_max = j_max;
  cfg.ell_rule = EllRule::aleph(2.0 / 3.0);
  cfg.experiment = e;
  cfg.seed = 20;
  cfg.workers = 2;
  cfg.budget_seconds = 600.0;
  return cfg;
}

std::string ratios(const ScalingReport& r) {
  std::string s;
  for (const auto& row : r.rows) {
    if (!s.empty()) s += " ";
    s += row.ratio ? fmt(*row.ratio) : "null";
  }
  return s;
}

// 1. Antipode involution, tangent antiparallelism and the second graph
// derivative against the curvature, at 1e-8 on random points.
Outcome geometry_suite() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.0, 2 * M_PI);
  double worst = 0.0;
  for (const auto& [name, c] : three_curves()) {
    for (int i = 0; i < 1000; ++i) {
      const double th = U(rng);
      const CurvePoint p = eval(c, th);
      const CurvePoint a = antipode(c, th);
      const CurvePoint aa = antipode(c, a.theta);
      worst = std::max(worst, norm(aa.position - p.position));
      worst = std::max(worst, norm(a.tangent + p.tangent));
      const double phi2 = graph_jet(c, th, 2).at(0);
      worst = std::max(worst, std::fabs(phi2 - p.curvature));
      worst = std::max(worst, std::fabs(phi2 * c.radius_of_curvature(th) - 1.0));
    }
  }
  return {worst <= 1e-8, "max deviation " + fmt(worst, 3)};
}

// 2. Certificates, with the asymmetric verdict checked against jets computed
// by finite differences of the solved graph.
Outcome certification() {
  bool ok = true;
  std::string detail;
  for (const auto& [name, c] : three_curves()) {
    const AsymmetryCertificate cert = certify(c, 6, 1024);
    if (name == "h") {
      ok = ok && !cert.symmetric && cert.n0 == 3;
      // At the worst angle the jets of k and a(k) agree to second order and
      // differ at third order; everywhere some order up to three differs.
      const double th = cert.worst_theta;
      const double d2 = std::fabs(oracle::fd_jet(c, th, 2) - oracle::fd_jet(c, th + M_PI, 2));
      const double d3 = std::fabs(oracle::fd_jet(c, th, 3) - oracle::fd_jet(c, th + M_PI, 3));
      bool everywhere = true;
      for (int i = 0; i < 64; ++i) {
        const double t = 2 * M_PI * (i + 0.5) / 64;
        double diff = 0.0;
        for (int n = 2; n <= 3; ++n) diff = std::max(diff, std::fabs(oracle::fd_jet(c, t, n) - oracle::fd_jet(c, t + M_PI, n)));
        everywhere = everywhere && diff > 1e-4;
      }
      ok = ok && d2 < 1e-5 && d3 > 1e-3 && everywhere;
      detail += " h: n0=" + (cert.n0 ? std::to_string(*cert.n0) : std::string("none")) + " oracle d2=" +
                fmt(d2, 2) + " d3=" + fmt(d3, 2);
    } else {
      const double off = cert.center ? norm(*cert.center) : 1.0;
      ok = ok && cert.symmetric && off <= 1e-8;
      detail += " " + name + ": symmetric=" + (cert.symmetric ? "yes" : "no") + " |center|=" + fmt(off, 2);
    }
  }
  return {ok, detail.substr(1)};
}

// 3. Difference secants have exactly two solutions; sum secants at most three
// on the asymmetric curve.
Outcome secants() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 2 * M_PI);
  bool ok = true;
  int checked = 0, warned = 0, sums = 0, max_sum = 0;
  for (const auto& [name, c] : three_curves()) {
    int done = 0;
    while (done < 1000) {
      const Vec2 p = c.position(U(rng)) - c.position(U(rng));
      if (norm(p) < 1e-6) continue;
      ++done;
      const SecantResult r = secant_count(c, p, {1, -1}, 10000);
      if (r.tangency) {
        ++warned;
        continue;
      }
      ++checked;
      ok = ok && r.count == 2;
    }
  }
  const Curve h = h_curve();
  for (int i = 0; i < 1000; ++i) {
    const Vec2 p = h.position(U(rng)) + h.position(U(rng));
    const SecantResult r = secant_count(h, p, {1, 1}, 10000);
    if (r.tangency) continue;
    ++sums;
    max_sum = std::max(max_sum, r.count);
  }
  ok = ok && max_sum <= 3 && sums > 0;
  return {ok, std::to_string(checked) + " difference queries (" + std::to_string(warned) + " warned), " +
                  std::to_string(sums) + " sum queries, max sum count " + std::to_string(max_sum)};
}

// 4. Mom3 ratio band and the dense check at the coarsest scale.
Outcome mom3_scan() {
  ScanConfig cfg = ladder(Curve::circle(), Experiment::mom3, 4, 8);
  const ScalingReport r = scaling_scan(cfg);
  const Verdict v = verify_bounds(r, {4.0, std::nullopt, 0.1});
  const bool dense = r.dense_match.value_or(false);
  return {v.status == Verdict::Status::pass && dense && r.complete,
          "band " + fmt(v.band) + " ratios [" + ratios(r) + "] dense_match=" + (dense ? "yes" : "no")};
}

// 5. Pair sum count slopes: 1 on the circle, 1 - 1/n0 on the certified curve.
Outcome pair_dichotomy() {
  const ScalingReport rc = scaling_scan(ladder(Curve::circle(), Experiment::pairs, 4, 8));
  const ScalingReport rh = scaling_scan(ladder(h_curve(), Experiment::pairs, 4, 8));
  const double sc = rc.fitted_slope.value_or(NAN);
  const double sh = rh.fitted_slope.value_or(NAN);
  const double want_h = 1.0 - 1.0 / rh.n0.value_or(3);
  const bool ok = std::fabs(sc - 1.0) <= 0.1 && std::fabs(sh - want_h) <= 0.1 && rc.complete && rh.complete;
  return {ok, "circle slope " + fmt(sc) + " (want 1.0), h slope " + fmt(sh) + " (want " + fmt(want_h) + ")"};
}

// 6. Sublevel exponent of the antipodal sum.
Outcome antipodal_exponent() {
  ScanConfig cfg = ladder(h_curve(), Experiment::antipodal_sublevel, 4, 12);
  cfg.params.eps_range = {4, 12};
  const ScalingReport r = scaling_scan(cfg);
  // The fit is against log(1/eps), so the exponent is minus the slope.
  const double expo = -r.fitted_slope.value_or(NAN);
  const double want = 1.0 / (r.n0.value_or(3) - 1) - 0.1;
  return {expo >= want, "exponent " + fmt(expo) + " (want >= " + fmt(want) + ")"};
}

// 7. Random polynomial sublevel bound.
Outcome sublevel_property() {
  bool ok = true;
  std::string detail;
  for (int n = 1; n <= 5; ++n) {
    const SublevelReport r = sublevel_lemma_test(n, 10000, 700 + n);
    ok = ok && r.violations == 0;
    detail += " n=" + std::to_string(n) + ":" + std::to_string(r.violations) + "/" + std::to_string(r.trials) +
              " max " + fmt(r.max_ratio, 3);
  }
  return {ok, "violations" + detail};
}

// 8. One versus three norm band over random momentum-masked kernels.
Outcome one_vs_three() {
  ScanConfig cfg = ladder(Curve::circle(), Experiment::norms_1v3, 4, 7);
  cfg.params.kernels = 100;
  const ScalingReport r = scaling_scan(cfg);
  const Verdict v = verify_bounds(r, {4.0, std::nullopt, 0.1});
  return {v.status == Verdict::Status::pass && r.complete, "band " + fmt(v.band) + " max ell|K|_1/|K|_3 [" + ratios(r) + "]"};
}

// 9. Overlap list lengths for nested grids.
Outcome overlap_lengths() {
  bool ok = true;
  std::size_t worst_excess = 0, lists = 0;
  std::string detail;
  for (const auto& [name, c] : three_curves()) {
    const double L = c.length();
    const Sectorization coarse = Sectorization::build(c, 3.0, 4, EllRule::explicit_length(L / 30));
    for (int ratio : {4, 8, 16}) {
      const Sectorization fine = Sectorization::build(c, 3.0, 6, EllRule::explicit_length(L / (30.0 * ratio)));
      const double r = coarse.ell() / fine.ell();
      const auto limit = static_cast<std::size_t>(std::ceil(r)) + 2;
      for (const auto& list : overlap_map(fine, coarse)) {
        ++lists;
        if (list.size() > limit) {
          ok = false;
          worst_excess = std::max(worst_excess, list.size() - limit);
        }
      }
    }
  }
  return {ok, std::to_string(lists) + " lists checked, worst excess " + std::to_string(worst_excess)};
}

// 10. Channel against three-leg norm: flat band on the asymmetric curve,
// growing ratio on the circle.
Outcome channel_band() {
  const ScalingReport rh = scaling_scan(ladder(h_curve(), Experiment::norms_channel, 4, 8));
  const ScalingReport rc = scaling_scan(ladder(Curve::circle(), Experiment::norms_channel, 4, 8));
  const Verdict v = verify_bounds(rh, {4.0, std::nullopt, 0.1});
  bool growing = rc.rows.size() >= 2;
  for (std::size_t i = 1; i < rc.rows.size(); ++i) {
    growing = growing && rc.rows[i].ratio && rc.rows[i - 1].ratio && *rc.rows[i].ratio > *rc.rows[i - 1].ratio;
  }
  return {v.status == Verdict::Status::pass && growing && rh.complete && rc.complete,
          "h band " + fmt(v.band) + " [" + ratios(rh) + "]; circle [" + ratios(rc) + "] " +
              (growing ? "increasing" : "not increasing")};
}

// 11. Sampled compatibility implies rect compatibility; hashed enumeration
// equals dense enumeration on small sectorizations.
Outcome mode_dominance() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 2 * M_PI);
  std::uniform_int_distribution<int> legs(2, 3), coin(0, 1);
  int queries = 0, sampled_true = 0, violations = 0;
  const auto curves = three_curves();
  std::vector<Sectorization> sigs;
  BuildOptions narrow;
  narrow.lambda = 0.02;
  for (const auto& nc : curves) sigs.push_back(Sectorization::build(nc.second, 3.0, 4, EllRule::explicit_length(0.2), narrow));
  for (int trial = 0; trial < 10000; ++trial) {
    const Curve& c = curves[trial % 3].second;
    const Sectorization& sig = sigs[trial % 3];
    CompatibilityQuery q;
    const int n = legs(rng);
    Vec2 sum;
    for (int i = 0; i < n; ++i) {
      q.signs.push_back(coin(rng) ? 1 : -1);
      q.free_sectors.push_back(sig.sector_at(U(rng)));
      sum += q.signs.back() * q.free_sectors.back().center_point;
    }
    q.target = trial % 2 == 0 ? Target::at_point(sum + Vec2{0.02 * std::cos(U(rng)), 0.02 * std::sin(U(rng))})
                              : Target::of_sector(sig.sector_at(U(rng)));
    q.extended = coin(rng);
    q.mode = ModeSpec::sampled(3);
    q.mode.rect_prefilter = false;
    const bool sampled = compatible(q, c, sig.lambda());
    q.mode = ModeSpec::rect();
    const bool rect = compatible(q, c, sig.lambda());
    ++queries;
    if (sampled) {
      ++sampled_true;
      if (!rect) ++violations;
    }
  }
  int dense_cases = 0, mismatches = 0;
  for (const auto& [name, c] : curves) {
    for (int N : {24, 36, 48}) {
      BuildOptions o;
      o.lambda = 0.3 * c.length() / N;
      const Sectorization sig = Sectorization::build(c, 3.0, 4, EllRule::explicit_length(c.length() / N), o);
      for (double th : {0.3, 2.1}) {
        const Target t = Target::of_sector(sig.sector_at(th));
        ++dense_cases;
        if (mom_count(sig, 3, t).count != mom_count_dense(sig, 3, t).count) ++mismatches;
        const PairTarget pt = PairTarget::sector_pair(sig.sector_at(th), sig.sector_at(th + 2.5));
        ++dense_cases;
        if (pair_sum_count(sig, pt) != pair_sum_count_dense(sig, pt)) ++mismatches;
      }
      if (N == 24) {
        const Target t = Target::of_sector(sig.sector_at(1.0));
        ++dense_cases;
        if (mom_count(sig, 5, t).count != mom_count_dense(sig, 5, t).count) ++mismatches;
      }
    }
  }
  return {violations == 0 && mismatches == 0 && sampled_true > 0,
          std::to_string(queries) + " queries, " + std::to_string(sampled_true) + " sampled-compatible, " +
              std::to_string(violations) + " without rect; " + std::to_string(mismatches) + "/" +
              std::to_string(dense_cases) + " dense mismatches"};
}

struct Criterion {
  int id;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> allowed, only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--allow-fail" && i + 1 < argc) {
      allowed.insert(std::stoi(argv[++i]));
    } else if (a == "--only" && i + 1 < argc) {
      only.insert(std::stoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: acceptance [--only N]... [--allow-fail N]...\n");
      return 2;
    }
  }
  const std::vector<Criterion> criteria = {
      {1, 5, geometry_suite},   {2, 10, certification},    {3, 30, secants},          {4, 180, mom3_scan},
      {5, 120, pair_dichotomy}, {6, 30, antipodal_exponent}, {7, 60, sublevel_property}, {8, 120, one_vs_three},
      {9, 5, overlap_lengths},  {10, 120, channel_band},     {11, 120, mode_dominance},
  };
  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = o.pass && in_time;
    std::string tail = o.detail + "; " + fmt(secs, 3) + " s (limit " + fmt(c.limit_seconds) + " s)";
    if (!pass && allowed.count(c.id)) tail += " [known failure]";
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", c.id, tail.c_str());
    std::fflush(stdout);
    if (!pass && !allowed.count(c.id)) ++unexpected;
  }
  return unexpected;
}
