#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fermi/errors.hpp"
#include "fermi/momentum.hpp"
#include "oracles.hpp"

using namespace fermi;

namespace {

Curve h_curve() { return Curve::from_fourier({{0, 1.0, 0.0}, {3, 0.05, 0.0}}); }

Sectorization explicit_sig(const Curve& c, double ell, std::optional<double> lambda = std::nullopt) {
  BuildOptions o;
  o.lambda = lambda;
  return Sectorization::build(c, 3.0, 4, EllRule::explicit_length(ell), o);
}

CompatibilityQuery query(std::vector<int> signs, std::vector<Sector> sectors, Target t,
                         ModeSpec m = ModeSpec::rect()) {
  CompatibilityQuery q;
  q.signs = std::move(signs);
  q.free_sectors = std::move(sectors);
  q.target = t;
  q.mode = m;
  return q;
}

// Number of leg tuples of a three leg Mom count decided with test-side boxes.
std::uint64_t oracle_mom3(const Sectorization& sig, double p_theta, double inflate) {
  const Curve& c = sig.curve();
  const double lam = sig.lambda();
  const Sector t = sig.sector_at(p_theta);
  const double psi = t.center_theta;
  std::vector<oracle::Box> b;
  for (const auto& s : sig.sectors()) b.push_back(oracle::sampled_band_box(c, s.theta_lo, s.theta_hi, lam, psi));
  oracle::Box g = oracle::sampled_band_box(c, t.theta_lo, t.theta_hi, lam, psi);
  std::uint64_t n = 0;
  for (const auto& x : b) {
    for (const auto& y : b) {
      for (const auto& z : b) {
        // x + y - z - g must contain 0 on both axes.
        double tlo = x.t_lo + y.t_lo - z.t_hi - g.t_hi - 4 * inflate;
        double thi = x.t_hi + y.t_hi - z.t_lo - g.t_lo + 4 * inflate;
        double nlo = x.n_lo + y.n_lo - z.n_hi - g.n_hi - 4 * inflate;
        double nhi = x.n_hi + y.n_hi - z.n_lo - g.n_lo + 4 * inflate;
        if (tlo <= 0 && thi >= 0 && nlo <= 0 && nhi >= 0) ++n;
      }
    }
  }
  return n;
}

}  // namespace

TEST_CASE("compatibility examples") {
  Curve c = Curve::circle();
  auto sig = explicit_sig(c, 0.1, 1e-3);
  const Sector s = sig.sector_at(0.4);
  const Sector a = sig.sector_at(0.4 + M_PI);
  CHECK(compatible(query({1, 1}, {s, a}, Target::at_point({0, 0})), c, 1e-3));
  CHECK(compatible(query({1, 1}, {s, a}, Target::at_point({0, 0})), c, 0.05));
  CHECK(compatible(query({1, -1}, {s, s}, Target::zero()), c, 1e-3));

  const Sector s0 = sig.sector_at(0.0);
  const Sector s1 = sig.sector_at(0.05);
  CHECK_FALSE(compatible(query({1, -1}, {s0, s1}, Target::at_point({0.5, 0})), c, 1e-3));
  CHECK_FALSE(compatible(query({1, -1}, {s0, s1}, Target::at_point({0.5, 0}), ModeSpec::sampled()), c, 1e-3));

  // Witnesses exist for the first two in sampled mode as well.
  CHECK(compatible(query({1, 1}, {s, a}, Target::at_point({0, 0}), ModeSpec::sampled()), c, 1e-3));
  CHECK(compatible(query({1, -1}, {s, s}, Target::zero(), ModeSpec::sampled()), c, 1e-3));

  // Fixed momenta shift the target.
  CompatibilityQuery q = query({1}, {s}, Target::at_point(s.center_point + Vec2{0.5, 0.5}));
  q.fixed_momenta = {{0.5, 0.5}};
  CHECK(compatible(q, c, 1e-3));
}

TEST_CASE("compatibility errors") {
  Curve c = Curve::circle();
  auto sig = explicit_sig(c, 0.1, 1e-3);
  CHECK_THROWS_AS(compatible(query({}, {}, Target::zero()), c, 1e-3), MalformedQuery);
  CHECK_THROWS_AS(compatible(query({1}, {sig[0], sig[1]}, Target::zero()), c, 1e-3), MalformedQuery);
  CHECK_THROWS_AS(compatible(query({2}, {sig[0]}, Target::zero()), c, 1e-3), MalformedQuery);
  CompatibilityQuery q = query({}, {}, Target::at_point({1, 0}));
  q.fixed_momenta = {{1, 0}};
  CHECK(compatible(q, c, 1e-3));
}

TEST_CASE("sampled witnesses imply rect compatibility on random queries") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 2 * M_PI);
  std::uniform_int_distribution<int> legs(2, 3);
  std::uniform_int_distribution<int> sign(0, 1);
  int sampled_true = 0;
  for (const Curve& c : {Curve::circle(), Curve::ellipse(2.0, 1.0), h_curve()}) {
    auto sig = explicit_sig(c, 0.2, 0.02);
    for (int trial = 0; trial < 300; ++trial) {
      CompatibilityQuery q;
      int n = legs(rng);
      Vec2 sum;
      for (int i = 0; i < n; ++i) {
        q.signs.push_back(sign(rng) ? 1 : -1);
        q.free_sectors.push_back(sig.sector_at(U(rng)));
        sum += q.signs.back() * q.free_sectors.back().center_point;
      }
      // Half the targets are built near an attainable sum so that both answers occur.
      if (trial % 2 == 0) {
        q.target = Target::at_point(sum + Vec2{0.02 * std::cos(U(rng)), 0.02 * std::sin(U(rng))});
      } else {
        q.target = Target::of_sector(sig.sector_at(U(rng)));
      }
      q.mode = ModeSpec::sampled(3);
      q.mode.rect_prefilter = false;
      const bool sampled = compatible(q, c, sig.lambda());
      q.mode = ModeSpec::rect();
      const bool rect = compatible(q, c, sig.lambda());
      if (sampled) {
        ++sampled_true;
        CHECK(rect);
      }
    }
  }
  CHECK(sampled_true > 50);
}

TEST_CASE("compatibility is monotone in the shell width and the target") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 2 * M_PI);
  Curve c = h_curve();
  auto sig = explicit_sig(c, 0.1, 0.01);
  for (int trial = 0; trial < 2000; ++trial) {
    Sector a = sig.sector_at(U(rng));
    Sector b = sig.sector_at(U(rng));
    Sector t = sig.sector_at(U(rng));
    auto q = query({1, 1}, {a, b}, Target::of_sector(t));
    bool prev = false;
    for (double lam : {0.0, 0.005, 0.01, 0.02, 0.04}) {
      bool now = compatible(q, c, lam);
      CHECK((!prev || now));
      prev = now;
    }
    // A point of the target region: compatible with the point implies
    // compatible with the region.
    auto qp = query({1, 1}, {a, b}, Target::at_point(t.center_point));
    if (compatible(qp, c, 0.01)) CHECK(compatible(q, c, 0.01));
  }
}

TEST_CASE("mom3 hash enumeration equals dense enumeration and a test-side box oracle") {
  for (const Curve& c : {Curve::circle(), h_curve(), Curve::ellipse(1.5, 1.0)}) {
    auto sig = explicit_sig(c, c.length() / 40.0, 0.02);
    for (double p : {0.3, 2.0}) {
      auto t = Target::of_sector(sig.sector_at(p));
      auto fast = mom_count(sig, 3, t);
      auto dense = mom_count_dense(sig, 3, t);
      CHECK(fast.count == dense.count);
      CHECK(fast.count > 0);
      auto tilde = Target::at_point(c.position(p) + 0.1 * unit(p + 1.0));
      CHECK(mom_count(sig, 3, tilde).count == mom_count_dense(sig, 3, tilde).count);
    }
  }
  // The box oracle brackets the library count on the circle.
  Curve c = Curve::circle();
  auto sig = explicit_sig(c, 2 * M_PI / 40, 0.02);
  auto lib = mom_count(sig, 3, Target::of_sector(sig.sector_at(0.3))).count;
  CHECK(oracle_mom3(sig, 0.3, 0.0) <= lib);
  CHECK(lib <= oracle_mom3(sig, 0.3, 1e-6));
}

TEST_CASE("mom3 on the circle contains the degenerate triples") {
  Curve c = Curve::circle();
  const double ell = 2 * M_PI / 64;
  auto sig = explicit_sig(c, ell, ell * ell);
  REQUIRE(sig.size() == 64);
  const double p = sig[5].center_theta;
  MomOptions o;
  o.keep_tuples = true;
  auto r = mom_count(sig, 3, Target::of_sector(sig.sector_at(p)), o);
  CHECK(r.count > 0);
  CHECK(r.count == r.tuples->size());
  CHECK(r.count == mom_count_dense(sig, 3, Target::of_sector(sig.sector_at(p))).count);
  // k1 = k3 arbitrary and k2 = p.
  int degenerate = 0;
  for (const auto& t : *r.tuples) {
    if (t[0] == t[2] && t[1] == 5) ++degenerate;
  }
  CHECK(degenerate == 64);
  // Bounded by a modest multiple of N.
  CHECK(r.count <= 64u * 64u);
}

TEST_CASE("mom5 windows and worker independence") {
  Curve c = Curve::circle();
  auto sig = explicit_sig(c, 0.1, 0.01);
  const double L = c.length();
  const double p = 0.5;
  const double delta = 0.5;
  auto win = [&](double th) { return std::make_pair(th - 0.5 * delta, th + 0.5 * delta); };
  std::vector<std::pair<double, double>> arcs = {win(p), win(p + 1.0), win(p + 2.0), win(p + 1.0), win(p + 2.0)};
  auto ws = window_separation(c, arcs, sig.ell());
  CHECK(ws.valid);
  MomOptions o;
  o.windows = arcs;
  auto t = Target::of_sector(sig.sector_at(p));
  auto r = mom_count(sig, 5, t, o);
  auto d = mom_count_dense(sig, 5, t, o);
  CHECK(r.count == d.count);
  CHECK(r.count > 0);
  const double n = 3;
  const double bound = n * n * std::pow(delta / sig.ell() + 1, 2 * n - 3) * (1 + sig.lambda() / (sig.ell() * ws.omega));
  CHECK(r.count <= bound);

  o.workers = 3;
  o.keep_tuples = true;
  auto r3 = mom_count(sig, 5, t, o);
  o.workers = 1;
  auto r1 = mom_count(sig, 5, t, o);
  CHECK(r3.count == r1.count);
  CHECK(*r3.tuples == *r1.tuples);
  (void)L;

  CHECK_THROWS_AS(mom_count(sig, 4, t), MalformedQuery);
  CHECK_THROWS_AS(mom_count(sig, 1, t), MalformedQuery);
}

TEST_CASE("mom counts reflect under global momentum reflection") {
  // On a centrally symmetric curve reflecting every leg maps sector k to its
  // antipode; the count with target -q equals the count with q.
  Curve c = Curve::ellipse(1.5, 1.0);
  auto sig = explicit_sig(c, c.length() / 36.0, 0.02);
  REQUIRE(sig.size() % 2 == 0);
  Vec2 q{0.4, 0.7};
  CHECK(mom_count(sig, 3, Target::at_point(q)).count == mom_count(sig, 3, Target::at_point(-q)).count);
  CHECK(mom_count(sig, 3, Target::of_sector(sig[3])).count ==
        mom_count(sig, 3, Target::of_sector(sig[3 + sig.size() / 2])).count);
}

TEST_CASE("sampled mom counts never exceed rect counts") {
  Curve c = h_curve();
  auto sig = explicit_sig(c, c.length() / 24.0, 0.03);
  auto t = Target::of_sector(sig.sector_at(1.0));
  MomOptions o;
  o.mode = ModeSpec::sampled(3);
  auto s = mom_count(sig, 3, t, o);
  auto r = mom_count(sig, 3, t);
  CHECK(s.count <= r.count);
  CHECK(s.count > 0);
  CHECK(s.count == mom_count_dense(sig, 3, t, o).count);
}

TEST_CASE("cons enumeration examples") {
  Curve c = Curve::circle();
  auto sig = explicit_sig(c, 0.1, 0.01);
  auto empty = cons_enumerate({{{0.3, 0.4}, 1}, {{0.3, 0.4}, -1}}, {}, {}, sig);
  REQUIRE(empty.size() == 1);
  CHECK(empty[0].empty());
  CHECK(cons_enumerate({{{0.3, 0.4}, 1}}, {}, {}, sig).empty());
  CHECK(cons_enumerate({{{5.0, 0.0}, 1}}, {}, {{1, -1}}, sig).empty());
  // One free leg against a fixed momentum on the curve: the sectors around it.
  auto one = cons_enumerate({{c.position(1.0), -1}}, {}, {{1, -1}}, sig);
  CHECK(!one.empty());
  CHECK(one.size() <= 3);
  for (const auto& t : one) CHECK(std::fabs(sig[t[0]].center_theta - 1.0) < 0.2);

  auto other = Sectorization::build(Curve::ellipse(1.0, 1.0), 3.0, 4, EllRule::explicit_length(0.4));
  CHECK_THROWS_AS(cons_enumerate({}, {{0, 1}}, {{-1, 0}}, sig, &other), CurveMismatch);
  CHECK_THROWS_AS(cons_enumerate({}, {{0, 1}}, {{-1, 0}}, sig), MalformedQuery);
}

TEST_CASE("cons counts with two windowed legs grow like the window ratio") {
  Curve c = Curve::circle();
  const double fine = 2 * M_PI / 96;
  auto sig = explicit_sig(c, fine, 0.002);
  std::vector<double> ratios;
  for (int r : {2, 4, 8}) {
    auto coarse = explicit_sig(c, fine * r, 0.002);
    // x0 = x1 + x2 with x1, x2 at +-60 degrees from x0.
    const int s0 = 0;
    const int w1 = coarse.sector_containing(M_PI / 3);
    const int w2 = coarse.sector_containing(-M_PI / 3 + 2 * M_PI);
    auto cons = cons_enumerate({}, {{s0, 1}}, {{-1, w1}, {-1, w2}}, sig, &coarse);
    // Brute force over all pairs with the same predicate.
    std::size_t brute = 0;
    auto lists = overlap_map(sig, coarse);
    for (std::size_t a = 0; a < sig.size(); ++a) {
      for (std::size_t b = 0; b < sig.size(); ++b) {
        bool in1 = std::count(lists[w1].begin(), lists[w1].end(), static_cast<int>(a)) > 0;
        bool in2 = std::count(lists[w2].begin(), lists[w2].end(), static_cast<int>(b)) > 0;
        if (!in1 || !in2) continue;
        auto q = query({1, -1, -1}, {sig[s0], sig[a], sig[b]}, Target::zero());
        q.extended = true;
        if (compatible(q, c, sig.lambda())) ++brute;
      }
    }
    CHECK(cons.size() == brute);
    CHECK(!cons.empty());
    ratios.push_back(static_cast<double>(cons.size()) / r);
  }
  auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi / *lo <= 4.0);
}

TEST_CASE("pair sum counts") {
  Curve c = Curve::circle();
  auto sig = explicit_sig(c, 2 * M_PI / 45, 0.01);
  const std::size_t N = sig.size();
  Vec2 k = c.position(0.7);
  auto n0 = pair_sum_count(sig, PairTarget::momentum_pair(k, -k));
  CHECK(n0 >= N);
  CHECK(n0 <= 3 * N);
  CHECK(n0 == pair_sum_count_dense(sig, PairTarget::momentum_pair(k, -k)));
  CHECK(pair_sum_count(sig, PairTarget::momentum_pair({2.5, 0}, {0.5, 0})) == 0);

  Curve h = h_curve();
  auto hs = explicit_sig(h, h.length() / 45, 0.01);
  for (double th : {0.2, M_PI / 6, 1.3}) {
    auto tp = PairTarget::sector_pair(hs.sector_at(th), hs.sector_at(th + M_PI));
    CHECK(pair_sum_count(hs, tp) == pair_sum_count_dense(hs, tp));
    auto tm = PairTarget::momentum_plus_sector(h.position(th + 2.0), hs.sector_at(th));
    CHECK(pair_sum_count(hs, tm) == pair_sum_count_dense(hs, tm));
    auto tk = PairTarget::momentum_pair(h.position(th), h.position(th + 2.5));
    CHECK(pair_sum_count(hs, tk) == pair_sum_count_dense(hs, tk));
    CHECK(pair_sum_count(hs, tk, 4) == pair_sum_count(hs, tk, 1));
  }
}

TEST_CASE("secant counts on the circle") {
  Curve c = Curve::circle();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 2 * M_PI);
  for (int i = 0; i < 30; ++i) {
    double a = U(rng), b = U(rng);
    Vec2 p = c.position(a) - c.position(b);
    if (norm(p) < 1e-3 || norm(p) > 2 - 1e-3) continue;
    auto r = secant_count(c, p, {1, -1}, 10000);
    CHECK_FALSE(r.tangency);
    REQUIRE(r.count == 2);
    auto want = oracle::circle_chords(p);
    for (const auto& s : r.solutions) {
      double d = std::min(circular_distance(s.first, want[0], 2 * M_PI), circular_distance(s.first, want[1], 2 * M_PI));
      CHECK(d < 1e-9);
      Vec2 back = c.position(s.first) - c.position(s.second);
      CHECK(norm(back - p) < 1e-9);
    }
  }
  auto z = secant_count(c, {0, 0}, {1, 1}, 10000);
  CHECK(z.tangency);
  REQUIRE(z.count_below.has_value());
  CHECK(*z.count_below == 1);
  CHECK(*z.count_above == 1);
  CHECK_THROWS_AS(secant_count(c, {0, 0}, {1, -1}, 10000), MalformedQuery);
  CHECK_THROWS_AS(secant_count(c, {0.5, 0}, {1, -1}, 100), MalformedQuery);
}

TEST_CASE("sum secants on the three-fold curve stay within its asymmetry order") {
  Curve h = h_curve();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.0, 2 * M_PI);
  int checked = 0;
  for (int i = 0; i < 60; ++i) {
    Vec2 p = h.position(U(rng)) + h.position(U(rng));
    auto r = secant_count(h, p, {1, 1}, 10000);
    if (r.tangency) continue;
    ++checked;
    CHECK(r.count >= 1);
    CHECK(r.count <= 3);
    for (const auto& s : r.solutions) CHECK(norm(h.position(s.first) + h.position(s.second) - p) < 1e-9);
  }
  CHECK(checked > 50);
}

TEST_CASE("localization of clustered tuples") {
  Curve c = Curve::circle();
  const double ell = 2 * M_PI / 64;
  auto sig = explicit_sig(c, ell, ell * ell);
  MomOptions o;
  o.keep_tuples = true;
  const double p_theta = sig[7].center_theta;
  auto r = mom_count(sig, 3, Target::of_sector(sig.sector_at(p_theta)), o);
  auto rep = localization_check(*r.tuples, sig, c.position(p_theta), 4 * ell);
  CHECK(rep.violations.empty());
  CHECK(rep.checked > 0);
  CHECK(rep.checked + rep.hypothesis_failed.size() == r.tuples->size());

  // Legs clustered at k = sector 0, target at its antipode.
  auto anti = localization_check({{0, 1, 63}}, sig, c.position(sig[0].center_theta + M_PI), 4 * ell);
  CHECK(anti.violations.empty());
  CHECK(anti.checked == 1);
  auto spread = localization_check({{0, 16, 40}}, sig, c.position(0.0), 4 * ell);
  CHECK(spread.hypothesis_failed.size() == 1);
  CHECK(spread.checked == 0);
}

TEST_CASE("windowed pair counts follow the rectangle shape across scales") {
  Curve c = h_curve();
  const double p = 0.4;
  const double w1 = 0.1;
  const double w2 = 0.4;
  const double A = 0.04;
  const double B = 0.08;
  const Vec2 center = c.position(p + 0.15) + c.position(p - 0.15);
  std::vector<double> ratios;
  for (double ell : {0.02, 0.01, 0.005, 0.0025}) {
    auto sig = explicit_sig(c, ell, 1e-4);
    const double e = sig.ell();
    auto n = windowed_pair_count(sig, p, {1, 1}, w1, w2, center, A, B);
    CHECK(n > 0);
    ratios.push_back(n / ((A + e * w2) * (B + e) / (w1 * e * e)));
  }
  auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi / *lo <= 4.0);
}
