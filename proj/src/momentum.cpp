#include "fermi/momentum.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "fermi/errors.hpp"
#include "fermi/spatial_hash.hpp"

namespace fermi {

namespace {

constexpr double kBoxSlack = 1e-10;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

FrameBox point_box(Vec2 p, const Frame& f) {
  double t = f.coord_t(p);
  double n = f.coord_n(p);
  return {{t, t}, {n, n}};
}

FrameBox box_minus(const FrameBox& a, const FrameBox& b) { return {a.t - b.t, a.n - b.n}; }

bool box_has_zero(const FrameBox& b) { return b.t.contains(0.0, kBoxSlack) && b.n.contains(0.0, kBoxSlack); }

// The one predicate shared by every rect-mode path: accumulates the signed
// boxes in leg order and asks whether the goal box is met.
bool rect_sum_meets(const FrameBox* boxes, const int* signs, int n, const FrameBox& goal) {
  FrameBox acc{{0.0, 0.0}, {0.0, 0.0}};
  for (int i = 0; i < n; ++i) acc = acc + signed_box(signs[i], boxes[i]);
  return box_has_zero(box_minus(acc, goal));
}

void check_signs(const std::vector<int>& signs, const char* who) {
  for (int s : signs) {
    if (s != 1 && s != -1) throw MalformedQuery(std::string(who) + ": signs must be +1 or -1");
  }
}

FrameBox target_box(const Curve& c, const Target& t, const Frame& f, double lambda) {
  switch (t.kind) {
    case Target::Kind::sector:
      return region_box(c, t.sector.region(lambda), f);
    case Target::Kind::translated_sector: {
      FrameBox b = region_box(c, t.sector.region(lambda), f);
      return b + point_box(t.point, f);
    }
    case Target::Kind::point:
      return point_box(t.point, f);
    case Target::Kind::zero:
      break;
  }
  return {{0.0, 0.0}, {0.0, 0.0}};
}

std::vector<Vec2> target_samples(const Curve& c, const Target& t, double lambda, int along) {
  switch (t.kind) {
    case Target::Kind::sector:
      return region_samples(c, t.sector.region(lambda), along, 3);
    case Target::Kind::translated_sector: {
      auto pts = region_samples(c, t.sector.region(lambda), along, 3);
      for (auto& p : pts) p += t.point;
      return pts;
    }
    case Target::Kind::point:
      return {t.point};
    case Target::Kind::zero:
      break;
  }
  return {Vec2{}};
}

// Witness search: grid points for all legs but the last and for the target,
// then the last leg's point is solved for and tested for membership.
bool sampled_witness(const Curve& c, const std::vector<int>& signs, const std::vector<ArcRegion>& regions,
                     Vec2 fixed_sum, const Target& target, double lambda, int along) {
  const int n = static_cast<int>(regions.size());
  std::vector<std::vector<Vec2>> pts(static_cast<std::size_t>(n - 1));
  for (int i = 0; i + 1 < n; ++i) pts[i] = region_samples(c, regions[i], along, 3);
  const std::vector<Vec2> ys = target_samples(c, target, lambda, along);
  const ArcRegion& last = regions[n - 1];
  const int e_last = signs[n - 1];

  std::function<bool(int, Vec2)> rec = [&](int i, Vec2 partial) -> bool {
    if (i == n - 1) {
      for (const Vec2& y : ys) {
        Vec2 x = e_last * (y - partial);
        if (region_contains(c, last, x)) return true;
      }
      return false;
    }
    for (const Vec2& x : pts[i]) {
      if (rec(i + 1, partial + signs[i] * x)) return true;
    }
    return false;
  };
  return rec(0, fixed_sum);
}

template <class F>
void parallel_chunks(std::size_t n, int workers, F&& body) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    body(0, std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    std::size_t lo = std::min(n, w * chunk);
    std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&, w, lo, hi] { body(w, lo, hi); });
  }
  for (auto& t : pool) t.join();
}

std::vector<int> leg_candidates(const Sectorization& sig, const std::optional<std::pair<double, double>>& window) {
  std::vector<int> out;
  const double L = sig.curve().length();
  for (std::size_t k = 0; k < sig.size(); ++k) {
    if (window) {
      const double span = window->second - window->first;
      double d = std::fmod(sig[k].center_arclength - window->first, L);
      if (d < 0.0) d += L;
      if (d > span + 1e-12 * L) continue;
    }
    out.push_back(static_cast<int>(k));
  }
  return out;
}

void check_legs(int legs) {
  if (legs < 3 || legs % 2 == 0 || legs > 9) {
    throw MalformedQuery("mom_count: the number of legs must be odd and at least 3");
  }
}

struct MomSetup {
  int legs = 3;
  std::vector<int> signs;
  std::vector<std::vector<int>> cand;
  double lambda = 0.0;
  bool per_leg0_frame = false;
};

MomSetup make_setup(const Sectorization& sig, int legs, const Target& target, const MomOptions& opts) {
  check_legs(legs);
  MomSetup s;
  s.legs = legs;
  s.signs = mom_signs(legs);
  s.lambda = sig.lambda();
  s.per_leg0_frame = !target.is_region();
  if (opts.windows && static_cast<int>(opts.windows->size()) != legs) {
    throw MalformedQuery("mom_count: need one window per leg");
  }
  for (int i = 0; i < legs; ++i) {
    std::optional<std::pair<double, double>> w;
    if (opts.windows) w = (*opts.windows)[i];
    s.cand.push_back(leg_candidates(sig, w));
  }
  if (opts.mode.kind == CompatMode::sampled && opts.mode.samples_per_sector < 2) {
    throw MalformedQuery("mom_count: sampled mode needs at least two samples per sector");
  }
  return s;
}

Frame setup_frame(const Sectorization& sig, const Target& target, int leg0) {
  if (target.is_region()) return Frame::at(target.sector.center_theta);
  return Frame::at(sig[static_cast<std::size_t>(leg0)].center_theta);
}

bool witness_for(const Sectorization& sig, const MomSetup& s, const std::vector<int>& tuple, const Target& target,
                 int along) {
  std::vector<ArcRegion> regions;
  regions.reserve(tuple.size());
  for (int k : tuple) regions.push_back(sig[static_cast<std::size_t>(k)].region(s.lambda));
  return sampled_witness(sig.curve(), s.signs, regions, Vec2{}, target, s.lambda, along);
}

struct WorkerOut {
  std::uint64_t count = 0;
  std::uint64_t pruned = 0;
  std::vector<std::vector<int>> tuples;
};

// Rect-mode enumeration of sector tuples (one candidate list per leg) with
// sum_i e_i x_i + fixed_sum in the target. The frame is the target's when the
// target is a region and the first leg's otherwise. Prefixes are pruned with
// hull sums of the remaining legs and the last leg is looked up in a grid of
// box centres.
struct EngineSpec {
  std::vector<int> signs;
  std::vector<std::vector<int>> cand;
  bool extended = false;
  Target target;
  Vec2 fixed_sum;
  bool keep = false;
  int workers = 1;
  std::function<bool(const std::vector<int>&)> accept;  // optional extra filter
};

std::vector<WorkerOut> run_engine(const Sectorization& sig, const EngineSpec& e) {
  const Curve& c = sig.curve();
  const double lambda = sig.lambda();
  const int legs = static_cast<int>(e.signs.size());
  const int L = legs - 1;
  const bool per_leg0 = !e.target.is_region();

  struct FrameData {
    std::vector<FrameBox> box;  // indexed by sector, filled for candidates
    FrameBox goal;
    std::vector<FrameBox> suffix;  // suffix[i] = sum_{m >= i} e_m hull(leg m)
    UniformGrid grid;
    double reach_t = 0.0;
    double reach_n = 0.0;
  };
  std::vector<char> needed(sig.size(), 0);
  for (const auto& cl : e.cand)
    for (int k : cl) needed[k] = 1;

  auto build = [&](const Frame& f, FrameData& d) {
    d.box.assign(sig.size(), FrameBox{});
    for (std::size_t k = 0; k < sig.size(); ++k) {
      if (!needed[k]) continue;
      d.box[k] = region_box(c, e.extended ? sig[k].extended_region(lambda) : sig[k].region(lambda), f);
    }
    d.goal = box_minus(target_box(c, e.target, f, lambda), point_box(e.fixed_sum, f));
    d.suffix.assign(static_cast<std::size_t>(legs) + 1, FrameBox{{0.0, 0.0}, {0.0, 0.0}});
    for (int i = legs - 1; i >= 0; --i) {
      FrameBox h = d.box[e.cand[i].front()];
      for (int k : e.cand[i]) h = {hull(h.t, d.box[k].t), hull(h.n, d.box[k].n)};
      d.suffix[i] = d.suffix[i + 1] + signed_box(e.signs[i], h);
    }
    std::vector<Vec2> centers;
    double cell = 0.0;
    d.reach_t = d.reach_n = 0.0;
    for (int k : e.cand[L]) {
      const FrameBox& b = d.box[k];
      centers.push_back({b.t.mid(), b.n.mid()});
      cell = std::max({cell, b.t.width(), b.n.width()});
      d.reach_t = std::max(d.reach_t, 0.5 * b.t.width());
      d.reach_n = std::max(d.reach_n, 0.5 * b.n.width());
    }
    d.grid = UniformGrid(centers, e.cand[L], cell);
  };

  const std::vector<int>& outer = e.cand[0];
  const int workers = std::max(1, e.workers);
  std::vector<WorkerOut> outs(static_cast<std::size_t>(workers));
  for (const auto& cl : e.cand) {
    if (cl.empty()) return outs;
  }

  FrameData shared;
  if (!per_leg0) build(Frame::at(e.target.sector.center_theta), shared);

  parallel_chunks(outer.size(), workers, [&](int w, std::size_t lo, std::size_t hi) {
    WorkerOut& out = outs[w];
    FrameData local;
    std::vector<int> tuple(static_cast<std::size_t>(legs));
    std::vector<FrameBox> tb(static_cast<std::size_t>(legs));
    auto emit = [&] {
      if (!rect_sum_meets(tb.data(), e.signs.data(), legs, per_leg0 ? local.goal : shared.goal)) return;
      if (e.accept && !e.accept(tuple)) return;
      ++out.count;
      if (e.keep) out.tuples.push_back(tuple);
    };
    for (std::size_t oi = lo; oi < hi; ++oi) {
      const int k0 = outer[oi];
      if (per_leg0) build(Frame::at(sig[static_cast<std::size_t>(k0)].center_theta), local);
      const FrameData& d = per_leg0 ? local : shared;
      tuple[0] = k0;
      tb[0] = d.box[k0];
      if (legs == 1) {
        emit();
        continue;
      }

      std::function<void(int, FrameBox)> rec = [&](int i, FrameBox partial) {
        // Prune prefixes that cannot reach the goal even with the hulls.
        if (!box_has_zero(box_minus(partial + d.suffix[i], d.goal))) {
          ++out.pruned;
          return;
        }
        if (i < L) {
          for (int k : e.cand[i]) {
            tuple[i] = k;
            tb[i] = d.box[k];
            rec(i + 1, partial + signed_box(e.signs[i], d.box[k]));
          }
          return;
        }
        // Last leg: e_L B in goal - partial, so B meets e_L (goal - partial).
        FrameBox want = signed_box(e.signs[L], box_minus(d.goal, partial));
        const double pad = 4.0 * kBoxSlack;
        std::vector<int> hits;
        d.grid.query(want.t.lo - d.reach_t - pad, want.t.hi + d.reach_t + pad, want.n.lo - d.reach_n - pad,
                     want.n.hi + d.reach_n + pad, [&](int k) { hits.push_back(k); });
        std::sort(hits.begin(), hits.end());
        for (int k : hits) {
          tuple[L] = k;
          tb[L] = d.box[k];
          emit();
        }
      };
      rec(1, signed_box(e.signs[0], d.box[k0]));
    }
  });
  return outs;
}

void merge(MomResult& r, std::vector<WorkerOut>& outs, bool keep) {
  if (keep) r.tuples.emplace();
  for (auto& o : outs) {
    r.count += o.count;
    r.pruned_pairs += o.pruned;
    if (keep) {
      for (auto& t : o.tuples) r.tuples->push_back(std::move(t));
    }
  }
}

}  // namespace

std::string mode_name(const ModeSpec& m) { return m.kind == CompatMode::rect ? "rect" : "sampled"; }

bool compatible(const CompatibilityQuery& q, const Curve& c, double lambda) {
  check_signs(q.signs, "compatible");
  if (q.signs.size() != q.free_sectors.size()) {
    throw MalformedQuery("compatible: need one sign per free sector");
  }
  if (q.free_sectors.empty() && q.target.kind != Target::Kind::point) {
    throw MalformedQuery("compatible: a query without free sectors needs a point target");
  }
  Vec2 fixed;
  for (const Vec2& p : q.fixed_momenta) fixed += p;
  if (q.free_sectors.empty()) {
    Vec2 d = fixed - q.target.point;
    return std::fabs(d.x) <= kBoxSlack && std::fabs(d.y) <= kBoxSlack;
  }

  const Frame f = q.target.is_region() ? Frame::at(q.target.sector.center_theta)
                                       : Frame::at(q.free_sectors.front().center_theta);
  const int n = static_cast<int>(q.free_sectors.size());
  std::vector<FrameBox> boxes(static_cast<std::size_t>(n));
  auto leg_region = [&](const Sector& s) { return q.extended ? s.extended_region(lambda) : s.region(lambda); };
  for (int i = 0; i < n; ++i) boxes[i] = region_box(c, leg_region(q.free_sectors[i]), f);
  const FrameBox goal = box_minus(target_box(c, q.target, f, lambda), point_box(fixed, f));

  const bool rect = rect_sum_meets(boxes.data(), q.signs.data(), n, goal);
  if (q.mode.kind == CompatMode::rect) return rect;
  if (q.mode.samples_per_sector < 2) throw MalformedQuery("compatible: sampled mode needs at least two samples");
  if (q.mode.rect_prefilter && !rect) return false;
  std::vector<ArcRegion> regions;
  for (const auto& s : q.free_sectors) regions.push_back(leg_region(s));
  return sampled_witness(c, q.signs, regions, fixed, q.target, lambda, q.mode.samples_per_sector);
}

std::vector<int> mom_signs(int legs) {
  check_legs(legs);
  std::vector<int> s(static_cast<std::size_t>(legs), -1);
  for (int i = 0; i < (legs + 1) / 2; ++i) s[i] = 1;
  return s;
}

MomResult mom_count(const Sectorization& sig, int legs, const Target& target, const MomOptions& opts) {
  const auto t0 = Clock::now();
  const MomSetup s = make_setup(sig, legs, target, opts);
  EngineSpec e;
  e.signs = s.signs;
  e.cand = s.cand;
  e.target = target;
  e.keep = opts.keep_tuples;
  e.workers = opts.workers;
  if (opts.mode.kind == CompatMode::sampled) {
    const int along = opts.mode.samples_per_sector;
    e.accept = [&sig, &s, &target, along](const std::vector<int>& t) { return witness_for(sig, s, t, target, along); };
  }
  auto outs = run_engine(sig, e);
  MomResult r;
  r.mode = opts.mode;
  merge(r, outs, opts.keep_tuples);
  r.elapsed_seconds = seconds_since(t0);
  return r;
}

MomResult mom_count_dense(const Sectorization& sig, int legs, const Target& target, const MomOptions& opts) {
  const auto t0 = Clock::now();
  const MomSetup s = make_setup(sig, legs, target, opts);
  const Curve& c = sig.curve();
  const bool sampled = opts.mode.kind == CompatMode::sampled;

  MomResult r;
  r.mode = opts.mode;
  if (opts.keep_tuples) r.tuples.emplace();
  std::vector<FrameBox> box(sig.size());
  FrameBox goal;
  auto fill = [&](const Frame& f) {
    for (std::size_t k = 0; k < sig.size(); ++k) box[k] = region_box(c, sig[k].region(s.lambda), f);
    goal = target_box(c, target, f, s.lambda);
  };
  if (!s.per_leg0_frame) fill(setup_frame(sig, target, 0));

  std::vector<int> tuple(static_cast<std::size_t>(legs));
  std::vector<FrameBox> tb(static_cast<std::size_t>(legs));
  std::function<void(int)> rec = [&](int i) {
    if (i == legs) {
      if (!rect_sum_meets(tb.data(), s.signs.data(), legs, goal)) return;
      if (sampled && !witness_for(sig, s, tuple, target, opts.mode.samples_per_sector)) return;
      ++r.count;
      if (opts.keep_tuples) r.tuples->push_back(tuple);
      return;
    }
    for (int k : s.cand[i]) {
      if (i == 0 && s.per_leg0_frame) fill(setup_frame(sig, target, k));
      tuple[i] = k;
      tb[i] = box[k];
      rec(i + 1);
    }
  };
  rec(0);
  r.elapsed_seconds = seconds_since(t0);
  return r;
}

nlohmann::json mom_result_to_json(const MomResult& r, const Sectorization& sig) {
  nlohmann::json j;
  j["count"] = r.count;
  j["mode"] = mode_name(r.mode);
  if (r.mode.kind == CompatMode::sampled) j["samples_per_sector"] = r.mode.samples_per_sector;
  j["Lambda"] = sig.lambda();
  j["ell"] = sig.ell();
  j["elapsed"] = r.elapsed_seconds;
  j["pruned_pairs"] = r.pruned_pairs;
  if (r.tuples) j["tuples"] = *r.tuples;
  return j;
}

std::vector<std::vector<int>> cons_enumerate(const std::vector<FixedMomentum>& fixed,
                                             const std::vector<FixedSector>& fixed_sectors,
                                             const std::vector<FreeLeg>& free, const Sectorization& sig,
                                             const Sectorization* window_sig) {
  const Curve& c = sig.curve();
  const double L = c.length();
  if (window_sig && !window_sig->curve().same_as(c)) {
    throw CurveMismatch("cons_enumerate: window sectorization uses a different curve");
  }
  Vec2 fixed_sum;
  for (const auto& f : fixed) {
    if (f.sign != 1 && f.sign != -1) throw MalformedQuery("cons_enumerate: signs must be +1 or -1");
    fixed_sum += f.sign * f.k;
  }
  std::vector<int> signs;
  std::vector<int> fixed_idx;
  for (const auto& f : fixed_sectors) {
    if (f.index < 0 || static_cast<std::size_t>(f.index) >= sig.size()) {
      throw MalformedQuery("cons_enumerate: fixed sector index out of range");
    }
    signs.push_back(f.sign);
    fixed_idx.push_back(f.index);
  }
  std::vector<std::vector<int>> cand;
  for (const auto& leg : free) {
    signs.push_back(leg.sign);
    std::vector<int> list;
    if (leg.window >= 0) {
      if (!window_sig) throw MalformedQuery("cons_enumerate: windowed leg without a window sectorization");
      if (static_cast<std::size_t>(leg.window) >= window_sig->size()) {
        throw MalformedQuery("cons_enumerate: window index out of range");
      }
      const Sector& w = (*window_sig)[static_cast<std::size_t>(leg.window)];
      for (std::size_t k = 0; k < sig.size(); ++k) {
        const Sector& s = sig[k];
        if (arc_overlap(s.ext_arc_lo(), s.ext_arc_hi(), w.ext_arc_lo(), w.ext_arc_hi(), L) > 1e-12 * sig.ell()) {
          list.push_back(static_cast<int>(k));
        }
      }
    } else {
      for (std::size_t k = 0; k < sig.size(); ++k) list.push_back(static_cast<int>(k));
    }
    cand.push_back(std::move(list));
  }
  check_signs(signs, "cons_enumerate");

  std::vector<std::vector<int>> out;
  const int nf = static_cast<int>(fixed_idx.size());
  const int nfree = static_cast<int>(free.size());
  const int total = nf + nfree;
  if (total == 0) {
    if (std::fabs(fixed_sum.x) <= kBoxSlack && std::fabs(fixed_sum.y) <= kBoxSlack) out.emplace_back();
    return out;
  }

  EngineSpec e;
  e.signs = signs;
  for (int k : fixed_idx) e.cand.push_back({k});
  for (auto& cl : cand) e.cand.push_back(std::move(cl));
  e.extended = true;
  e.target = Target::zero();
  e.fixed_sum = fixed_sum;
  e.keep = true;
  auto outs = run_engine(sig, e);
  for (auto& o : outs) {
    for (auto& t : o.tuples) out.emplace_back(t.begin() + nf, t.end());
  }
  return out;
}

namespace {

struct PairSetup {
  std::vector<ArcRegion> ext;
  std::vector<double> radius;
};

PairSetup pair_setup(const Sectorization& sig) {
  PairSetup p;
  const Curve& c = sig.curve();
  for (const Sector& s : sig.sectors()) {
    p.ext.push_back(s.extended_region(sig.lambda()));
    p.radius.push_back(region_radius_bound(c, p.ext.back(), s.center_point));
  }
  return p;
}

const int kPlusPlus[2] = {1, 1};

}  // namespace

std::uint64_t pair_sum_count(const Sectorization& sig, const PairTarget& target, int workers) {
  const Curve& c = sig.curve();
  const double lambda = sig.lambda();
  const std::size_t N = sig.size();
  const PairSetup ps = pair_setup(sig);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(std::max(1, workers)), 0);

  if (target.kind != PairTarget::Kind::momentum_pair) {
    const Frame f = Frame::at(target.s1.center_theta);
    FrameBox goal = region_box(c, target.s1.extended_region(lambda), f);
    if (target.kind == PairTarget::Kind::sector_pair) {
      goal = goal + region_box(c, target.s2.extended_region(lambda), f);
    } else {
      goal = goal + point_box(target.k1, f);
    }
    std::vector<FrameBox> box(N);
    for (std::size_t k = 0; k < N; ++k) box[k] = region_box(c, ps.ext[k], f);
    parallel_chunks(N, workers, [&](int w, std::size_t lo, std::size_t hi) {
      FrameBox pair[2];
      for (std::size_t a = lo; a < hi; ++a) {
        pair[0] = box[a];
        for (std::size_t b = 0; b < N; ++b) {
          pair[1] = box[b];
          if (rect_sum_meets(pair, kPlusPlus, 2, goal)) ++counts[w];
        }
      }
    });
  } else {
    const Vec2 q = target.k1 + target.k2;
    parallel_chunks(N, workers, [&](int w, std::size_t lo, std::size_t hi) {
      FrameBox pair[2];
      for (std::size_t a = lo; a < hi; ++a) {
        const Frame f = Frame::at(sig[a].center_theta);
        const FrameBox goal = point_box(q, f);
        pair[0] = region_box(c, ps.ext[a], f);
        for (std::size_t b = 0; b < N; ++b) {
          Vec2 d = sig[a].center_point + sig[b].center_point - q;
          if (norm(d) > ps.radius[a] + ps.radius[b] + 1e-9) continue;
          pair[1] = region_box(c, ps.ext[b], f);
          if (rect_sum_meets(pair, kPlusPlus, 2, goal)) ++counts[w];
        }
      }
    });
  }
  std::uint64_t total = 0;
  for (auto v : counts) total += v;
  return total;
}

std::uint64_t pair_sum_count_dense(const Sectorization& sig, const PairTarget& target) {
  const Curve& c = sig.curve();
  const double lambda = sig.lambda();
  const std::size_t N = sig.size();
  std::uint64_t count = 0;
  FrameBox pair[2];
  for (std::size_t a = 0; a < N; ++a) {
    Frame f;
    FrameBox goal;
    if (target.kind == PairTarget::Kind::momentum_pair) {
      f = Frame::at(sig[a].center_theta);
      goal = point_box(target.k1 + target.k2, f);
    } else {
      f = Frame::at(target.s1.center_theta);
      goal = region_box(c, target.s1.extended_region(lambda), f);
      goal = goal + (target.kind == PairTarget::Kind::sector_pair
                         ? region_box(c, target.s2.extended_region(lambda), f)
                         : point_box(target.k1, f));
    }
    pair[0] = region_box(c, sig[a].extended_region(lambda), f);
    for (std::size_t b = 0; b < N; ++b) {
      pair[1] = region_box(c, sig[b].extended_region(lambda), f);
      if (rect_sum_meets(pair, kPlusPlus, 2, goal)) ++count;
    }
  }
  return count;
}

namespace {

struct RawSecants {
  std::vector<std::pair<double, double>> solutions;
  bool tangency = false;
};

RawSecants scan_secants(const Curve& c, Vec2 p, std::array<int, 2> e, int scan) {
  RawSecants out;
  const double scale = std::max(1.0, c.max_radius_of_curvature());
  auto k2_of = [&](double th) { return e[1] * (p - e[0] * c.position(th)); };
  auto g = [&](double th) { return c.level(k2_of(th)); };

  const double h = kTwoPi / scan;
  std::vector<double> v(static_cast<std::size_t>(scan));
  int flat = 0;
  for (int i = 0; i < scan; ++i) {
    v[i] = g(i * h);
    if (std::fabs(v[i]) <= 1e-11 * scale) ++flat;
  }
  // A solution set with positive measure shows up as a run of zeros.
  if (flat > scan / 100) {
    out.tangency = true;
    return out;
  }

  std::vector<double> roots;
  for (int i = 0; i < scan; ++i) {
    const int j = (i + 1) % scan;
    const double a = i * h;
    const double b = a + h;
    if (v[i] == 0.0) {
      roots.push_back(a);
      continue;
    }
    if ((v[i] < 0.0) != (v[j] < 0.0) && v[j] != 0.0) {
      double lo = a, hi = b, glo = v[i];
      for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      const double r = 0.5 * (lo + hi);
      roots.push_back(r);
      // A root with a vanishing slope is a double root: the solution curve is
      // tangent to the scan and nearby p see a different count.
      const double dh = 1e-6;
      const double slope = (g(r + dh) - g(r - dh)) / (2.0 * dh);
      if (std::fabs(slope) < 1e-5 * scale) out.tangency = true;
    }
  }
  // Touching without crossing: a local minimum of |g| that reaches zero.
  for (int i = 0; i < scan; ++i) {
    const double vm = v[(i + scan - 1) % scan];
    const double vp = v[(i + 1) % scan];
    if (std::fabs(v[i]) > std::fabs(vm) || std::fabs(v[i]) > std::fabs(vp)) continue;
    if ((vm < 0.0) != (v[i] < 0.0) || (vp < 0.0) != (v[i] < 0.0)) continue;
    if (std::fabs(v[i]) > 1e-3 * scale) continue;
    double lo = (i - 1) * h, hi = (i + 1) * h;
    for (int it = 0; it < 100; ++it) {
      double m1 = lo + (hi - lo) * 0.381966011250105;
      double m2 = hi - (hi - lo) * 0.381966011250105;
      if (std::fabs(g(m1)) < std::fabs(g(m2))) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    if (std::fabs(g(0.5 * (lo + hi))) < 1e-9 * scale) out.tangency = true;
  }

  for (double r : roots) {
    const double th1 = wrap_angle(r);
    const Vec2 k2 = k2_of(th1);
    auto pr = c.try_project(k2);
    if (!pr) continue;
    out.solutions.emplace_back(th1, wrap_angle(pr->theta));
  }
  std::sort(out.solutions.begin(), out.solutions.end());
  std::vector<std::pair<double, double>> dedup;
  for (const auto& s : out.solutions) {
    bool dup = false;
    for (const auto& d : dedup) {
      if (circular_distance(s.first, d.first, kTwoPi) <= 1e-6) dup = true;
    }
    if (!dup) dedup.push_back(s);
  }
  out.solutions = std::move(dedup);
  return out;
}

int unordered_count(const std::vector<std::pair<double, double>>& sols) {
  std::vector<char> used(sols.size(), 0);
  int count = 0;
  for (std::size_t i = 0; i < sols.size(); ++i) {
    if (used[i]) continue;
    used[i] = 1;
    ++count;
    for (std::size_t j = i + 1; j < sols.size(); ++j) {
      if (!used[j] && circular_distance(sols[j].first, sols[i].second, kTwoPi) <= 1e-6 &&
          circular_distance(sols[j].second, sols[i].first, kTwoPi) <= 1e-6) {
        used[j] = 1;
        break;
      }
    }
  }
  return count;
}

}  // namespace

SecantResult secant_count(const Curve& c, Vec2 p, std::array<int, 2> signs, int scan) {
  for (int s : signs) {
    if (s != 1 && s != -1) throw MalformedQuery("secant_count: signs must be +1 or -1");
  }
  if (scan < 10000) throw MalformedQuery("secant_count: scan must be at least 10^4");
  const bool same = signs[0] == signs[1];
  if (!same && norm(p) < 1e-14) throw MalformedQuery("secant_count: p must be nonzero for a difference");

  auto counted = [&](const RawSecants& raw) {
    return same ? unordered_count(raw.solutions) : static_cast<int>(raw.solutions.size());
  };
  SecantResult r;
  RawSecants raw = scan_secants(c, p, signs, scan);
  r.solutions = raw.solutions;
  r.ordered_count = static_cast<int>(raw.solutions.size());
  r.count = counted(raw);
  r.tangency = raw.tangency;
  if (r.tangency) {
    const double step = 1e-4 * (1.0 + norm(p));
    const Vec2 dir = unit(0.3);
    r.count_below = counted(scan_secants(c, p - step * dir, signs, scan));
    r.count_above = counted(scan_secants(c, p + step * dir, signs, scan));
  }
  return r;
}

LocalizationReport localization_check(const std::vector<std::vector<int>>& tuples, const Sectorization& sig,
                                      Vec2 p, double omega, double C) {
  LocalizationReport rep;
  const Curve& c = sig.curve();
  for (const auto& t : tuples) {
    if (t.empty()) continue;
    const Sector& s0 = sig[static_cast<std::size_t>(t[0])];
    const Vec2 k = s0.center_point;
    const Vec2 ak = antipode(c, s0.center_theta).position;
    bool clustered = true;
    for (int idx : t) {
      const Vec2 x = sig[static_cast<std::size_t>(idx)].center_point;
      if (norm(x - k) > omega && norm(x - ak) > omega) clustered = false;
    }
    if (!clustered) {
      rep.hypothesis_failed.push_back(t);
      continue;
    }
    ++rep.checked;
    const double n = 0.5 * (static_cast<double>(t.size()) + 1.0);
    if (std::min(norm(p - k), norm(p - ak)) > C * n * omega) rep.violations.push_back(t);
  }
  return rep;
}

std::uint64_t windowed_pair_count(const Sectorization& sig, double p_theta, std::array<int, 2> signs,
                                  double omega1, double omega2, Vec2 center, double a, double b) {
  for (int s : signs) {
    if (s != 1 && s != -1) throw MalformedQuery("windowed_pair_count: signs must be +1 or -1");
  }
  const Curve& c = sig.curve();
  const double L = c.length();
  const double sp = c.arclength(p_theta);
  const double sap = c.arclength(p_theta + kPi);
  const Frame f = Frame::at(p_theta);

  std::vector<int> near;
  std::vector<double> anti(sig.size());
  for (std::size_t k = 0; k < sig.size(); ++k) {
    const double sk = sig[k].center_arclength;
    anti[k] = c.arclength(sig[k].center_theta + kPi);
    if (std::min(circular_distance(sk, sp, L), circular_distance(sk, sap, L)) <= omega2) {
      near.push_back(static_cast<int>(k));
    }
  }
  std::uint64_t count = 0;
  for (int i : near) {
    for (int j : near) {
      const double sj = sig[j].center_arclength;
      const double d = std::min(circular_distance(sig[i].center_arclength, sj, L), circular_distance(anti[i], sj, L));
      if (d < omega1) continue;
      const Vec2 v = signs[0] * sig[i].center_point + signs[1] * sig[j].center_point - center;
      if (std::fabs(f.coord_n(v)) <= 0.5 * a && std::fabs(f.coord_t(v)) <= 0.5 * b) ++count;
    }
  }
  return count;
}

WindowSpec window_separation(const Curve& c, const std::vector<std::pair<double, double>>& arcs, double ell) {
  WindowSpec w;
  w.arcs = arcs;
  const double L = c.length();
  auto gap = [L](double a_lo, double a_hi, double b_lo, double b_hi) {
    if (arc_overlap(a_lo, a_hi, b_lo, b_hi, L) > 0.0) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    for (double x : {a_lo, a_hi}) {
      for (double y : {b_lo, b_hi}) d = std::min(d, circular_distance(x, y, L));
    }
    return d;
  };
  double delta = 0.0;
  double best = 0.0;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    delta = std::max(delta, arcs[i].second - arcs[i].first);
    for (std::size_t j = 0; j < arcs.size(); ++j) {
      if (i == j) continue;
      const double alo = c.arclength(c.theta_at_arclength(arcs[j].first) + kPi);
      double ahi = c.arclength(c.theta_at_arclength(arcs[j].second) + kPi);
      while (ahi < alo) ahi += L;
      const double m = std::min(gap(arcs[i].first, arcs[i].second, arcs[j].first, arcs[j].second),
                                gap(arcs[i].first, arcs[i].second, alo, ahi));
      best = std::max(best, m);
    }
  }
  w.omega = 3.0 * best;
  w.valid = best > std::max(delta, 4.0 * ell);
  return w;
}

}  // namespace fermi
