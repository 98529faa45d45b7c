#include "fermi/norms.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fermi/errors.hpp"
#include "fermi/momentum.hpp"

namespace fermi {

namespace {

std::vector<int> mask_signs(const KernelMask& m, int legs) {
  if (m.kind == KernelMask::Kind::particle_particle) return {1, 1, -1, -1};
  if (m.kind == KernelMask::Kind::momentum_conserving) return m.signs;
  return std::vector<int>(static_cast<std::size_t>(legs), 1);
}

void check_mask(const KernelMask& m, int legs) {
  if (m.kind == KernelMask::Kind::particle_particle && legs != 4) {
    throw MalformedQuery("kernel: a particle-particle mask needs four legs");
  }
  if (m.kind == KernelMask::Kind::momentum_conserving) {
    if (static_cast<int>(m.signs.size()) != legs) throw MalformedQuery("kernel: need one mask sign per leg");
    for (int s : m.signs) {
      if (s != 1 && s != -1) throw MalformedQuery("kernel: mask signs must be +1 or -1");
    }
  }
}

// Lexicographic list of the p-element subsets of {0, ..., n-1}.
std::vector<std::vector<int>> subsets(int n, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    int i = p - 1;
    while (i >= 0 && cur[i] == n - p + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int m = i + 1; m < p; ++m) cur[m] = cur[m - 1] + 1;
  }
  return out;
}

// Max over the given position subsets of the sums grouped by the sectors at
// those positions; only entries passing `keep(tuple, positions)` contribute.
// Keys are packed into 16-bit fields, first position highest, so sorting the
// packed keys orders them lexicographically.
template <class Keep>
NormReport grouped_max(const SectorKernel& k, int p, const std::vector<std::vector<int>>& position_sets, Keep keep) {
  NormReport r;
  r.p = p;
  const bool packable = p <= 4 && k.sig().size() < (std::size_t{1} << 16);
  std::vector<std::pair<std::uint64_t, double>> packed;
  for (const auto& pos : position_sets) {
    if (packable) {
      packed.clear();
      for (const auto& [tuple, w] : k.entries()) {
        if (!keep(tuple, pos)) continue;
        std::uint64_t key = 0;
        for (int m : pos) key = (key << 16) | static_cast<std::uint64_t>(tuple[m]);
        packed.emplace_back(key, w);
      }
      std::sort(packed.begin(), packed.end());
      for (std::size_t a = 0; a < packed.size();) {
        std::size_t b = a;
        double v = 0.0;
        for (; b < packed.size() && packed[b].first == packed[a].first; ++b) v += packed[b].second;
        if (v > r.value) {
          r.value = v;
          r.argmax_positions = pos;
          r.argmax_sectors.assign(pos.size(), 0);
          std::uint64_t key = packed[a].first;
          for (int m = static_cast<int>(pos.size()) - 1; m >= 0; --m, key >>= 16) {
            r.argmax_sectors[m] = static_cast<int>(key & 0xffff);
          }
        }
        a = b;
      }
      continue;
    }
    std::map<std::vector<int>, double> sums;
    std::vector<int> key(pos.size());
    for (const auto& [tuple, w] : k.entries()) {
      if (!keep(tuple, pos)) continue;
      for (std::size_t m = 0; m < pos.size(); ++m) key[m] = tuple[pos[m]];
      sums[key] += w;
    }
    for (const auto& [key_s, v] : sums) {
      if (v > r.value) {
        r.value = v;
        r.argmax_positions = pos;
        r.argmax_sectors = key_s;
      }
    }
  }
  return r;
}

struct ArcSpan {
  double mid = 0.0;
  double half = 0.0;
};

double arc_gap(const ArcSpan& a, const ArcSpan& b, double L) {
  double d = std::fmod(std::fabs(a.mid - b.mid), L);
  d = std::min(d, L - d);
  return std::max(0.0, d - a.half - b.half);
}

}  // namespace

std::string mask_name(const KernelMask& m) {
  switch (m.kind) {
    case KernelMask::Kind::none:
      return "none";
    case KernelMask::Kind::momentum_conserving:
      return "mc";
    case KernelMask::Kind::particle_particle:
      return "pp";
  }
  return "none";
}

bool mask_allows(const Sectorization& sig, const KernelMask& mask, const std::vector<int>& tuple) {
  if (!mask.active()) return true;
  CompatibilityQuery q;
  q.signs = mask_signs(mask, static_cast<int>(tuple.size()));
  if (q.signs.size() != tuple.size()) throw MalformedQuery("mask_allows: tuple length does not match the mask");
  for (int i : tuple) q.free_sectors.push_back(sig[static_cast<std::size_t>(i)]);
  q.target = Target::zero();
  q.extended = true;
  return compatible(q, sig.curve(), sig.lambda());
}

SectorKernel::SectorKernel(int legs, Sectorization sig, KernelMask mask, Entries entries, bool check)
    : legs_(legs), sig_(std::move(sig)), mask_(std::move(mask)) {
  if (legs_ < 2) throw MalformedQuery("kernel: need at least two legs");
  check_mask(mask_, legs_);
  if (mask_.kind == KernelMask::Kind::particle_particle) mask_.signs = {1, 1, -1, -1};
  const int n = static_cast<int>(sig_.size());
  for (auto it = entries.begin(); it != entries.end();) {
    const auto& [tuple, w] = *it;
    if (static_cast<int>(tuple.size()) != legs_) throw MalformedQuery("kernel: tuple length differs from legs");
    for (int i : tuple) {
      if (i < 0 || i >= n) throw MalformedQuery("kernel: sector index out of range");
    }
    if (!(w >= 0.0) || !std::isfinite(w)) throw MalformedQuery("kernel: weights must be finite and nonnegative");
    if (w == 0.0) {
      it = entries.erase(it);
      continue;
    }
    if (check && !mask_allows(sig_, mask_, tuple)) {
      throw MaskViolation("kernel: tuple not allowed by the " + mask_name(mask_) + " mask");
    }
    ++it;
  }
  entries_ = std::move(entries);
}

double SectorKernel::weight(const std::vector<int>& tuple) const {
  auto it = entries_.find(tuple);
  return it == entries_.end() ? 0.0 : it->second;
}

SectorKernel SectorKernel::scaled(double factor) const {
  if (!(factor >= 0.0)) throw MalformedQuery("kernel: scale factor must be nonnegative");
  Entries e;
  for (const auto& [t, w] : entries_) e.emplace(t, w * factor);
  return SectorKernel(legs_, sig_, mask_, std::move(e), false);
}

nlohmann::json SectorKernel::to_json() const {
  nlohmann::json j;
  j["legs"] = legs_;
  j["mask"] = mask_name(mask_);
  if (mask_.kind == KernelMask::Kind::momentum_conserving) j["signs"] = mask_.signs;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [t, w] : entries_) arr.push_back(nlohmann::json::array({t, w}));
  j["entries"] = std::move(arr);
  return j;
}

SectorKernel SectorKernel::from_json(const nlohmann::json& j, const Sectorization& sig) {
  try {
    const int legs = j.at("legs").get<int>();
    KernelMask mask;
    const std::string m = j.value("mask", std::string("none"));
    if (m == "pp") {
      mask = KernelMask::particle_particle();
    } else if (m == "mc") {
      mask = KernelMask::momentum_conserving(j.at("signs").get<std::vector<int>>());
    } else if (m != "none") {
      throw ParseError("kernel: unknown mask '" + m + "'");
    }
    Entries e;
    for (const auto& item : j.at("entries")) {
      auto t = item.at(0).get<std::vector<int>>();
      e[t] += item.at(1).get<double>();
    }
    return SectorKernel(legs, sig, mask, std::move(e));
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("kernel: ") + ex.what());
  }
}

NormReport p_norm(const SectorKernel& k, int p) {
  if (p < 1 || p > k.legs()) throw MalformedQuery("p_norm: p must lie in [1, legs]");
  return grouped_max(k, p, subsets(k.legs(), p), [](const std::vector<int>&, const std::vector<int>&) { return true; });
}

NormReport omega_norm(const SectorKernel& k, double omega) {
  const int n = k.legs();
  if (n < 3) throw MalformedQuery("omega_norm: need at least three legs");
  const Sectorization& sig = k.sig();
  const Curve& c = sig.curve();
  const double L = c.length();
  std::vector<ArcSpan> direct(sig.size());
  std::vector<ArcSpan> anti(sig.size());
  for (std::size_t i = 0; i < sig.size(); ++i) {
    const Sector& s = sig[i];
    direct[i] = {0.5 * (s.arc_lo + s.arc_hi), 0.5 * (s.arc_hi - s.arc_lo)};
    const double a_lo = c.arclength(s.theta_lo + kPi);
    const double a_hi = c.arclength(s.theta_hi + kPi);
    anti[i] = {0.5 * (a_lo + a_hi), 0.5 * std::fabs(a_hi - a_lo)};
  }
  auto far = [&](int a, int b) {
    return arc_gap(direct[a], direct[b], L) >= omega && arc_gap(direct[a], anti[b], L) >= omega;
  };
  auto keep = [&](const std::vector<int>& t, const std::vector<int>& pos) {
    const int fixed = pos[0];
    for (int a = 0; a < n; ++a) {
      if (a == fixed) continue;
      for (int b = 0; b < n; ++b) {
        if (b == fixed || b == a) continue;
        if (far(t[a], t[b])) return true;
      }
    }
    return false;
  };
  return grouped_max(k, 1, subsets(n, 1), keep);
}

NormReport channel_norm(const SectorKernel& k) {
  if (k.legs() != 4) throw MalformedQuery("channel_norm: need a four-legged kernel");
  return grouped_max(k, 2, {{0, 1}}, [](const std::vector<int>&, const std::vector<int>&) { return true; });
}

OneVsThree compare_1_vs_3(const SectorKernel& k) {
  if (!k.mask().active()) throw MaskRequired("compare_1_vs_3: the kernel needs a momentum conservation mask");
  if (k.legs() != 4) throw MalformedQuery("compare_1_vs_3: need a four-legged kernel");
  OneVsThree r;
  r.norm1 = p_norm(k, 1).value;
  r.norm3 = p_norm(k, 3).value;
  r.ratio = r.norm3 > 0.0 ? r.norm1 / r.norm3 : 0.0;
  r.ratio_ell = k.sig().ell() * r.ratio;
  return r;
}

OmegaDecomposition omega_decomposition_check(const SectorKernel& k, double omega) {
  const Sectorization& sig = k.sig();
  OmegaDecomposition r;
  r.omega = omega;
  r.hypothesis_ok = omega >= std::max(sig.ell(), std::pow(sig.base(), -0.5 * (sig.scale() - 1)));
  r.norm1 = p_norm(k, 1).value;
  r.norm1_omega = omega_norm(k, omega).value;
  r.norm3 = p_norm(k, 3).value;
  const double excess = r.norm1 - r.norm1_omega;
  const double unit = k.legs() * (omega / sig.ell()) * (omega / sig.ell()) * r.norm3;
  r.C = (excess > 0.0 && unit > 0.0) ? excess / unit : 0.0;
  return r;
}

SectorKernel resectorize(const SectorKernel& k, const Sectorization& sig) {
  if (!sig.curve().same_as(k.sig().curve())) throw CurveMismatch("resectorize: sectorizations use different curves");
  if (sig.ell() > k.sig().ell() * (1.0 + 1e-9)) {
    throw MalformedQuery("resectorize: the target sectorization must not be coarser");
  }
  const auto lists = overlap_map(sig, k.sig());
  const int n = k.legs();
  SectorKernel::Entries acc;
  std::vector<int> t(static_cast<std::size_t>(n));
  for (const auto& [src, w] : k.entries()) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    bool any_empty = false;
    for (int i = 0; i < n; ++i) any_empty = any_empty || lists[src[i]].empty();
    if (any_empty) continue;
    while (true) {
      for (int i = 0; i < n; ++i) t[i] = lists[src[i]][idx[i]];
      acc[t] += w;
      int i = n - 1;
      while (i >= 0 && ++idx[i] == lists[src[i]].size()) idx[i--] = 0;
      if (i < 0) break;
    }
  }
  SectorKernel::Entries kept;
  for (auto& [tuple, w] : acc) {
    if (mask_allows(sig, k.mask(), tuple)) kept.emplace(tuple, w);
  }
  return SectorKernel(n, sig, k.mask(), std::move(kept), false);
}

ChannelCheck channel_vs_3_check(const SectorKernel& k, int n0, const std::optional<AsymmetryCertificate>& cert) {
  if (k.mask().kind != KernelMask::Kind::particle_particle) {
    throw MaskRequired("channel_vs_3_check: the kernel needs a particle-particle mask");
  }
  if (n0 < 2) throw MalformedQuery("channel_vs_3_check: n0 must be at least 2");
  const AsymmetryCertificate cc = cert ? *cert : certify(k.sig().curve(), n0 + 2, 512);
  ChannelCheck r;
  const double ell = k.sig().ell();
  r.channel = channel_norm(k).value;
  r.norm3 = p_norm(k, 3).value;
  r.factor = std::pow(ell, 1.0 / n0) / ell;
  r.ratio = r.norm3 > 0.0 ? r.channel / (r.norm3 * r.factor) : 0.0;
  if (cc.symmetric) {
    throw SymmetryError("channel_vs_3_check: the curve is symmetric; the bound does not apply", r.ratio);
  }
  if (cc.n0 && *cc.n0 != n0) {
    throw MalformedQuery("channel_vs_3_check: the certificate reports n0 = " + std::to_string(*cc.n0));
  }
  return r;
}

double one_vs_three_bound(const Sectorization& sig) {
  const double ell = sig.ell();
  const double mj = std::pow(sig.base(), sig.scale() - 1);
  const double lg = std::max(0.0, std::log(1.0 / (ell * ell * mj)));
  return (1.0 + lg / (ell * mj)) / ell;
}

SectorKernel random_masked_kernel(const Sectorization& sig, const KernelMask& mask, std::mt19937_64& rng,
                                  const RandomKernelOptions& opts) {
  if (!mask.active()) throw MaskRequired("random_masked_kernel: a mask is required");
  const int legs = mask.kind == KernelMask::Kind::particle_particle ? 4 : static_cast<int>(mask.signs.size());
  check_mask(mask, legs);
  const std::vector<int> signs = mask_signs(mask, legs);
  const int n = static_cast<int>(sig.size());
  std::uniform_int_distribution<int> pick_sector(0, n - 1);
  std::uniform_int_distribution<int> pick_count(1, std::max(1, opts.max_anchors));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> weight(opts.weight_lo, opts.weight_hi);

  std::vector<FreeLeg> free;
  for (int i = 1; i < legs; ++i) free.push_back({signs[i], -1});

  SectorKernel::Entries e;
  const int anchors = pick_count(rng);
  std::set<int> used;
  for (int a = 0; a < anchors; ++a) {
    int s = pick_sector(rng);
    if (!used.insert(s).second) continue;
    const auto fiber = cons_enumerate({}, {{s, signs[0]}}, free, sig);
    if (fiber.empty()) continue;
    const double keep = 0.5 + 0.5 * unit(rng);
    bool any = false;
    std::vector<int> t(static_cast<std::size_t>(legs));
    t[0] = s;
    for (const auto& rest : fiber) {
      const double u = unit(rng);
      const double w = weight(rng);
      if (u > keep) continue;
      std::copy(rest.begin(), rest.end(), t.begin() + 1);
      e[t] = w;
      any = true;
    }
    if (!any) {
      std::copy(fiber.front().begin(), fiber.front().end(), t.begin() + 1);
      e[t] = weight(rng);
    }
  }
  return SectorKernel(legs, sig, mask, std::move(e), false);
}

SectorKernel constant_masked_kernel(const Sectorization& sig, int legs, const KernelMask& mask) {
  check_mask(mask, legs);
  SectorKernel::Entries e;
  if (!mask.active()) {
    const int n = static_cast<int>(sig.size());
    std::vector<int> t(static_cast<std::size_t>(legs), 0);
    while (true) {
      e.emplace(t, 1.0);
      int i = legs - 1;
      while (i >= 0 && ++t[i] == n) t[i--] = 0;
      if (i < 0) break;
    }
  } else {
    std::vector<FreeLeg> free;
    for (int s : mask_signs(mask, legs)) free.push_back({s, -1});
    for (auto& t : cons_enumerate({}, {}, free, sig)) e.emplace(std::move(t), 1.0);
  }
  return SectorKernel(legs, sig, mask, std::move(e), false);
}

SectorKernel pp_window_kernel(const Sectorization& sig, double theta, int half_width) {
  if (half_width < 0) throw MalformedQuery("pp_window_kernel: negative half width");
  const int n = static_cast<int>(sig.size());
  const int i1 = sig.sector_containing(theta);
  const int i2 = sig.sector_containing(theta + kPi);
  std::set<std::pair<int, int>> pairs;
  for (int d1 = -half_width; d1 <= half_width; ++d1) {
    for (int d2 = -half_width; d2 <= half_width; ++d2) {
      pairs.insert({((i1 + d1) % n + n) % n, ((i2 + d2) % n + n) % n});
    }
  }
  SectorKernel::Entries e;
  for (const auto& [s1, s2] : pairs) {
    for (const auto& rest : cons_enumerate({}, {{s1, 1}, {s2, 1}}, {{-1, -1}, {-1, -1}}, sig)) {
      e.emplace(std::vector<int>{s1, s2, rest[0], rest[1]}, 1.0);
    }
  }
  return SectorKernel(4, sig, KernelMask::particle_particle(), std::move(e), false);
}

}  // namespace fermi
