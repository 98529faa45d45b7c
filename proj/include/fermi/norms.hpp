#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "fermi/curve.hpp"
#include "fermi/sectorization.hpp"

namespace fermi {

struct KernelMask {
  enum class Kind { none, momentum_conserving, particle_particle };
  Kind kind = Kind::none;
  std::vector<int> signs;  // momentum_conserving only; particle_particle is (+,+,-,-)

  static KernelMask none() { return {}; }
  static KernelMask momentum_conserving(std::vector<int> s) { return {Kind::momentum_conserving, std::move(s)}; }
  static KernelMask particle_particle() { return {Kind::particle_particle, {1, 1, -1, -1}}; }
  bool active() const { return kind != Kind::none; }
};

std::string mask_name(const KernelMask& m);

// Whether the tuple of extended sectors, with the mask's signs, is compatible
// with total momentum zero (rect mode). Always true without a mask.
bool mask_allows(const Sectorization& sig, const KernelMask& mask, const std::vector<int>& tuple);

// Sparse nonnegative weights on sector tuples. Zero weights are dropped, so the
// support is exactly the set of stored tuples.
class SectorKernel {
 public:
  using Entries = std::map<std::vector<int>, double>;

  // Checks legs, indices, weights and, unless check_mask is false, that every
  // tuple is allowed by the mask (MaskViolation otherwise).
  SectorKernel(int legs, Sectorization sig, KernelMask mask = {}, Entries entries = {}, bool check_mask = true);

  static SectorKernel from_json(const nlohmann::json& j, const Sectorization& sig);
  nlohmann::json to_json() const;

  int legs() const { return legs_; }
  const Sectorization& sig() const { return sig_; }
  const KernelMask& mask() const { return mask_; }
  const Entries& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  double weight(const std::vector<int>& tuple) const;
  SectorKernel scaled(double factor) const;

 private:
  int legs_;
  Sectorization sig_;
  KernelMask mask_;
  Entries entries_;
};

struct NormReport {
  int p = 0;
  double value = 0.0;
  std::vector<int> argmax_positions;  // fixed leg positions attaining the max
  std::vector<int> argmax_sectors;
};

// Max over p leg positions and sectors of the sum over the other legs. p equal
// to the number of legs is the plain max.
NormReport p_norm(const SectorKernel& k, int p);
// The p = 1 norm with the inner sum restricted to tuples having two other legs
// at least omega apart, both directly and after the antipodal map (arclength
// gaps between the plain arcs).
NormReport omega_norm(const SectorKernel& k, double omega);
// Max over the first two legs of the sum over the last two.
NormReport channel_norm(const SectorKernel& k);

struct OneVsThree {
  double norm1 = 0.0;
  double norm3 = 0.0;
  double ratio = 0.0;      // |K|_1 / |K|_3, zero for the empty kernel
  double ratio_ell = 0.0;  // ell times ratio
};

OneVsThree compare_1_vs_3(const SectorKernel& k);

struct OmegaDecomposition {
  double omega = 0.0;
  double norm1 = 0.0;
  double norm1_omega = 0.0;
  double norm3 = 0.0;
  // Smallest C with |K|_1 <= |K|_{1,omega} + C n (omega / ell)^2 |K|_3.
  double C = 0.0;
  bool hypothesis_ok = true;  // omega >= max(ell, M^(-(j-1)/2))
};

OmegaDecomposition omega_decomposition_check(const SectorKernel& k, double omega);

// Aggregates a kernel on a coarser sectorization onto sig: every tuple of sig
// collects the weights of the tuples whose extended sectors overlap it leg by
// leg. The result keeps the mask and drops tuples the mask does not allow.
SectorKernel resectorize(const SectorKernel& k, const Sectorization& sig);

struct ChannelCheck {
  double channel = 0.0;
  double norm3 = 0.0;
  double factor = 0.0;  // ell^(1/n0) / ell
  double ratio = 0.0;   // channel / (norm3 factor)
};

// Raises SymmetryError, carrying the ratio, when the curve is symmetric.
ChannelCheck channel_vs_3_check(const SectorKernel& k, int n0,
                                const std::optional<AsymmetryCertificate>& cert = std::nullopt);

// Bound factor (1/ell)(1 + log(1/(ell^2 M^(j-1))) / (ell M^(j-1))) for |K|_1 against |K|_3.
double one_vs_three_bound(const Sectorization& sig);

struct RandomKernelOptions {
  int max_anchors = 1;
  double weight_lo = 0.1;
  double weight_hi = 1.0;
};

// Random kernel supported on compatible tuples: between one and max_anchors
// anchor sectors on the first leg, each carrying a random subset of its
// completions with random weights.
SectorKernel random_masked_kernel(const Sectorization& sig, const KernelMask& mask, std::mt19937_64& rng,
                                  const RandomKernelOptions& opts = {});

// Weight one on every compatible tuple; enumerates all of them, so meant for
// small sectorizations.
SectorKernel constant_masked_kernel(const Sectorization& sig, int legs, const KernelMask& mask);

// Particle-particle kernel with weight one on all completions (s3, s4) of the
// pairs (s1, s2) with s1 within `half_width` sectors of theta and s2 within
// `half_width` sectors of theta + pi.
SectorKernel pp_window_kernel(const Sectorization& sig, double theta, int half_width);

}  // namespace fermi
