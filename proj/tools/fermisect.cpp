#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fermi/curve.hpp"
#include "fermi/errors.hpp"
#include "fermi/harness.hpp"
#include "fermi/momentum.hpp"
#include "fermi/norms.hpp"
#include "fermi/sectorization.hpp"

using namespace fermi;
using nlohmann::json;

namespace {

constexpr int kErrorExit = 3;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw ParseError("cannot write " + out);
  f << text;
}

void emit(const json& j, const std::string& out) { emit(j.dump(2) + "\n", out); }

int default_workers() {
  if (const char* w = std::getenv("WORKERS")) {
    try {
      return std::max(1, std::stoi(w));
    } catch (const std::exception&) {
    }
  }
  return 1;
}

json norm_json(const NormReport& r) {
  return {{"p", r.p}, {"value", r.value}, {"argmax_positions", r.argmax_positions},
          {"argmax_sectors", r.argmax_sectors}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sectorizations of convex Fermi curves and momentum-conservation sector counts"};
  app.require_subcommand(1);
  int exit_code = 0;

  // curve certify
  auto* curve_cmd = app.add_subcommand("curve", "Curve operations");
  curve_cmd->require_subcommand(1);
  auto* certify_cmd = curve_cmd->add_subcommand("certify", "Symmetry / strong asymmetry certificate");
  std::string curve_file, out_file;
  int nmax = 6, grid = 1024;
  double tol = 1e-6;
  certify_cmd->add_option("--curve", curve_file, "Curve JSON")->required();
  certify_cmd->add_option("--nmax", nmax, "Highest jet order examined");
  certify_cmd->add_option("--grid", grid, "Grid points in the normal angle");
  certify_cmd->add_option("--tol", tol, "Tolerance for jet comparisons");
  certify_cmd->add_option("--out", out_file, "Output file (stdout by default)");
  certify_cmd->callback([&] {
    const Curve c = Curve::from_json(read_json(curve_file));
    emit(certificate_to_json(certify(c, nmax, grid, tol)), out_file);
  });

  // sectorize
  auto* sect_cmd = app.add_subcommand("sectorize", "Build a sectorization");
  double M = 3.0, aleph = 2.0 / 3.0, ext_frac = 1.0 / 64.0;
  int j = 4;
  std::optional<double> ell, lambda;
  bool strict = false;
  sect_cmd->add_option("--curve", curve_file, "Curve JSON")->required();
  sect_cmd->add_option("--M", M, "Scale base");
  sect_cmd->add_option("--j", j, "Scale index");
  sect_cmd->add_option("--aleph", aleph, "Sector length M^(-aleph j)");
  sect_cmd->add_option("--ell", ell, "Explicit sector length (overrides --aleph)");
  sect_cmd->add_option("--lambda", lambda, "Shell half width (default sqrt(2) M^(-(j-1)))");
  sect_cmd->add_option("--extension", ext_frac, "Extension as a fraction of the sector length");
  sect_cmd->add_flag("--strict", strict, "Enforce the admissible length window");
  sect_cmd->add_option("--out", out_file, "Output file");
  sect_cmd->callback([&] {
    const Curve c = Curve::from_json(read_json(curve_file));
    BuildOptions o;
    o.lambda = lambda;
    o.extension_fraction = ext_frac;
    o.strict = strict;
    const EllRule rule = ell ? EllRule::explicit_length(*ell) : EllRule::aleph(aleph);
    emit(Sectorization::build(c, M, j, rule, o).to_json(), out_file);
  });

  // count mom3 / count pairs
  auto* count_cmd = app.add_subcommand("count", "Sector tuple counts");
  count_cmd->require_subcommand(1);
  std::string sig_file, mode = "rect", target_kind = "momentum-pair";
  double target_theta = 0.7;
  std::vector<double> target_point, k1, k2;
  int legs = 3, samples = 4, workers = default_workers();
  bool emit_tuples = false;
  std::optional<double> theta1, theta2;
  auto* mom_cmd = count_cmd->add_subcommand("mom3", "Compatible leg tuples for a sector or point target");
  mom_cmd->add_option("--sig", sig_file, "Sectorization JSON")->required();
  mom_cmd->add_option("--target-theta", target_theta, "Target sector s(p) centred at this normal angle");
  mom_cmd->add_option("--target-point", target_point, "Point target q (x y) instead of a sector")->expected(2);
  mom_cmd->add_option("--legs", legs, "Odd number of legs");
  mom_cmd->add_option("--mode", mode, "rect or sampled")->check(CLI::IsMember({"rect", "sampled"}));
  mom_cmd->add_option("--samples", samples, "Normal lines per sector in sampled mode");
  mom_cmd->add_option("--workers", workers, "Worker threads");
  mom_cmd->add_flag("--emit-tuples", emit_tuples, "Include the tuples in the output");
  mom_cmd->add_option("--out", out_file, "Output file");
  mom_cmd->callback([&] {
    const Sectorization sig = Sectorization::from_json(read_json(sig_file));
    MomOptions o;
    o.mode = mode == "sampled" ? ModeSpec::sampled(samples) : ModeSpec::rect();
    o.keep_tuples = emit_tuples;
    o.workers = workers;
    const Target t = target_point.size() == 2 ? Target::at_point({target_point[0], target_point[1]})
                                              : Target::of_sector(sig.sector_at(target_theta));
    emit(mom_result_to_json(mom_count(sig, legs, t, o), sig), out_file);
  });

  auto* pairs_cmd = count_cmd->add_subcommand("pairs", "Ordered sector pairs whose sum meets a target");
  pairs_cmd->add_option("--sig", sig_file, "Sectorization JSON")->required();
  pairs_cmd->add_option("--target-kind", target_kind, "momentum-pair, momentum-plus-sector or sector-pair")
      ->check(CLI::IsMember({"momentum-pair", "momentum-plus-sector", "sector-pair"}));
  pairs_cmd->add_option("--k1", k1, "First momentum (x y)")->expected(2);
  pairs_cmd->add_option("--k2", k2, "Second momentum (x y)")->expected(2);
  pairs_cmd->add_option("--theta1", theta1, "Normal angle of the first target sector");
  pairs_cmd->add_option("--theta2", theta2, "Normal angle of the second target sector");
  pairs_cmd->add_option("--workers", workers, "Worker threads");
  pairs_cmd->add_option("--out", out_file, "Output file");
  pairs_cmd->callback([&] {
    const Sectorization sig = Sectorization::from_json(read_json(sig_file));
    auto vec = [](const std::vector<double>& v, const char* name) {
      if (v.size() != 2) throw MalformedQuery(std::string("count pairs: ") + name + " is required");
      return Vec2{v[0], v[1]};
    };
    auto sector = [&](const std::optional<double>& th, const char* name) {
      if (!th) throw MalformedQuery(std::string("count pairs: ") + name + " is required");
      return sig.sector_at(*th);
    };
    PairTarget t;
    if (target_kind == "momentum-pair") {
      t = PairTarget::momentum_pair(vec(k1, "--k1"), vec(k2, "--k2"));
    } else if (target_kind == "momentum-plus-sector") {
      t = PairTarget::momentum_plus_sector(vec(k1, "--k1"), sector(theta1, "--theta1"));
    } else {
      t = PairTarget::sector_pair(sector(theta1, "--theta1"), sector(theta2, "--theta2"));
    }
    json r = {{"count", pair_sum_count(sig, t, workers)}, {"target_kind", target_kind},
              {"Lambda", sig.lambda()}, {"ell", sig.ell()}};
    emit(r, out_file);
  });

  // norms eval / norms resectorize
  auto* norms_cmd = app.add_subcommand("norms", "Kernel norms");
  norms_cmd->require_subcommand(1);
  std::string kernel_file, from_file, to_file;
  int p = 1;
  std::optional<double> omega;
  bool channel = false;
  auto* eval_cmd = norms_cmd->add_subcommand("eval", "Evaluate a norm of a kernel");
  eval_cmd->add_option("--kernel", kernel_file, "Kernel JSON")->required();
  eval_cmd->add_option("--sig", sig_file, "Sectorization JSON")->required();
  eval_cmd->add_option("--p", p, "Number of fixed legs");
  eval_cmd->add_option("--omega", omega, "Evaluate the omega-restricted 1-norm instead");
  eval_cmd->add_flag("--channel", channel, "Evaluate the channel norm instead");
  eval_cmd->add_option("--out", out_file, "Output file");
  eval_cmd->callback([&] {
    const Sectorization sig = Sectorization::from_json(read_json(sig_file));
    const SectorKernel k = SectorKernel::from_json(read_json(kernel_file), sig);
    json r;
    if (channel) {
      r = norm_json(channel_norm(k));
      r["norm"] = "channel";
    } else if (omega) {
      r = norm_json(omega_norm(k, *omega));
      r["norm"] = "omega";
      r["omega"] = *omega;
    } else {
      r = norm_json(p_norm(k, p));
      r["norm"] = "p";
    }
    emit(r, out_file);
  });
  auto* resect_cmd = norms_cmd->add_subcommand("resectorize", "Aggregate a kernel onto a finer sectorization");
  resect_cmd->add_option("--kernel", kernel_file, "Kernel JSON over the coarse sectorization")->required();
  resect_cmd->add_option("--from", from_file, "Coarse sectorization JSON")->required();
  resect_cmd->add_option("--to", to_file, "Fine sectorization JSON")->required();
  resect_cmd->add_option("--out", out_file, "Output file");
  resect_cmd->callback([&] {
    const Sectorization from = Sectorization::from_json(read_json(from_file));
    const Sectorization to = Sectorization::from_json(read_json(to_file));
    emit(resectorize(SectorKernel::from_json(read_json(kernel_file), from), to).to_json(), out_file);
  });

  // scan
  auto* scan_cmd = app.add_subcommand("scan", "Scaling scan over a ladder of scales");
  std::string config_file, json_out;
  std::optional<double> budget;
  std::optional<int> scan_workers;
  scan_cmd->add_option("--config", config_file, "Scan configuration JSON")->required();
  scan_cmd->add_option("--out", out_file, "CSV report")->required();
  scan_cmd->add_option("--json", json_out, "Also write the JSON report");
  scan_cmd->add_option("--workers", scan_workers, "Worker threads (default WORKERS or the config)");
  scan_cmd->add_option("--budget-seconds", budget, "Wall-clock budget");
  scan_cmd->callback([&] {
    const std::string base = std::filesystem::path(config_file).parent_path().string();
    const json raw = read_json(config_file);
    ScanConfig cfg = ScanConfig::from_json(raw, base.empty() ? "." : base);
    if (scan_workers) {
      cfg.workers = *scan_workers;
    } else if (!raw.contains("workers")) {
      cfg.workers = default_workers();
    }
    if (budget) cfg.budget_seconds = *budget;
    const ScalingReport r = scaling_scan(cfg);
    emit(report_to_csv(r), out_file);
    if (!json_out.empty()) emit(report_to_json(r), json_out);
    if (!r.complete) exit_code = 2;
  });

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Check a report against a ratio band and slope");
  std::string report_file;
  Thresholds th;
  std::optional<double> slope;
  verify_cmd->add_option("--report", report_file, "CSV report")->required();
  verify_cmd->add_option("--band", th.band, "Allowed max/min ratio");
  verify_cmd->add_option("--slope", slope, "Target fitted slope");
  verify_cmd->add_option("--tol", th.tol, "Slope tolerance");
  verify_cmd->callback([&] {
    th.slope = slope;
    const ScalingReport r = report_from_csv(read_text(report_file));
    const Verdict v = verify_bounds(r, th);
    json out = {{"verdict", v.status == Verdict::Status::pass   ? "pass"
                            : v.status == Verdict::Status::fail ? "fail"
                                                                : "incomplete"},
                {"band", v.band},
                {"message", v.message}};
    if (r.fitted_slope) out["fitted_slope"] = *r.fitted_slope;
    if (v.offending_j) out["offending_j"] = *v.offending_j;
    emit(out, "");
    exit_code = v.exit_code();
  });

  // sublevel
  auto* sub_cmd = app.add_subcommand("sublevel", "Random polynomial sublevel-measure property test");
  int degree = 3, trials = 10000;
  std::uint64_t seed = 1;
  sub_cmd->add_option("--n", degree, "Polynomial degree (1..6)");
  sub_cmd->add_option("--trials", trials, "Number of trials (>= 1000)");
  sub_cmd->add_option("--seed", seed, "Random seed");
  sub_cmd->callback([&] {
    const SublevelReport r = sublevel_lemma_test(degree, trials, seed);
    emit(json{{"n", r.n}, {"trials", r.trials}, {"violations", r.violations}, {"max_ratio", r.max_ratio}}, "");
    if (r.violations > 0) exit_code = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kErrorExit;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kErrorExit;
  }
  return exit_code;
}
