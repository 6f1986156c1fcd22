// Command-line front end: estimate attraction regions from run configs,
// verify stored certificates, export level-set boundaries, and compare the
// estimation variants on one system.
//
// Exit codes: 0 success, 1 usage or config error, 2 infeasible at the start
// of the search, 3 verification failed.
//
// CSV formats:
//   trace.csv      round,iter,gamma,betas,sdp_iters_gamma,sdp_iters_beta,sdp_iters_v
//                  (betas joined with ';' so rounds with different shape
//                  counts share the schema)
//   violations.csv kind,value,x1,...,xn
//   boundary.csv   2-D: polyline,x1,x2 (ordered marching-squares contours)
//                  3-D: x1,x2,x3 (centers of cells straddling the level set)
//   compare.csv    variant,gamma,area,area_ratio_prev,coverage,iterations

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "roa/contour.hpp"
#include "roa/io.hpp"
#include "roa/lyap.hpp"
#include "roa/roa.hpp"

namespace fs = std::filesystem;
using namespace roa;

namespace {

struct EstimateArgs {
  std::string config_path;
  std::string system;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int samples = 10000;
  bool quiet = false;
};

struct VerifyArgs {
  std::string certificate_path;
  std::string out_path;
  int samples = 10000;
  std::uint64_t seed = 0;
  bool quiet = false;
};

struct BoundaryArgs {
  std::string certificate_path;
  std::string out_path = "boundary.csv";
  int resolution = 0;  // 0 = dimension-dependent default
  bool quiet = false;
};

struct CompareArgs {
  std::string system;
  std::vector<std::string> certificates;
  std::string out_dir;
  int resolution = 151;
  int samples = 200000;
  std::uint64_t seed = 0;
  bool quiet = false;
};

struct ListArgs {
  std::string emit_dir;
};

io::CertificateFile make_certificate_file(const io::RunConfig& cfg, const Certificate& cert) {
  io::CertificateFile file(cfg.recipe.system.nvars);
  file.system = cfg.recipe.system;
  file.box = cfg.recipe.box;
  file.sim = cfg.recipe.sim;
  file.l1 = cfg.recipe.iteration.l1;
  file.l2 = cfg.recipe.iteration.l2;
  file.certificate = cert;
  return file;
}

void write_violations_csv(const std::string& path, const ReplayReport& replay,
                          const CertificateReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (const std::string& f : replay.failures) out << "# replay: " << f << "\n";
  out << "kind,value";
  std::size_t nvars = 0;
  for (const Violation& v : report.violations) nvars = std::max(nvars, v.x.size());
  for (std::size_t i = 0; i < nvars; ++i) out << ",x" << (i + 1);
  out << "\n";
  for (const Violation& v : report.violations) {
    out << v.kind << "," << format_double(v.value);
    for (double c : v.x) out << "," << format_double(c);
    out << "\n";
  }
}

// Replay the stored algebraic identities and sample the set membership and
// trajectory claims; the gate every estimate must clear before reporting
// success.
struct GateResult {
  ReplayReport replay;
  CertificateReport report;
  bool ok() const { return replay.ok && report.ok(); }
};

GateResult run_gate(const io::CertificateFile& file, const IterationConfig& itcfg, int samples,
                    std::uint64_t seed) {
  GateResult g;
  g.replay = replay_certificate(file.system, file.certificate, itcfg);
  g.report = check_certificate(file.certificate, file.system, file.box, samples, seed, file.sim);
  return g;
}

std::string describe_gate(const GateResult& g) {
  std::ostringstream out;
  out << "replay: " << (g.replay.ok ? "ok" : "FAILED")
      << " (max residual " << format_double(g.replay.max_residual) << ")\n";
  for (const std::string& f : g.replay.failures) out << "  " << f << "\n";
  const CertificateReport& r = g.report;
  out << "sampling: " << r.samples_accepted << "/" << r.samples_requested
      << " level-set samples (" << r.band_excluded << " within the boundary band), "
      << r.positivity_violations << " positivity / " << r.decrease_violations << " decrease / "
      << r.convergence_violations << " convergence / " << r.containment_violations
      << " containment violations\n";
  return out.str();
}

int cmd_estimate(const EstimateArgs& a) {
  io::RunConfig cfg = [&] {
    if (!a.config_path.empty()) return io::parse_run_config(a.config_path);
    return io::preset_run_config(a.system);
  }();
  if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
  if (a.seed_set) cfg.seed = a.seed;
  fs::create_directories(cfg.out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  MultiRoundResult result;
  try {
    result = run_multiround(cfg.recipe.system, cfg.recipe.rounds, cfg.recipe.iteration);
  } catch (const InfeasibleAtZero& e) {
    std::cerr << "infeasible at start: " << e.what() << "\n";
    return 2;
  } catch (const ShapeInfeasible& e) {
    std::cerr << "infeasible at start: " << e.what() << "\n";
    return 2;
  } catch (const NotHurwitz& e) {
    std::cerr << "infeasible at start: " << e.what() << "\n";
    return 2;
  }
  const double solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const io::CertificateFile file = make_certificate_file(cfg, result.final_certificate());
  const std::string cert_path = cfg.out_dir + "/certificate.txt";
  const std::string trace_path = cfg.out_dir + "/trace.csv";
  io::write_certificate(cert_path, file);
  io::write_trace_csv(trace_path, result.trace);

  const GateResult gate = run_gate(file, cfg.recipe.iteration, a.samples, cfg.seed);
  const double total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ostringstream summary;
  summary << "system: " << cfg.recipe.system.name << " (" << cfg.recipe.system.nvars
          << " states)\nseed: " << cfg.seed << "\n";
  for (const RoundResult& rr : result.rounds) {
    summary << "round " << rr.certificate.round_index << ": gamma "
            << format_double(rr.certificate.gamma) << ", " << rr.certificate.iterations
            << " iterations, stop: " << stop_reason_name(rr.stop) << ", betas:";
    if (rr.certificate.shapes.empty()) summary << " (none)";
    for (const CertifiedShape& cs : rr.certificate.shapes)
      summary << " " << format_double(cs.beta);
    summary << "\n";
  }
  if (file.certificate.global_stability)
    summary << "every decrease level was feasible: the origin is globally stable\n";
  summary << describe_gate(gate);
  char timing[96];
  std::snprintf(timing, sizeof timing, "solve time: %.1f s, total with verification: %.1f s\n",
                solve_seconds, total_seconds);
  summary << timing;
  summary << "verification: " << (gate.ok() ? "PASS" : "FAIL") << "\n";

  std::ofstream sf(cfg.out_dir + "/summary.txt");
  sf << summary.str();
  sf.close();
  if (!a.quiet) std::cout << summary.str();

  if (!gate.ok()) {
    write_violations_csv(cfg.out_dir + "/violations.csv", gate.replay, gate.report);
    std::cerr << "verification failed; see " << cfg.out_dir << "/violations.csv\n";
    return 3;
  }
  if (!a.quiet) std::cout << "wrote " << cert_path << " and " << trace_path << "\n";
  return 0;
}

int cmd_verify(const VerifyArgs& a) {
  const io::CertificateFile file = io::read_certificate(a.certificate_path);
  IterationConfig itcfg = IterationConfig::defaults(file.system.nvars);
  itcfg.l1 = file.l1;
  itcfg.l2 = file.l2;
  const GateResult gate = run_gate(file, itcfg, a.samples, a.seed);
  if (!a.quiet) std::cout << describe_gate(gate);
  if (!gate.ok()) {
    const std::string report_path =
        a.out_path.empty() ? a.certificate_path + ".violations.csv" : a.out_path;
    write_violations_csv(report_path, gate.replay, gate.report);
    std::cerr << "verification failed; see " << report_path << "\n";
    return 3;
  }
  if (!a.quiet) std::cout << "certificate verified\n";
  return 0;
}

int cmd_boundary(const BoundaryArgs& a) {
  const io::CertificateFile file = io::read_certificate(a.certificate_path);
  const Certificate& c = file.certificate;
  const int n = file.system.nvars;
  if (n == 2) {
    const int res = a.resolution > 0 ? a.resolution : 401;
    const auto lines = marching_squares(c.V, c.gamma, file.box, res);
    write_polylines_csv(a.out_path, lines);
    if (!a.quiet)
      std::cout << "wrote " << lines.size() << " polyline(s) to " << a.out_path << "\n";
    return 0;
  }
  if (n == 3) {
    const int res = a.resolution > 0 ? a.resolution : 61;
    const auto pts = straddling_cells(c.V, c.gamma, file.box, res);
    write_points_csv(a.out_path, pts);
    if (!a.quiet) std::cout << "wrote " << pts.size() << " cell centers to " << a.out_path << "\n";
    return 0;
  }
  std::cerr << "boundary export supports 2 or 3 states, certificate has " << n << "\n";
  return 1;
}

// The estimation variants compared in the tool: the plain iteration without
// shape functions, the linearization's own level set, a single origin-centered
// shape, and the full multi-round union preset.
std::vector<std::pair<std::string, std::vector<RoundConfig>>> compare_variants(
    const bench::BenchmarkPreset& preset) {
  const ShapeSpec* first = nullptr;
  for (const RoundConfig& rc : preset.rounds)
    if (!rc.shapes.empty()) {
      first = &rc.shapes.front();
      break;
    }
  if (!first) throw std::runtime_error("preset has no shape functions to derive variants from");
  ShapeSpec origin = *first;
  origin.center_mode = ShapeSpec::Center::origin;

  std::vector<std::pair<std::string, std::vector<RoundConfig>>> v;
  v.emplace_back("no-sf", std::vector<RoundConfig>{RoundConfig{{}, false}});
  v.emplace_back("linearized", std::vector<RoundConfig>{RoundConfig{{}, true}});
  v.emplace_back("single-sf", std::vector<RoundConfig>{RoundConfig{{origin}, false}});
  v.emplace_back("union", preset.rounds);
  return v;
}

int cmd_compare(const CompareArgs& a) {
  const bench::BenchmarkPreset preset = bench::get(a.system);
  const int n = preset.system.nvars;
  const std::string out_dir = a.out_dir.empty() ? "runs/compare-" + a.system : a.out_dir;
  fs::create_directories(out_dir);

  struct Row {
    std::string name;
    Certificate cert;
    int iterations = 0;
    Row() : cert(0) {}
  };
  std::vector<Row> rows;

  if (!a.certificates.empty()) {
    for (const std::string& path : a.certificates) {
      Row r;
      r.name = fs::path(path).stem().string();
      const io::CertificateFile f = io::read_certificate(path);
      r.cert = f.certificate;
      r.iterations = f.certificate.iterations;
      rows.push_back(std::move(r));
    }
  } else {
    for (const auto& [name, rounds] : compare_variants(preset)) {
      if (!a.quiet) std::cout << "estimating variant " << name << "...\n";
      MultiRoundResult res;
      try {
        res = run_multiround(preset.system, rounds, preset.iteration);
      } catch (const InfeasibleAtZero& e) {
        std::cerr << "variant " << name << " infeasible at start: " << e.what() << "\n";
        return 2;
      }
      Row r;
      r.name = name;
      r.cert = res.final_certificate();
      for (const RoundResult& rr : res.rounds) r.iterations += rr.certificate.iterations;
      io::RunConfig cfg(preset);
      cfg.recipe.rounds = rounds;
      cfg.seed = a.seed;
      io::write_certificate(out_dir + "/" + name + ".certificate.txt",
                            make_certificate_file(cfg, r.cert));
      rows.push_back(std::move(r));
    }
  }

  // One oracle serves every variant; only computed where a grid of
  // trajectories is affordable (two states).
  std::optional<OracleMask> oracle;
  if (n == 2)
    oracle = oracle_roa_mask(preset.system, preset.box, a.resolution, preset.sim);

  std::ostringstream table;
  table << "variant,gamma,area,area_ratio_prev,coverage,iterations\n";
  double prev_area = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    const double area =
        n == 2 ? level_set_area(r.cert.V, r.cert.gamma, preset.box, a.resolution)
               : mc_union_volume({{r.cert.V, r.cert.gamma}}, preset.box, a.samples, a.seed);
    std::string cov = "";
    if (oracle) {
      const CoverageReport c = coverage(r.cert.V, r.cert.gamma, preset.box, *oracle);
      cov = format_double(c.ratio);
    }
    table << r.name << "," << format_double(r.cert.gamma) << "," << format_double(area) << ","
          << (i ? format_double(prev_area > 0 ? area / prev_area : 0.0) : std::string("")) << ","
          << cov << "," << r.iterations << "\n";
    prev_area = area;
  }

  std::ofstream cf(out_dir + "/compare.csv");
  cf << table.str();
  cf.close();
  if (!a.quiet) std::cout << table.str() << "wrote " << out_dir << "/compare.csv\n";
  return 0;
}

int cmd_list(const ListArgs& a) {
  for (const bench::Summary& s : bench::list())
    std::cout << s.name << "  states=" << s.nvars << "  rounds=" << s.rounds << "  " << s.notes
              << "\n";
  if (!a.emit_dir.empty()) {
    fs::create_directories(a.emit_dir);
    for (const std::string& name : bench::names()) {
      const std::string path = a.emit_dir + "/" + name + ".json";
      std::ofstream out(path);
      out << io::emit_run_config(io::preset_run_config(name));
      std::cout << "wrote " << path << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Region-of-attraction estimation for polynomial systems"};
  app.require_subcommand(1);

  EstimateArgs est;
  CLI::App* cest = app.add_subcommand(
      "estimate", "Run the iteration from a config or preset; writes certificate.txt, "
                  "trace.csv, and summary.txt, then verifies the certificate");
  cest->add_option("--config", est.config_path, "JSON run config path");
  cest->add_option("--system", est.system, "preset name (see list-systems)");
  cest->add_option("--out", est.out_dir, "output directory (overrides config)");
  cest->add_option("--seed", est.seed, "verification sampling seed")
      ->each([&](const std::string&) { est.seed_set = true; });
  cest->add_option("--samples", est.samples, "verification samples per check");
  cest->add_flag("--quiet", est.quiet, "suppress progress output");

  VerifyArgs ver;
  CLI::App* cver = app.add_subcommand(
      "verify", "Replay a certificate's identities and sample its claims; on failure writes "
                "violations.csv (kind,value,x1,...,xn)");
  cver->add_option("certificate", ver.certificate_path, "certificate file")->required();
  cver->add_option("--samples", ver.samples, "samples per check");
  cver->add_option("--seed", ver.seed, "sampling seed");
  cver->add_option("--out", ver.out_path, "violation report path");
  cver->add_flag("--quiet", ver.quiet, "suppress report output");

  BoundaryArgs bnd;
  CLI::App* cbnd = app.add_subcommand(
      "boundary", "Export the certified level set: 2-D ordered polylines "
                  "(polyline,x1,x2), 3-D straddling-cell centers (x1,x2,x3)");
  cbnd->add_option("certificate", bnd.certificate_path, "certificate file")->required();
  cbnd->add_option("--out", bnd.out_path, "output CSV path");
  cbnd->add_option("--resolution", bnd.resolution, "grid resolution per axis");
  cbnd->add_flag("--quiet", bnd.quiet, "suppress progress output");

  CompareArgs cmp;
  CLI::App* ccmp = app.add_subcommand(
      "compare", "Compare estimation variants on one system "
                 "(variant,gamma,area,area_ratio_prev,coverage,iterations)");
  ccmp->add_option("--system", cmp.system, "preset name")->required();
  ccmp->add_option("certificates", cmp.certificates,
                   "certificate files to compare (default: estimate the built-in variants)");
  ccmp->add_option("--out", cmp.out_dir, "output directory");
  ccmp->add_option("--resolution", cmp.resolution, "area grid resolution per axis");
  ccmp->add_option("--samples", cmp.samples, "Monte Carlo samples (three states)");
  ccmp->add_option("--seed", cmp.seed, "Monte Carlo seed");
  ccmp->add_flag("--quiet", cmp.quiet, "suppress progress output");

  ListArgs lst;
  CLI::App* clst = app.add_subcommand("list-systems", "List built-in benchmark presets");
  clst->add_option("--emit-configs", lst.emit_dir, "write each preset as a JSON config here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cest->parsed()) return cmd_estimate(est);
    if (cver->parsed()) return cmd_verify(ver);
    if (cbnd->parsed()) return cmd_boundary(bnd);
    if (ccmp->parsed()) return cmd_compare(cmp);
    if (clst->parsed()) return cmd_list(lst);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
