#include "roa/io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace roa::io {

namespace {

using nlohmann::json;

void put_values(std::ostream& out, const std::vector<double>& vals) {
  for (std::size_t i = 0; i < vals.size(); ++i) out << (i ? " " : "") << format_double(vals[i]);
}

std::vector<double> parse_values(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> vals;
  double v;
  while (in >> v) vals.push_back(v);
  if (!in.eof()) throw std::runtime_error("bad numeric list: " + text);
  return vals;
}

double parse_one(const std::string& text) {
  const std::vector<double> v = parse_values(text);
  if (v.size() != 1) throw std::runtime_error("expected one number: " + text);
  return v[0];
}

struct Line {
  std::string key, value;
};

std::vector<Line> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Line> lines;
  std::string raw;
  while (std::getline(in, raw)) {
    if (raw.empty()) continue;
    const std::size_t sp = raw.find(' ');
    if (sp == std::string::npos)
      lines.push_back({raw, ""});
    else
      lines.push_back({raw.substr(0, sp), raw.substr(sp + 1)});
  }
  return lines;
}

}  // namespace

void write_certificate(const std::string& path, const CertificateFile& file) {
  const Certificate& c = file.certificate;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "roa certificate v1\n";
  out << "name " << file.system.name << "\n";
  out << "nvars " << file.system.nvars << "\n";
  for (const Polynomial& fi : file.system.f) out << "f " << fi.to_string() << "\n";
  out << "box.lo ";
  put_values(out, file.box.lo);
  out << "\nbox.hi ";
  put_values(out, file.box.hi);
  out << "\nsim.dt " << format_double(file.sim.dt);
  out << "\nsim.t_max " << format_double(file.sim.t_max);
  out << "\nsim.converge_eps " << format_double(file.sim.converge_eps);
  out << "\nsim.escape_radius " << format_double(file.sim.escape_radius);
  out << "\nl1 " << file.l1.to_string();
  out << "\nl2 " << file.l2.to_string();
  out << "\nround " << c.round_index;
  out << "\niterations " << c.iterations;
  out << "\nglobal_stability " << (c.global_stability ? 1 : 0);
  out << "\ngamma " << format_double(c.gamma);
  out << "\nV " << c.V.to_string();
  out << "\ns0 " << c.s0.to_string();
  out << "\nshapes " << c.shapes.size() << "\n";
  for (const CertifiedShape& cs : c.shapes) {
    out << "beta " << format_double(cs.beta) << "\nN ";
    std::vector<double> flat;
    for (int r = 0; r < cs.shape.N.rows(); ++r)
      for (int col = 0; col < cs.shape.N.cols(); ++col) flat.push_back(cs.shape.N(r, col));
    put_values(out, flat);
    out << "\ncenter ";
    put_values(out, {cs.shape.center.data(), cs.shape.center.data() + cs.shape.center.size()});
    out << "\ns " << cs.s.to_string() << "\n";
  }
  out << "end\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

CertificateFile read_certificate(const std::string& path) {
  const std::vector<Line> lines = read_lines(path);
  std::size_t pos = 0;
  auto expect = [&](const std::string& key) -> const std::string& {
    if (pos >= lines.size()) throw std::runtime_error(path + ": missing " + key);
    if (lines[pos].key != key)
      throw std::runtime_error(path + ": expected " + key + ", found " + lines[pos].key);
    return lines[pos++].value;
  };

  if (pos >= lines.size() || lines[pos].key != "roa" || lines[pos].value != "certificate v1")
    throw std::runtime_error(path + ": not a version-1 certificate file");
  ++pos;

  const std::string name = expect("name");
  const int nvars = static_cast<int>(parse_one(expect("nvars")));
  if (nvars < 1 || nvars > kernels::kMaxVars)
    throw std::runtime_error(path + ": unsupported state dimension");

  CertificateFile file(nvars);
  file.system.name = name;
  file.system.nvars = nvars;
  for (int i = 0; i < nvars; ++i)
    file.system.f.push_back(Polynomial::from_string(nvars, expect("f")));
  file.system.validate();
  file.box.lo = parse_values(expect("box.lo"));
  file.box.hi = parse_values(expect("box.hi"));
  file.box.validate();
  if (file.box.nvars() != nvars) throw std::runtime_error(path + ": box dimension mismatch");
  file.sim.dt = parse_one(expect("sim.dt"));
  file.sim.t_max = parse_one(expect("sim.t_max"));
  file.sim.converge_eps = parse_one(expect("sim.converge_eps"));
  file.sim.escape_radius = parse_one(expect("sim.escape_radius"));
  file.l1 = Polynomial::from_string(nvars, expect("l1"));
  file.l2 = Polynomial::from_string(nvars, expect("l2"));

  Certificate& c = file.certificate;
  c.system_name = name;
  c.round_index = static_cast<int>(parse_one(expect("round")));
  c.iterations = static_cast<int>(parse_one(expect("iterations")));
  c.global_stability = parse_one(expect("global_stability")) != 0;
  c.gamma = parse_one(expect("gamma"));
  c.V = Polynomial::from_string(nvars, expect("V"));
  c.s0 = Polynomial::from_string(nvars, expect("s0"));
  const int nshapes = static_cast<int>(parse_one(expect("shapes")));
  for (int k = 0; k < nshapes; ++k) {
    const double beta = parse_one(expect("beta"));
    const std::vector<double> flat = parse_values(expect("N"));
    if (flat.size() != static_cast<std::size_t>(nvars) * nvars)
      throw std::runtime_error(path + ": bad shape matrix size");
    Eigen::MatrixXd N(nvars, nvars);
    for (int r = 0; r < nvars; ++r)
      for (int col = 0; col < nvars; ++col) N(r, col) = flat[r * nvars + col];
    const std::vector<double> ctr = parse_values(expect("center"));
    if (ctr.size() != static_cast<std::size_t>(nvars))
      throw std::runtime_error(path + ": bad shape center size");
    Eigen::VectorXd center(nvars);
    for (int r = 0; r < nvars; ++r) center(r) = ctr[r];
    Polynomial s = Polynomial::from_string(nvars, expect("s"));
    c.shapes.emplace_back(ShapeFunction{std::move(N), std::move(center)}, beta, std::move(s));
  }
  expect("end");
  return file;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "round,iter,gamma,betas,sdp_iters_gamma,sdp_iters_beta,sdp_iters_v\n";
  for (const TraceRow& r : trace) {
    out << r.round << "," << r.iter << "," << format_double(r.gamma) << ",";
    for (std::size_t i = 0; i < r.betas.size(); ++i)
      out << (i ? ";" : "") << format_double(r.betas[i]);
    out << "," << r.sdp_iters_gamma << "," << r.sdp_iters_beta << "," << r.sdp_iters_v << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

json shape_to_json(const ShapeSpec& s) {
  json n = json::array();
  for (int r = 0; r < s.N.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < s.N.cols(); ++c) row.push_back(s.N(r, c));
    n.push_back(row);
  }
  json j;
  j["center"] = s.center_mode == ShapeSpec::Center::ray ? "ray" : "origin";
  j["theta_deg"] = s.theta_deg;
  j["psi_deg"] = s.psi_deg;
  j["sigma"] = s.sigma;
  j["N"] = n;
  return j;
}

ShapeSpec shape_from_json(const json& j, int nvars) {
  ShapeSpec s;
  const std::string mode = j.at("center").get<std::string>();
  if (mode == "ray")
    s.center_mode = ShapeSpec::Center::ray;
  else if (mode == "origin")
    s.center_mode = ShapeSpec::Center::origin;
  else
    throw std::runtime_error("rounds[].shapes[].center: expected \"origin\" or \"ray\"");
  s.theta_deg = j.value("theta_deg", 0.0);
  s.psi_deg = j.value("psi_deg", 0.0);
  s.sigma = j.value("sigma", 0.8);
  const json& n = j.at("N");
  if (!n.is_array() || static_cast<int>(n.size()) != nvars)
    throw std::runtime_error("rounds[].shapes[].N: expected a " + std::to_string(nvars) + "x" +
                             std::to_string(nvars) + " matrix");
  s.N.resize(nvars, nvars);
  for (int r = 0; r < nvars; ++r) {
    const json& row = n.at(r);
    if (!row.is_array() || static_cast<int>(row.size()) != nvars)
      throw std::runtime_error("rounds[].shapes[].N: ragged matrix row");
    for (int c = 0; c < nvars; ++c) s.N(r, c) = row.at(c).get<double>();
  }
  return s;
}

}  // namespace

std::string emit_run_config(const RunConfig& cfg) {
  const bench::BenchmarkPreset& p = cfg.recipe;
  json j;
  j["name"] = p.name;
  j["notes"] = p.notes;
  json sys;
  sys["name"] = p.system.name;
  sys["nvars"] = p.system.nvars;
  json f = json::array();
  for (const Polynomial& fi : p.system.f) f.push_back(fi.to_string());
  sys["f"] = f;
  j["system"] = sys;
  json rounds = json::array();
  for (const RoundConfig& rc : p.rounds) {
    json r;
    r["gamma_only"] = rc.gamma_only;
    json shapes = json::array();
    for (const ShapeSpec& s : rc.shapes) shapes.push_back(shape_to_json(s));
    r["shapes"] = shapes;
    rounds.push_back(r);
  }
  j["rounds"] = rounds;
  j["deg_V"] = p.iteration.deg_V;
  j["deg_s0"] = {p.iteration.deg_s0_min, p.iteration.deg_s0_max};
  j["deg_si"] = {p.iteration.deg_si_min, p.iteration.deg_si_max};
  j["l1"] = p.iteration.l1.to_string();
  j["l2"] = p.iteration.l2.to_string();
  j["tolerances"] = {{"gamma_rel", p.iteration.gamma_rel_tol},
                     {"beta_rel", p.iteration.beta_rel_tol},
                     {"beta_stall", p.iteration.beta_stall_tol}};
  j["max_iters"] = p.iteration.max_iters;
  j["box"] = {{"lo", p.box.lo}, {"hi", p.box.hi}};
  j["sim"] = {{"dt", p.sim.dt},
              {"t_max", p.sim.t_max},
              {"converge_eps", p.sim.converge_eps},
              {"escape_radius", p.sim.escape_radius}};
  j["excluded_points"] = p.excluded_points;
  j["seed"] = cfg.seed;
  j["out"] = cfg.out_dir;
  return j.dump(2) + "\n";
}

RunConfig parse_run_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
  }

  try {
    const json& sys = j.at("system");
    bench::BenchmarkPreset preset = [&] {
      if (sys.is_string()) return bench::get(sys.get<std::string>());
      const int nvars = sys.at("nvars").get<int>();
      if (nvars < 1 || nvars > kernels::kMaxVars)
        throw std::runtime_error("system.nvars: unsupported state dimension");
      bench::BenchmarkPreset p(nvars);
      p.system.name = sys.value("name", std::string("custom"));
      p.name = p.system.name;
      p.system.nvars = nvars;
      for (const json& fi : sys.at("f"))
        p.system.f.push_back(Polynomial::from_string(nvars, fi.get<std::string>()));
      p.system.validate();
      return p;
    }();
    const int nvars = preset.system.nvars;

    if (j.contains("name")) preset.name = j.at("name").get<std::string>();
    if (j.contains("notes")) preset.notes = j.at("notes").get<std::string>();
    if (j.contains("rounds")) {
      preset.rounds.clear();
      for (const json& rj : j.at("rounds")) {
        RoundConfig rc;
        rc.gamma_only = rj.value("gamma_only", false);
        if (rj.contains("shapes"))
          for (const json& sj : rj.at("shapes")) rc.shapes.push_back(shape_from_json(sj, nvars));
        preset.rounds.push_back(std::move(rc));
      }
    }
    if (preset.rounds.empty()) throw std::runtime_error("rounds: at least one round is required");

    IterationConfig& it = preset.iteration;
    it.deg_V = j.value("deg_V", it.deg_V);
    if (j.contains("deg_s0")) {
      it.deg_s0_min = j.at("deg_s0").at(0).get<int>();
      it.deg_s0_max = j.at("deg_s0").at(1).get<int>();
    }
    if (j.contains("deg_si")) {
      it.deg_si_min = j.at("deg_si").at(0).get<int>();
      it.deg_si_max = j.at("deg_si").at(1).get<int>();
    }
    if (j.contains("l1")) it.l1 = Polynomial::from_string(nvars, j.at("l1").get<std::string>());
    if (j.contains("l2")) it.l2 = Polynomial::from_string(nvars, j.at("l2").get<std::string>());
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      it.gamma_rel_tol = t.value("gamma_rel", it.gamma_rel_tol);
      it.beta_rel_tol = t.value("beta_rel", it.beta_rel_tol);
      it.beta_stall_tol = t.value("beta_stall", it.beta_stall_tol);
    }
    it.max_iters = j.value("max_iters", it.max_iters);

    if (j.contains("box")) {
      preset.box.lo = j.at("box").at("lo").get<std::vector<double>>();
      preset.box.hi = j.at("box").at("hi").get<std::vector<double>>();
    }
    preset.box.validate();
    if (preset.box.nvars() != nvars) throw std::runtime_error("box: dimension mismatch");
    if (j.contains("sim")) {
      const json& s = j.at("sim");
      preset.sim.dt = s.value("dt", preset.sim.dt);
      preset.sim.t_max = s.value("t_max", preset.sim.t_max);
      preset.sim.converge_eps = s.value("converge_eps", preset.sim.converge_eps);
      preset.sim.escape_radius = s.value("escape_radius", preset.sim.escape_radius);
    }
    if (j.contains("excluded_points"))
      preset.excluded_points = j.at("excluded_points").get<std::vector<std::vector<double>>>();

    preset.iteration.validate(preset.system, preset.rounds);

    RunConfig cfg(std::move(preset));
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.out_dir = j.value("out", std::string("runs/") + cfg.recipe.name);
    return cfg;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("bad config field: ") + e.what());
  }
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config_text(buf.str());
}

RunConfig preset_run_config(const std::string& name) {
  RunConfig cfg(bench::get(name));
  cfg.out_dir = "runs/" + name;
  return cfg;
}

}  // namespace roa::io
