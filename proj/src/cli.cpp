#include "hgap/cli.hpp"

#include <fnmatch.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <fcntl.h>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hgap/bounds.hpp"
#include "hgap/clifford.hpp"
#include "hgap/dirichlet.hpp"
#include "hgap/error.hpp"
#include "hgap/report.hpp"
#include "hgap/sde.hpp"

namespace hgap {

using nlohmann::json;

namespace {

struct Output {
  std::string path;  // "-" for standard output
  std::string content;
};

struct CommandResult {
  json config;
  json summary;
  std::vector<Output> outputs;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
  f << content;
  if (!f) throw Error(ErrorCode::IoError, "write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw Error(ErrorCode::InvalidArgument, "not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_list(text)) {
    if (v != std::floor(v) || v < 1 || v > 1e9) throw Error(ErrorCode::InvalidArgument, "expected positive integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Registry

std::string registry_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("HGAP_REGISTRY"); env && *env) return env;
  return "hgap_runs.jsonl";
}

std::vector<json> read_registry(const std::string& path) {
  std::vector<json> records;
  std::ifstream f(path);
  if (!f) return records;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records.push_back(json::parse(line));
    } catch (const json::exception&) {
      throw Error(ErrorCode::IoError, path + ":" + std::to_string(lineno) + ": malformed registry line");
    }
  }
  return records;
}

class RegistryLock {
 public:
  explicit RegistryLock(const std::string& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_APPEND, 0644);
    if (fd_ < 0) throw Error(ErrorCode::IoError, "cannot open registry " + path);
    ::flock(fd_, LOCK_EX);
  }
  ~RegistryLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  RegistryLock(const RegistryLock&) = delete;
  RegistryLock& operator=(const RegistryLock&) = delete;

 private:
  int fd_ = -1;
};

std::string append_record(const std::string& path, json record) {
  RegistryLock lock(path);
  const auto existing = read_registry(path);
  char id[32];
  std::snprintf(id, sizeof id, "run-%04zu", existing.size() + 1);
  record["run_id"] = id;
  std::ofstream f(path, std::ios::app);
  if (!f) throw Error(ErrorCode::IoError, "cannot append to registry " + path);
  f << record.dump() << '\n';
  return id;
}

// ---------------------------------------------------------------------------
// Structures

struct StructureArgs {
  std::string file;
  int euclidean = 0;
};

void add_structure_options(CLI::App* sub, StructureArgs& a) {
  sub->add_option("--structure", a.file, "Structure JSON file");
  sub->add_option("--euclidean", a.euclidean, "Euclidean calibration mode on R^M (no centre)");
}

HTypeStructure resolve_structure(const StructureArgs& a) {
  if (!a.file.empty() && a.euclidean > 0) {
    throw Error(ErrorCode::InvalidArgument, "--structure and --euclidean are exclusive");
  }
  if (a.euclidean > 0) return HTypeStructure::euclidean(a.euclidean);
  if (a.file.empty()) throw Error(ErrorCode::InvalidArgument, "--structure FILE or --euclidean M required");
  return load_structure(a.file);
}

json structure_config(const StructureArgs& a, const HTypeStructure& s) {
  json j = {{"m", s.m()}, {"n", s.n()}};
  if (!a.file.empty()) {
    j["structure"] = a.file;
    j["structure_sha256"] = sha256_hex(structure_to_json(s).dump());
  }
  return j;
}

// ---------------------------------------------------------------------------
// Commands

CommandResult cmd_radon(std::int64_t m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "m must be positive");
  const int rho = hurwitz_radon(m);
  return {{{"m", m}}, {{"m", m}, {"rho", rho}}, {{"-", std::to_string(rho) + "\n"}}};
}

CommandResult cmd_build(int m, int n, const std::string& out) {
  const auto s = build_generators(m, n);
  const std::string text = structure_to_json(s).dump() + "\n";
  return {{{"m", m}, {"n", n}, {"out", out}}, {{"m", m}, {"n", n}}, {{out.empty() ? "-" : out, text}}};
}

struct VerifyOutcome {
  CommandResult result;
  bool passed = false;
};

VerifyOutcome cmd_verify(const std::string& file, int vectors, std::uint64_t seed) {
  json doc;
  try {
    doc = json::parse(read_file(file));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidStructure, file + ": " + e.what());
  }
  const auto s = parse_structure(doc);
  const auto r = verify_structure(s, vectors, seed);
  json rep = {{"format_version", kFormatVersion},
              {"m", s.m()},
              {"n", s.n()},
              {"shape_ok", r.shape_ok},
              {"skew", r.skew},
              {"orthogonal", r.orthogonal},
              {"anticommute", r.anticommute},
              {"admissible", r.admissible},
              {"spot_check", r.spot_check},
              {"spot_check_vectors", r.spot_check_vectors},
              {"passed", r.passed()},
              {"failures", r.failures}};
  VerifyOutcome v;
  v.result = {{{"structure", file}, {"vectors", vectors}, {"seed", seed}},
              {{"m", s.m()}, {"n", s.n()}, {"passed", r.passed()}},
              {{"-", dump(rep)}}};
  v.passed = r.passed();
  return v;
}

CommandResult cmd_eigen(int d_max, const std::string& format, const std::string& out) {
  if (d_max < 1 || d_max > 200) throw Error(ErrorCode::InvalidArgument, "--d-max must be in [1, 200]");
  std::string text;
  if (format == "csv") {
    text = "d,nu,j_first_zero,lambda,lambda_asymptotic\n";
    for (int d = 1; d <= d_max; ++d) {
      const auto r = dirichlet_eigen(d);
      text += std::to_string(d) + "," + format_double(r.nu) + "," + format_double(r.j_first_zero) + "," +
              format_double(r.lambda) + "," + format_double(lambda1_asymptotic(d)) + "\n";
    }
  } else {
    json rows = json::array();
    for (int d = 1; d <= d_max; ++d) {
      auto row = to_json(dirichlet_eigen(d));
      row["lambda_asymptotic"] = lambda1_asymptotic(d);
      rows.push_back(row);
    }
    text = dump({{"format_version", kFormatVersion}, {"rows", rows}});
  }
  return {{{"d_max", d_max}, {"format", format}, {"out", out}}, {{"d_max", d_max}}, {{out.empty() ? "-" : out, text}}};
}

std::string bounds_csv_header() { return "m,lambda_m,lambda_n,c,x_star,lower,upper,ratio\n"; }

std::string bounds_csv_row(const GapBoundResult& b) {
  return std::to_string(b.m) + "," + format_double(b.lambda_m) + "," + format_double(b.lambda_n) + "," +
         format_double(b.c) + "," + format_double(b.x_star) + "," + format_double(b.lower) + "," +
         format_double(b.upper) + "," + format_double(b.upper / b.lower) + "\n";
}

CommandResult cmd_bounds(int m, int n, bool sweep, const std::string& m_list, const std::string& format,
                         const std::string& out) {
  json config = {{"n", n}, {"sweep", sweep}, {"format", format}, {"out", out}};
  json rows = json::array();
  std::string text;
  if (sweep) {
    if (m_list.empty()) throw Error(ErrorCode::InvalidArgument, "--sweep needs --m-list");
    const auto ms = parse_int_list(m_list);
    config["m_list"] = ms;
    const auto table = ratio_asymptotics(ms, n);
    if (format == "json") {
      json arr = json::array();
      for (const auto& r : table) {
        auto j = to_json(r.bounds);
        j["ratio"] = r.ratio;
        arr.push_back(j);
      }
      text = dump({{"format_version", kFormatVersion}, {"rows", arr}});
    } else {
      text = bounds_csv_header();
      for (const auto& r : table) text += bounds_csv_row(r.bounds);
    }
    for (const auto& r : table) rows.push_back(to_json(r.bounds));
  } else {
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "--m required");
    config["m"] = m;
    const auto b = gap_bounds(m, n);
    if (format == "csv") {
      text = bounds_csv_header() + bounds_csv_row(b);
    } else {
      auto j = to_json(b);
      j["format_version"] = kFormatVersion;
      text = dump(j);
    }
    rows.push_back(to_json(b));
  }
  return {config, {{"bounds", rows}}, {{out.empty() ? "-" : out, text}}};
}

struct SimulateArgs {
  StructureArgs structure;
  double T = 1.0;
  double dt = 1e-4;
  std::int64_t paths = 1000;
  std::uint64_t seed = 1;
  std::string out;
  std::string full_paths;
  std::string rule = "ito";
};

IntegralRule parse_rule(const std::string& r) {
  if (r == "ito") return IntegralRule::Ito;
  if (r == "midpoint") return IntegralRule::Midpoint;
  throw Error(ErrorCode::InvalidArgument, "rule must be ito or midpoint");
}

CommandResult cmd_simulate(const SimulateArgs& a, const Execution& ex) {
  const auto s = resolve_structure(a.structure);
  if (a.out.empty()) throw Error(ErrorCode::InvalidArgument, "--out required");
  SimulationOptions opt;
  opt.rule = parse_rule(a.rule);
  opt.track_covariation = false;
  opt.execution = ex;
  const auto samples = time_change_samples(s, a.T, a.dt, a.seed, a.paths, opt);
  std::string text = "path_id";
  for (int i = 1; i <= s.n(); ++i) text += ",A_" + std::to_string(i);
  text += ",tau_T,max_norm\n";
  for (std::size_t k = 0; k < samples.size(); ++k) {
    text += std::to_string(k);
    for (double v : samples[k].A) text += "," + format_double(v);
    text += "," + format_double(samples[k].tau) + "," + format_double(samples[k].max_norm) + "\n";
  }
  CommandResult r;
  r.config = structure_config(a.structure, s);
  r.config.update({{"T", a.T}, {"dt", a.dt}, {"paths", a.paths}, {"seed", a.seed}, {"rule", a.rule},
                   {"out", a.out}, {"full_paths", a.full_paths}});
  r.summary = {{"m", s.m()}, {"n", s.n()}, {"paths", a.paths}};
  r.outputs.push_back({a.out, text});
  if (!a.full_paths.empty()) {
    step_count(a.T, a.dt);
    std::vector<PathSample> paths;
    for (std::int64_t k = 0; k < a.paths; ++k)
      paths.push_back(simulate_path(s, a.T, a.dt, a.seed, static_cast<std::uint64_t>(k), opt.rule));
    write_paths_binary(a.full_paths, paths);
    r.outputs.push_back({a.full_paths, read_file(a.full_paths)});
  }
  return r;
}

struct EstimateArgs {
  StructureArgs structure;
  std::string method = "both";
  std::int64_t paths = 200'000;
  double dt = 1e-4;
  std::uint64_t seed = 20240601;
  std::string eps_grid;
  double t_max = 6.0;
  std::string model = "eps2";
  std::string window = "auto";
  int ladder = 2;
  double k_sigma = 3.0;
  std::string out;
  std::string csv;
};

CommandResult cmd_estimate(const EstimateArgs& a, const Execution& ex) {
  const auto s = resolve_structure(a.structure);
  GapRunConfig cfg;
  cfg.method = parse_gap_method(a.method);
  cfg.paths = a.paths;
  cfg.dt = a.dt;
  cfg.seed = a.seed;
  cfg.t_max = a.t_max;
  cfg.model = parse_extrapolation_model(a.model);
  cfg.ladder = a.ladder;
  cfg.k_sigma = a.k_sigma;
  cfg.execution = ex;
  if (!a.eps_grid.empty()) cfg.eps_grid = parse_list(a.eps_grid);
  if (a.window != "auto") {
    const auto w = parse_list(a.window);
    if (w.size() != 2 || !(w[0] < w[1])) throw Error(ErrorCode::InvalidArgument, "--window must be auto or lo,hi");
    cfg.window.automatic = false;
    cfg.window.t_lo = w[0];
    cfg.window.t_hi = w[1];
  }
  if (a.ladder < 1) throw Error(ErrorCode::InvalidArgument, "--ladder must be positive");
  const auto report = estimate_gap_report(s, cfg);

  CommandResult r;
  r.config = structure_config(a.structure, s);
  r.config.update(report["config"]);
  r.config.update({{"out", a.out}, {"csv", a.csv}});
  r.summary = {{"m", s.m()},
               {"n", s.n()},
               {"bounds", report["bounds"]},
               {"estimates", report["estimates"]},
               {"k_sigma", cfg.k_sigma}};
  r.outputs.push_back({a.out.empty() ? "-" : a.out, dump(report)});
  if (!a.csv.empty()) r.outputs.push_back({a.csv, curves_csv(report)});
  return r;
}

struct LemmaArgs {
  StructureArgs structure;
  std::int64_t samples = 10'000;
  double T = 1.0;
  double dt = 1e-4;
  std::uint64_t seed = 7;
  double alpha = 0.01;
  std::string out;
};

CommandResult cmd_check_lemma(const LemmaArgs& a, const Execution& ex) {
  const auto s = resolve_structure(a.structure);
  if (s.n() < 1) throw Error(ErrorCode::InvalidArgument, "check-lemma needs a structure with n >= 1");
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be in (0, 1)");
  SimulationOptions opt;
  opt.execution = ex;
  const auto samples = time_change_samples(s, a.T, a.dt, a.seed, a.samples, opt);
  const auto diag = lemma_diagnostics(samples, s.m(), a.T, a.alpha);
  auto j = to_json(diag);
  j["format_version"] = kFormatVersion;
  j["dt"] = a.dt;
  j["seed"] = a.seed;
  CommandResult r;
  r.config = structure_config(a.structure, s);
  r.config.update({{"samples", a.samples}, {"T", a.T}, {"dt", a.dt}, {"seed", a.seed}, {"alpha", a.alpha},
                   {"out", a.out}});
  r.summary = {{"m", s.m()}, {"n", s.n()}, {"passed", diag.passed()}};
  r.outputs.push_back({a.out.empty() ? "-" : a.out, dump(j)});
  return r;
}

struct ReportArgs {
  std::string runs;
  std::string glob;
  std::string out;
  std::string csv;
};

CommandResult cmd_report(const ReportArgs& a, const std::string& registry, std::ostream& err) {
  const auto records = read_registry(registry);
  std::map<std::string, json> by_id;
  for (const auto& r : records)
    if (r.contains("run_id")) by_id[r["run_id"].get<std::string>()] = r;

  std::vector<std::string> selected;
  std::set<std::string> seen;
  auto select = [&](const std::string& id) {
    if (!seen.insert(id).second) {
      err << json{{"warning", "duplicate run id ignored"}, {"run_id", id}}.dump() << '\n';
      return;
    }
    selected.push_back(id);
  };
  if (!a.runs.empty()) {
    std::stringstream ss(a.runs);
    std::string id;
    while (std::getline(ss, id, ',')) {
      if (id.empty()) continue;
      if (!by_id.count(id)) throw Error(ErrorCode::UnknownRunId, "unknown run id " + id);
      select(id);
    }
  }
  if (!a.glob.empty()) {
    for (const auto& [id, rec] : by_id)
      if (::fnmatch(a.glob.c_str(), id.c_str(), 0) == 0) select(id);
  }
  if (selected.empty()) throw Error(ErrorCode::InvalidArgument, "empty run selection");

  // (m, n) -> bounds, and estimate runs in selection order.
  std::map<std::pair<int, int>, json> bounds;
  std::vector<json> estimates;
  for (const auto& id : selected) {
    const auto& rec = by_id[id];
    const std::string cmd = rec.value("command", "");
    const auto& res = rec["result"];
    if (cmd == "bounds") {
      for (const auto& b : res["bounds"]) bounds[{b["m"].get<int>(), b["n"].get<int>()}] = b;
    } else if (cmd == "estimate-gap") {
      json e = res;
      e["run_id"] = id;
      estimates.push_back(e);
    }
  }

  json rows = json::array();
  std::string plot = "m,n,run_id,method,lambda_hat,std_error,lower,upper,verdict\n";
  std::set<std::pair<int, int>> covered;
  for (const auto& e : estimates) {
    const int m = e["m"].get<int>();
    const int n = e["n"].get<int>();
    covered.insert({m, n});
    json b = bounds.count({m, n}) ? bounds[{m, n}] : e["bounds"];
    const double lower = b["lower"].get<double>();
    const double upper = b["upper"].get<double>();
    const double k = e.value("k_sigma", 3.0);
    json row = {{"m", m}, {"n", n}, {"bounds", b}, {"estimate_run", e["run_id"]}};
    bool all_pass = true;
    for (const auto& [method, est] : e["estimates"].items()) {
      GapEstimate g;
      g.lambda_hat = est["lambda_hat"].get<double>();
      g.std_error = est["std_error"].get<double>();
      const auto v = sandwich_check(g, lower, upper, k);
      all_pass = all_pass && v.pass;
      row["estimates"][method] = est;
      row["sandwich"][method] = to_json(v);
      plot += std::to_string(m) + "," + std::to_string(n) + "," + e["run_id"].get<std::string>() + "," + method +
              "," + format_double(g.lambda_hat) + "," + format_double(g.std_error) + "," + format_double(lower) +
              "," + format_double(upper) + "," + (v.pass ? "PASS" : "FAIL") + "\n";
    }
    row["verdict"] = all_pass ? "PASS" : "FAIL";
    rows.push_back(row);
  }
  for (const auto& [key, b] : bounds) {
    if (covered.count(key)) continue;
    rows.push_back({{"m", key.first}, {"n", key.second}, {"bounds", b}, {"verdict", nullptr}});
    plot += std::to_string(key.first) + "," + std::to_string(key.second) + ",,bounds,,," +
            format_double(b["lower"].get<double>()) + "," + format_double(b["upper"].get<double>()) + ",\n";
  }

  json bundle = {{"format_version", kFormatVersion}, {"kind", "report"}, {"runs", selected}, {"rows", rows}};
  CommandResult r;
  r.config = {{"runs", a.runs}, {"glob", a.glob}, {"out", a.out}, {"csv", a.csv}};
  r.summary = {{"runs", selected}, {"rows", rows.size()}};
  r.outputs.push_back({a.out.empty() ? "-" : a.out, dump(bundle)});
  if (!a.csv.empty()) r.outputs.push_back({a.csv, plot});
  return r;
}

int fail(std::ostream& err, ErrorCode code, const std::string& message) {
  const int exit_code = is_validation_error(code) ? kExitValidation : kExitComputation;
  err << json{{"error", std::string(to_string(code))}, {"message", message}, {"exit_code", exit_code}}.dump()
      << '\n';
  return exit_code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral gap numerics on H-type groups", "hgap"};
  app.set_config("--config", "", "INI file; [command] sections mirror the flags, flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  int threads = 0;
  std::string registry_flag;
  bool no_registry = false;
  app.add_option("--threads", threads, "Worker cap (default HGAP_THREADS, else all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--registry", registry_flag, "Run registry file (default HGAP_REGISTRY or ./hgap_runs.jsonl)");
  app.add_flag("--no-registry", no_registry, "Do not record the run");

  std::int64_t radon_m = 0;
  auto* radon = app.add_subcommand("radon", "Hurwitz-Radon number rho(m)");
  radon->add_option("--m", radon_m)->required();

  int build_m = 0, build_n = 0;
  std::string build_out;
  auto* build = app.add_subcommand("build", "Construct generators U^(1..n) on R^m");
  build->add_option("--m", build_m)->required();
  build->add_option("--n", build_n)->required();
  build->add_option("--out", build_out);

  std::string verify_file;
  int verify_vectors = 64;
  std::uint64_t verify_seed = 0x5eed;
  auto* verify = app.add_subcommand("verify", "Check a structure file against the H-type axioms");
  verify->add_option("--structure", verify_file)->required();
  verify->add_option("--vectors", verify_vectors, "Spot-check vectors")->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", verify_seed);

  int eigen_dmax = 0;
  std::string eigen_format = "csv", eigen_out;
  auto* eigen = app.add_subcommand("eigen", "Dirichlet eigenvalues of -1/2 Laplacian on unit balls");
  eigen->add_option("--d-max", eigen_dmax)->required();
  eigen->add_option("--format", eigen_format)->check(CLI::IsMember({"csv", "json"}));
  eigen->add_option("--out", eigen_out);

  int bounds_m = 0, bounds_n = 0;
  bool bounds_sweep = false;
  std::string bounds_mlist, bounds_format = "json", bounds_out;
  auto* bounds = app.add_subcommand("bounds", "Closed-form spectral gap sandwich");
  bounds->add_option("--m", bounds_m);
  bounds->add_option("--n", bounds_n)->required();
  bounds->add_flag("--sweep", bounds_sweep);
  bounds->add_option("--m-list", bounds_mlist);
  bounds->add_option("--format", bounds_format)->check(CLI::IsMember({"csv", "json"}));
  bounds->add_option("--out", bounds_out);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate terminal values of horizontal Brownian paths");
  add_structure_options(simulate, sim.structure);
  simulate->add_option("--T", sim.T);
  simulate->add_option("--dt", sim.dt);
  simulate->add_option("--paths", sim.paths);
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--out", sim.out);
  simulate->add_option("--full-paths", sim.full_paths);
  simulate->add_option("--rule", sim.rule)->check(CLI::IsMember({"ito", "midpoint"}));

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate-gap", "Monte Carlo spectral gap estimates and sandwich check");
  add_structure_options(estimate, est.structure);
  estimate->add_option("--method", est.method)->check(CLI::IsMember({"exit", "smalldev", "both"}));
  estimate->add_option("--paths", est.paths);
  estimate->add_option("--dt", est.dt);
  estimate->add_option("--seed", est.seed);
  estimate->add_option("--eps-grid", est.eps_grid, "Comma-separated increasing eps values");
  estimate->add_option("--t-max", est.t_max);
  estimate->add_option("--model", est.model, "Small-deviation rate model: eps or eps2")
      ->check(CLI::IsMember({"eps", "eps2"}));
  estimate->add_option("--window", est.window, "Exit fit window: auto or lo,hi");
  estimate->add_option("--ladder", est.ladder, "Coarse monitoring stride for the dt ladder");
  estimate->add_option("--k-sigma", est.k_sigma);
  estimate->add_option("--out", est.out);
  estimate->add_option("--csv", est.csv);

  LemmaArgs lem;
  auto* lemma = app.add_subcommand("check-lemma", "Time-change diagnostics for A(T)");
  add_structure_options(lemma, lem.structure);
  lemma->add_option("--samples", lem.samples);
  lemma->add_option("--T", lem.T);
  lemma->add_option("--dt", lem.dt);
  lemma->add_option("--seed", lem.seed);
  lemma->add_option("--alpha", lem.alpha);
  lemma->add_option("--out", lem.out);

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Join registry runs into one bundle");
  report->add_option("--runs", rep.runs, "Comma-separated run ids");
  report->add_option("--glob", rep.glob, "Shell pattern over run ids");
  report->add_option("--out", rep.out);
  report->add_option("--csv", rep.csv);

  std::vector<std::string> argv_store{"hgap"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return fail(err, ErrorCode::InvalidArgument, std::string(e.get_name()) + ": " + e.what());
  }

  const Execution ex{threads, false};
  const auto start = std::chrono::steady_clock::now();
  std::string command;
  try {
    CommandResult result;
    bool verify_failed = false;
    const std::string registry = registry_path(registry_flag);
    if (radon->parsed()) {
      command = "radon";
      result = cmd_radon(radon_m);
    } else if (build->parsed()) {
      command = "build";
      result = cmd_build(build_m, build_n, build_out);
    } else if (verify->parsed()) {
      command = "verify";
      auto v = cmd_verify(verify_file, verify_vectors, verify_seed);
      result = std::move(v.result);
      verify_failed = !v.passed;
    } else if (eigen->parsed()) {
      command = "eigen";
      result = cmd_eigen(eigen_dmax, eigen_format, eigen_out);
    } else if (bounds->parsed()) {
      command = "bounds";
      result = cmd_bounds(bounds_m, bounds_n, bounds_sweep, bounds_mlist, bounds_format, bounds_out);
    } else if (simulate->parsed()) {
      command = "simulate";
      result = cmd_simulate(sim, ex);
    } else if (estimate->parsed()) {
      command = "estimate-gap";
      result = cmd_estimate(est, ex);
    } else if (lemma->parsed()) {
      command = "check-lemma";
      result = cmd_check_lemma(lem, ex);
    } else {
      command = "report";
      result = cmd_report(rep, registry, err);
    }

    json manifest = json::array();
    for (const auto& o : result.outputs) {
      if (o.path == "-") {
        out << o.content;
      } else if (command != "simulate" || o.path != sim.full_paths) {
        write_file(o.path, o.content);
      }
      manifest.push_back({{"path", o.path}, {"sha256", sha256_hex(o.content)}, {"bytes", o.content.size()}});
    }
    if (verify_failed) {
      return fail(err, ErrorCode::InvalidStructure, "structure fails verification");
    }
    if (!no_registry) {
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      json record = {{"format_version", kFormatVersion},
                     {"command", command},
                     {"config", result.config},
                     {"tool_version", kToolVersion},
                     {"wall_time_s", wall},
                     {"threads", resolve_threads(ex)},
                     {"outputs", manifest},
                     {"result", result.summary}};
      if (result.config.contains("seed")) record["seed"] = result.config["seed"];
      const auto id = append_record(registry, record);
      err << json{{"run_id", id}, {"registry", registry}}.dump() << '\n';
    }
    return kExitOk;
  } catch (const Error& e) {
    return fail(err, e.code(), e.what());
  } catch (const std::exception& e) {
    return fail(err, ErrorCode::IoError, e.what());
  }
}

}  // namespace hgap
