#include "hardhex/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "hardhex/configuration.hpp"
#include "hardhex/dynamics.hpp"
#include "hardhex/experiments.hpp"
#include "hardhex/landscape.hpp"
#include "hardhex/lattice.hpp"
#include "hardhex/reduction.hpp"
#include "hardhex/symmetry.hpp"

namespace hardhex::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kReportSchema = "hardhex.report/1";

// Thrown for bad input discovered after parsing (unreadable files, grids
// that do not match a configuration, ...).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Globals {
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string out = "hardhex-out";
  int threads = 1;
  int verbose = 0;
  bool quiet = false;
};

class Run {
 public:
  Run(const Globals& g, std::string subcommand, std::ostream& out, std::ostream& err)
      : globals_(g), out_(out), err_(err) {
    manifest_.subcommand = std::move(subcommand);
    manifest_.tool_version = tool_version();
    manifest_.rng = kRngId;
    manifest_.started_at = utc_timestamp();
    dir_ = fs::path(g.out);
  }

  const Globals& globals() const { return globals_; }
  json& params() { return manifest_.parameters; }

  // Human-readable output, suppressed by --quiet.
  std::ostream& say() { return globals_.quiet ? null_ : out_; }
  void log(int level, const std::string& msg) {
    if (globals_.verbose >= level) err_ << "[" << manifest_.subcommand << "] " << msg << "\n";
  }

  void write(const std::string& name, const std::string& text) {
    fs::create_directories(dir_);
    write_file_atomic(dir_ / name, text);
    manifest_.outputs.push_back(name);
    log(1, "wrote " + (dir_ / name).string());
  }
  void adopt(const std::vector<fs::path>& written) {
    for (const auto& p : written) manifest_.outputs.push_back(p.filename().string());
  }
  const fs::path& dir() const { return dir_; }

  int finish(int code) {
    manifest_.finished_at = utc_timestamp();
    manifest_.exit_code = code;
    fs::create_directories(dir_);
    write_file_atomic(dir_ / "manifest.json", manifest_.to_json().dump(2) + "\n");
    return code;
  }

 private:
  Globals globals_;
  std::ostream& out_;
  std::ostream& err_;
  std::ostringstream null_;
  RunManifest manifest_;
  fs::path dir_;
};

struct GridFlags {
  int K = 2;
  int L = 1;
  GridSpec spec() const { return {K, L}; }
};

void add_grid_flags(CLI::App* sub, GridFlags& g) {
  sub->add_option("--K", g.K, "half the number of rows (K >= 2)")->capture_default_str();
  sub->add_option("--L", g.L, "one sixth of the number of columns (L >= 1)")->capture_default_str();
}

json grid_json(const GridSpec& s) { return {{"K", s.K}, {"L", s.L}}; }

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// ASCII files carry their shape: 2K lines of 3L characters.
GridSpec infer_ascii_grid(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int rows = 0;
  std::size_t width = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (rows == 0) width = line.size();
    ++rows;
  }
  if (rows % 2 != 0 || width % 3 != 0 || rows == 0) {
    throw UsageError("configuration text is not 2K lines of 3L characters");
  }
  return {rows / 2, static_cast<int>(width / 3)};
}

bool looks_hex(const std::string& text) {
  std::string t;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  }
  if (t.rfind("0x", 0) == 0 || t.rfind("0X", 0) == 0) return true;
  return false;
}

// Reads a configuration file: ASCII grid, or hex with a 0x prefix (which
// needs --K/--L).
std::pair<GridSpec, Configuration> load_configuration(const std::string& path,
                                                      std::optional<GridSpec> given) {
  const std::string text = read_text(path);
  if (looks_hex(text)) {
    if (!given) throw UsageError("hex configurations need --K and --L");
    const Grid grid = build_grid(*given);
    std::string t;
    for (char ch : text) {
      if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    }
    return {*given, from_hex(grid.size(), t)};
  }
  const GridSpec spec = given ? *given : infer_ascii_grid(text);
  const Grid grid = build_grid(spec);
  return {spec, from_ascii(grid, text)};
}

json structure_json(const LandscapeIndex& index, const StructureReport& rep) {
  json j;
  j["schema"] = kReportSchema;
  j["kind"] = "structure";
  j["grid"] = grid_json(rep.spec);
  j["state_count"] = rep.state_count;
  j["gamma"] = rep.gamma;
  auto& st = j["stable_set"] = json::array();
  for (int id : rep.stable_set) st.push_back(state_label(index, id));
  j["phi_gaps"] = {{"ab", rep.phi_gaps[0]}, {"ac", rep.phi_gaps[1]}, {"bc", rep.phi_gaps[2]}};
  j["max_depth_outside"] = rep.max_depth_outside;
  j["max_depth_witness"] = rep.max_depth_witness >= 0 ? json(state_label(index, rep.max_depth_witness))
                                                      : json(nullptr);
  j["max_depth_to_b"] = rep.max_depth_to_b;
  auto& cl = j["clauses"] = json::array();
  for (const auto& c : rep.clauses) {
    cl.push_back({{"name", c.name},
                  {"expected", c.expected},
                  {"value", c.value},
                  {"passed", c.passed()},
                  {"detail", c.detail}});
  }
  j["all_passed"] = rep.all_passed();
  return j;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_enumerate(Run& run, const GridFlags& g, bool dump_grid) {
  const Grid grid = build_grid(g.spec());
  run.params()["grid"] = grid_json(g.spec());
  run.params()["dump_grid"] = dump_grid;
  const auto index = enumerate(grid);
  std::map<int, int> levels;
  for (int id = 0; id < index.size(); ++id) ++levels[index.energy(id)];
  json j;
  j["schema"] = kReportSchema;
  j["kind"] = "enumeration";
  j["grid"] = grid_json(g.spec());
  j["sites"] = grid.size();
  j["states"] = index.size();
  j["moves"] = index.move_count();
  j["min_energy"] = index.min_energy();
  auto& lv = j["states_by_energy"] = json::array();
  for (const auto& [e, n] : levels) lv.push_back({{"energy", e}, {"count", n}});
  run.write("enumeration.json", j.dump(2) + "\n");
  if (dump_grid) run.write("grid.json", grid_to_json(grid) + "\n");
  run.say() << grid.rows() << "x" << grid.columns() << " grid, " << grid.size() << " sites: "
            << index.size() << " hard-core configurations, minimum energy " << index.min_energy()
            << "\n";
  return kOk;
}

int cmd_verify(Run& run, const GridFlags& g) {
  const Grid grid = build_grid(g.spec());
  run.params()["grid"] = grid_json(g.spec());
  const auto index = enumerate(grid);
  run.log(1, std::to_string(index.size()) + " states enumerated");
  const auto rep = verify_structure(index);
  run.write("structure.json", structure_json(index, rep).dump(2) + "\n");
  auto& o = run.say();
  o << "grid " << grid.rows() << "x" << grid.columns() << " (K=" << g.K << ", L=" << g.L << "): "
    << rep.state_count << " states, Gamma = " << rep.gamma << "\n";
  for (const auto& c : rep.clauses) {
    o << (c.passed() ? "  PASS  " : "  FAIL  ") << c.name;
    if (!c.detail.empty()) o << "  (" << c.detail << ")";
    o << "\n";
  }
  o << (rep.all_passed() ? "all clauses hold\n" : "some clauses FAILED\n");
  return rep.all_passed() ? kOk : kVerificationFailed;
}

int cmd_ref_path(Run& run, const GridFlags& g, char from, char to, const std::string& emit) {
  const Grid grid = build_grid(g.spec());
  const Component x = parse_component(from);
  const Component y = parse_component(to);
  run.params()["grid"] = grid_json(g.spec());
  run.params()["from"] = std::string(1, stable_label(x));
  run.params()["to"] = std::string(1, stable_label(y));
  const Path path = reference_path(grid, x, y);
  const auto check = validate_path(grid, path);
  const int gap = path.height() - energy(path.front());
  const std::string text = path_to_json(path) + "\n";
  run.write("path.json", text);
  if (!emit.empty()) {
    write_file_atomic(emit, text);
    run.params()["emit"] = emit;
  }
  run.say() << "reference path " << stable_label(x) << " -> " << stable_label(y) << ": "
            << path.moves() << " moves, height " << path.height() << ", height gap " << gap
            << " (Gamma = " << gamma(g.spec()) << ")" << (check.valid ? "" : ", INVALID") << "\n";
  return check.valid && gap == gamma(g.spec()) ? kOk : kVerificationFailed;
}

int cmd_reduce(Run& run, const std::string& input, const std::string& mode, char target,
               std::optional<GridSpec> given, int stripe, std::optional<int> first_column) {
  auto [spec, sigma] = load_configuration(input, given);
  validate(spec);
  const Grid grid = build_grid(spec);
  const Component t = parse_component(target);
  run.params()["input"] = input;
  run.params()["grid"] = grid_json(spec);
  run.params()["mode"] = mode;
  run.params()["target"] = std::string(1, stable_label(t));
  Path path;
  try {
    if (mode == "rows") {
      run.params()["stripe"] = stripe;
      path = reduce_by_rows(grid, sigma, t, stripe);
    } else if (mode == "columns") {
      const int f = first_column ? *first_column : default_first_column(t);
      run.params()["first_column"] = f;
      path = reduce_by_columns(grid, sigma, t, f);
    } else {
      throw UsageError("--mode must be rows or columns");
    }
  } catch (const PreconditionError& e) {
    std::string sites;
    for (SiteIndex v : e.sites()) {
      const auto s = grid.site(v);
      sites += " (" + std::to_string(s.row) + "," + std::to_string(s.col) + ")";
    }
    throw UsageError(std::string(e.what()) + "; offending sites:" + sites);
  }
  const auto check = validate_path(grid, path);
  run.write("path.json", path_to_json(path) + "\n");
  const int gap = path.height() - energy(path.front());
  run.say() << mode << " reduction towards " << stable_label(t) << ": " << path.moves()
            << " moves in " << path.stages.size() << " stages, H " << energy(path.front()) << " -> "
            << energy(path.back()) << ", height gap " << gap
            << (check.valid ? "" : ", INVALID (" + check.reason + ")") << "\n";
  return check.valid ? kOk : kVerificationFailed;
}

int cmd_simulate(Run& run, const GridFlags& g, double beta, const std::string& start_arg,
                 const std::string& target_arg, int samples, std::uint64_t cap) {
  validate(g.spec());
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw UsageError("--beta must be finite and >= 0");
  if (samples < 1) throw UsageError("--samples must be positive");
  const Grid grid = build_grid(g.spec());
  const auto st = stable_configs(grid);
  Configuration start(grid.size());
  std::optional<Component> start_c;
  if (start_arg.size() == 1 && std::string("abc").find(start_arg) != std::string::npos) {
    start_c = parse_component(start_arg[0]);
    start = st[static_cast<std::size_t>(*start_c)];
  } else {
    auto [spec, cfg] = load_configuration(start_arg, g.spec());
    start = cfg;
  }
  std::vector<Component> targets;
  if (target_arg == "abc-minus-start") {
    for (Component x : kComponents) {
      if (!start_c || x != *start_c) targets.push_back(x);
    }
  } else {
    for (char ch : target_arg) {
      const Component x = parse_component(ch);
      if (std::find(targets.begin(), targets.end(), x) != targets.end()) {
        throw UsageError("--target lists a state twice");
      }
      targets.push_back(x);
    }
  }
  if (targets.empty()) throw UsageError("--target is empty");
  std::vector<Configuration> tcfg;
  for (Component x : targets) {
    if (start == st[static_cast<std::size_t>(x)]) throw UsageError("start lies in the target set");
    tcfg.push_back(st[static_cast<std::size_t>(x)]);
  }
  const std::uint64_t seed = run.globals().seed;
  auto& p = run.params();
  p["grid"] = grid_json(g.spec());
  p["beta"] = beta;
  p["start"] = start_c ? std::string(1, stable_label(*start_c)) : to_hex(start);
  std::string tl;
  for (Component x : targets) tl += stable_label(x);
  p["target"] = tl;
  p["samples"] = samples;
  p["seed"] = seed;
  p["cap"] = cap;
  p["threads"] = run.globals().threads;

  const auto batch =
      run_batch(grid, start, tcfg, {beta, seed}, samples, {cap, run.globals().threads});
  std::ostringstream csv;
  csv << "sample_id,steps,hit_state\n";
  int truncated = 0;
  std::vector<double> steps;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& h = batch[i];
    csv << i << ',' << h.steps << ','
        << (h.truncated ? std::string("-")
                        : std::string(1, stable_label(targets[static_cast<std::size_t>(h.hit_index)])))
        << '\n';
    if (h.truncated) {
      ++truncated;
    } else {
      steps.push_back(static_cast<double>(h.steps));
    }
  }
  json meta;
  meta["grid"] = grid_json(g.spec());
  meta["beta"] = beta;
  meta["seed"] = seed;
  meta["rng"] = kRngId;
  meta["tool_version"] = tool_version();
  meta["start"] = p["start"];
  meta["target"] = tl;
  meta["samples"] = samples;
  meta["cap"] = cap;
  run.write("samples.csv", csv.str());
  run.write("metadata.json", meta.dump(2) + "\n");
  auto& o = run.say();
  o << samples << " samples at beta = " << beta << ", " << truncated << " truncated";
  if (steps.size() >= 2) {
    const auto m = stats::moments(steps);
    o << ", mean steps " << fmt("%.6g", m.mean) << " (SE " << fmt("%.3g", m.standard_error()) << ")";
  }
  o << "\n";
  return kOk;
}

int cmd_symmetry(Run& run, const GridFlags& g, double beta, int samples, std::uint64_t cap) {
  validate(g.spec());
  const Grid grid = build_grid(g.spec());
  const std::uint64_t seed = run.globals().seed;
  auto& p = run.params();
  p["grid"] = grid_json(g.spec());
  p["beta"] = beta;
  p["samples"] = samples;
  p["seed"] = seed;
  p["cap"] = cap;
  json j;
  j["schema"] = kReportSchema;
  j["kind"] = "symmetry";
  j["grid"] = grid_json(g.spec());
  bool ok = true;
  auto& o = run.say();

  // Site-level checks hold on every grid.
  auto& maps = j["automorphisms"] = json::array();
  for (const auto& xi : axial_group(grid)) {
    const bool adj = preserves_adjacency(grid, xi);
    json m{{"name", xi.name()}, {"preserves_adjacency", adj}};
    ok = ok && adj;
    o << (adj ? "  PASS  " : "  FAIL  ") << xi.name() << " preserves adjacency\n";
    maps.push_back(m);
  }
  if (grid.size() <= kDefaultEnumerationLimit) {
    const auto index = enumerate(grid);
    const auto ax = axial_automorphisms(grid);
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& xi = k == 0 ? ax.ab : k == 1 ? ax.ac : ax.bc;
      const bool good = verify_state_automorphism(index, xi);
      maps[k + 1]["state_graph_automorphism"] = good;
      ok = ok && good;
      o << (good ? "  PASS  " : "  FAIL  ") << xi.name() << " induces a state-graph automorphism\n";
    }
    const auto dist = exact_hitting_distribution(index, beta);
    const double dev = std::max(std::abs(dist[0] - 0.5), std::abs(dist[1] - 0.5));
    const bool good = dev <= 1e-10;
    ok = ok && good;
    j["exact"] = {{"beta", beta}, {"p_b", dist[0]}, {"p_c", dist[1]}, {"max_deviation", dev},
                  {"passed", good}};
    o << (good ? "  PASS  " : "  FAIL  ") << "exact exit distribution from a: ("
      << fmt("%.12f", dist[0]) << ", " << fmt("%.12f", dist[1]) << ")\n";
  } else {
    run.log(1, "grid too large for the exact checks; running the statistical ones only");
  }
  if (samples > 0) {
    const auto rep = coupling_checks(grid, beta, samples, seed, {run.globals().threads, cap});
    const bool good = rep.passed(0.01);
    ok = ok && good;
    j["coupling"] = {{"beta", rep.beta},       {"samples", rep.samples},
                     {"seed", rep.seed},       {"hits_b", rep.hits_b},
                     {"hits_c", rep.hits_c},   {"truncated", rep.truncated},
                     {"binomial_p", rep.binomial_p}, {"ks_statistic", rep.ks_statistic},
                     {"ks_p", rep.ks_p},       {"chi2_statistic", rep.chi2_statistic},
                     {"chi2_p", rep.chi2_p},   {"median", rep.median},
                     {"alpha", 0.01},          {"passed", good}};
    o << (good ? "  PASS  " : "  FAIL  ") << "coupling checks at beta = " << beta << ": b/c "
      << rep.hits_b << "/" << rep.hits_c << ", binomial p " << fmt("%.3g", rep.binomial_p)
      << ", KS p " << fmt("%.3g", rep.ks_p) << ", chi2 p " << fmt("%.3g", rep.chi2_p) << "\n";
  }
  j["all_passed"] = ok;
  run.write("symmetry.json", j.dump(2) + "\n");
  return ok ? kOk : kVerificationFailed;
}

int cmd_spectrum(Run& run, const GridFlags& g, const std::vector<double>& betas) {
  const Grid grid = build_grid(g.spec());
  run.params()["grid"] = grid_json(g.spec());
  run.params()["betas"] = betas;
  const auto index = enumerate(grid);
  json j;
  j["schema"] = kReportSchema;
  j["kind"] = "spectrum";
  j["grid"] = grid_json(g.spec());
  j["gamma"] = gamma(g.spec());
  auto& rows = j["results"] = json::array();
  auto& o = run.say();
  bool ok = true;
  for (double beta : betas) {
    const auto r = spectral_gap_detail(index, beta);
    ok = ok && r.converged;
    const double rate = beta > 0 ? -std::log(r.rho) / beta : 0.0;
    rows.push_back({{"beta", beta},
                    {"rho", r.rho},
                    {"alpha2", r.alpha2},
                    {"residual", r.residual},
                    {"iterations", r.iterations},
                    {"converged", r.converged},
                    {"rate", beta > 0 ? json(rate) : json(nullptr)}});
    o << "beta " << beta << ": rho = " << fmt("%.6e", r.rho);
    if (beta > 0) o << ", -(1/beta) log rho = " << fmt("%.4f", rate);
    o << (r.converged ? "" : " (not converged)") << "\n";
  }
  run.write("spectrum.json", j.dump(2) + "\n");
  return ok ? kOk : kInternal;
}

int cmd_mix(Run& run, const GridFlags& g, const std::vector<double>& betas, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw UsageError("--eps must lie in (0, 1)");
  const Grid grid = build_grid(g.spec());
  run.params()["grid"] = grid_json(g.spec());
  run.params()["betas"] = betas;
  run.params()["eps"] = eps;
  const auto index = enumerate(grid);
  json j;
  j["schema"] = kReportSchema;
  j["kind"] = "mixing";
  j["grid"] = grid_json(g.spec());
  j["eps"] = eps;
  auto& rows = j["results"] = json::array();
  auto& o = run.say();
  for (double beta : betas) {
    const auto r = mixing_time_detail(index, beta, eps);
    const double rate = beta > 0 ? std::log(static_cast<double>(r.t_mix)) / beta : 0.0;
    rows.push_back({{"beta", beta},
                    {"t_mix", r.t_mix},
                    {"tv_at", r.tv_at},
                    {"tv_before", r.tv_before},
                    {"truncated", r.truncated},
                    {"lower_bound", r.lower_bound},
                    {"mode", r.mode},
                    {"rate", beta > 0 ? json(rate) : json(nullptr)}});
    o << "beta " << beta << ": t_mix(" << eps << ") = " << r.t_mix;
    if (beta > 0) o << ", (1/beta) log t_mix = " << fmt("%.4f", rate);
    if (r.lower_bound) o << " (lower bound)";
    if (r.truncated) o << " (truncated)";
    o << "\n";
  }
  run.write("mixing.json", j.dump(2) + "\n");
  return kOk;
}

struct CampaignFlags {
  std::string config;
  std::optional<int> K, L, samples;
  std::vector<double> betas;
  std::string start, target;
  std::optional<std::uint64_t> cap;
  std::string format = "json";
  std::optional<double> eps;
};

int cmd_campaign(Run& run, const CampaignFlags& f) {
  CampaignSpec spec;
  if (!f.config.empty()) spec = campaign_spec_from_kv(parse_kv(read_text(f.config)));
  if (f.K) spec.grid.K = *f.K;
  if (f.L) spec.grid.L = *f.L;
  if (f.samples) spec.samples_per_beta = *f.samples;
  if (!f.betas.empty()) spec.betas = f.betas;
  if (!f.start.empty()) spec.start = parse_component(f.start.at(0));
  if (!f.target.empty()) spec.target = parse_component(f.target.at(0));
  if (f.cap) spec.cap = *f.cap;
  if (run.globals().seed_given) spec.seed = run.globals().seed;
  spec.workers = run.globals().threads;
  validate(spec);
  const auto format = parse_report_format(f.format);

  auto& p = run.params();
  if (!f.config.empty()) p["config"] = f.config;
  p["grid"] = grid_json(spec.grid);
  p["betas"] = spec.betas;
  p["samples_per_beta"] = spec.samples_per_beta;
  p["start"] = std::string(1, stable_label(spec.start));
  p["target"] = std::string(1, stable_label(spec.target));
  p["seed"] = spec.seed;
  p["cap"] = spec.cap;
  p["threads"] = spec.workers;
  p["format"] = f.format;

  run.log(1, "running " + std::to_string(spec.betas.size()) + " betas");
  const auto result = run_campaign(spec);
  fs::create_directories(run.dir());
  run.adopt(emit_report(result, format, run.dir()));
  auto& o = run.say();
  o << summary_markdown(result);
  if (f.eps) {
    p["eps"] = *f.eps;
    const auto w = probability_window_check(result, *f.eps);
    json wj;
    wj["schema"] = kReportSchema;
    wj["kind"] = "probability-window";
    wj["eps"] = w.eps;
    auto& rows = wj["rows"] = json::array();
    for (const auto& r : w.rows) {
      rows.push_back({{"beta", r.beta},
                      {"lower", r.lower},
                      {"upper", r.upper},
                      {"fraction", r.fraction},
                      {"used", r.used},
                      {"ordering_ok", r.ordering_ok}});
      o << "window eps " << w.eps << ", beta " << r.beta << ": fraction " << fmt("%.4f", r.fraction)
        << "\n";
    }
    wj["increasing"] = w.increasing;
    wj["monotone"] = w.monotone;
    wj["ordering_ok"] = w.ordering_ok;
    run.write("window.json", wj.dump(2) + "\n");
  }
  return kOk;
}

}  // namespace

json RunManifest::to_json() const {
  json j;
  j["schema"] = "hardhex.manifest/1";
  j["subcommand"] = subcommand;
  j["parameters"] = parameters;
  j["tool_version"] = tool_version;
  j["rng"] = rng;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["exit_code"] = exit_code;
  j["outputs"] = outputs;
  return j;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hard-core lattice gas on triangular tori: landscapes, paths and Metropolis dynamics",
               "hardhex"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "master RNG seed")->capture_default_str();
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("-v,--verbose", g.verbose, "more diagnostics on stderr (repeatable)");
  app.add_flag("-q,--quiet", g.quiet, "suppress human-readable output");

  GridFlags grid;
  std::function<int(Run&)> action;

  auto* en = app.add_subcommand("enumerate", "count the hard-core configurations");
  add_grid_flags(en, grid);
  bool dump_grid = false;
  en->add_flag("--dump-grid", dump_grid, "also write grid.json (sites, edges, components)");
  en->callback([&] { action = [&](Run& r) { return cmd_enumerate(r, grid, dump_grid); }; });

  auto* vs = app.add_subcommand("verify-structure", "exhaustive check of the landscape structure");
  add_grid_flags(vs, grid);
  vs->callback([&] { action = [&](Run& r) { return cmd_verify(r, grid); }; });

  auto* rp = app.add_subcommand("ref-path", "reference path between two stable configurations");
  add_grid_flags(rp, grid);
  char from = 'a', to = 'b';
  std::string emit;
  rp->add_option("--from", from, "a, b or c")->capture_default_str();
  rp->add_option("--to", to, "a, b or c")->capture_default_str();
  rp->add_option("--emit", emit, "also write the path JSON to this file");
  rp->callback([&] { action = [&](Run& r) { return cmd_ref_path(r, grid, from, to, emit); }; });

  auto* rd = app.add_subcommand("reduce", "run the rows or columns algorithm on a configuration");
  std::string input, mode;
  char rtarget = 'b';
  int stripe = 0;
  std::optional<int> first_column, rK, rL;
  rd->add_option("--input", input, "ASCII grid file, or hex with a 0x prefix")->required();
  rd->add_option("--mode", mode, "rows or columns")->required()->check(CLI::IsMember({"rows", "columns"}));
  rd->add_option("--target", rtarget, "a, b or c")->capture_default_str();
  rd->add_option("--stripe", stripe, "starting horizontal stripe (rows mode)")->capture_default_str();
  rd->add_option("--first-column", first_column, "first empty column (columns mode)");
  rd->add_option("--K", rK, "grid size when the input is hex");
  rd->add_option("--L", rL, "grid size when the input is hex");
  rd->callback([&] {
    action = [&](Run& r) {
      std::optional<GridSpec> given;
      if (rK || rL) {
        if (!(rK && rL)) throw UsageError("--K and --L go together");
        given = GridSpec{*rK, *rL};
      }
      return cmd_reduce(r, input, mode, rtarget, given, stripe, first_column);
    };
  });

  auto* sm = app.add_subcommand("simulate", "sample hitting times of the Metropolis chain");
  add_grid_flags(sm, grid);
  double beta = 1.0;
  std::string start = "a", target = "abc-minus-start";
  int samples = 1000;
  std::uint64_t cap = kDefaultStepCap;
  sm->add_option("--beta", beta)->capture_default_str();
  sm->add_option("--start", start, "a, b, c or a configuration file")->capture_default_str();
  sm->add_option("--target", target, "letters among a, b, c, or abc-minus-start")->capture_default_str();
  sm->add_option("--samples", samples)->capture_default_str();
  sm->add_option("--cap", cap, "step cap per sample")->capture_default_str();
  sm->callback([&] {
    action = [&](Run& r) { return cmd_simulate(r, grid, beta, start, target, samples, cap); };
  });

  auto* sy = app.add_subcommand("symmetry-check", "exact and statistical symmetry checks");
  add_grid_flags(sy, grid);
  double sbeta = 2.0;
  int ssamples = 2000;
  std::uint64_t scap = kDefaultStepCap;
  sy->add_option("--beta", sbeta)->capture_default_str();
  sy->add_option("--samples", ssamples, "0 skips the statistical checks")->capture_default_str();
  sy->add_option("--cap", scap, "step cap per sample")->capture_default_str();
  sy->callback([&] { action = [&](Run& r) { return cmd_symmetry(r, grid, sbeta, ssamples, scap); }; });

  auto* sp = app.add_subcommand("spectrum", "spectral gap of the transition matrix");
  add_grid_flags(sp, grid);
  std::vector<double> betas{2.0};
  sp->add_option("--beta", betas, "one or more inverse temperatures")->capture_default_str();
  sp->callback([&] { action = [&](Run& r) { return cmd_spectrum(r, grid, betas); }; });

  auto* mx = app.add_subcommand("mix", "total-variation mixing time");
  add_grid_flags(mx, grid);
  std::vector<double> mbetas{2.0};
  double eps = 0.25;
  mx->add_option("--beta", mbetas, "one or more inverse temperatures")->capture_default_str();
  mx->add_option("--eps", eps)->capture_default_str();
  mx->callback([&] { action = [&](Run& r) { return cmd_mix(r, grid, mbetas, eps); }; });

  auto* cp = app.add_subcommand("campaign", "Monte Carlo sweep over beta with reports");
  CampaignFlags cf;
  cp->add_option("--config", cf.config, "key=value file");
  cp->add_option("--K", cf.K);
  cp->add_option("--L", cf.L);
  cp->add_option("--betas", cf.betas, "comma separated")->delimiter(',');
  cp->add_option("--samples", cf.samples);
  cp->add_option("--start", cf.start);
  cp->add_option("--target", cf.target);
  cp->add_option("--cap", cf.cap);
  cp->add_option("--format", cf.format, "json, csv or md")->capture_default_str();
  cp->add_option("--eps", cf.eps, "also run the probability window check");
  cp->callback([&] { action = [&](Run& r) { return cmd_campaign(r, cf); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  g.seed_given = app.get_option("--seed")->count() > 0;

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    Run run(g, name, out, err);
    int code = kOk;
    try {
      code = action(run);
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << "\n";
      return kUsage;
    } catch (const std::domain_error& e) {
      err << "error: " << e.what() << "\n";
      return kUsage;
    } catch (const std::length_error& e) {
      err << "error: " << e.what() << "\n";
      return kUsage;
    }
    return run.finish(code);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace hardhex::cli
