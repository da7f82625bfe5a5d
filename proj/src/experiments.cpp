#include "hardhex/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hardhex/configuration.hpp"
#include "hardhex/landscape.hpp"

#ifndef HARDHEX_VERSION
#define HARDHEX_VERSION "0.1.0+unknown"
#endif

namespace hardhex {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kSummarySchema = "hardhex.campaign.summary/1";

std::string label(Component x) { return std::string(1, stable_label(x)); }

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

long long parse_integer(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument(key + ": not an integer: '" + v + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument(key + ": not a number: '" + v + "'");
  return out;
}

Component parse_component_word(const std::string& key, const std::string& v) {
  if (v.size() != 1) throw std::invalid_argument(key + ": expected one of a, b, c");
  return parse_component(v[0]);
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

}  // namespace

std::string tool_version() { return HARDHEX_VERSION; }

void validate(const CampaignSpec& spec) {
  validate(spec.grid);
  if (spec.betas.empty()) throw std::invalid_argument("campaign needs at least one beta");
  for (std::size_t k = 0; k < spec.betas.size(); ++k) {
    if (!(spec.betas[k] >= 0.0) || !std::isfinite(spec.betas[k])) {
      throw std::invalid_argument("betas must be finite and nonnegative");
    }
    if (k > 0 && !(spec.betas[k] > spec.betas[k - 1])) {
      throw std::invalid_argument("betas must be strictly increasing");
    }
  }
  if (spec.samples_per_beta < 100) throw std::invalid_argument("samples per beta must be at least 100");
  if (spec.start == spec.target) throw std::invalid_argument("start and target must differ");
  if (spec.cap == 0) throw std::invalid_argument("step cap must be positive");
  if (spec.workers < 1) throw std::invalid_argument("workers must be at least 1");
}

std::uint64_t beta_seed(std::uint64_t seed, std::size_t k) {
  return substream_seed(seed, 0x100000000ULL + k);
}

double ks_critical_value(double alpha, std::size_t n) {
  const double rn = std::sqrt(static_cast<double>(n));
  return stats::kolmogorov_critical(alpha) / (rn + 0.12 + 0.11 / rn);
}

CampaignResult run_campaign(const CampaignSpec& spec) {
  validate(spec);
  const Grid grid = build_grid(spec.grid);
  const auto s = stable_configs(grid);
  const auto& start = s[static_cast<std::size_t>(spec.start)];
  std::vector<Configuration> wide;
  std::vector<Component> wide_labels;
  for (Component x : kComponents) {
    if (x == spec.start) continue;
    wide.push_back(s[static_cast<std::size_t>(x)]);
    wide_labels.push_back(x);
  }
  const std::vector<Configuration> narrow{s[static_cast<std::size_t>(spec.target)]};

  std::optional<LandscapeIndex> index;
  if (grid.size() <= kDefaultEnumerationLimit) index.emplace(enumerate(grid));

  CampaignResult out;
  out.spec = spec;
  out.gamma = gamma(spec.grid);
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < spec.betas.size(); ++k) {
    const double beta = spec.betas[k];
    auto batch = run_nested_batch(grid, start, wide, narrow, {beta, beta_seed(spec.seed, k)},
                                  spec.samples_per_beta, {spec.cap, spec.workers});
    BetaSummary row;
    row.beta = beta;
    std::vector<double> tw, tn;
    for (const auto& smp : batch) {
      if (smp.wide.truncated || smp.narrow.truncated) {
        ++row.truncated;
        continue;
      }
      tw.push_back(static_cast<double>(smp.wide.steps));
      tn.push_back(static_cast<double>(smp.narrow.steps));
    }
    if (tw.size() >= 2) {
      row.wide = stats::moments(tw);
      row.narrow = stats::moments(tn);
      row.ratio = row.narrow.mean / row.wide.mean;
      std::vector<double> scaled(tw.size());
      std::transform(tw.begin(), tw.end(), scaled.begin(), [&](double t) { return t / row.wide.mean; });
      const auto ks = stats::ks_exponential(std::move(scaled));
      row.ks_statistic = ks.statistic;
      row.ks_p = ks.p_value;
      xs.push_back(beta);
      ys.push_back(std::log(row.wide.mean));
    }
    if (row.truncated * 20 > spec.samples_per_beta) out.slope_reliable = false;
    if (index) {
      std::vector<int> w_ids;
      for (Component x : wide_labels) w_ids.push_back(index->stable_id(x));
      const int a_id = index->stable_id(spec.start);
      row.exact_wide = exact_mean_hitting(*index, beta, a_id, w_ids);
      row.exact_narrow = exact_mean_hitting(*index, beta, a_id, {index->stable_id(spec.target)});
    }
    out.per_beta.push_back(row);
    out.samples.push_back(std::move(batch));
  }
  if (xs.size() >= 2) {
    out.fit = stats::fit_line(xs, ys);
  } else {
    out.slope_reliable = false;
  }
  const auto& last = out.per_beta.back();
  out.ks_statistic = last.ks_statistic;
  out.ks_p = last.ks_p;
  out.ks_critical = ks_critical_value(0.01, last.wide.count);
  out.ratio = last.ratio;
  return out;
}

WindowReport probability_window_check(const CampaignResult& result, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (result.samples.size() != result.spec.betas.size()) {
    throw std::invalid_argument("campaign result carries no raw samples");
  }
  WindowReport rep;
  rep.eps = eps;
  for (std::size_t k = 0; k < result.samples.size(); ++k) {
    WindowRow row;
    row.beta = result.spec.betas[k];
    row.lower = std::exp(row.beta * (result.gamma - eps));
    row.upper = std::exp(row.beta * (result.gamma + eps));
    int inside = 0;
    for (const auto& smp : result.samples[k]) {
      if (smp.wide.truncated || smp.narrow.truncated) continue;
      ++row.used;
      if (smp.wide.steps > smp.narrow.steps) row.ordering_ok = false;
      const double tw = static_cast<double>(smp.wide.steps);
      const double tn = static_cast<double>(smp.narrow.steps);
      if (row.lower <= tw && tn <= row.upper) ++inside;
    }
    row.fraction = row.used > 0 ? static_cast<double>(inside) / row.used : 0.0;
    rep.ordering_ok = rep.ordering_ok && row.ordering_ok;
    rep.rows.push_back(row);
  }
  rep.increasing = rep.rows.size() >= 2 && rep.rows.back().fraction > rep.rows.front().fraction;
  rep.monotone = true;
  for (std::size_t k = 1; k < rep.rows.size(); ++k) {
    if (rep.rows[k].fraction < rep.rows[k - 1].fraction) rep.monotone = false;
  }
  return rep;
}

WindowReport probability_window_check(const CampaignSpec& spec, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  return probability_window_check(run_campaign(spec), eps);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

ReportFormat parse_report_format(const std::string& s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  if (s == "md" || s == "markdown") return ReportFormat::Markdown;
  throw std::invalid_argument("unknown report format '" + s + "' (json, csv, md)");
}

std::string samples_csv(const CampaignResult& result) {
  std::ostringstream os;
  os << "beta,sample_id,steps,hit_state,steps_to_target,truncated\n";
  std::vector<Component> wide_labels;
  for (Component x : kComponents) {
    if (x != result.spec.start) wide_labels.push_back(x);
  }
  for (std::size_t k = 0; k < result.samples.size(); ++k) {
    const std::string beta = fmt(result.spec.betas[k]);
    for (std::size_t i = 0; i < result.samples[k].size(); ++i) {
      const auto& smp = result.samples[k][i];
      const bool trunc = smp.wide.truncated || smp.narrow.truncated;
      os << beta << ',' << i << ',' << smp.wide.steps << ','
         << (smp.wide.hit_index >= 0 ? label(wide_labels[static_cast<std::size_t>(smp.wide.hit_index)])
                                     : std::string("-"))
         << ',' << smp.narrow.steps << ',' << (trunc ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

std::string summary_json(const CampaignResult& result) {
  const auto& sp = result.spec;
  json j;
  j["schema"] = kSummarySchema;
  j["tool_version"] = tool_version();
  j["grid"] = {{"K", sp.grid.K}, {"L", sp.grid.L}};
  j["start"] = label(sp.start);
  j["target"] = label(sp.target);
  j["seed"] = sp.seed;
  j["samples_per_beta"] = sp.samples_per_beta;
  j["cap"] = sp.cap;
  j["gamma"] = result.gamma;
  auto& rows = j["per_beta"] = json::array();
  for (const auto& r : result.per_beta) {
    rows.push_back({{"beta", r.beta},
                    {"n", r.wide.count},
                    {"mean_wide", r.wide.mean},
                    {"var_wide", r.wide.variance},
                    {"se_wide", r.wide.standard_error()},
                    {"mean_narrow", r.narrow.mean},
                    {"var_narrow", r.narrow.variance},
                    {"se_narrow", r.narrow.standard_error()},
                    {"truncated", r.truncated},
                    {"ratio", r.ratio},
                    {"ks_statistic", r.ks_statistic},
                    {"ks_p", r.ks_p},
                    {"exact_wide", optional_number(r.exact_wide)},
                    {"exact_narrow", optional_number(r.exact_narrow)}});
  }
  j["fit"] = {{"slope", result.fit.slope},
              {"intercept", result.fit.intercept},
              {"slope_se", result.fit.slope_se},
              {"reliable", result.slope_reliable}};
  j["exponentiality"] = {{"beta", sp.betas.back()},
                         {"ks_statistic", result.ks_statistic},
                         {"ks_p", result.ks_p},
                         {"ks_critical", result.ks_critical}};
  j["ratio"] = result.ratio;
  return j.dump(2) + "\n";
}

std::string summary_csv(const CampaignResult& result) {
  std::ostringstream os;
  os << "beta,n,mean_wide,se_wide,mean_narrow,se_narrow,ratio,truncated,ks_statistic,ks_p,"
        "exact_wide,exact_narrow\n";
  for (const auto& r : result.per_beta) {
    os << fmt(r.beta) << ',' << r.wide.count << ',' << fmt(r.wide.mean) << ','
       << fmt(r.wide.standard_error()) << ',' << fmt(r.narrow.mean) << ','
       << fmt(r.narrow.standard_error()) << ',' << fmt(r.ratio) << ',' << r.truncated << ','
       << fmt(r.ks_statistic) << ',' << fmt(r.ks_p) << ','
       << (r.exact_wide ? fmt(*r.exact_wide) : "") << ','
       << (r.exact_narrow ? fmt(*r.exact_narrow) : "") << '\n';
  }
  return os.str();
}

std::string summary_markdown(const CampaignResult& result) {
  const auto& sp = result.spec;
  const std::string s = label(sp.start);
  std::string others;
  for (Component x : kComponents) {
    if (x != sp.start) others += (others.empty() ? "" : ",") + label(x);
  }
  std::ostringstream os;
  char buf[256];
  os << "# Campaign " << 2 * sp.grid.K << "x" << 6 * sp.grid.L << " (K=" << sp.grid.K
     << ", L=" << sp.grid.L << ")\n\n";
  os << "Gamma = " << result.gamma << ", seed " << sp.seed << ", " << sp.samples_per_beta
     << " samples per beta, version " << tool_version() << ".\n\n";
  os << "| beta | E tau " << s << "->{" << others << "} | SE | E tau " << s << "->" << label(sp.target)
     << " | ratio | truncated | KS D | exact |\n";
  os << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : result.per_beta) {
    std::snprintf(buf, sizeof buf, "| %g | %.6g | %.3g | %.6g | %.4f | %d | %.4f | %s |\n", r.beta,
                  r.wide.mean, r.wide.standard_error(), r.narrow.mean, r.ratio, r.truncated,
                  r.ks_statistic, r.exact_wide ? fmt(*r.exact_wide).c_str() : "-");
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "\nSlope of log mean against beta: %.4f (SE %.4f)%s.\n",
                result.fit.slope, result.fit.slope_se,
                result.slope_reliable ? "" : ", unreliable: more than 5% of runs truncated");
  os << buf;
  std::snprintf(buf, sizeof buf, "KS at beta = %g: D = %.4f, p = %.4g, critical value (0.01) %.4f.\n",
                sp.betas.back(), result.ks_statistic, result.ks_p, result.ks_critical);
  os << buf;
  std::snprintf(buf, sizeof buf, "Ratio E tau %s->%s / E tau %s->{%s} at beta = %g: %.4f.\n", s.c_str(),
                label(sp.target).c_str(), s.c_str(), others.c_str(), sp.betas.back(), result.ratio);
  os << buf;
  return os.str();
}

std::string metadata_json(const CampaignResult& result) {
  const auto& sp = result.spec;
  json j;
  j["tool_version"] = tool_version();
  j["rng"] = kRngId;
  j["seed"] = sp.seed;
  j["grid"] = {{"K", sp.grid.K}, {"L", sp.grid.L}};
  j["betas"] = sp.betas;
  j["beta_seeds"] = json::array();
  for (std::size_t k = 0; k < sp.betas.size(); ++k) j["beta_seeds"].push_back(beta_seed(sp.seed, k));
  j["samples_per_beta"] = sp.samples_per_beta;
  j["start"] = label(sp.start);
  j["target"] = label(sp.target);
  j["cap"] = sp.cap;
  j["workers"] = sp.workers;
  return j.dump(2) + "\n";
}

std::vector<std::string> validate_summary_json(const std::string& text) {
  std::vector<std::string> problems;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    return {std::string("not JSON: ") + e.what()};
  }
  if (!j.is_object()) return {"top level is not an object"};
  auto need = [&](const json& obj, const std::string& where, const std::string& key,
                  bool (json::*pred)() const) {
    if (!obj.contains(key)) {
      problems.push_back(where + key + " missing");
    } else if (!(obj.at(key).*pred)()) {
      problems.push_back(where + key + " has the wrong type");
    }
  };
  need(j, "", "schema", &json::is_string);
  if (j.contains("schema") && j["schema"].is_string() && j["schema"] != kSummarySchema) {
    problems.push_back("schema is not " + std::string(kSummarySchema));
  }
  need(j, "", "tool_version", &json::is_string);
  need(j, "", "grid", &json::is_object);
  need(j, "", "start", &json::is_string);
  need(j, "", "target", &json::is_string);
  need(j, "", "seed", &json::is_number_unsigned);
  need(j, "", "samples_per_beta", &json::is_number_integer);
  need(j, "", "cap", &json::is_number_unsigned);
  need(j, "", "gamma", &json::is_number_integer);
  need(j, "", "per_beta", &json::is_array);
  need(j, "", "fit", &json::is_object);
  need(j, "", "exponentiality", &json::is_object);
  need(j, "", "ratio", &json::is_number);
  if (j.contains("grid") && j["grid"].is_object()) {
    need(j["grid"], "grid.", "K", &json::is_number_integer);
    need(j["grid"], "grid.", "L", &json::is_number_integer);
  }
  if (j.contains("per_beta") && j["per_beta"].is_array()) {
    if (j["per_beta"].empty()) problems.push_back("per_beta is empty");
    for (std::size_t k = 0; k < j["per_beta"].size(); ++k) {
      const auto& r = j["per_beta"][k];
      const std::string where = "per_beta[" + std::to_string(k) + "].";
      if (!r.is_object()) {
        problems.push_back(where + " is not an object");
        continue;
      }
      for (const char* key : {"beta", "mean_wide", "var_wide", "se_wide", "mean_narrow",
                              "var_narrow", "se_narrow", "ratio", "ks_statistic", "ks_p"}) {
        need(r, where, key, &json::is_number);
      }
      need(r, where, "n", &json::is_number_integer);
      need(r, where, "truncated", &json::is_number_integer);
      for (const char* key : {"exact_wide", "exact_narrow"}) {
        if (!r.contains(key)) {
          problems.push_back(where + key + " missing");
        } else if (!r[key].is_null() && !r[key].is_number()) {
          problems.push_back(where + key + " has the wrong type");
        }
      }
    }
  }
  if (j.contains("fit") && j["fit"].is_object()) {
    for (const char* key : {"slope", "intercept", "slope_se"}) need(j["fit"], "fit.", key, &json::is_number);
    need(j["fit"], "fit.", "reliable", &json::is_boolean);
  }
  if (j.contains("exponentiality") && j["exponentiality"].is_object()) {
    for (const char* key : {"beta", "ks_statistic", "ks_p", "ks_critical"}) {
      need(j["exponentiality"], "exponentiality.", key, &json::is_number);
    }
  }
  return problems;
}

CampaignResult parse_summary_json(const std::string& text) {
  const auto problems = validate_summary_json(text);
  if (!problems.empty()) throw std::invalid_argument("invalid summary: " + problems.front());
  const json j = json::parse(text);
  CampaignResult out;
  auto& sp = out.spec;
  sp.grid = {j["grid"]["K"].get<int>(), j["grid"]["L"].get<int>()};
  sp.start = parse_component_word("start", j["start"].get<std::string>());
  sp.target = parse_component_word("target", j["target"].get<std::string>());
  sp.seed = j["seed"].get<std::uint64_t>();
  sp.samples_per_beta = j["samples_per_beta"].get<int>();
  sp.cap = j["cap"].get<std::uint64_t>();
  out.gamma = j["gamma"].get<int>();
  sp.betas.clear();
  for (const auto& r : j["per_beta"]) {
    BetaSummary row;
    row.beta = r["beta"].get<double>();
    row.wide = {r["mean_wide"].get<double>(), r["var_wide"].get<double>(), r["n"].get<std::size_t>()};
    row.narrow = {r["mean_narrow"].get<double>(), r["var_narrow"].get<double>(),
                  r["n"].get<std::size_t>()};
    row.truncated = r["truncated"].get<int>();
    row.ratio = r["ratio"].get<double>();
    row.ks_statistic = r["ks_statistic"].get<double>();
    row.ks_p = r["ks_p"].get<double>();
    if (!r["exact_wide"].is_null()) row.exact_wide = r["exact_wide"].get<double>();
    if (!r["exact_narrow"].is_null()) row.exact_narrow = r["exact_narrow"].get<double>();
    sp.betas.push_back(row.beta);
    out.per_beta.push_back(row);
  }
  out.fit = {j["fit"]["slope"].get<double>(), j["fit"]["intercept"].get<double>(),
             j["fit"]["slope_se"].get<double>()};
  out.slope_reliable = j["fit"]["reliable"].get<bool>();
  out.ks_statistic = j["exponentiality"]["ks_statistic"].get<double>();
  out.ks_p = j["exponentiality"]["ks_p"].get<double>();
  out.ks_critical = j["exponentiality"]["ks_critical"].get<double>();
  out.ratio = j["ratio"].get<double>();
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << text;
    os.flush();
    if (!os) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::filesystem::path> emit_report(const CampaignResult& result, ReportFormat format,
                                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& text) {
    const auto p = dir / name;
    write_file_atomic(p, text);
    written.push_back(p);
  };
  if (!result.samples.empty()) put("samples.csv", samples_csv(result));
  put("metadata.json", metadata_json(result));
  switch (format) {
    case ReportFormat::Json:
      put("summary.json", summary_json(result));
      break;
    case ReportFormat::Csv:
      put("summary.csv", summary_csv(result));
      break;
    case ReportFormat::Markdown:
      put("summary.md", summary_markdown(result));
      break;
  }
  return written;
}

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("line " + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, value).second) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": repeated key '" + key + "'");
    }
  }
  return out;
}

CampaignSpec campaign_spec_from_kv(const std::map<std::string, std::string>& kv, CampaignSpec base) {
  for (const auto& [key, value] : kv) {
    if (key == "K") {
      base.grid.K = static_cast<int>(parse_integer(key, value));
    } else if (key == "L") {
      base.grid.L = static_cast<int>(parse_integer(key, value));
    } else if (key == "betas") {
      base.betas.clear();
      std::istringstream is(value);
      std::string item;
      while (std::getline(is, item, ',')) base.betas.push_back(parse_real(key, trim(item)));
    } else if (key == "samples") {
      base.samples_per_beta = static_cast<int>(parse_integer(key, value));
    } else if (key == "start") {
      base.start = parse_component_word(key, value);
    } else if (key == "target") {
      base.target = parse_component_word(key, value);
    } else if (key == "seed" || key == "cap") {
      const long long v = parse_integer(key, value);
      if (v < 0) throw std::invalid_argument(key + " must be nonnegative");
      (key == "seed" ? base.seed : base.cap) = static_cast<std::uint64_t>(v);
    } else if (key == "workers") {
      base.workers = static_cast<int>(parse_integer(key, value));
    } else {
      throw std::invalid_argument("unknown key '" + key + "'");
    }
  }
  validate(base);
  return base;
}

}  // namespace hardhex
