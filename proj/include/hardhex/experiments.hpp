// Monte Carlo campaigns over a sweep of beta: tunneling-time samples, the
// fitted growth rate of the mean, exponentiality at the largest beta, the
// mean ratio of nested targets, and report files.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hardhex/dynamics.hpp"
#include "hardhex/lattice.hpp"
#include "hardhex/stats.hpp"

namespace hardhex {

/// Version string baked in at configure time.
std::string tool_version();

struct CampaignSpec {
  GridSpec grid{2, 2};
  std::vector<double> betas{1.5, 2.0, 2.5, 3.0};
  int samples_per_beta = 2000;
  /// Chain starts at this stable configuration. The wide target is the set
  /// of the other two; the narrow target is `target` alone.
  Component start = Component::A;
  Component target = Component::B;
  std::uint64_t seed = 20240611;
  std::uint64_t cap = kDefaultStepCap;
  int workers = 1;
};

/// Throws std::invalid_argument unless betas are strictly increasing and
/// nonnegative, samples >= 100, start != target and the grid is valid.
void validate(const CampaignSpec& spec);

struct BetaSummary {
  double beta = 0.0;
  stats::Moments wide;    // tau_start -> {other two}
  stats::Moments narrow;  // tau_start -> {target}
  int truncated = 0;
  /// narrow.mean / wide.mean
  double ratio = 0.0;
  /// KS of tau / mean(tau) against Exp(1), wide target.
  double ks_statistic = 0.0;
  double ks_p = 1.0;
  /// Exact means from the linear system when the grid is enumerable.
  std::optional<double> exact_wide;
  std::optional<double> exact_narrow;
};

struct CampaignResult {
  CampaignSpec spec;
  int gamma = 0;
  std::vector<BetaSummary> per_beta;
  /// samples[k][i]: sample i at betas[k].
  std::vector<std::vector<NestedSample>> samples;
  /// log(mean wide tau) against beta.
  stats::LineFit fit;
  bool slope_reliable = true;  // false above 5% truncation at some beta
  /// Exponentiality at the largest beta.
  double ks_statistic = 0.0;
  double ks_p = 1.0;
  double ks_critical = 0.0;  // level 0.01 at the largest beta's sample size
  /// Ratio at the largest beta.
  double ratio = 0.0;
};

/// Seed of the batch at beta index k.
std::uint64_t beta_seed(std::uint64_t seed, std::size_t k);

CampaignResult run_campaign(const CampaignSpec& spec);

/// Critical value of the one-sample KS statistic at level alpha for n
/// samples (asymptotic Kolmogorov law with the usual small-n correction).
double ks_critical_value(double alpha, std::size_t n);

struct WindowRow {
  double beta = 0.0;
  double lower = 0.0;  // e^{beta (Gamma - eps)}
  double upper = 0.0;  // e^{beta (Gamma + eps)}
  double fraction = 0.0;
  int used = 0;
  /// tau_wide <= tau_narrow held on every coupled sample.
  bool ordering_ok = true;
};

struct WindowReport {
  double eps = 0.0;
  std::vector<WindowRow> rows;
  /// fraction at the largest beta exceeds the fraction at the smallest.
  bool increasing = false;
  /// fractions are non-decreasing along the sweep.
  bool monotone = false;
  bool ordering_ok = true;
};

/// Fraction of samples with e^{beta(Gamma-eps)} <= tau_wide and
/// tau_narrow <= e^{beta(Gamma+eps)}. Throws for eps <= 0.
WindowReport probability_window_check(const CampaignResult& result, double eps);
WindowReport probability_window_check(const CampaignSpec& spec, double eps);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class ReportFormat { Json, Csv, Markdown };

ReportFormat parse_report_format(const std::string& s);

/// Raw samples, one row per (beta, sample). Depends only on the CampaignSpec fields.
std::string samples_csv(const CampaignResult& result);
std::string summary_json(const CampaignResult& result);
std::string summary_csv(const CampaignResult& result);
std::string summary_markdown(const CampaignResult& result);
std::string metadata_json(const CampaignResult& result);

/// Checks a summary document against the expected layout; returns the list
/// of problems (empty when valid).
std::vector<std::string> validate_summary_json(const std::string& text);

/// Parses a summary document back into the per-beta summaries and the
/// headline statistics. Raw samples are not part of the summary.
CampaignResult parse_summary_json(const std::string& text);

/// Writes samples.csv, metadata.json and the summary in the chosen format
/// (summary.json, summary.csv or summary.md) into dir,
/// each through a temporary file and a rename. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const CampaignResult& result, ReportFormat format,
                                               const std::filesystem::path& dir);

/// Writes text to path atomically (temporary file in the same directory,
/// then rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

/// Flat key=value lines; '#' starts a comment, blank lines are ignored.
/// Throws std::invalid_argument on malformed lines or repeated keys.
std::map<std::string, std::string> parse_kv(const std::string& text);

/// Recognised keys: K, L, betas (comma separated), samples, start, target,
/// seed, cap, workers. Unknown keys are rejected.
CampaignSpec campaign_spec_from_kv(const std::map<std::string, std::string>& kv,
                                   CampaignSpec base = {});

}  // namespace hardhex
