#pragma once

#include "psdbw/randgen.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace psdbw {

enum class ExperimentKind { DistRobustness, PairRobustness, Accuracy, Efficiency, MultiRobustness };
enum class Profile { Desk, Paper };

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(std::string_view name);
Profile profile_from_string(std::string_view name);

struct GridPoint {
  int n = 0;
  int m = 0;
  double p = 0.0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::DistRobustness;
  std::vector<int> n_values;
  std::vector<int> m_values;
  std::vector<double> p_values;
  // Robustness experiments sweep n at reference_p and p at reference_n
  // instead of taking the full product of n_values and p_values.
  bool cross_sweep = false;
  int reference_n = 10;
  double reference_p = 0.2;

  int pairs = 30;
  int perturbations = 30;
  int trials = 20;
  int repeats = 5;

  RngSeed seed{};
  double epsilon = 1e-3;
  double perturbation_scale = 1e-3;
  // Scale each pair's perturbations by the smaller of the two minimum
  // eigenvalues instead of the fixed perturbation_scale.
  bool scale_from_min_eigenvalue = false;
  // clip_to_psd floor for affine-invariant inputs that are not positive
  // definite (typically perturbed copies).
  double ai_floor = 1e-3;
  double cell_timeout_seconds = 300.0;
  // 0 = PSDBW_THREADS or hardware concurrency. Efficiency runs always use 1.
  int threads = 0;

  static ExperimentConfig preset(ExperimentKind kind, Profile profile);
  std::vector<GridPoint> grid() const;
  void validate() const;
};

struct TrialRecord {
  std::string experiment;
  int n = 0;
  int m = 0;
  double p = 0.0;
  std::optional<int> trial;
  std::optional<int> perturbation;
  std::string geometry;
  std::string algorithm;
  std::string metric;
  double value = 0.0;
  std::optional<bool> converged;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  // Efficiency cells that exceeded the timeout ("n=..,m=..,p=..,bw/inductive").
  std::vector<std::string> censored;
  // delta_rel rows skipped because the BW mean distance was zero.
  int skipped = 0;
};

ExperimentResult run_dist_robustness(const ExperimentConfig& cfg);
ExperimentResult run_pair_robustness(const ExperimentConfig& cfg);
ExperimentResult run_accuracy(const ExperimentConfig& cfg);
ExperimentResult run_efficiency(const ExperimentConfig& cfg);
ExperimentResult run_multi_robustness(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct SummaryRow {
  std::string experiment;
  // metric, suffixed with "[geometry/algorithm]" when the record carries labels.
  std::string metric;
  int n = 0;
  int m = 0;
  double p = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  int count = 0;
};

/// Descriptive statistics per (experiment, metric, n, m, p) over finite
/// values; quartiles interpolate linearly in the sorted sample.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);
double quantile(std::vector<double> sorted_values, double q);

std::string_view records_csv_header();
void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_records_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
std::string sidecar_json(const ExperimentConfig& cfg, const ExperimentResult& result);

/// Canonical record order: grid coordinates, indices, labels, metric.
void sort_records(std::vector<TrialRecord>& records);

}  // namespace psdbw
