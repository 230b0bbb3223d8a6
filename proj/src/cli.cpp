#include "psdbw/cli.hpp"

#include "psdbw/barycenter.hpp"
#include "psdbw/error.hpp"
#include "psdbw/experiments.hpp"
#include "psdbw/geometry.hpp"
#include "psdbw/matrix_io.hpp"
#include "psdbw/randgen.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace psdbw {

namespace {

constexpr const char* kFormatsHelp = R"(File formats:
  matrix   JSON {"dim": n, "values": [n*n row-major reals]} or CSV with n rows
           of n comma-separated reals. Outputs are JSON unless --format csv.
  records  CSV header experiment,n,m,p,trial,perturbation,geometry,algorithm,
           metric,value,converged plus a JSON sidecar <out>.json holding the
           config, seed and RNG algorithm.
  summary  CSV header experiment,metric,n,m,p,min,q1,median,mean,q3,max,count
Environment:
  PSDBW_THREADS  caps experiment worker threads (efficiency always uses 1).
Exit status: 0 success, 1 usage/input error, 2 numerical or domain error.)";

struct Options {
  std::string metric = "bw";
  std::string algo = "projection";
  std::vector<std::string> inputs;
  std::string out;
  std::string format = "json";
  std::optional<double> regularize;
  double t = 0.5;
  double eps = 1e-3;
  std::optional<int> max_iters;

  // gen
  int n = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::string kind = "spd";
  double scale = 1e-3;

  // experiment
  std::string experiment;
  std::string profile = "desk";
  std::vector<int> n_values;
  std::vector<int> m_values;
  std::vector<double> p_values;
  std::optional<int> trials;
  std::optional<int> pairs;
  std::optional<int> perturbations;
  std::optional<int> repeats;
  std::optional<double> perturbation_scale;
  bool scale_from_min = false;
  std::optional<int> threads;
  std::optional<double> timeout;
  std::string summary_out;
};

// Writes to --out when given, stdout otherwise.
void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out);
  if (!file) throw InvalidArgument("cannot write " + o.out);
  file << text;
}

std::string render_matrix(const Options& o, const SymMatrix& a) {
  return o.format == "csv" ? matrix_to_csv(a) : matrix_to_json(a);
}

std::vector<SymMatrix> load_inputs(const Options& o, std::size_t min_count, std::optional<std::size_t> exact) {
  if (o.inputs.size() < min_count || (exact && o.inputs.size() != *exact)) {
    std::string expected = exact ? std::to_string(*exact) : "at least " + std::to_string(min_count);
    throw InvalidArgument("--in expects " + expected + " matrix file(s), got " + std::to_string(o.inputs.size()));
  }
  std::vector<SymMatrix> mats;
  for (const std::string& path : o.inputs) mats.push_back(read_matrix(path));
  if (o.metric == "ai" && o.regularize)
    for (SymMatrix& a : mats) a = clip_to_psd(a, *o.regularize);
  return mats;
}

SolverConfig solver_config(const Options& o) {
  SolverConfig cfg;
  cfg.epsilon = o.eps;
  cfg.max_iters = o.max_iters;
  cfg.validate();
  return cfg;
}

int run_gen(const Options& o, std::ostream& out) {
  Rng rng(RngSeed{o.seed});
  const SymMatrix a = o.kind == "spd" ? random_spd(SpectrumSpec{o.n, o.p}, rng) : random_perturbation(o.n, o.scale, rng);
  emit(o, out, render_matrix(o, a));
  return 0;
}

int run_dist(const Options& o, std::ostream& out) {
  const auto mats = load_inputs(o, 2, 2);
  emit(o, out, format_double(geometry_by_name(o.metric).distance(mats[0], mats[1])) + "\n");
  return 0;
}

int run_geodesic(const Options& o, std::ostream& out) {
  const auto mats = load_inputs(o, 2, 2);
  emit(o, out, render_matrix(o, geometry_by_name(o.metric).geodesic(mats[0], mats[1], o.t)));
  return 0;
}

int run_logmap(const Options& o, std::ostream& out) {
  const auto mats = load_inputs(o, 2, 2);
  emit(o, out, render_matrix(o, geometry_by_name(o.metric).log(mats[0], mats[1]).value));
  return 0;
}

int run_expmap(const Options& o, std::ostream& out) {
  if (o.inputs.size() != 2) throw InvalidArgument("expmap expects --in <base> <tangent>");
  SymMatrix base = read_matrix(o.inputs[0]);
  if (o.metric == "ai" && o.regularize) base = clip_to_psd(base, *o.regularize);
  const TangentVector x{read_matrix(o.inputs[1])};
  emit(o, out, render_matrix(o, geometry_by_name(o.metric).exp(base, x)));
  return 0;
}

nlohmann::ordered_json result_json(const BarycenterResult& r) {
  nlohmann::ordered_json doc;
  doc["algorithm"] = std::string(to_string(r.algorithm));
  doc["geometry"] = r.geometry;
  doc["converged"] = r.converged;
  doc["iterations"] = r.iterations;
  doc["final_step"] = r.final_step;
  if (!r.diagnostic.empty()) doc["diagnostic"] = r.diagnostic;
  if (r.working_set_spread) doc["working_set_spread"] = *r.working_set_spread;
  doc["mean"] = {{"dim", r.mean.dim()}, {"values", r.mean.row_major()}};
  return doc;
}

int run_barycenter(const Options& o, std::ostream& out, std::ostream& err) {
  const auto mats = load_inputs(o, 1, std::nullopt);
  const BarycenterResult r = barycenter(algorithm_from_string(o.algo), geometry_by_name(o.metric), mats, solver_config(o));
  if (o.format == "csv") {
    emit(o, out, matrix_to_csv(r.mean));
    err << "converged=" << (r.converged ? "true" : "false") << " iterations=" << r.iterations << "\n";
  } else {
    emit(o, out, result_json(r).dump(2) + "\n");
  }
  return 0;
}

int run_variance(const Options& o, std::ostream& out) {
  const auto mats = load_inputs(o, 1, std::nullopt);
  const Geometry& g = geometry_by_name(o.metric);
  const BarycenterResult r = barycenter(algorithm_from_string(o.algo), g, mats, solver_config(o));
  nlohmann::ordered_json doc;
  doc["variance"] = frechet_variance(g, mats, r.mean);
  doc["ssd"] = ssd(g, mats, r.mean);
  doc["algorithm"] = std::string(to_string(r.algorithm));
  doc["geometry"] = r.geometry;
  doc["converged"] = r.converged;
  emit(o, out, doc.dump(2) + "\n");
  return 0;
}

int run_experiment_cmd(const Options& o, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = ExperimentConfig::preset(experiment_from_string(o.experiment), profile_from_string(o.profile));
  cfg.seed = RngSeed{o.seed};
  cfg.epsilon = o.eps;
  if (!o.n_values.empty()) cfg.n_values = o.n_values;
  if (!o.m_values.empty()) cfg.m_values = o.m_values;
  if (!o.p_values.empty()) cfg.p_values = o.p_values;
  if (!o.n_values.empty() || !o.p_values.empty()) cfg.cross_sweep = false;
  if (o.trials) cfg.trials = *o.trials;
  if (o.pairs) cfg.pairs = *o.pairs;
  if (o.perturbations) cfg.perturbations = *o.perturbations;
  if (o.repeats) cfg.repeats = *o.repeats;
  if (o.perturbation_scale) cfg.perturbation_scale = *o.perturbation_scale;
  if (o.regularize) cfg.ai_floor = *o.regularize;
  if (o.threads) cfg.threads = *o.threads;
  if (o.timeout) cfg.cell_timeout_seconds = *o.timeout;
  cfg.scale_from_min_eigenvalue = o.scale_from_min;
  cfg.validate();

  const ExperimentResult result = run_experiment(cfg);
  std::ostringstream csv;
  write_records_csv(csv, result.records);
  emit(o, out, csv.str());
  const std::string sidecar = sidecar_json(cfg, result);
  if (!o.out.empty()) {
    std::ofstream side(o.out + ".json");
    if (!side) throw InvalidArgument("cannot write " + o.out + ".json");
    side << sidecar;
  }
  if (!o.summary_out.empty()) {
    std::ofstream summary(o.summary_out);
    if (!summary) throw InvalidArgument("cannot write " + o.summary_out);
    write_summary_csv(summary, summarize(result.records));
  }
  for (const std::string& c : result.censored) err << "censored: " << c << "\n";
  return 0;
}

int run_summarize(const Options& o, std::ostream& out) {
  if (o.inputs.size() != 1) throw InvalidArgument("summarize expects --in <records.csv>");
  std::ifstream in(o.inputs[0]);
  if (!in) throw InvalidArgument("cannot open " + o.inputs[0]);
  std::ostringstream csv;
  write_summary_csv(csv, summarize(read_records_csv(in)));
  emit(o, out, csv.str());
  return 0;
}

void add_metric(CLI::App* cmd, Options& o) {
  cmd->add_option("--metric", o.metric, "Geometry: bw (Bures-Wasserstein) or ai (affine-invariant)")
      ->check(CLI::IsMember({"bw", "ai"}));
  cmd->add_option("--regularize", o.regularize, "Clip AI inputs to eigenvalues >= FLOOR before use")
      ->check(CLI::PositiveNumber);
}

void add_io(CLI::App* cmd, Options& o, bool with_format = true) {
  cmd->add_option("--in", o.inputs, "Input matrix files")->expected(1, -1);
  cmd->add_option("--out", o.out, "Output path (default: stdout)");
  if (with_format) cmd->add_option("--format", o.format, "Matrix output format")->check(CLI::IsMember({"json", "csv"}));
}

void add_solver(CLI::App* cmd, Options& o) {
  cmd->add_option("--algo", o.algo, "Barycenter algorithm")->check(CLI::IsMember({"inductive", "projection", "cheap"}));
  cmd->add_option("--eps", o.eps, "Stopping tolerance epsilon")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", o.max_iters, "Iteration cap (default 10000 inductive, 200 otherwise)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Bures-Wasserstein and affine-invariant geometry of PSD matrices", "psdbw"};
  app.footer(kFormatsHelp);
  app.require_subcommand(1, 1);

  auto* gen = app.add_subcommand("gen", "Generate a random SPD matrix or symmetric perturbation");
  gen->add_option("--n", o.n, "Dimension")->required()->check(CLI::Range(1, 256));
  gen->add_option("--p", o.p, "Fraction of close-to-zero eigenvalues")->check(CLI::Range(0.0, 0.999999));
  gen->add_option("--seed", o.seed, "RNG seed");
  gen->add_option("--kind", o.kind, "spd or perturbation")->check(CLI::IsMember({"spd", "perturbation"}));
  gen->add_option("--scale", o.scale, "Spectral norm of a perturbation")->check(CLI::NonNegativeNumber);
  add_io(gen, o);

  auto* dist = app.add_subcommand("dist", "Distance between two matrices");
  add_metric(dist, o);
  add_io(dist, o, false);

  auto* geo = app.add_subcommand("geodesic", "Point at parameter t on the geodesic from A to B");
  add_metric(geo, o);
  geo->add_option("--t", o.t, "Geodesic parameter")->required();
  add_io(geo, o);

  auto* logmap = app.add_subcommand("logmap", "Log map of B at base A");
  add_metric(logmap, o);
  add_io(logmap, o);

  auto* expmap = app.add_subcommand("expmap", "Exp map of tangent X at base A (--in A X)");
  add_metric(expmap, o);
  add_io(expmap, o);

  auto* bary = app.add_subcommand("barycenter", "Frechet mean of the input matrices");
  add_metric(bary, o);
  add_solver(bary, o);
  add_io(bary, o);

  auto* var = app.add_subcommand("variance", "Frechet variance around the estimated mean");
  add_metric(var, o);
  add_solver(var, o);
  add_io(var, o, false);

  auto* exp = app.add_subcommand("experiment", "Run a seeded simulation sweep");
  exp->add_option("name", o.experiment, "Experiment")
      ->required()
      ->check(CLI::IsMember({"dist-robustness", "pair-robustness", "accuracy", "efficiency", "multi-robustness"}));
  exp->add_option("--profile", o.profile, "Preset counts")->check(CLI::IsMember({"desk", "paper"}));
  exp->add_option("--seed", o.seed, "Root RNG seed");
  exp->add_option("--n", o.n_values, "Matrix dimensions")->check(CLI::Range(1, 256));
  exp->add_option("--m", o.m_values, "Numbers of matrices")->check(CLI::PositiveNumber);
  exp->add_option("--p", o.p_values, "Fractions of close-to-zero eigenvalues")->check(CLI::Range(0.0, 0.999999));
  exp->add_option("--trials", o.trials, "Trials per grid point")->check(CLI::PositiveNumber);
  exp->add_option("--pairs", o.pairs, "Matrix pairs per grid point")->check(CLI::PositiveNumber);
  exp->add_option("--perturbations", o.perturbations, "Perturbations per pair/trial")->check(CLI::PositiveNumber);
  exp->add_option("--repeats", o.repeats, "Timed repeats per efficiency cell")->check(CLI::PositiveNumber);
  exp->add_option("--eps", o.eps, "Stopping tolerance epsilon")->check(CLI::PositiveNumber);
  exp->add_option("--scale", o.perturbation_scale, "Perturbation spectral norm")->check(CLI::NonNegativeNumber);
  exp->add_flag("--scale-from-min-eigenvalue", o.scale_from_min, "Scale perturbations by each input's min eigenvalue");
  exp->add_option("--regularize", o.regularize, "AI regularization floor (default 1e-3)")->check(CLI::PositiveNumber);
  exp->add_option("--threads", o.threads, "Worker threads (overrides PSDBW_THREADS)")->check(CLI::PositiveNumber);
  exp->add_option("--timeout", o.timeout, "Efficiency cell timeout in seconds")->check(CLI::PositiveNumber);
  exp->add_option("--out", o.out, "Records CSV path (sidecar written to <out>.json)");
  exp->add_option("--summary", o.summary_out, "Also write summary CSV here");

  auto* summ = app.add_subcommand("summarize", "Descriptive statistics of a records CSV");
  add_io(summ, o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "run with --help for usage\n";
    return 1;
  }

  try {
    if (gen->parsed()) return run_gen(o, out);
    if (dist->parsed()) return run_dist(o, out);
    if (geo->parsed()) return run_geodesic(o, out);
    if (logmap->parsed()) return run_logmap(o, out);
    if (expmap->parsed()) return run_expmap(o, out);
    if (bary->parsed()) return run_barycenter(o, out, err);
    if (var->parsed()) return run_variance(o, out);
    if (exp->parsed()) return run_experiment_cmd(o, out, err);
    if (summ->parsed()) return run_summarize(o, out);
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace psdbw
