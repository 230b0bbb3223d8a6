#include "psdbw/experiments.hpp"

#include "psdbw/ai.hpp"
#include "psdbw/barycenter.hpp"
#include "psdbw/bw.hpp"
#include "psdbw/error.hpp"
#include "psdbw/matrix_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

namespace psdbw {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Output of one independent unit of work (a pair, a trial or a cell).
struct UnitOutput {
  std::vector<TrialRecord> records;
  std::vector<std::string> censored;
  int skipped = 0;
};

int resolve_threads(const ExperimentConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  if (const char* env = std::getenv("PSDBW_THREADS")) {
    int value = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec == std::errc() && ptr == s.data() + s.size() && value > 0) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs `work(i)` for i in [0, count) on up to `threads` workers. Results are
// stored by index, so the output order never depends on scheduling.
template <class Work>
std::vector<UnitOutput> run_units(std::size_t count, int threads, Work&& work) {
  std::vector<UnitOutput> out(count);
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = work(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            out[i] = work(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

ExperimentResult collect(std::vector<UnitOutput> units) {
  ExperimentResult result;
  for (UnitOutput& u : units) {
    result.records.insert(result.records.end(), std::make_move_iterator(u.records.begin()),
                          std::make_move_iterator(u.records.end()));
    result.censored.insert(result.censored.end(), u.censored.begin(), u.censored.end());
    result.skipped += u.skipped;
  }
  sort_records(result.records);
  return result;
}

// Streams are keyed by grid coordinates rather than grid position so that a
// point produces the same matrices whatever else is in the sweep.
RngSeed point_seed(RngSeed root, const GridPoint& g) {
  RngSeed s = derive_seed(root, static_cast<std::uint64_t>(g.n));
  s = derive_seed(s, static_cast<std::uint64_t>(g.m));
  return derive_seed(s, std::bit_cast<std::uint64_t>(g.p));
}

struct UnitIndex {
  std::size_t point;
  int index;
};

std::vector<UnitIndex> enumerate_units(std::size_t points, int per_point) {
  std::vector<UnitIndex> units;
  for (std::size_t g = 0; g < points; ++g)
    for (int i = 0; i < per_point; ++i) units.push_back({g, i});
  return units;
}

TrialRecord make_record(const ExperimentConfig& cfg, const GridPoint& g, std::optional<int> trial,
                        std::optional<int> perturbation, std::string geometry, std::string algorithm,
                        std::string metric, double value, std::optional<bool> converged = std::nullopt) {
  TrialRecord r;
  r.experiment = std::string(to_string(cfg.kind));
  r.n = g.n;
  r.m = g.m;
  r.p = g.p;
  r.trial = trial;
  r.perturbation = perturbation;
  r.geometry = std::move(geometry);
  r.algorithm = std::move(algorithm);
  r.metric = std::move(metric);
  r.value = value;
  r.converged = converged;
  return r;
}

// Evaluates f(), mapping library errors to NaN so a single bad draw does not
// abort a sweep. NaN rows are excluded from summaries.
template <class F>
double guarded(F&& f) {
  try {
    return f();
  } catch (const Error&) {
    return kNaN;
  }
}

std::vector<SymMatrix> generate_set(const GridPoint& g, Rng& rng) {
  const SpectrumSpec spec{g.n, g.p};
  std::vector<SymMatrix> out;
  out.reserve(static_cast<std::size_t>(g.m));
  for (int k = 0; k < g.m; ++k) out.push_back(random_spd(spec, rng));
  return out;
}

// AI inputs that are not positive definite are clipped to the floor; positive
// definite inputs pass through untouched.
SymMatrix ai_input(const SymMatrix& a, double floor) {
  if (spectral_decompose(a).min_eigenvalue() > default_psd_tolerance(a)) return a;
  return clip_to_psd(a, floor);
}

std::vector<SymMatrix> regularized(const std::vector<SymMatrix>& mats, double floor) {
  std::vector<SymMatrix> out;
  out.reserve(mats.size());
  for (const SymMatrix& a : mats) out.push_back(ai_input(a, floor));
  return out;
}

double perturbation_scale(const ExperimentConfig& cfg, std::span<const SymMatrix> mats) {
  if (!cfg.scale_from_min_eigenvalue) return cfg.perturbation_scale;
  double lo = std::numeric_limits<double>::infinity();
  for (const SymMatrix& a : mats) lo = std::min(lo, spectral_decompose(a).min_eigenvalue());
  return std::max(lo, 0.0);
}

// One perturbed copy of `mats`, clipped at 0 for BW and regularized for AI.
struct PerturbedSet {
  std::vector<SymMatrix> bw;
  std::vector<SymMatrix> ai;
};

PerturbedSet perturb_set(const ExperimentConfig& cfg, std::span<const SymMatrix> mats, double scale, Rng& rng) {
  PerturbedSet out;
  for (const SymMatrix& a : mats) {
    const SymMatrix e = random_perturbation(a.dim(), scale, rng);
    out.bw.push_back(perturb_psd(a, e, 0.0));
    out.ai.push_back(ai_input(a + e, cfg.ai_floor));
  }
  return out;
}

std::vector<GridPoint> pair_grid(const ExperimentConfig& cfg) {
  std::vector<GridPoint> pts = cfg.grid();
  for (GridPoint& g : pts) g.m = 2;
  return pts;
}

UnitOutput dist_robustness_unit(const ExperimentConfig& cfg, const GridPoint& g, int pair) {
  const RngSeed unit = derive_seed(point_seed(cfg.seed, g), static_cast<std::uint64_t>(pair));
  Rng gen(derive_seed(unit, 0));
  const SpectrumSpec spec{g.n, g.p};
  const std::vector<SymMatrix> ab{random_spd(spec, gen), random_spd(spec, gen)};
  const double scale = perturbation_scale(cfg, ab);

  const double d_bw = guarded([&] { return bw_distance(ab[0], ab[1]); });
  const double d_ai = guarded([&] { return ai_distance(ai_input(ab[0], cfg.ai_floor), ai_input(ab[1], cfg.ai_floor)); });

  UnitOutput out;
  for (int j = 0; j < cfg.perturbations; ++j) {
    Rng rng(derive_seed(unit, static_cast<std::uint64_t>(j) + 1));
    const PerturbedSet pert = perturb_set(cfg, ab, scale, rng);
    const double delta_bw = d_bw - guarded([&] { return bw_distance(pert.bw[0], pert.bw[1]); });
    const double delta_ai = d_ai - guarded([&] { return ai_distance(pert.ai[0], pert.ai[1]); });
    out.records.push_back(make_record(cfg, g, pair, j, "ai", "", "delta_ai", delta_ai));
    out.records.push_back(make_record(cfg, g, pair, j, "bw", "", "delta_bw", delta_bw));
  }
  return out;
}

UnitOutput pair_robustness_unit(const ExperimentConfig& cfg, const GridPoint& g, int pair) {
  const RngSeed unit = derive_seed(point_seed(cfg.seed, g), static_cast<std::uint64_t>(pair));
  Rng gen(derive_seed(unit, 0));
  const SpectrumSpec spec{g.n, g.p};
  const std::vector<SymMatrix> ab{random_spd(spec, gen), random_spd(spec, gen)};
  const double scale = perturbation_scale(cfg, ab);

  UnitOutput out;
  std::optional<SymMatrix> mean_bw;
  std::optional<SymMatrix> mean_ai;
  try {
    mean_bw = bw_pair_mean(ab[0], ab[1]);
  } catch (const Error&) {
  }
  try {
    mean_ai = ai_pair_mean(ai_input(ab[0], cfg.ai_floor), ai_input(ab[1], cfg.ai_floor));
  } catch (const Error&) {
  }

  double sum_bw = 0.0;
  double sum_ai = 0.0;
  bool all_finite = true;
  for (int j = 0; j < cfg.perturbations; ++j) {
    Rng rng(derive_seed(unit, static_cast<std::uint64_t>(j) + 1));
    const PerturbedSet pert = perturb_set(cfg, ab, scale, rng);
    const double df_bw = mean_bw ? guarded([&] { return frobenius_dist(*mean_bw, bw_pair_mean(pert.bw[0], pert.bw[1])); }) : kNaN;
    const double df_ai = mean_ai ? guarded([&] { return frobenius_dist(*mean_ai, ai_pair_mean(pert.ai[0], pert.ai[1])); }) : kNaN;
    out.records.push_back(make_record(cfg, g, pair, j, "ai", "pair_mean", "dfrob", df_ai));
    out.records.push_back(make_record(cfg, g, pair, j, "bw", "pair_mean", "dfrob", df_bw));
    all_finite = all_finite && std::isfinite(df_bw) && std::isfinite(df_ai);
    sum_bw += df_bw;
    sum_ai += df_ai;
  }
  const double avg_bw = sum_bw / cfg.perturbations;
  const double avg_ai = sum_ai / cfg.perturbations;
  if (all_finite && avg_bw > 0.0) {
    out.records.push_back(make_record(cfg, g, pair, std::nullopt, "", "", "delta_rel", (avg_ai - avg_bw) / avg_bw));
  } else {
    out.skipped = 1;
  }
  return out;
}

UnitOutput accuracy_unit(const ExperimentConfig& cfg, const GridPoint& g, int trial) {
  const RngSeed unit = derive_seed(point_seed(cfg.seed, g), static_cast<std::uint64_t>(trial));
  Rng gen(derive_seed(unit, 0));
  const std::vector<SymMatrix> mats = generate_set(g, gen);
  const Geometry& bw = bw_geometry();
  SolverConfig solver;
  solver.epsilon = cfg.epsilon;
  solver.working_set_spread = false;

  UnitOutput out;
  double values[3] = {kNaN, kNaN, kNaN};
  const Algorithm algos[3] = {Algorithm::Inductive, Algorithm::Projection, Algorithm::Cheap};
  const char* metrics[3] = {"ssd_i", "ssd_p", "ssd_c"};
  for (int a = 0; a < 3; ++a) {
    bool converged = false;
    values[a] = guarded([&] {
      const BarycenterResult r = barycenter(algos[a], bw, mats, solver);
      converged = r.converged;
      return ssd(bw, mats, r.mean);
    });
    out.records.push_back(
        make_record(cfg, g, trial, std::nullopt, "bw", std::string(to_string(algos[a])), metrics[a], values[a], converged));
  }
  out.records.push_back(make_record(cfg, g, trial, std::nullopt, "bw", "", "ssd_diff_ip", values[0] - values[1]));
  out.records.push_back(make_record(cfg, g, trial, std::nullopt, "bw", "", "ssd_diff_cp", values[2] - values[1]));
  return out;
}

UnitOutput efficiency_cell(const ExperimentConfig& cfg, const GridPoint& g) {
  const RngSeed cell = point_seed(cfg.seed, g);
  Rng gen(derive_seed(cell, 0));
  // Set 0 is the discarded warm-up.
  std::vector<std::vector<SymMatrix>> sets;
  for (int r = 0; r <= cfg.repeats; ++r) sets.push_back(generate_set(g, gen));
  std::vector<std::vector<SymMatrix>> sets_ai;
  for (const auto& s : sets) sets_ai.push_back(regularized(s, cfg.ai_floor));

  SolverConfig solver;
  solver.epsilon = cfg.epsilon;
  solver.working_set_spread = false;

  UnitOutput out;
  for (const char* geometry : {"ai", "bw"}) {
    const Geometry& geo = geometry_by_name(geometry);
    const auto& inputs = std::string_view(geometry) == "ai" ? sets_ai : sets;
    for (Algorithm algo : {Algorithm::Cheap, Algorithm::Inductive, Algorithm::Projection}) {
      std::vector<double> times;
      bool all_converged = true;
      bool censored = false;
      double total = 0.0;
      for (int r = 0; r <= cfg.repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        bool converged = false;
        try {
          converged = barycenter(algo, geo, inputs[static_cast<std::size_t>(r)], solver).converged;
        } catch (const Error&) {
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        total += seconds;
        if (r > 0) {
          times.push_back(seconds);
          all_converged = all_converged && converged;
        }
        if (total > cfg.cell_timeout_seconds) {
          censored = true;
          break;
        }
      }
      const std::string algo_name(to_string(algo));
      if (censored) {
        std::ostringstream label;
        label << "n=" << g.n << ",m=" << g.m << ",p=" << format_double(g.p) << "," << geometry << "/" << algo_name;
        out.censored.push_back(label.str());
        continue;
      }
      double mean = 0.0;
      for (double t : times) mean += t;
      mean /= static_cast<double>(times.size());
      double var = 0.0;
      for (double t : times) var += (t - mean) * (t - mean);
      const double sd = times.size() > 1 ? std::sqrt(var / static_cast<double>(times.size() - 1)) : 0.0;
      out.records.push_back(make_record(cfg, g, std::nullopt, std::nullopt, geometry, algo_name, "time_seconds", mean, all_converged));
      out.records.push_back(make_record(cfg, g, std::nullopt, std::nullopt, geometry, algo_name, "time_seconds_sd", sd, all_converged));
    }
  }
  return out;
}

UnitOutput multi_robustness_unit(const ExperimentConfig& cfg, const GridPoint& g, int trial) {
  const RngSeed unit = derive_seed(point_seed(cfg.seed, g), static_cast<std::uint64_t>(trial));
  Rng gen(derive_seed(unit, 0));
  const std::vector<SymMatrix> mats = generate_set(g, gen);
  const std::vector<SymMatrix> mats_ai = regularized(mats, cfg.ai_floor);
  const double scale = perturbation_scale(cfg, mats);
  SolverConfig solver;
  solver.epsilon = cfg.epsilon;

  struct Solver {
    const Geometry& geometry;
    Algorithm algorithm;
    bool ai_inputs;
  };
  const Solver solvers[3] = {{ai_geometry(), Algorithm::Inductive, true},
                             {bw_geometry(), Algorithm::Inductive, false},
                             {bw_geometry(), Algorithm::Projection, false}};

  std::optional<BarycenterResult> base[3];
  for (int s = 0; s < 3; ++s) {
    try {
      base[s] = barycenter(solvers[s].algorithm, solvers[s].geometry, solvers[s].ai_inputs ? mats_ai : mats, solver);
    } catch (const Error&) {
    }
  }

  UnitOutput out;
  for (int j = 0; j < cfg.perturbations; ++j) {
    Rng rng(derive_seed(unit, static_cast<std::uint64_t>(j) + 1));
    const PerturbedSet pert = perturb_set(cfg, mats, scale, rng);
    double df[3] = {kNaN, kNaN, kNaN};
    for (int s = 0; s < 3; ++s) {
      bool converged = false;
      if (base[s]) {
        df[s] = guarded([&] {
          const BarycenterResult r =
              barycenter(solvers[s].algorithm, solvers[s].geometry, solvers[s].ai_inputs ? pert.ai : pert.bw, solver);
          converged = r.converged && base[s]->converged;
          return frobenius_dist(base[s]->mean, r.mean);
        });
      }
      out.records.push_back(make_record(cfg, g, trial, j, std::string(solvers[s].geometry.name()),
                                        std::string(to_string(solvers[s].algorithm)), "dfrob", df[s], converged));
    }
    out.records.push_back(make_record(cfg, g, trial, j, "", "inductive", "dfrob_diff_ai_bw", df[0] - df[1]));
    out.records.push_back(make_record(cfg, g, trial, j, "bw", "", "dfrob_diff_ip", df[1] - df[2]));
  }
  return out;
}

template <class UnitFn>
ExperimentResult run_per_point(const ExperimentConfig& cfg, const std::vector<GridPoint>& points, int per_point,
                               UnitFn&& fn) {
  cfg.validate();
  const std::vector<UnitIndex> units = enumerate_units(points.size(), per_point);
  return collect(run_units(units.size(), resolve_threads(cfg), [&](std::size_t i) {
    return fn(cfg, points[units[i].point], units[i].index);
  }));
}

std::string metric_key(const TrialRecord& r) {
  if (r.geometry.empty() && r.algorithm.empty()) return r.metric;
  std::string key = r.metric + "[" + r.geometry;
  if (!r.algorithm.empty()) key += "/" + r.algorithm;
  return key + "]";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') fields.back().pop_back();
  return fields;
}

template <class T>
T parse_field(const std::string& s, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidArgument(std::string("malformed ") + what + " field '" + s + "' in records CSV");
  return value;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::DistRobustness:
      return "dist-robustness";
    case ExperimentKind::PairRobustness:
      return "pair-robustness";
    case ExperimentKind::Accuracy:
      return "accuracy";
    case ExperimentKind::Efficiency:
      return "efficiency";
    case ExperimentKind::MultiRobustness:
      return "multi-robustness";
  }
  return "unknown";
}

ExperimentKind experiment_from_string(std::string_view name) {
  for (ExperimentKind k : {ExperimentKind::DistRobustness, ExperimentKind::PairRobustness, ExperimentKind::Accuracy,
                           ExperimentKind::Efficiency, ExperimentKind::MultiRobustness})
    if (to_string(k) == name) return k;
  throw InvalidArgument("unknown experiment '" + std::string(name) + "'");
}

Profile profile_from_string(std::string_view name) {
  if (name == "desk") return Profile::Desk;
  if (name == "paper") return Profile::Paper;
  throw InvalidArgument("unknown profile '" + std::string(name) + "' (expected desk or paper)");
}

ExperimentConfig ExperimentConfig::preset(ExperimentKind kind, Profile profile) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  const bool paper = profile == Profile::Paper;
  cfg.n_values = paper ? std::vector<int>{5, 10, 20, 30, 50, 100} : std::vector<int>{5, 10, 20, 30};
  cfg.m_values = paper ? std::vector<int>{5, 10, 20, 30, 50, 100} : std::vector<int>{5, 10, 20, 30, 50};
  const bool robustness = kind == ExperimentKind::DistRobustness || kind == ExperimentKind::PairRobustness;
  cfg.p_values = robustness ? std::vector<double>{0.1, 0.2, 0.4, 0.6, 0.8} : std::vector<double>{0.2};
  cfg.cross_sweep = robustness;
  cfg.pairs = paper ? (kind == ExperimentKind::PairRobustness ? 200 : 100) : 30;
  cfg.perturbations = paper ? 100 : 30;
  cfg.trials = paper ? 100 : 20;
  cfg.repeats = paper ? 100 : 5;
  return cfg;
}

std::vector<GridPoint> ExperimentConfig::grid() const {
  std::vector<GridPoint> pts;
  const bool robustness = kind == ExperimentKind::DistRobustness || kind == ExperimentKind::PairRobustness;
  if (robustness) {
    auto add = [&](int n, double p) {
      for (const GridPoint& g : pts)
        if (g.n == n && g.p == p) return;
      pts.push_back({n, 2, p});
    };
    if (cross_sweep) {
      for (int n : n_values) add(n, reference_p);
      for (double p : p_values) add(reference_n, p);
    } else {
      for (int n : n_values)
        for (double p : p_values) add(n, p);
    }
    return pts;
  }
  for (int n : n_values)
    for (int m : m_values)
      for (double p : p_values) pts.push_back({n, m, p});
  return pts;
}

void ExperimentConfig::validate() const {
  if (n_values.empty()) throw InvalidArgument("experiment needs at least one n");
  if (p_values.empty()) throw InvalidArgument("experiment needs at least one p");
  const bool multi = kind == ExperimentKind::Accuracy || kind == ExperimentKind::Efficiency ||
                     kind == ExperimentKind::MultiRobustness;
  if (multi && m_values.empty()) throw InvalidArgument("experiment needs at least one m");
  for (int n : n_values)
    if (n < 1 || n > 256) throw InvalidArgument("n must lie in [1, 256]");
  if (multi)
    for (int m : m_values)
      if (m < 1) throw InvalidArgument("m must be at least 1");
  for (double p : p_values)
    if (!(p >= 0.0 && p < 1.0)) throw InvalidArgument("p must lie in [0, 1)");
  for (const GridPoint& g : grid()) SpectrumSpec{g.n, g.p}.validate();
  if (pairs < 1 || perturbations < 1 || trials < 1 || repeats < 1)
    throw InvalidArgument("pairs, perturbations, trials and repeats must be at least 1");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (!(perturbation_scale >= 0.0) || !std::isfinite(perturbation_scale))
    throw InvalidArgument("perturbation scale must be finite and non-negative");
  if (!(ai_floor > 0.0)) throw InvalidArgument("AI regularization floor must be positive");
  if (!(cell_timeout_seconds > 0.0)) throw InvalidArgument("cell timeout must be positive");
}

ExperimentResult run_dist_robustness(const ExperimentConfig& cfg) {
  return run_per_point(cfg, pair_grid(cfg), cfg.pairs, dist_robustness_unit);
}

ExperimentResult run_pair_robustness(const ExperimentConfig& cfg) {
  return run_per_point(cfg, pair_grid(cfg), cfg.pairs, pair_robustness_unit);
}

ExperimentResult run_accuracy(const ExperimentConfig& cfg) {
  return run_per_point(cfg, cfg.grid(), cfg.trials, accuracy_unit);
}

ExperimentResult run_efficiency(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<GridPoint> points = cfg.grid();
  // Single-threaded so timings are comparable across cells.
  return collect(run_units(points.size(), 1, [&](std::size_t i) { return efficiency_cell(cfg, points[i]); }));
}

ExperimentResult run_multi_robustness(const ExperimentConfig& cfg) {
  return run_per_point(cfg, cfg.grid(), cfg.trials, multi_robustness_unit);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::DistRobustness:
      return run_dist_robustness(cfg);
    case ExperimentKind::PairRobustness:
      return run_pair_robustness(cfg);
    case ExperimentKind::Accuracy:
      return run_accuracy(cfg);
    case ExperimentKind::Efficiency:
      return run_efficiency(cfg);
    case ExperimentKind::MultiRobustness:
      return run_multi_robustness(cfg);
  }
  throw InvalidArgument("unknown experiment kind");
}

void sort_records(std::vector<TrialRecord>& records) {
  auto key = [](const TrialRecord& r) {
    return std::make_tuple(std::cref(r.experiment), r.n, r.m, r.p, r.trial.value_or(-1), r.perturbation.value_or(-1),
                           std::cref(r.geometry), std::cref(r.algorithm), std::cref(r.metric));
  };
  std::stable_sort(records.begin(), records.end(),
                   [&](const TrialRecord& a, const TrialRecord& b) { return key(a) < key(b); });
}

double quantile(std::vector<double> sorted_values, double q) {
  if (sorted_values.empty()) throw InvalidArgument("quantile of an empty sample");
  const double h = q * static_cast<double>(sorted_values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted_values.size()) return sorted_values.back();
  return sorted_values[lo] + (h - static_cast<double>(lo)) * (sorted_values[lo + 1] - sorted_values[lo]);
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw InvalidArgument("nothing to summarize");
  using Key = std::tuple<std::string, std::string, int, int, double>;
  std::map<Key, std::vector<double>> groups;
  for (const TrialRecord& r : records) {
    auto& bucket = groups[Key{r.experiment, metric_key(r), r.n, r.m, r.p}];
    if (std::isfinite(r.value)) bucket.push_back(r.value);
  }
  std::vector<SummaryRow> rows;
  for (auto& [key, values] : groups) {
    if (values.empty()) continue;
    std::sort(values.begin(), values.end());
    SummaryRow row;
    std::tie(row.experiment, row.metric, row.n, row.m, row.p) = key;
    row.min = values.front();
    row.max = values.back();
    row.q1 = quantile(values, 0.25);
    row.median = quantile(values, 0.5);
    row.q3 = quantile(values, 0.75);
    double sum = 0.0;
    for (double v : values) sum += v;
    row.mean = sum / static_cast<double>(values.size());
    row.count = static_cast<int>(values.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string_view records_csv_header() { return "experiment,n,m,p,trial,perturbation,geometry,algorithm,metric,value,converged"; }

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << records_csv_header() << '\n';
  for (const TrialRecord& r : records) {
    out << r.experiment << ',' << r.n << ',' << r.m << ',' << format_double(r.p) << ',';
    if (r.trial) out << *r.trial;
    out << ',';
    if (r.perturbation) out << *r.perturbation;
    out << ',' << r.geometry << ',' << r.algorithm << ',' << r.metric << ',' << format_double(r.value) << ',';
    if (r.converged) out << (*r.converged ? "true" : "false");
    out << '\n';
  }
}

std::vector<TrialRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("records CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != records_csv_header()) throw InvalidArgument("records CSV has an unexpected header: " + line);
  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 11) throw InvalidArgument("records CSV row has " + std::to_string(f.size()) + " fields, expected 11");
    TrialRecord r;
    r.experiment = f[0];
    r.n = parse_field<int>(f[1], "n");
    r.m = parse_field<int>(f[2], "m");
    r.p = parse_field<double>(f[3], "p");
    if (!f[4].empty()) r.trial = parse_field<int>(f[4], "trial");
    if (!f[5].empty()) r.perturbation = parse_field<int>(f[5], "perturbation");
    r.geometry = f[6];
    r.algorithm = f[7];
    r.metric = f[8];
    r.value = parse_field<double>(f[9], "value");
    if (f[10] == "true") r.converged = true;
    else if (f[10] == "false") r.converged = false;
    else if (!f[10].empty()) throw InvalidArgument("malformed converged field '" + f[10] + "'");
    records.push_back(std::move(r));
  }
  return records;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "experiment,metric,n,m,p,min,q1,median,mean,q3,max,count\n";
  for (const SummaryRow& r : rows) {
    out << r.experiment << ',' << r.metric << ',' << r.n << ',' << r.m << ',' << format_double(r.p) << ','
        << format_double(r.min) << ',' << format_double(r.q1) << ',' << format_double(r.median) << ','
        << format_double(r.mean) << ',' << format_double(r.q3) << ',' << format_double(r.max) << ',' << r.count << '\n';
  }
}

std::string sidecar_json(const ExperimentConfig& cfg, const ExperimentResult& result) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  doc["experiment"] = std::string(to_string(cfg.kind));
  doc["seed"] = cfg.seed.value;
  doc["rng"] = std::string(Rng::kAlgorithm);
  nlohmann::ordered_json c;
  c["n_values"] = cfg.n_values;
  c["m_values"] = cfg.m_values;
  c["p_values"] = cfg.p_values;
  c["cross_sweep"] = cfg.cross_sweep;
  c["reference_n"] = cfg.reference_n;
  c["reference_p"] = cfg.reference_p;
  c["pairs"] = cfg.pairs;
  c["perturbations"] = cfg.perturbations;
  c["trials"] = cfg.trials;
  c["repeats"] = cfg.repeats;
  c["epsilon"] = cfg.epsilon;
  c["perturbation_scale"] = cfg.perturbation_scale;
  c["scale_from_min_eigenvalue"] = cfg.scale_from_min_eigenvalue;
  c["ai_floor"] = cfg.ai_floor;
  c["cell_timeout_seconds"] = cfg.cell_timeout_seconds;
  doc["config"] = c;
  doc["records"] = result.records.size();
  doc["censored_cells"] = result.censored;
  doc["skipped_rows"] = result.skipped;
  return doc.dump(2) + "\n";
}

}  // namespace psdbw
