#include "codedopt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "codedopt/errors.hpp"
#include "codedopt/parallel.hpp"
#include "codedopt/rng.hpp"

namespace codedopt {

namespace {

[[noreturn]] void config_error(const std::string& message) { throw Error(Errc::Config, message); }

std::string str(Index v) { return std::to_string(v); }

void check_load(const ExperimentConfig& c, Index m, const std::string& key) {
  if (m < 1) config_error(key + "=" + str(m) + " must be at least 1");
  if (c.optimizer.workers > m) {
    config_error("optimizer.workers=" + str(c.optimizer.workers) + " exceeds " + key + "=" + str(m));
  }
  if (c.encoder.kind == EncoderKind::RandomizedDCT && m > c.problem.n) {
    config_error(key + "=" + str(m) + " exceeds problem.n=" + str(c.problem.n) + " for the dct encoder");
  }
  if (c.encoder.kind == EncoderKind::Identity && m != c.problem.n) {
    config_error(key + "=" + str(m) + " must equal problem.n=" + str(c.problem.n) + " for the identity encoder");
  }
}

std::uint64_t u64(Index v) { return static_cast<std::uint64_t>(v); }

}  // namespace

void ExperimentConfig::validate() const {
  if (problem.n < 1) config_error("problem.n must be positive");
  if (problem.d < 1) config_error("problem.d must be positive");
  if (problem.k < 1 || problem.k > problem.d) {
    config_error("problem.k=" + str(problem.k) + " must lie in [1, problem.d=" + str(problem.d) + "]");
  }
  if (!(problem.noise_std >= 0.0)) config_error("problem.noise_std must be nonnegative");
  if (stragglers.s < 0) config_error("stragglers.s must be nonnegative");
  if (encoder.m <= stragglers.s) {
    config_error("encoder.m=" + str(encoder.m) + " must exceed stragglers.s=" + str(stragglers.s));
  }
  if (optimizer.workers < 1) config_error("optimizer.workers must be at least 1");
  check_load(*this, encoder.m, "encoder.m");
  if (regularizer.radius && !(*regularizer.radius >= 0.0)) config_error("regularizer.radius must be nonnegative");
  if (regularizer.k && (*regularizer.k < 1 || *regularizer.k > problem.d)) {
    config_error("regularizer.k=" + str(*regularizer.k) + " must lie in [1, problem.d=" + str(problem.d) + "]");
  }
  if (!(optimizer.step.mu_tilde > 0.0)) config_error("optimizer.mu_tilde must be positive");
  if (optimizer.iterations < 1) config_error("optimizer.iterations must be at least 1");
  if (!(optimizer.threshold > 0.0)) config_error("optimizer.threshold must be positive");
  if (optimizer.stride && *optimizer.stride < 1) config_error("optimizer.stride must be at least 1");
  if (experiment.trials < 1) config_error("experiment.trials must be at least 1");
  if (!(experiment.eta >= 0.0)) config_error("experiment.eta must be nonnegative");
  if (experiment.geometry_samples < 1) config_error("experiment.geometry_samples must be at least 1");
  if (experiment.width_draws < 1) config_error("experiment.width_draws must be at least 1");
}

RunOptions ExperimentConfig::run_options() const {
  RunOptions options;
  options.iterations = optimizer.iterations;
  options.threshold = optimizer.threshold;
  const Index stride = optimizer.stride.value_or(optimizer.iterations);
  options.stride = stride >= optimizer.iterations ? 0 : stride;
  return options;
}

RegularizerSpec ExperimentConfig::regularizer_for(const GroundTruth& truth) const {
  if (regularizer.kind == RegularizerKind::KSparse) {
    return RegularizerSpec::ksparse(regularizer.k.value_or(truth.sparsity_k));
  }
  if (regularizer.radius) return {regularizer.kind, *regularizer.radius, 1};
  return radius_from_truth(regularizer.kind, truth);
}

std::string_view to_string(SweepAxis axis) { return axis == SweepAxis::M ? "m" : "s"; }

std::optional<SweepAxis> parse_sweep_axis(std::string_view text) {
  if (text == "m") return SweepAxis::M;
  if (text == "s") return SweepAxis::S;
  return std::nullopt;
}

void validate_sweep(const ExperimentConfig& config, SweepAxis axis) {
  config.validate();
  if (axis == SweepAxis::M) {
    if (config.experiment.m_values.empty()) config_error("experiment.m_values is empty for an m sweep");
    for (Index m : config.experiment.m_values) {
      if (m <= config.stragglers.s) {
        config_error("experiment.m_values entry " + str(m) + " must exceed stragglers.s=" + str(config.stragglers.s));
      }
      check_load(config, m, "experiment.m_values entry");
    }
  } else {
    if (config.experiment.s_values.empty()) config_error("experiment.s_values is empty for an s sweep");
    for (Index s : config.experiment.s_values) {
      if (s < 0 || s >= config.encoder.m) {
        config_error("experiment.s_values entry " + str(s) + " must lie in [0, encoder.m=" + str(config.encoder.m) + ")");
      }
    }
  }
}

void validate_grid(const ExperimentConfig& config) {
  config.validate();
  if (config.experiment.m_values.empty()) config_error("experiment.m_values is empty for a phase grid");
  if (config.experiment.s_values.empty()) config_error("experiment.s_values is empty for a phase grid");
  for (Index m : config.experiment.m_values) check_load(config, m, "experiment.m_values entry");
  const Index largest_m = *std::max_element(config.experiment.m_values.begin(), config.experiment.m_values.end());
  for (Index s : config.experiment.s_values) {
    if (s < 0) config_error("experiment.s_values entries must be nonnegative");
    if (s >= largest_m) {
      config_error("experiment.s_values entry " + str(s) + " has no experiment.m_values entry above it");
    }
  }
}

SweepInstance make_sweep_instance(const ExperimentConfig& config) {
  const auto& p = config.problem;
  const std::uint64_t seed = config.experiment.seed;
  SweepInstance instance;
  instance.truth = gen_sparse_signal(p.d, p.k, derive_seed(seed, "truth"));
  instance.data = gen_dataset(instance.truth, p.n, p.noise_std, derive_seed(seed, "data"), p.design);
  return instance;
}

Trace run_sweep_trial(const ExperimentConfig& config, const SweepInstance& instance, Index m, Index s,
                      Index trial) {
  const std::uint64_t seed = config.experiment.seed;
  EncoderSpec encoder{config.encoder.kind, m, config.problem.n,
                      derive_seed(seed, "encoder", {u64(m), u64(s), u64(trial)})};
  EncodedDataset encoded = make_encoded(instance.data, encoder, config.optimizer.workers);
  StragglerModel model{config.stragglers.mode, s, derive_seed(seed, "stragglers", {u64(m), u64(s), u64(trial)})};
  return run_encoded_pgd(encoded, instance.truth, config.regularizer_for(instance.truth), config.optimizer.step,
                         model, config.run_options());
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

SweepResult run_convergence_sweep(const ExperimentConfig& config, SweepAxis axis) {
  validate_sweep(config, axis);
  const SweepInstance instance = make_sweep_instance(config);
  const auto& values = axis == SweepAxis::M ? config.experiment.m_values : config.experiment.s_values;
  const Index trials = config.experiment.trials;

  SweepResult result;
  result.axis = axis;
  for (Index v : values) {
    SweepPoint point;
    point.m = axis == SweepAxis::M ? v : config.encoder.m;
    point.s = axis == SweepAxis::S ? v : config.stragglers.s;
    point.traces.resize(static_cast<std::size_t>(trials));
    result.points.push_back(std::move(point));
  }

  const std::size_t jobs = result.points.size() * static_cast<std::size_t>(trials);
  parallel_for(jobs, [&](std::size_t job) {
    SweepPoint& point = result.points[job / static_cast<std::size_t>(trials)];
    const Index trial = static_cast<Index>(job % static_cast<std::size_t>(trials));
    point.traces[static_cast<std::size_t>(trial)] = run_sweep_trial(config, instance, point.m, point.s, trial);
  });

  const double threshold = config.optimizer.threshold;
  for (SweepPoint& point : result.points) {
    const std::size_t length = point.traces.front().records.size();
    std::vector<double> column(point.traces.size());
    for (std::size_t it = 0; it < length; ++it) {
      for (std::size_t t = 0; t < point.traces.size(); ++t) column[t] = point.traces[t].records[it].rel_error;
      point.median_error.push_back(median(column));
      for (std::size_t t = 0; t < point.traces.size(); ++t)
        column[t] = static_cast<double>(point.traces[t].records[it].s_tau);
      point.median_s_tau.push_back(median(column));
      for (std::size_t t = 0; t < point.traces.size(); ++t) column[t] = point.traces[t].records[it].mu_used;
      point.median_mu.push_back(median(column));
    }
    std::vector<double> iters;
    for (const Trace& trace : point.traces) {
      point.iterations_to_threshold.push_back(iterations_to_threshold(trace, threshold));
      iters.push_back(static_cast<double>(point.iterations_to_threshold.back()));
    }
    point.median_iterations = median(iters);
  }
  return result;
}

GridResult run_phase_transition(const ExperimentConfig& config) {
  validate_grid(config);
  std::vector<Index> ms = config.experiment.m_values;
  std::vector<Index> ss = config.experiment.s_values;
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  std::sort(ss.begin(), ss.end());
  ss.erase(std::unique(ss.begin(), ss.end()), ss.end());

  GridResult grid;
  for (Index s : ss)
    for (Index m : ms)
      if (m > s) grid.cells.push_back({m, s, config.experiment.trials, 0, 0.0, 0.0});

  const Index trials = config.experiment.trials;
  const std::size_t jobs = grid.cells.size() * static_cast<std::size_t>(trials);
  std::vector<char> success(jobs, 0);
  std::vector<double> iters(jobs, 0.0);
  const auto& p = config.problem;
  const std::uint64_t seed = config.experiment.seed;
  const RunOptions options = config.run_options();

  parallel_for(jobs, [&](std::size_t job) {
    const GridCell& cell = grid.cells[job / static_cast<std::size_t>(trials)];
    const std::uint64_t t = job % static_cast<std::size_t>(trials);
    const std::initializer_list<std::uint64_t> key{u64(cell.m), u64(cell.s), t};
    GroundTruth truth = gen_sparse_signal(p.d, p.k, derive_seed(seed, "phase-truth", key));
    Dataset data = gen_dataset(truth, p.n, p.noise_std, derive_seed(seed, "phase-data", key), p.design);
    EncoderSpec encoder{config.encoder.kind, cell.m, p.n, derive_seed(seed, "phase-encoder", key)};
    EncodedDataset encoded = make_encoded(data, encoder, config.optimizer.workers);
    StragglerModel model{config.stragglers.mode, cell.s, derive_seed(seed, "phase-stragglers", key)};
    try {
      Trace trace = run_encoded_pgd(encoded, truth, config.regularizer_for(truth), config.optimizer.step, model, options);
      success[job] = trace.final_error() < options.threshold ? 1 : 0;
      iters[job] = static_cast<double>(iterations_to_threshold(trace, options.threshold));
    } catch (const Error& e) {
      if (e.code() != Errc::Divergence) throw;
      iters[job] = static_cast<double>(options.iterations + 1);
    }
  });

  for (std::size_t c = 0; c < grid.cells.size(); ++c) {
    GridCell& cell = grid.cells[c];
    std::vector<double> cell_iters;
    for (Index t = 0; t < trials; ++t) {
      const std::size_t job = c * static_cast<std::size_t>(trials) + static_cast<std::size_t>(t);
      cell.successes += success[job];
      cell_iters.push_back(iters[job]);
    }
    cell.success_rate = static_cast<double>(cell.successes) / static_cast<double>(cell.trials);
    cell.median_iters = median(cell_iters);
  }
  return grid;
}

BoundaryFit fit_phase_boundary(const GridResult& grid, double level) {
  std::map<Index, std::vector<const GridCell*>> rows;
  for (const GridCell& cell : grid.cells) rows[cell.s].push_back(&cell);

  BoundaryFit fit;
  fit.level = level;
  std::string unbracketed;
  for (auto& [s, cells] : rows) {
    std::sort(cells.begin(), cells.end(), [](const GridCell* a, const GridCell* b) { return a->m < b->m; });
    std::size_t first = cells.size();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i]->success_rate >= level) {
        first = i;
        break;
      }
    }
    if (first == 0 || first == cells.size()) {
      unbracketed += (unbracketed.empty() ? "s=" : ", s=") + str(s);
      continue;
    }
    const GridCell& lo = *cells[first - 1];
    const GridCell& hi = *cells[first];
    const double frac = (level - lo.success_rate) / (hi.success_rate - lo.success_rate);
    fit.points.push_back({s, static_cast<double>(lo.m) + frac * static_cast<double>(hi.m - lo.m)});
  }
  if (!unbracketed.empty()) {
    throw Error(Errc::BoundaryNotBracketed, "success rate never crosses " + std::to_string(level) + " in rows " + unbracketed);
  }
  if (fit.points.size() < 2) {
    throw Error(Errc::BoundaryNotBracketed, "a boundary fit needs at least two s rows");
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double count = static_cast<double>(fit.points.size());
  for (const auto& p : fit.points) {
    const double x = static_cast<double>(p.s);
    sx += x;
    sy += p.m_star;
    sxx += x * x;
    sxy += x * p.m_star;
  }
  const double denom = count * sxx - sx * sx;
  fit.slope = (count * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / count;
  const double mean = sy / count;
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& p : fit.points) {
    const double pred = fit.slope * static_cast<double>(p.s) + fit.intercept;
    ss_res += (p.m_star - pred) * (p.m_star - pred);
    ss_tot += (p.m_star - mean) * (p.m_star - mean);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  return fit;
}

SemilogFit fit_semilog_segment(const std::vector<double>& curve, double floor) {
  std::vector<double> ys;
  for (double v : curve) {
    if (!(v > floor)) break;
    ys.push_back(std::log(v));
  }
  SemilogFit fit;
  fit.points = static_cast<Index>(ys.size());
  if (ys.size() < 2) return fit;

  const double count = static_cast<double>(ys.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double x = static_cast<double>(i);
    sx += x;
    sy += ys[i];
    sxx += x * x;
    sxy += x * ys[i];
  }
  fit.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / count;
  const double mean = sy / count;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double pred = fit.slope * static_cast<double>(i) + fit.intercept;
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace codedopt
