#include "codedopt/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "codedopt/bounds.hpp"
#include "codedopt/errors.hpp"
#include "codedopt/rng.hpp"

namespace codedopt {

std::string_view to_string(StragglerMode mode) {
  switch (mode) {
    case StragglerMode::None: return "none";
    case StragglerMode::RowLevel: return "row";
    case StragglerMode::WorkerLevel: return "worker";
  }
  return "none";
}

std::optional<StragglerMode> parse_straggler_mode(std::string_view text) {
  if (text == "none") return StragglerMode::None;
  if (text == "row") return StragglerMode::RowLevel;
  if (text == "worker") return StragglerMode::WorkerLevel;
  return std::nullopt;
}

void StragglerModel::validate(Index m) const {
  if (s < 0 || s > m) {
    throw Error(Errc::InvalidStragglers,
                "straggler count s=" + std::to_string(s) + " must lie in [0, m=" + std::to_string(m) + "]");
  }
}

std::string_view to_string(StepMode mode) {
  switch (mode) {
    case StepMode::Fixed: return "fixed";
    case StepMode::Calibrated: return "calibrated";
    case StepMode::TheoremScaled: return "theorem";
  }
  return "fixed";
}

std::optional<StepMode> parse_step_mode(std::string_view text) {
  if (text == "fixed") return StepMode::Fixed;
  if (text == "calibrated") return StepMode::Calibrated;
  if (text == "theorem") return StepMode::TheoremScaled;
  return std::nullopt;
}

void StepRule::validate() const {
  if (!(mu_tilde > 0.0) || !std::isfinite(mu_tilde)) {
    throw Error(Errc::InvalidParameter, "step size mu_tilde must be positive");
  }
}

Index iterations_to_threshold(const Trace& trace, double threshold) {
  for (const auto& r : trace.records) {
    if (r.rel_error < threshold) return r.iter;
  }
  return trace.iterations() + 1;
}

std::vector<Index> sample_straggler_set(const StragglerModel& model, Index iter, Index m,
                                        const std::vector<RowBlock>& partitions) {
  model.validate(m);
  std::vector<Index> out;
  if (model.mode == StragglerMode::None || model.s == 0) return out;

  Rng rng(derive_seed(model.seed, "stragglers", {static_cast<std::uint64_t>(iter)}));
  if (model.mode == StragglerMode::RowLevel) {
    for (std::size_t row : rng.sample_without_replacement(static_cast<std::size_t>(m), static_cast<std::size_t>(model.s)))
      out.push_back(static_cast<Index>(row));
  } else {
    std::vector<std::size_t> order(partitions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng.engine());
    Index dropped = 0;
    for (std::size_t w : order) {
      const RowBlock& block = partitions[w];
      if (dropped + block.size > model.s) continue;
      dropped += block.size;
      for (Index r = block.begin; r < block.end(); ++r) out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Vector aggregate_gradient(const Matrix& M, const Vector& b, const std::vector<RowBlock>& partitions,
                          const std::vector<Index>& stragglers, const Vector& theta) {
  Vector grad = Vector::Zero(M.cols());
  Vector residual;
  auto next = stragglers.begin();
  for (const RowBlock& block : partitions) {
    residual.noalias() = M.middleRows(block.begin, block.size) * theta;
    residual -= b.segment(block.begin, block.size);
    for (; next != stragglers.end() && *next < block.end(); ++next) residual(*next - block.begin) = 0.0;
    grad.noalias() += M.middleRows(block.begin, block.size).transpose() * residual;
  }
  return grad;
}

namespace {

constexpr double kDivergenceLimit = 1e12;

using StragglerSource = std::function<std::vector<Index>(Index)>;
using StepSource = std::function<double(Index s_tau)>;

void check_error(double err, Index iter) {
  if (!std::isfinite(err) || err > kDivergenceLimit) {
    throw Error(Errc::Divergence, "relative error " + std::to_string(err) + " at iteration " +
                                      std::to_string(iter) + " exceeds the divergence guard");
  }
}

Trace run_engine(const Matrix& M, const Vector& b, const std::vector<RowBlock>& partitions,
                 const GroundTruth& truth, const RegularizerSpec& spec, const RunOptions& options,
                 const StragglerSource& stragglers, const StepSource& step) {
  if (options.iterations < 1) throw Error(Errc::InvalidParameter, "iterations must be at least 1");
  if (options.stride < 0) throw Error(Errc::InvalidParameter, "snapshot stride must be nonnegative");
  if (M.cols() != truth.dim()) {
    throw Error(Errc::InvalidShape, "data has " + std::to_string(M.cols()) + " columns but theta* has " +
                                        std::to_string(truth.dim()) + " entries");
  }
  spec.validate(truth.dim());

  Trace trace;
  trace.records.reserve(static_cast<std::size_t>(options.iterations + 1));
  Vector theta = Vector::Zero(M.cols());
  double err = relative_error(theta, truth);
  trace.records.push_back({0, err, 0, 0.0});
  if (err < options.threshold) trace.converged_at = 0;
  if (options.stride > 0) trace.snapshots.push_back({0, theta});

  const Index m = M.rows();
  for (Index iter = 0; iter < options.iterations; ++iter) {
    std::vector<Index> dropped = stragglers(iter);
    const Index s_tau = static_cast<Index>(dropped.size());
    if (s_tau >= m) {
      throw Error(Errc::DegenerateIteration,
                  "all " + std::to_string(m) + " rows straggled at iteration " + std::to_string(iter));
    }
    const double mu = step(s_tau);
    Vector grad = aggregate_gradient(M, b, partitions, dropped, theta);
    theta = project(spec, theta - mu * grad);

    err = relative_error(theta, truth);
    check_error(err, iter + 1);
    trace.records.push_back({iter + 1, err, s_tau, mu});
    if (!trace.converged_at && err < options.threshold) trace.converged_at = iter + 1;
    if (options.stride > 0 && (iter + 1) % options.stride == 0) trace.snapshots.push_back({iter + 1, theta});
  }
  if (trace.snapshots.empty() || trace.snapshots.back().iter != options.iterations) {
    trace.snapshots.push_back({options.iterations, theta});
  }
  trace.final_theta = std::move(theta);
  return trace;
}

}  // namespace

Trace run_uncoded_pgd(const Dataset& dataset, const GroundTruth& truth, const RegularizerSpec& spec,
                      const StepRule& rule, Index workers, const RunOptions& options) {
  rule.validate();
  auto partitions = partition_rows(dataset.rows(), workers);
  const double mu = rule.mu_tilde;
  return run_engine(
      dataset.X, dataset.y, partitions, truth, spec, options, [](Index) { return std::vector<Index>{}; },
      [mu](Index) { return mu; });
}

Trace run_encoded_pgd(const EncodedDataset& encoded, const GroundTruth& truth, const RegularizerSpec& spec,
                      const StepRule& rule, const StragglerModel& model, const RunOptions& options) {
  rule.validate();
  const Index m = encoded.AX.rows();
  if (m != encoded.encoder.m || encoded.Ay.size() != m) {
    throw Error(Errc::InvalidShape, "encoded blocks disagree with the encoder row count");
  }
  model.validate(m);

  StepSource step;
  switch (rule.mode) {
    case StepMode::Fixed: {
      const double mu = rule.mu_tilde;
      step = [mu](Index) { return mu; };
      break;
    }
    case StepMode::Calibrated: {
      const double mu = rule.mu_tilde / gram_scale(encoded.encoder);
      step = [mu](Index) { return mu; };
      break;
    }
    case StepMode::TheoremScaled: {
      const double mu_tilde = rule.mu_tilde;
      step = [mu_tilde, m](Index s_tau) {
        const double beta = beta_sm(s_tau, m);
        return mu_tilde / (beta * beta);
      };
      break;
    }
  }
  const auto& partitions = encoded.partitions;
  return run_engine(
      encoded.AX, encoded.Ay, partitions, truth, spec, options,
      [&](Index iter) { return sample_straggler_set(model, iter, m, partitions); }, step);
}

}  // namespace codedopt
