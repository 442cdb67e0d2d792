#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codedopt/encoding.hpp"
#include "codedopt/problem.hpp"
#include "codedopt/regularizers.hpp"
#include "codedopt/simulator.hpp"

namespace codedopt {

struct ProblemConfig {
  Index n = 300;
  Index d = 400;
  Index k = 5;
  double noise_std = 0.0;
  DesignScaling design = DesignScaling::Normalized;
};

struct EncoderConfig {
  EncoderKind kind = EncoderKind::Gaussian;
  Index m = 240;
};

struct RegularizerConfig {
  RegularizerKind kind = RegularizerKind::L1Ball;
  /// Ball radius; nullopt tunes it to R(θ*) of each generated instance.
  std::optional<double> radius;
  /// KSparse level; nullopt uses the true sparsity.
  std::optional<Index> k;
};

struct OptimizerConfig {
  StepRule step{StepMode::Calibrated, 0.2};
  Index iterations = 500;
  double threshold = 1e-3;
  /// Snapshot stride; nullopt means T (final iterate only).
  std::optional<Index> stride;
  Index workers = 1;
};

struct StragglerConfig {
  StragglerMode mode = StragglerMode::RowLevel;
  Index s = 0;
};

struct ExperimentSection {
  Index trials = 20;
  std::uint64_t seed = 0;
  std::vector<Index> m_values;
  std::vector<Index> s_values;
  double eta = 2.0;
  Index geometry_samples = 2000;
  Index width_draws = 200;
};

struct OutputConfig {
  std::string dir = ".";
};

struct ExperimentConfig {
  ProblemConfig problem;
  EncoderConfig encoder;
  RegularizerConfig regularizer;
  OptimizerConfig optimizer;
  StragglerConfig stragglers;
  ExperimentSection experiment;
  OutputConfig output;

  /// Field-level and cross-field checks; throws Config naming the keys.
  void validate() const;
  RunOptions run_options() const;
  RegularizerSpec regularizer_for(const GroundTruth& truth) const;
};

enum class SweepAxis { M, S };

std::string_view to_string(SweepAxis axis);
std::optional<SweepAxis> parse_sweep_axis(std::string_view text);

/// Checks the axis list against the fixed parameter (m > s everywhere).
void validate_sweep(const ExperimentConfig& config, SweepAxis axis);
/// Checks the phase grid lists; every s row needs some m > s.
void validate_grid(const ExperimentConfig& config);

/// The (θ*, X, y) shared by every trial of a convergence sweep.
struct SweepInstance {
  GroundTruth truth;
  Dataset data;
};

SweepInstance make_sweep_instance(const ExperimentConfig& config);

/// One sweep trial: fresh encoder and stragglers seeded by (m, s, trial).
Trace run_sweep_trial(const ExperimentConfig& config, const SweepInstance& instance, Index m, Index s,
                      Index trial);

struct SweepPoint {
  Index m = 0;
  Index s = 0;
  std::vector<Trace> traces;
  std::vector<double> median_error;  ///< per iteration, over trials
  std::vector<double> median_s_tau;
  std::vector<double> median_mu;
  std::vector<Index> iterations_to_threshold;  ///< per trial; T + 1 when never reached
  double median_iterations = 0.0;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::M;
  std::vector<SweepPoint> points;
};

SweepResult run_convergence_sweep(const ExperimentConfig& config, SweepAxis axis);

struct GridCell {
  Index m = 0;
  Index s = 0;
  Index trials = 0;
  Index successes = 0;
  double success_rate = 0.0;
  double median_iters = 0.0;
};

/// Cells ordered by s, then m. Cells with m ≤ s are not part of the grid.
struct GridResult {
  std::vector<GridCell> cells;
};

/// Fresh θ*, X, A and stragglers for every (m, s, trial). Success means the
/// final iterate is below the threshold; a diverging trial counts as a
/// failure.
GridResult run_phase_transition(const ExperimentConfig& config);

struct BoundaryPoint {
  Index s = 0;
  double m_star = 0.0;
};

struct BoundaryFit {
  double level = 0.5;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<BoundaryPoint> points;
};

/// Per s row, the interpolated m where success first reaches `level`, then a
/// least-squares line m* = slope·s + intercept. Throws BoundaryNotBracketed
/// listing every row that does not cross the level.
BoundaryFit fit_phase_boundary(const GridResult& grid, double level = 0.5);

struct SemilogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  Index points = 0;
};

/// Least-squares fit of log(error) against iteration over the prefix of the
/// curve that stays above `floor`.
SemilogFit fit_semilog_segment(const std::vector<double>& curve, double floor = 1e-12);

/// Median with the even-count midpoint convention.
double median(std::vector<double> values);

}  // namespace codedopt
