#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "codedopt/errors.hpp"
#include "codedopt/experiments.hpp"
#include "codedopt/rng.hpp"

using namespace codedopt;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.problem = {60, 80, 3, 0.0, DesignScaling::Normalized};
  c.encoder = {EncoderKind::Gaussian, 50};
  c.optimizer.iterations = 200;
  c.experiment.trials = 6;
  c.experiment.seed = 17;
  return c;
}

std::string config_message(const ExperimentConfig& c) {
  try {
    c.validate();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Config);
    return e.what();
  }
  return "";
}

GridResult ramp_grid(const std::vector<Index>& ss, double (*boundary)(Index)) {
  GridResult grid;
  for (Index s : ss) {
    for (Index m = 10; m <= 200; m += 10) {
      if (m <= s) continue;
      double rate = std::clamp(0.5 + (static_cast<double>(m) - boundary(s)) / 40.0, 0.0, 1.0);
      grid.cells.push_back({m, s, 20, static_cast<Index>(std::lround(rate * 20)), rate, 0.0});
    }
  }
  return grid;
}

}  // namespace

TEST(Config, DefaultsMatchProtocol) {
  ExperimentConfig c;
  EXPECT_EQ(c.optimizer.iterations, 500);
  EXPECT_EQ(c.optimizer.threshold, 1e-3);
  EXPECT_EQ(c.experiment.trials, 20);
  EXPECT_EQ(c.experiment.eta, 2.0);
  EXPECT_EQ(c.run_options().stride, 0);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, CrossFieldMessagesNameKeys) {
  ExperimentConfig c = small_config();
  c.stragglers.s = 50;
  std::string msg = config_message(c);
  EXPECT_NE(msg.find("encoder.m"), std::string::npos);
  EXPECT_NE(msg.find("stragglers.s"), std::string::npos);

  c = small_config();
  c.optimizer.workers = 51;
  msg = config_message(c);
  EXPECT_NE(msg.find("optimizer.workers"), std::string::npos);

  c = small_config();
  c.problem.k = 81;
  EXPECT_NE(config_message(c).find("problem.k"), std::string::npos);

  c = small_config();
  c.encoder = {EncoderKind::RandomizedDCT, 61};
  EXPECT_NE(config_message(c).find("problem.n"), std::string::npos);

  c = small_config();
  c.encoder = {EncoderKind::Identity, 59};
  EXPECT_NE(config_message(c).find("identity"), std::string::npos);
}

TEST(Config, SweepAndGridValidation) {
  ExperimentConfig c = small_config();
  c.stragglers.s = 20;
  c.experiment.m_values = {30, 20};
  EXPECT_THROW(validate_sweep(c, SweepAxis::M), Error);
  c.experiment.s_values = {10, 50};
  EXPECT_THROW(validate_sweep(c, SweepAxis::S), Error);
  c.experiment.m_values = {20, 40};
  c.experiment.s_values = {0, 40};
  EXPECT_THROW(validate_grid(c), Error);
  c.experiment.s_values = {0, 30};
  EXPECT_NO_THROW(validate_grid(c));
}

TEST(Sweep, SinglePointMatchesDirectRuns) {
  ExperimentConfig c = small_config();
  c.stragglers.s = 5;
  c.experiment.m_values = {40};
  SweepResult r = run_convergence_sweep(c, SweepAxis::M);
  ASSERT_EQ(r.points.size(), 1u);
  const SweepPoint& p = r.points[0];

  GroundTruth truth = gen_sparse_signal(80, 3, derive_seed(17, "truth"));
  Dataset data = gen_dataset(truth, 60, 0.0, derive_seed(17, "data"), DesignScaling::Normalized);
  std::vector<std::vector<double>> curves;
  for (std::uint64_t t = 0; t < 6; ++t) {
    EncodedDataset enc = make_encoded(data, {EncoderKind::Gaussian, 40, 60, derive_seed(17, "encoder", {40, 5, t})}, 1);
    Trace trace = run_encoded_pgd(enc, truth, radius_from_truth(RegularizerKind::L1Ball, truth),
                                  {StepMode::Calibrated, 0.2}, {StragglerMode::RowLevel, 5, derive_seed(17, "stragglers", {40, 5, t})},
                                  {200, 0, 1e-3});
    EXPECT_EQ(trace.final_theta, p.traces[t].final_theta);
    std::vector<double> curve;
    for (const auto& rec : trace.records) curve.push_back(rec.rel_error);
    curves.push_back(curve);
  }
  for (std::size_t it = 0; it < p.median_error.size(); ++it) {
    std::vector<double> col;
    for (const auto& curve : curves) col.push_back(curve[it]);
    std::sort(col.begin(), col.end());
    EXPECT_EQ(p.median_error[it], 0.5 * (col[2] + col[3]));
  }
}

TEST(Sweep, LargerLoadConvergesFaster) {
  ExperimentConfig c = small_config();
  c.stragglers.s = 5;
  c.experiment.m_values = {25, 60, 120};
  SweepResult r = run_convergence_sweep(c, SweepAxis::M);
  ASSERT_EQ(r.points.size(), 3u);
  EXPECT_GE(r.points[0].median_iterations, r.points[1].median_iterations);
  EXPECT_GE(r.points[1].median_iterations, r.points[2].median_iterations);
  EXPECT_GT(r.points[0].median_error.back(), r.points[2].median_error.back());
}

TEST(Phase, ExtremesAndMonotonicity) {
  ExperimentConfig c = small_config();
  c.experiment.trials = 8;
  c.experiment.m_values = {1, 6, 20, 40, 80, 240};
  c.experiment.s_values = {0, 5};
  GridResult g = run_phase_transition(c);
  for (const GridCell& cell : g.cells) {
    EXPECT_GT(cell.m, cell.s);
    EXPECT_EQ(cell.success_rate, static_cast<double>(cell.successes) / cell.trials);
    if (cell.s == 0 && cell.m == 240) EXPECT_EQ(cell.success_rate, 1.0);
    if (cell.m == cell.s + 1) EXPECT_LE(cell.success_rate, 0.125);
  }
  for (std::size_t i = 1; i < g.cells.size(); ++i) {
    if (g.cells[i].s == g.cells[i - 1].s) {
      EXPECT_GE(g.cells[i].success_rate + 2.0 / 8.0, g.cells[i - 1].success_rate);
    }
  }
}

TEST(Phase, ReproducibleAndThreadIndependent) {
  ExperimentConfig c = small_config();
  c.optimizer.iterations = 60;
  c.experiment.trials = 4;
  c.experiment.m_values = {20, 40};
  c.experiment.s_values = {0, 10};
  GridResult a = run_phase_transition(c);
  setenv("CODEDOPT_THREADS", "3", 1);
  GridResult b = run_phase_transition(c);
  unsetenv("CODEDOPT_THREADS");
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].successes, b.cells[i].successes);
    EXPECT_EQ(a.cells[i].median_iters, b.cells[i].median_iters);
  }
}

TEST(Boundary, ExactLinearInput) {
  GridResult g = ramp_grid({0, 3, 11, 20, 37}, [](Index s) { return 2.0 * s + 40.0; });
  BoundaryFit fit = fit_phase_boundary(g, 0.5);
  EXPECT_NEAR(fit.slope, 2.0, 1e-12);
  EXPECT_NEAR(fit.intercept, 40.0, 1e-10);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  ASSERT_EQ(fit.points.size(), 5u);
  EXPECT_NEAR(fit.points[1].m_star, 46.0, 1e-12);
}

TEST(Boundary, UnbracketedRowsAreListed) {
  GridResult g = ramp_grid({0, 10}, [](Index s) { return 2.0 * s + 40.0; });
  for (Index s : {Index{20}, Index{30}}) {
    for (Index m = 40; m <= 100; m += 10) g.cells.push_back({m, s, 10, 10, 1.0, 0.0});
  }
  try {
    fit_phase_boundary(g, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BoundaryNotBracketed);
    EXPECT_NE(std::string(e.what()).find("s=20, s=30"), std::string::npos);
  }
}

TEST(Semilog, ExactGeometricCurve) {
  std::vector<double> curve;
  for (int i = 0; i < 400; ++i) curve.push_back(std::pow(0.9, i));
  SemilogFit fit = fit_semilog_segment(curve, 1e-12);
  EXPECT_NEAR(fit.slope, std::log(0.9), 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_EQ(fit.points, static_cast<Index>(std::floor(std::log(1e-12) / std::log(0.9))) + 1);
}

TEST(Median, EvenAndOdd) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
  EXPECT_EQ(median({7}), 7.0);
}
