#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "codedopt/bounds.hpp"
#include "codedopt/errors.hpp"
#include "codedopt/rng.hpp"

using namespace codedopt;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

double beta_ref(Index s, Index m) {
  Big kept = m - s;
  Big first = sqrt(3 * kept * (1 + log(Big(m) / kept)));
  Big second = sqrt(Big(m));
  return static_cast<double>(first < second ? first : second);
}

double alpha_ref(Index s, Index m) {
  Big slog = s == 0 ? Big(0) : Big(s) * (1 + log(Big(m) / Big(s)));
  Big rad = Big(m) - 2 - 5 * slog;
  return rad < 0 ? 0.0 : static_cast<double>(sqrt(rad));
}

BoundInputs sample_inputs() {
  BoundInputs in;
  in.kappa = 1.0;
  in.rho = 0.3;
  in.mu_tilde = 0.2;
  in.sigma_R = 1.5;
  in.m0 = 12.0;
  in.m = 500;
  in.s = 100;
  in.xi = 0.4;
  in.noise_norm = 0.1;
  return in;
}

}  // namespace

TEST(Beta, Examples) {
  EXPECT_DOUBLE_EQ(beta_sm(0, 100), 10.0);
  EXPECT_DOUBLE_EQ(beta_sm(50, 100), 10.0);
  EXPECT_NEAR(beta_sm(99, 100), beta_ref(99, 100), 1e-12);
  EXPECT_NEAR(beta_sm(99, 100), 4.10, 5e-3);
}

TEST(Beta, RejectsSAtLeastM) {
  EXPECT_THROW(beta_sm(100, 100), Error);
  EXPECT_THROW(beta_sm(-1, 100), Error);
}

TEST(Alpha, Examples) {
  AlphaValue a = alpha_sm(0, 100);
  EXPECT_NEAR(a.value, std::sqrt(98.0), 1e-14);
  EXPECT_FALSE(a.vacuous);
  a = alpha_sm(5, 1000);
  EXPECT_NEAR(a.value, alpha_ref(5, 1000), 1e-12);
  EXPECT_NEAR(a.value, 28.99, 5e-3);
  a = alpha_sm(5, 100);
  EXPECT_EQ(a.value, 0.0);
  EXPECT_TRUE(a.vacuous);
}

TEST(AlphaBeta, MatchHighPrecisionOnGrid) {
  for (Index m : {Index{10}, Index{100}, Index{1000}}) {
    for (Index s = 0; s < m; ++s) {
      EXPECT_NEAR(beta_sm(s, m), beta_ref(s, m), 1e-10);
      EXPECT_NEAR(alpha_sm(s, m).value, alpha_ref(s, m), 1e-10);
    }
  }
}

TEST(AlphaBeta, OrderingProperties) {
  for (Index m : {Index{10}, Index{100}, Index{1000}}) {
    for (Index s = 0; s < m; ++s) {
      const double b = beta_sm(s, m);
      EXPECT_LE(b, std::sqrt(static_cast<double>(m)) + 1e-12);
      const AlphaValue a = alpha_sm(s, m);
      if (!a.vacuous) EXPECT_LE(a.value, b);
      if (s > 0) {
        EXPECT_LE(b, beta_sm(s - 1, m) + 1e-12);
        EXPECT_LE(a.value, alpha_sm(s - 1, m).value + 1e-12);
      }
    }
  }
}

TEST(StepBound, HandExample) {
  BoundInputs in;
  in.kappa = 1.0;
  in.rho = 0.5;
  in.mu_tilde = 1.0;
  in.sigma_R = 1.0;
  in.m0 = 10.0;
  in.m = 4000;
  in.s = 0;
  StepBound b = theorem1_step_bound(in, 0);
  EXPECT_NEAR(b.contraction, 0.7005, 1e-12);
}

TEST(StepBound, NoiseDoesNotEnterContraction) {
  BoundInputs in = sample_inputs();
  StepBound a = theorem1_step_bound(in, 10);
  in.noise_norm = 1000.0;
  StepBound b = theorem1_step_bound(in, 10);
  EXPECT_EQ(a.contraction, b.contraction);
  EXPECT_EQ(a.neighborhood_coeff, b.neighborhood_coeff);
  EXPECT_DOUBLE_EQ(b.next_error_bound(2.0, 3.0), 2.0 * b.contraction + 3.0 * b.neighborhood_coeff);
}

TEST(StepBound, HandFormulaWithStragglers) {
  BoundInputs in = sample_inputs();
  const Index s_tau = 40;
  const double slog = 40.0 * (1.0 + std::log(500.0 / 40.0));
  const double load = std::sqrt(12.0 / 460.0);
  const double contraction = 0.3 + 0.2 * 2.25 * ((2.0 + 9.0 * slog) / 500.0 + 4.0 * load);
  const double coeff = 0.2 * 0.4 + 0.2 / std::numbers::sqrt2 * 1.5 * load;
  StepBound b = theorem1_step_bound(in, s_tau);
  EXPECT_NEAR(b.contraction, contraction, 1e-12);
  EXPECT_NEAR(b.neighborhood_coeff, coeff, 1e-12);
  in.log_constant = 5.0;
  EXPECT_LT(theorem1_step_bound(in, s_tau).contraction, b.contraction);
  in.kappa = 2.0;
  EXPECT_GT(theorem1_step_bound(in, s_tau).neighborhood_coeff, coeff);
}

TEST(StepBound, MonotoneInStragglersAndLoad) {
  BoundInputs in = sample_inputs();
  in.s = 90;
  for (Index m : {Index{100}, Index{200}, Index{400}, Index{800}}) {
    in.m = m;
    double prev = -1.0;
    for (Index s_tau = 0; s_tau <= 90; s_tau += 10) {
      double c = theorem1_step_bound(in, s_tau).contraction;
      EXPECT_GT(c, prev);
      prev = c;
    }
  }
  for (Index s_tau : {Index{0}, Index{20}, Index{90}}) {
    double prev = 1e300;
    for (Index m = 100; m <= 1000; m += 100) {
      in.m = m;
      double c = theorem1_step_bound(in, s_tau).contraction;
      EXPECT_LT(c, prev);
      prev = c;
    }
  }
}

TEST(StepBound, LargeLoadLimit) {
  BoundInputs in = sample_inputs();
  in.m = 1'000'000'000;
  in.s = 0;
  StepBound b = theorem1_step_bound(in, 0);
  EXPECT_NEAR(b.contraction, in.kappa * in.rho, 1e-3);
  EXPECT_NEAR(b.neighborhood_coeff, in.kappa * in.mu_tilde * in.xi, 1e-3);
}

TEST(StepBound, Validation) {
  BoundInputs in = sample_inputs();
  EXPECT_THROW(theorem1_step_bound(in, in.s + 1), Error);
  in.s = in.m;
  EXPECT_THROW(theorem1_step_bound(in, 0), Error);
  in = sample_inputs();
  in.kappa = 1.5;
  EXPECT_THROW(theorem1_step_bound(in, 0), Error);
  in = sample_inputs();
  in.rho = -0.1;
  EXPECT_THROW(theorem1_step_bound(in, 0), Error);
}

TEST(MinLoad, Examples) {
  EXPECT_EQ(min_load_for_rate(10.0, 0, std::sqrt(260.0)), 10);
  EXPECT_EQ(min_load_for_rate(10.0, 5, 1.0), 3905);
  // m − s is linear in s.
  const Index a = min_load_for_rate(10.0, 10, 1.0) - 10;
  const Index b = min_load_for_rate(10.0, 20, 1.0) - 20;
  const Index c = min_load_for_rate(10.0, 30, 1.0) - 30;
  EXPECT_EQ(b - a, c - b);
  EXPECT_EQ(b - a, 2600);
  EXPECT_THROW(min_load_for_rate(1.0, 0, 0.0), Error);
}

TEST(Binomial, Values) {
  EXPECT_EQ(binomial(30, 2), 435.0);
  EXPECT_EQ(binomial(10, 0), 1.0);
  EXPECT_EQ(binomial(10, 10), 1.0);
  EXPECT_EQ(binomial(52, 5), 2598960.0);
  EXPECT_EQ(binomial(5, 6), 0.0);
}

TEST(VectorSet, SigmaAndWidth) {
  SampleMatrix V(3, 2);
  V << 1, 0, 0, 2, 0, 0;
  VectorSet set = VectorSet::from(V, 4000, 3);
  EXPECT_EQ(set.sigma_T, 2.0);
  // E max(g1, 2 g2) = sqrt(5 / (2π)).
  EXPECT_NEAR(set.omega_T, std::sqrt(5.0 / (2.0 * std::numbers::pi)), 4.0 * set.omega_std_error);
  EXPECT_THROW(VectorSet::from(SampleMatrix(3, 0), 10, 1), Error);
}

TEST(Lemma, SingleCoordinateUpperBound) {
  SampleMatrix e1 = SampleMatrix::Zero(5, 1);
  e1(0, 0) = 1.0;
  VectorSet set = VectorSet::from(e1, 2000, 4);
  ViolationReport r = verify_lemma1(LemmaDirection::Upper, set, 200, 0, 8.0, 500, 5);
  EXPECT_EQ(r.sigma_T, 1.0);
  EXPECT_NEAR(r.theoretical_failure, 2.0 * std::exp(-8.0), 1e-15);
  EXPECT_LE(r.violation_rate, 2.0 * std::exp(-1.0) + 0.05);
  EXPECT_EQ(r.search_used, SubsetSearch::Exhaustive);
  EXPECT_EQ(r.subsets_per_draw, 1.0);

  // Direct sampling: ‖a‖ for a ~ N(0, I_200) essentially never exceeds √200 + 8.
  Rng rng(6);
  int exceed = 0;
  for (int t = 0; t < 500; ++t) {
    double sq = 0.0;
    for (int i = 0; i < 200; ++i) sq += std::pow(rng.normal(), 2);
    exceed += std::sqrt(sq) > std::sqrt(200.0) + set.omega_T + 8.0;
  }
  EXPECT_NEAR(r.violation_rate, exceed / 500.0, 0.02);
}

TEST(Lemma, VacuousLowerBoundNeverViolated) {
  SampleMatrix V = SampleMatrix::Identity(6, 3);
  VectorSet set = VectorSet::from(V, 200, 1);
  ViolationReport r = verify_lemma1(LemmaDirection::Lower, set, 10, 3, 0.0, 200, 2);
  EXPECT_TRUE(r.alpha_vacuous);
  EXPECT_EQ(r.coefficient, 0.0);
  EXPECT_EQ(r.violations, 0);
  EXPECT_GE(r.worst_margin, 0.0);
}

TEST(Lemma, GreedyMatchesExhaustive) {
  Rng rng(12);
  SampleMatrix V(8, 6);
  for (Index j = 0; j < V.cols(); ++j)
    for (Index i = 0; i < V.rows(); ++i) V(i, j) = rng.normal();
  VectorSet set = VectorSet::from(V, 300, 2);
  for (auto dir : {LemmaDirection::Upper, LemmaDirection::Lower}) {
    ViolationReport ex = verify_lemma1(dir, set, 12, 3, 0.1, 40, 9, SubsetSearch::Exhaustive);
    ViolationReport sa = verify_lemma1(dir, set, 12, 3, 0.1, 40, 9, SubsetSearch::Sampled);
    EXPECT_EQ(ex.search_used, SubsetSearch::Exhaustive);
    EXPECT_EQ(sa.search_used, SubsetSearch::Sampled);
    EXPECT_EQ(ex.violations, sa.violations);
    EXPECT_NEAR(ex.worst_margin, sa.worst_margin, 1e-9);
  }
}

TEST(Lemma, ExhaustiveModeLimit) {
  SampleMatrix V = SampleMatrix::Identity(4, 2);
  VectorSet set = VectorSet::from(V, 10, 1);
  try {
    verify_lemma1(LemmaDirection::Upper, set, 100, 5, 1.0, 1, 1, SubsetSearch::Exhaustive);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SearchMode);
  }
  ViolationReport r = verify_lemma1(LemmaDirection::Upper, set, 100, 5, 1.0, 1, 1);
  EXPECT_EQ(r.search_used, SubsetSearch::Sampled);
  EXPECT_THROW(verify_lemma1(LemmaDirection::Upper, set, 5, 5, 1.0, 1, 1), Error);
}
