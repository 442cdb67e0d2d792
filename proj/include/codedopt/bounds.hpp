#pragma once

#include <cstdint>
#include <string_view>

#include "codedopt/linalg.hpp"

namespace codedopt {

/// s·ln(em/s), continuously extended with value 0 at s = 0.
double s_log_term(Index s, Index m);

/// β_{s,m} = min(√(3(m−s)·ln(em/(m−s))), √m). Requires 0 ≤ s < m.
double beta_sm(Index s, Index m);

struct AlphaValue {
  double value = 0.0;
  bool vacuous = false;  ///< radicand was negative and the value clamped to 0
};

/// α_{s,m} = √(m − 2 − 5·s·ln(em/s)), clamped at 0.
AlphaValue alpha_sm(Index s, Index m);

/// Everything the per-iteration encoded-PGD bound depends on.
struct BoundInputs {
  double kappa = 1.0;
  double rho = 0.0;
  double mu_tilde = 0.0;
  double sigma_R = 0.0;
  double m0 = 0.0;
  Index m = 1;
  Index s = 0;
  double xi = 0.0;
  double noise_norm = 0.0;
  double log_constant = 9.0;

  void validate() const;
};

struct StepBound {
  double contraction = 0.0;         ///< multiplies ‖θ_τ − θ*‖
  double neighborhood_coeff = 0.0;  ///< multiplies ‖w‖

  /// contraction·error + neighborhood_coeff·‖w‖
  double next_error_bound(double error, double noise_norm) const {
    return contraction * error + neighborhood_coeff * noise_norm;
  }
};

/// Per-iteration bound ‖θ_{τ+1} − θ*‖ ≤ contraction·‖θ_τ − θ*‖ + coeff·‖w‖ for
/// an iteration with s_tau straggling rows:
///   contraction = κρ + μ̃κσ²((2 + c·s_τ ln(em/s_τ))/m + 4√(m0/(m−s_τ)))
///   coeff       = κ(μ̃ξ + (μ̃/√2)·σ·√(m0/(m−s_τ)))
StepBound theorem1_step_bound(const BoundInputs& inputs, Index s_tau);

/// Smallest m keeping the rate increase below ε: s + ⌈260(m0 + s)/ε²⌉.
Index min_load_for_rate(double m0, Index s, double epsilon);

/// Finite direction set T with σ(T) = max‖v‖ and a Monte-Carlo estimate of
/// its Gaussian width.
struct VectorSet {
  SampleMatrix vectors;  ///< columns are the members
  double sigma_T = 0.0;
  double omega_T = 0.0;
  double omega_std_error = 0.0;

  static VectorSet from(SampleMatrix vectors, Index width_draws, std::uint64_t seed);
};

enum class LemmaDirection { Upper, Lower };
enum class SubsetSearch { Auto, Exhaustive, Sampled };

std::string_view to_string(LemmaDirection direction);
std::string_view to_string(SubsetSearch search);

struct ViolationReport {
  LemmaDirection direction = LemmaDirection::Upper;
  Index m = 0;
  Index s = 0;
  double eta = 0.0;
  Index trials = 0;
  Index violations = 0;
  double violation_rate = 0.0;
  double theoretical_failure = 0.0;  ///< 2e^{−η²/8σ²} upper, 4e^{−η²/8σ²} lower
  double coefficient = 0.0;          ///< β_{s,m} or α_{s,m}
  bool alpha_vacuous = false;
  double omega_T = 0.0;
  double sigma_T = 0.0;
  SubsetSearch search_used = SubsetSearch::Exhaustive;
  double subsets_per_draw = 0.0;
  /// Smallest slack (bound − observed for upper, observed − bound for lower)
  /// seen over all draws; negative means a violation.
  double worst_margin = 0.0;
};

/// Number of s-subsets of m rows, as a double.
double binomial(Index m, Index s);

/// Empirical check of the uniform-over-subsets norm bounds for Gaussian A:
///   upper: max_{|S|=s} ‖A_{Sᶜ}u‖ ≤ β‖u‖ + ω(T) + η
///   lower: min_{|S|=s} ‖A_{Sᶜ}u‖ ≥ α‖u‖ − ω(T) − η
/// A draw violates when any u ∈ T breaks the bound for any searched S.
/// Exhaustive search is used up to C(m,s) ≤ 1e5 (Auto); larger problems use
/// 1e4 random subsets plus the greedy extreme-energy subset per u. Requesting
/// Exhaustive above the limit throws SearchMode.
ViolationReport verify_lemma1(LemmaDirection direction, const VectorSet& set, Index m, Index s,
                              double eta, Index trials, std::uint64_t seed,
                              SubsetSearch search = SubsetSearch::Auto);

}  // namespace codedopt
