#include "codedopt/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "codedopt/errors.hpp"
#include "codedopt/rng.hpp"

namespace codedopt {

double s_log_term(Index s, Index m) {
  if (s == 0) return 0.0;
  const double sd = static_cast<double>(s);
  return sd * (1.0 + std::log(static_cast<double>(m) / sd));
}

double beta_sm(Index s, Index m) {
  if (s < 0 || s >= m) {
    throw Error(Errc::InvalidParameter,
                "beta_{s,m} needs 0 <= s < m (s=" + std::to_string(s) + ", m=" + std::to_string(m) + ")");
  }
  const double kept = static_cast<double>(m - s);
  const double first = std::sqrt(3.0 * kept * (1.0 + std::log(static_cast<double>(m) / kept)));
  return std::min(first, std::sqrt(static_cast<double>(m)));
}

AlphaValue alpha_sm(Index s, Index m) {
  if (s < 0 || s >= m) {
    throw Error(Errc::InvalidParameter,
                "alpha_{s,m} needs 0 <= s < m (s=" + std::to_string(s) + ", m=" + std::to_string(m) + ")");
  }
  double radicand = static_cast<double>(m) - 2.0 - 5.0 * s_log_term(s, m);
  if (radicand < 0.0) return {0.0, true};
  return {std::sqrt(radicand), false};
}

void BoundInputs::validate() const {
  if (!(m > s && s >= 0)) {
    throw Error(Errc::InvalidParameter,
                "bound inputs need m > s >= 0 (m=" + std::to_string(m) + ", s=" + std::to_string(s) + ")");
  }
  if (kappa != 1.0 && kappa != 2.0) throw Error(Errc::InvalidParameter, "kappa must be 1 or 2");
  if (rho < 0.0 || mu_tilde < 0.0 || sigma_R < 0.0 || m0 < 0.0 || xi < 0.0 || noise_norm < 0.0 ||
      log_constant < 0.0) {
    throw Error(Errc::InvalidParameter, "bound inputs must be nonnegative");
  }
}

StepBound theorem1_step_bound(const BoundInputs& in, Index s_tau) {
  in.validate();
  if (s_tau < 0 || s_tau > in.s || s_tau >= in.m) {
    throw Error(Errc::InvalidParameter, "s_tau=" + std::to_string(s_tau) + " must satisfy 0 <= s_tau <= s < m");
  }
  const double md = static_cast<double>(in.m);
  const double load_ratio = std::sqrt(in.m0 / static_cast<double>(in.m - s_tau));
  const double straggle = (2.0 + in.log_constant * s_log_term(s_tau, in.m)) / md;

  StepBound out;
  out.contraction = in.kappa * in.rho +
                    in.mu_tilde * in.kappa * in.sigma_R * in.sigma_R * (straggle + 4.0 * load_ratio);
  out.neighborhood_coeff =
      in.kappa * (in.mu_tilde * in.xi + in.mu_tilde / std::numbers::sqrt2 * in.sigma_R * load_ratio);
  return out;
}

Index min_load_for_rate(double m0, Index s, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(Errc::InvalidParameter, "epsilon must be positive");
  double required = 260.0 * (m0 + static_cast<double>(s)) / (epsilon * epsilon);
  // ε² is rarely exact in binary; absorb that rounding before taking the ceiling.
  double rounded = std::ceil(required - 1e-9 * std::max(1.0, required));
  return s + static_cast<Index>(rounded);
}

VectorSet VectorSet::from(SampleMatrix vectors, Index width_draws, std::uint64_t seed) {
  if (vectors.cols() == 0) throw Error(Errc::InvalidSampleSet, "vector set T is empty");
  VectorSet out;
  out.sigma_T = vectors.colwise().norm().maxCoeff();
  Rng rng(seed);
  const Index n = vectors.rows();
  double sum = 0.0;
  double sum_sq = 0.0;
  Vector g(n);
  for (Index t = 0; t < width_draws; ++t) {
    for (Index i = 0; i < n; ++i) g(i) = rng.normal();
    double sup = (vectors.transpose() * g).maxCoeff();
    sum += sup;
    sum_sq += sup * sup;
  }
  if (width_draws > 0) {
    double nd = static_cast<double>(width_draws);
    out.omega_T = sum / nd;
    double var = width_draws > 1 ? std::max(0.0, (sum_sq - nd * out.omega_T * out.omega_T) / (nd - 1.0)) : 0.0;
    out.omega_std_error = std::sqrt(var / nd);
  }
  out.vectors = std::move(vectors);
  return out;
}

std::string_view to_string(LemmaDirection direction) {
  return direction == LemmaDirection::Upper ? "upper" : "lower";
}

std::string_view to_string(SubsetSearch search) {
  switch (search) {
    case SubsetSearch::Auto: return "auto";
    case SubsetSearch::Exhaustive: return "exhaustive";
    case SubsetSearch::Sampled: return "sampled";
  }
  return "auto";
}

double binomial(Index m, Index s) {
  if (s < 0 || s > m) return 0.0;
  s = std::min(s, m - s);
  double out = 1.0;
  for (Index i = 1; i <= s; ++i) out = out * static_cast<double>(m - s + i) / static_cast<double>(i);
  return std::round(out);
}

namespace {

constexpr double kExhaustiveLimit = 1e5;
constexpr Index kSampledSubsets = 10000;

struct RemovedEnergy {
  double smallest = std::numeric_limits<double>::infinity();
  double largest = -std::numeric_limits<double>::infinity();

  void add(double e) {
    smallest = std::min(smallest, e);
    largest = std::max(largest, e);
  }
};

void enumerate_subsets(const std::vector<double>& energy, Index start, Index remaining, double partial,
                       RemovedEnergy& acc) {
  if (remaining == 0) {
    acc.add(partial);
    return;
  }
  const Index m = static_cast<Index>(energy.size());
  for (Index i = start; i <= m - remaining; ++i) {
    enumerate_subsets(energy, i + 1, remaining - 1, partial + energy[static_cast<std::size_t>(i)], acc);
  }
}

}  // namespace

ViolationReport verify_lemma1(LemmaDirection direction, const VectorSet& set, Index m, Index s, double eta,
                              Index trials, std::uint64_t seed, SubsetSearch search) {
  if (set.vectors.cols() == 0) throw Error(Errc::InvalidSampleSet, "vector set T is empty");
  if (s < 0 || s >= m) throw Error(Errc::InvalidParameter, "verify_lemma1 needs 0 <= s < m");
  if (trials < 1) throw Error(Errc::InvalidParameter, "verify_lemma1 needs at least one trial");

  const double subsets = binomial(m, s);
  SubsetSearch used = search;
  if (search == SubsetSearch::Auto) {
    used = subsets <= kExhaustiveLimit ? SubsetSearch::Exhaustive : SubsetSearch::Sampled;
  } else if (search == SubsetSearch::Exhaustive && subsets > kExhaustiveLimit) {
    throw Error(Errc::SearchMode, "C(" + std::to_string(m) + "," + std::to_string(s) +
                                      ") is too large for exhaustive subset search; use sampled mode");
  }

  ViolationReport report;
  report.direction = direction;
  report.m = m;
  report.s = s;
  report.eta = eta;
  report.trials = trials;
  report.omega_T = set.omega_T;
  report.sigma_T = set.sigma_T;
  report.search_used = used;
  report.subsets_per_draw =
      used == SubsetSearch::Exhaustive ? subsets : static_cast<double>(kSampledSubsets + 1);
  const double tail = std::exp(-eta * eta / (8.0 * set.sigma_T * set.sigma_T));
  if (direction == LemmaDirection::Upper) {
    report.coefficient = beta_sm(s, m);
    report.theoretical_failure = std::min(1.0, 2.0 * tail);
  } else {
    AlphaValue alpha = alpha_sm(s, m);
    report.coefficient = alpha.value;
    report.alpha_vacuous = alpha.vacuous;
    report.theoretical_failure = std::min(1.0, 4.0 * tail);
  }
  report.worst_margin = std::numeric_limits<double>::infinity();

  const Index n = set.vectors.rows();
  const Index count = set.vectors.cols();
  const Vector norms = set.vectors.colwise().norm().transpose();
  std::vector<double> energy(static_cast<std::size_t>(m));

  for (Index trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, "lemma-encoder", {static_cast<std::uint64_t>(trial)}));
    Eigen::MatrixXd A(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) A(i, j) = rng.normal();
    Eigen::MatrixXd projected = A * set.vectors;

    bool violated = false;
    for (Index col = 0; col < count; ++col) {
      double total = 0.0;
      for (Index i = 0; i < m; ++i) {
        double e = projected(i, col) * projected(i, col);
        energy[static_cast<std::size_t>(i)] = e;
        total += e;
      }
      RemovedEnergy removed;
      if (used == SubsetSearch::Exhaustive) {
        enumerate_subsets(energy, 0, s, 0.0, removed);
      } else {
        for (Index draw = 0; draw < kSampledSubsets; ++draw) {
          double e = 0.0;
          for (std::size_t idx : rng.sample_without_replacement(static_cast<std::size_t>(m), static_cast<std::size_t>(s)))
            e += energy[idx];
          removed.add(e);
        }
        // Greedy extremes: drop the s weakest rows (worst case for the upper
        // bound) or the s strongest rows (worst case for the lower bound).
        std::vector<double> sorted = energy;
        std::sort(sorted.begin(), sorted.end());
        double low = 0.0;
        double high = 0.0;
        for (Index i = 0; i < s; ++i) {
          low += sorted[static_cast<std::size_t>(i)];
          high += sorted[static_cast<std::size_t>(m - 1 - i)];
        }
        removed.add(low);
        removed.add(high);
      }

      double margin = 0.0;
      if (direction == LemmaDirection::Upper) {
        double observed = std::sqrt(std::max(0.0, total - removed.smallest));
        margin = report.coefficient * norms(col) + set.omega_T + eta - observed;
      } else {
        double observed = std::sqrt(std::max(0.0, total - removed.largest));
        margin = observed - (report.coefficient * norms(col) - set.omega_T - eta);
      }
      report.worst_margin = std::min(report.worst_margin, margin);
      if (margin < 0.0) violated = true;
    }
    if (violated) ++report.violations;
  }
  report.violation_rate = static_cast<double>(report.violations) / static_cast<double>(trials);
  return report;
}

}  // namespace codedopt
