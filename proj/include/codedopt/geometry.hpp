#pragma once

#include <cstdint>
#include <optional>

#include "codedopt/linalg.hpp"
#include "codedopt/problem.hpp"
#include "codedopt/regularizers.hpp"

namespace codedopt {

struct WidthEstimate {
  double omega = 0.0;
  double std_error = 0.0;
  Index draws = 0;
  Index samples = 0;
};

/// Monte-Carlo E[max_z ⟨g, z⟩] over the columns z of `unit_samples` (unit
/// vectors). A lower bound on the width of any set containing the samples.
WidthEstimate estimate_gaussian_width(const SampleMatrix& unit_samples, Index draws, std::uint64_t seed);

/// Columns Xu/‖Xu‖. Directions with Xu = 0 are dropped and counted in
/// `dropped`.
SampleMatrix map_through(const Matrix& X, const SampleMatrix& directions, Index* dropped = nullptr);

/// (ω + η)². Throws InvalidParameter on negative input.
double minimal_computational_load(double omega, double eta);

/// Optional local ascent inside the cone, started from the best samples and
/// from projected random points. Every evaluated point is a verified cone
/// member, so refined values remain lower bounds. Needs a cone with a
/// projection; ignored otherwise.
struct ConeRefinement {
  const DescentCone* cone = nullptr;
  Index iterations = 300;
  Index starts = 4;
  std::uint64_t seed = 0;
};

struct SpectralEstimate {
  double value = 0.0;        ///< certified lower bound on the cone supremum
  double upper_bound = 0.0;  ///< unconstrained counterpart
  Index samples = 0;
};

/// max ‖Xu‖ over unit cone samples u. Upper bound: ‖X‖₂.
SpectralEstimate cone_restricted_spectral_norm(const Matrix& X, const SampleMatrix& unit_samples,
                                               const ConeRefinement& refine = {});

/// max uᵀ(I − μ̃XᵀX)v over pairs of unit cone samples. Upper bound:
/// max(1, |1 − μ̃‖X‖²|) ≥ ‖I − μ̃XᵀX‖₂.
SpectralEstimate convergence_rate_rho(const Matrix& X, double mu_tilde, const SampleMatrix& unit_samples,
                                      const ConeRefinement& refine = {});

/// max vᵀXᵀw/‖w‖ over unit samples v of −C (pass already negated samples).
/// Upper bound: ‖Xᵀw‖/‖w‖. Throws InvalidParameter when w = 0.
SpectralEstimate noise_amplification_xi(const Matrix& X, const Vector& w, const SampleMatrix& negated_samples,
                                        const ConeRefinement& refine = {});

/// Width of X·C ∩ S^{n−1}: per draw g, the max of ⟨g, Xu⟩/‖Xu‖ over the
/// sampled directions and, with refinement, over the solution of
/// min_{h∈C} ‖g − Xh‖ found by accelerated projected gradient.
WidthEstimate estimate_conic_width(const Matrix& X, const SampleMatrix& directions, Index draws,
                                   std::uint64_t seed, const ConeRefinement& refine = {});

struct GeometryOptions {
  Index samples = 2000;
  Index width_draws = 200;
  double eta = 2.0;
  bool refine = true;
  Index refine_iterations = 300;
  std::uint64_t seed = 0;
};

struct GeometryEstimates {
  double omega = 0.0;
  double omega_std_error = 0.0;
  double eta = 0.0;
  double m0 = 0.0;
  double sigma_R = 0.0;
  double sigma_upper = 0.0;
  double rho = 0.0;
  double rho_upper = 0.0;
  std::optional<double> xi;  ///< absent for noiseless data
  double xi_upper = 0.0;
  double mu_tilde = 0.0;
  double kappa = 1.0;
  Index mc_samples = 0;
  Index width_draws = 0;
  Index dropped_directions = 0;
};

/// All conic quantities for one instance. `spec` must be tuned to the truth.
GeometryEstimates estimate_geometry(const Dataset& dataset, const GroundTruth& truth, const RegularizerSpec& spec,
                                    double mu_tilde, const GeometryOptions& options);

}  // namespace codedopt
