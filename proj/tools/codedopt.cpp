// Command-line driver: gen-data, converge, phase, bounds, verify-lemma.
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "codedopt/bounds.hpp"
#include "codedopt/config.hpp"
#include "codedopt/errors.hpp"
#include "codedopt/experiments.hpp"
#include "codedopt/geometry.hpp"
#include "codedopt/io.hpp"
#include "codedopt/regularizers.hpp"
#include "codedopt/rng.hpp"

using namespace codedopt;
using nlohmann::json;

namespace {

struct Common {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--config", common.config_path, "JSON experiment config");
  cmd->add_option("--out", common.out_dir, "output directory (overrides output.dir)");
  cmd->add_option("--seed", common.seed, "base seed (overrides experiment.seed)");
}

ExperimentConfig load(const Common& common) {
  ExperimentConfig config = common.config_path.empty() ? config_from_json(json::object())
                                                       : parse_config(common.config_path);
  if (!common.out_dir.empty()) config.output.dir = common.out_dir;
  if (common.seed) config.experiment.seed = *common.seed;
  config.validate();
  return config;
}

void announce(const fs::path& path) { fmt::print("{}\n", path.string()); }

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

int cmd_gen_data(const Common& common) {
  ExperimentConfig config = load(common);
  const std::string fp = fingerprint(config);
  SweepInstance instance = make_sweep_instance(config);

  fs::path data_path = output_path(config.output.dir, "gen-data", fp, "bin");
  write_dataset(data_path, instance.data, instance.truth);
  json meta = {{"fingerprint", fp},
               {"n", config.problem.n},
               {"d", config.problem.d},
               {"k", config.problem.k},
               {"seed", config.experiment.seed},
               {"noise_std", config.problem.noise_std},
               {"support", instance.truth.support},
               {"records", {"X", "y", "w", "theta_star"}}};
  fs::path meta_path = output_path(config.output.dir, "gen-data", fp, "json");
  write_json(meta_path, meta);
  announce(data_path);
  announce(meta_path);
  return 0;
}

int cmd_converge(const Common& common, const std::string& axis_name) {
  auto axis = parse_sweep_axis(axis_name);
  if (!axis) throw Error(Errc::Config, "--axis must be m or s");
  ExperimentConfig config = load(common);
  const std::string fp = fingerprint(config);
  SweepResult result = run_convergence_sweep(config, *axis);

  json points = json::array();
  for (const SweepPoint& point : result.points) {
    const std::string suffix = *axis == SweepAxis::M ? fmt::format("m{}", point.m) : fmt::format("s{}", point.s);
    fs::path path = output_path(config.output.dir, "converge", fp, "csv", suffix);
    write_text(path, trace_csv(point, fp));
    announce(path);
    SemilogFit fit = fit_semilog_segment(point.median_error);
    points.push_back({{"m", point.m},
                      {"s", point.s},
                      {"trace_file", path.filename().string()},
                      {"median_iterations", point.median_iterations},
                      {"iterations_to_threshold", point.iterations_to_threshold},
                      {"final_median_error", point.median_error.back()},
                      {"semilog", {{"slope", fit.slope}, {"r_squared", fit.r_squared}, {"points", fit.points}}}});
  }
  json summary = {{"fingerprint", fp},
                  {"axis", to_string(*axis)},
                  {"threshold", config.optimizer.threshold},
                  {"iterations", config.optimizer.iterations},
                  {"config", config_to_json(config)},
                  {"points", points}};
  fs::path path = output_path(config.output.dir, "converge", fp, "json");
  write_json(path, summary);
  announce(path);
  return 0;
}

int cmd_phase(const Common& common, double level) {
  ExperimentConfig config = load(common);
  const std::string fp = fingerprint(config);
  GridResult grid = run_phase_transition(config);
  fs::path csv = output_path(config.output.dir, "phase", fp, "csv");
  write_text(csv, grid_csv(grid, fp));
  announce(csv);
  BoundaryFit fit = fit_phase_boundary(grid, level);
  fs::path path = output_path(config.output.dir, "phase", fp, "json");
  write_json(path, boundary_json(fit, fp));
  announce(path);
  return 0;
}

struct BoundsArgs {
  std::optional<Index> m;
  std::optional<Index> s;
  std::optional<double> eta;
  std::optional<double> mu_tilde;
  double log_constant = 9.0;
  double epsilon = 1.0;
};

int cmd_bounds(const Common& common, const BoundsArgs& args) {
  ExperimentConfig config = load(common);
  const Index m = args.m.value_or(config.encoder.m);
  const Index s = args.s.value_or(config.stragglers.s);
  const double mu_tilde = args.mu_tilde.value_or(config.optimizer.step.mu_tilde);
  if (m <= s) throw Error(Errc::Config, fmt::format("--m={} must exceed --s={}", m, s));

  SweepInstance instance = make_sweep_instance(config);
  GeometryOptions options;
  options.samples = config.experiment.geometry_samples;
  options.width_draws = config.experiment.width_draws;
  options.eta = args.eta.value_or(config.experiment.eta);
  options.seed = derive_seed(config.experiment.seed, "geometry");
  GeometryEstimates geo =
      estimate_geometry(instance.data, instance.truth, config.regularizer_for(instance.truth), mu_tilde, options);
  if (geo.dropped_directions > 0) {
    fmt::print(stderr, "warning: dropped {} cone directions in the null space of X\n", geo.dropped_directions);
  }

  BoundInputs in;
  in.kappa = geo.kappa;
  in.rho = geo.rho;
  in.mu_tilde = mu_tilde;
  in.sigma_R = geo.sigma_R;
  in.m0 = geo.m0;
  in.m = m;
  in.s = s;
  in.xi = geo.xi.value_or(0.0);
  in.noise_norm = instance.data.w.norm();
  in.log_constant = args.log_constant;

  AlphaValue alpha = alpha_sm(s, m);
  json steps = json::array();
  for (Index s_tau : std::vector<Index>{0, s}) {
    StepBound b = theorem1_step_bound(in, s_tau);
    steps.push_back({{"s_tau", s_tau}, {"contraction", b.contraction}, {"neighborhood_coeff", b.neighborhood_coeff}});
    if (s == 0) break;
  }

  json args_doc = {{"m", m}, {"s", s}, {"eta", options.eta}, {"mu_tilde", mu_tilde},
                   {"log_constant", args.log_constant}, {"epsilon", args.epsilon}};
  const std::string fp = fingerprint(json{{"config", config_to_json(config)}, {"args", args_doc}});
  json doc = {{"fingerprint", fp},
              {"config_fingerprint", fingerprint(config)},
              {"geometry", geometry_json(geo)},
              {"inputs",
               {{"kappa", in.kappa}, {"rho", in.rho}, {"mu_tilde", in.mu_tilde}, {"sigma_R", in.sigma_R},
                {"m0", in.m0}, {"m", in.m}, {"s", in.s}, {"xi", in.xi}, {"noise_norm", in.noise_norm},
                {"log_constant", in.log_constant}}},
              {"beta", beta_sm(s, m)},
              {"alpha", alpha.value},
              {"alpha_vacuous", alpha.vacuous},
              {"step_bounds", steps},
              {"min_load", {{"epsilon", args.epsilon}, {"m_required", min_load_for_rate(geo.m0, s, args.epsilon)}}}};
  fs::path path = output_path(config.output.dir, "bounds", fp, "json");
  write_json(path, doc);
  announce(path);
  return 0;
}

struct LemmaArgs {
  Index m = 30;
  Index s = 2;
  std::optional<double> eta;
  double eta_sigmas = 6.0;
  Index trials = 500;
  Index vectors = 50;
  std::string direction = "both";
  std::string search = "auto";
};

int cmd_verify_lemma(const Common& common, const LemmaArgs& args) {
  ExperimentConfig config = load(common);
  SubsetSearch search = SubsetSearch::Auto;
  if (args.search == "exhaustive") search = SubsetSearch::Exhaustive;
  else if (args.search == "sampled") search = SubsetSearch::Sampled;
  else if (args.search != "auto") throw Error(Errc::Config, "--search must be auto, exhaustive or sampled");
  std::vector<LemmaDirection> directions;
  if (args.direction == "upper" || args.direction == "both") directions.push_back(LemmaDirection::Upper);
  if (args.direction == "lower" || args.direction == "both") directions.push_back(LemmaDirection::Lower);
  if (directions.empty()) throw Error(Errc::Config, "--direction must be upper, lower or both");

  const std::uint64_t seed = config.experiment.seed;
  SweepInstance instance = make_sweep_instance(config);
  SampleMatrix dirs = sample_descent_directions(config.regularizer_for(instance.truth), instance.truth, args.vectors,
                                                derive_seed(seed, "lemma-cone"));
  VectorSet set = VectorSet::from(map_through(instance.data.X, dirs), config.experiment.width_draws,
                                  derive_seed(seed, "lemma-width"));
  const double eta = args.eta.value_or(args.eta_sigmas * set.sigma_T);

  json reports = json::array();
  for (LemmaDirection direction : directions) {
    reports.push_back(violation_json(
        verify_lemma1(direction, set, args.m, args.s, eta, args.trials, derive_seed(seed, "lemma-draws"), search)));
  }
  json args_doc = {{"m", args.m}, {"s", args.s}, {"eta", eta}, {"trials", args.trials},
                   {"vectors", args.vectors}, {"search", args.search}};
  const std::string fp = fingerprint(json{{"config", config_to_json(config)}, {"args", args_doc}});
  json doc = {{"fingerprint", fp}, {"omega_T_std_error", set.omega_std_error}, {"reports", reports}};
  fs::path path = output_path(config.output.dir, "verify-lemma", fp, "json");
  write_json(path, doc);
  announce(path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encoded distributed projected gradient descent simulator"};
  app.require_subcommand(1);

  Common common;
  auto* gen = app.add_subcommand("gen-data", "generate and store a synthetic instance");
  add_common(gen, common);

  std::string axis = "m";
  auto* converge = app.add_subcommand("converge", "convergence sweep over m or s");
  add_common(converge, common);
  converge->add_option("--axis", axis, "swept parameter: m or s");

  double level = 0.5;
  auto* phase = app.add_subcommand("phase", "phase-transition grid over (m, s)");
  add_common(phase, common);
  phase->add_option("--level", level, "success level defining the boundary");

  BoundsArgs bargs;
  auto* bounds = app.add_subcommand("bounds", "geometry estimates and convergence bounds");
  add_common(bounds, common);
  bounds->add_option("--m", bargs.m, "computational load");
  bounds->add_option("--s", bargs.s, "straggler toleration");
  bounds->add_option("--eta", bargs.eta, "confidence slack");
  bounds->add_option("--mu-tilde", bargs.mu_tilde, "base learning rate");
  bounds->add_option("--log-constant", bargs.log_constant, "coefficient of s log(em/s)");
  bounds->add_option("--epsilon", bargs.epsilon, "rate slack for the minimal load");

  LemmaArgs largs;
  auto* lemma = app.add_subcommand("verify-lemma", "Monte-Carlo check of the subset norm bounds");
  add_common(lemma, common);
  lemma->add_option("--m", largs.m, "rows of A");
  lemma->add_option("--s", largs.s, "removed rows");
  lemma->add_option("--eta", largs.eta, "absolute slack (default: eta-sigmas * sigma(T))");
  lemma->add_option("--eta-sigmas", largs.eta_sigmas, "slack in units of sigma(T)");
  lemma->add_option("--trials", largs.trials, "Gaussian draws of A");
  lemma->add_option("--vectors", largs.vectors, "size of the direction set T");
  lemma->add_option("--direction", largs.direction, "upper, lower or both");
  lemma->add_option("--search", largs.search, "auto, exhaustive or sampled");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_gen_data(common);
    if (*converge) return cmd_converge(common, axis);
    if (*phase) return cmd_phase(common, level);
    if (*bounds) return cmd_bounds(common, bargs);
    if (*lemma) return cmd_verify_lemma(common, largs);
  } catch (const Error& e) {
    fmt::print(stderr, "error ({}): {}\n", errc_name(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 3;
  }
  return 0;
}
