#include "codedopt/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "codedopt/errors.hpp"

namespace codedopt {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "binary matrix format assumes little-endian hosts");

namespace {

constexpr char kMagic[8] = {'C', 'D', 'O', 'P', 'T', 'M', 'A', 'T'};

[[noreturn]] void io_fail(const std::string& message) { throw Error(Errc::Io, message); }

}  // namespace

fs::path output_path(const fs::path& dir, const std::string& subcommand, const std::string& fp,
                     const std::string& ext, const std::string& suffix) {
  std::string name = subcommand + "_" + fp;
  if (!suffix.empty()) name += "_" + suffix;
  return dir / (name + "." + ext);
}

void write_text(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) io_fail("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_fail("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) io_fail("failed writing " + path.string());
}

std::string format_number(double value) { return fmt::format("{}", value); }

std::string trace_csv(const SweepPoint& point, const std::string& fp) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "# fingerprint={} m={} s={}\n", fp, point.m, point.s);
  fmt::format_to(std::back_inserter(buf), "trial,iter,rel_error,s_tau,mu_used\n");
  for (std::size_t t = 0; t < point.traces.size(); ++t) {
    for (const auto& r : point.traces[t].records) {
      fmt::format_to(std::back_inserter(buf), "{},{},{},{},{}\n", t, r.iter, r.rel_error, r.s_tau, r.mu_used);
    }
  }
  for (std::size_t i = 0; i < point.median_error.size(); ++i) {
    fmt::format_to(std::back_inserter(buf), "median,{},{},{},{}\n", i, point.median_error[i], point.median_s_tau[i],
                   point.median_mu[i]);
  }
  return fmt::to_string(buf);
}

std::string grid_csv(const GridResult& grid, const std::string& fp) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "# fingerprint={}\n", fp);
  fmt::format_to(std::back_inserter(buf), "m,s,trials,successes,success_rate,median_iters\n");
  for (const GridCell& c : grid.cells) {
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{}\n", c.m, c.s, c.trials, c.successes, c.success_rate,
                   c.median_iters);
  }
  return fmt::to_string(buf);
}

json boundary_json(const BoundaryFit& fit, const std::string& fp) {
  json points = json::array();
  for (const auto& p : fit.points) points.push_back({{"s", p.s}, {"m_star", p.m_star}});
  return {{"fingerprint", fp},      {"level", fit.level},         {"slope", fit.slope},
          {"intercept", fit.intercept}, {"r_squared", fit.r_squared}, {"points", points}};
}

json geometry_json(const GeometryEstimates& g) {
  json doc = {{"omega", g.omega},
              {"omega_std_error", g.omega_std_error},
              {"eta", g.eta},
              {"m0", g.m0},
              {"sigma_R", g.sigma_R},
              {"sigma_upper", g.sigma_upper},
              {"rho", g.rho},
              {"rho_upper", g.rho_upper},
              {"mu_tilde", g.mu_tilde},
              {"kappa", g.kappa},
              {"mc_samples", g.mc_samples},
              {"width_draws", g.width_draws},
              {"dropped_directions", g.dropped_directions}};
  doc["xi"] = g.xi ? json(*g.xi) : json(nullptr);
  doc["xi_upper"] = g.xi ? json(g.xi_upper) : json(nullptr);
  return doc;
}

json violation_json(const ViolationReport& r) {
  return {{"direction", to_string(r.direction)},
          {"m", r.m},
          {"s", r.s},
          {"eta", r.eta},
          {"trials", r.trials},
          {"violations", r.violations},
          {"violation_rate", r.violation_rate},
          {"theoretical_failure", r.theoretical_failure},
          {"coefficient", r.coefficient},
          {"alpha_vacuous", r.alpha_vacuous},
          {"omega_T", r.omega_T},
          {"sigma_T", r.sigma_T},
          {"search", to_string(r.search_used)},
          {"subsets_per_draw", r.subsets_per_draw},
          {"worst_margin", r.worst_margin}};
}

void write_matrix(std::ostream& out, const Matrix& M) {
  out.write(kMagic, sizeof kMagic);
  const std::uint64_t dims[2] = {static_cast<std::uint64_t>(M.rows()), static_cast<std::uint64_t>(M.cols())};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(M.data()), static_cast<std::streamsize>(sizeof(double) * M.size()));
}

Matrix read_matrix(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) io_fail("not a matrix record (bad magic)");
  std::uint64_t dims[2];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!in) io_fail("truncated matrix header");
  Matrix M(static_cast<Index>(dims[0]), static_cast<Index>(dims[1]));
  in.read(reinterpret_cast<char*>(M.data()), static_cast<std::streamsize>(sizeof(double) * M.size()));
  if (!in) io_fail("truncated matrix data");
  return M;
}

void write_dataset(const fs::path& path, const Dataset& data, const GroundTruth& truth) {
  std::ostringstream out(std::ios::binary);
  write_matrix(out, data.X);
  write_matrix(out, Matrix(data.y));
  write_matrix(out, Matrix(data.w));
  write_matrix(out, Matrix(truth.theta_star));
  write_text(path, out.str());
}

std::pair<Dataset, GroundTruth> read_dataset(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail("cannot open " + path.string());
  Dataset data;
  data.X = read_matrix(in);
  data.y = read_matrix(in).col(0);
  data.w = read_matrix(in).col(0);
  GroundTruth truth;
  truth.theta_star = read_matrix(in).col(0);
  for (Index i = 0; i < truth.theta_star.size(); ++i) {
    if (truth.theta_star(i) != 0.0) truth.support.push_back(i);
  }
  truth.sparsity_k = static_cast<Index>(truth.support.size());
  return {std::move(data), std::move(truth)};
}

}  // namespace codedopt
