#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "codedopt/bounds.hpp"
#include "codedopt/experiments.hpp"
#include "codedopt/geometry.hpp"
#include "codedopt/problem.hpp"

namespace codedopt {

namespace fs = std::filesystem;

/// `<subcommand>_<fingerprint>[_<suffix>].<ext>` inside `dir`.
fs::path output_path(const fs::path& dir, const std::string& subcommand, const std::string& fp,
                     const std::string& ext, const std::string& suffix = "");

/// Creates `dir` if needed and writes `content`; throws Io on failure.
void write_text(const fs::path& path, const std::string& content);

/// Shortest representation that reads back to the same double.
std::string format_number(double value);

/// `trial,iter,rel_error,s_tau,mu_used` after a `# fingerprint=...` line.
/// Every trial's records come first, then rows with trial=median.
std::string trace_csv(const SweepPoint& point, const std::string& fp);
/// `m,s,trials,successes,success_rate,median_iters` after a fingerprint line.
std::string grid_csv(const GridResult& grid, const std::string& fp);

nlohmann::json boundary_json(const BoundaryFit& fit, const std::string& fp);
nlohmann::json geometry_json(const GeometryEstimates& g);
nlohmann::json violation_json(const ViolationReport& report);

/// Binary matrix record: "CDOPTMAT", uint64 rows, uint64 cols, then row-major
/// float64 values, all little-endian.
void write_matrix(std::ostream& out, const Matrix& M);
Matrix read_matrix(std::istream& in);

/// X, y, w and θ* as consecutive matrix records (vectors as one column).
void write_dataset(const fs::path& path, const Dataset& data, const GroundTruth& truth);
std::pair<Dataset, GroundTruth> read_dataset(const fs::path& path);

}  // namespace codedopt
