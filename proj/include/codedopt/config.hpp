#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "codedopt/experiments.hpp"

namespace codedopt {

/// Reads a JSON experiment config. Missing keys take their defaults (stride
/// defaults to the iteration count), unknown keys are rejected, and the
/// result is validated. Every failure is an Error with code Config whose
/// message names the line or key at fault.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Fully explicit form; config_from_json(config_to_json(c)) == c.
nlohmann::json config_to_json(const ExperimentConfig& config);

/// 12 hex digits of FNV-1a over the canonical JSON, excluding `output`.
std::string fingerprint(const ExperimentConfig& config);
/// Same hash over an arbitrary document.
std::string fingerprint(const nlohmann::json& doc);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace codedopt
