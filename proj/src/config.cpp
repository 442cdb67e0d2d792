#include "codedopt/config.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "codedopt/errors.hpp"

namespace codedopt {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error(Errc::Config, message); }

/// Walks one object section, tracking which keys were consumed.
class Section {
 public:
  Section(const json& doc, std::string name) : name_(std::move(name)) {
    if (!doc.contains(name_)) return;
    const json& node = doc.at(name_);
    if (!node.is_object()) fail("section '" + name_ + "' must be an object");
    node_ = &node;
  }

  bool has(const char* key) const { return node_ && node_->contains(key); }

  const json& at(const char* key) {
    seen_.insert(key);
    return node_->at(key);
  }

  std::string key(const char* k) const { return name_ + "." + k; }

  void integer(const char* k, Index& out) {
    if (!has(k)) return;
    const json& v = at(k);
    if (!v.is_number_integer()) fail("key '" + key(k) + "' must be an integer");
    out = v.get<Index>();
  }

  void unsigned_integer(const char* k, std::uint64_t& out) {
    if (!has(k)) return;
    const json& v = at(k);
    if (!v.is_number_unsigned()) fail("key '" + key(k) + "' must be a nonnegative integer");
    out = v.get<std::uint64_t>();
  }

  void number(const char* k, double& out) {
    if (!has(k)) return;
    const json& v = at(k);
    if (!v.is_number()) fail("key '" + key(k) + "' must be a number");
    out = v.get<double>();
  }

  std::string text(const char* k) {
    const json& v = at(k);
    if (!v.is_string()) fail("key '" + key(k) + "' must be a string");
    return v.get<std::string>();
  }

  void integer_list(const char* k, std::vector<Index>& out) {
    if (!has(k)) return;
    const json& v = at(k);
    if (!v.is_array()) fail("key '" + key(k) + "' must be an array of integers");
    out.clear();
    for (const json& item : v) {
      if (!item.is_number_integer()) fail("key '" + key(k) + "' must be an array of integers");
      out.push_back(item.get<Index>());
    }
  }

  void finish() const {
    if (!node_) return;
    for (const auto& [k, v] : node_->items()) {
      if (!seen_.count(k)) fail("unknown key '" + name_ + "." + k + "'");
    }
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

template <typename T, typename Parse>
T enum_value(Section& section, const char* k, Parse parse, const char* choices) {
  std::string value = section.text(k);
  auto parsed = parse(value);
  if (!parsed) fail("key '" + section.key(k) + "' has unknown value '" + value + "' (expected " + choices + ")");
  return *parsed;
}

std::optional<DesignScaling> parse_design(std::string_view text) {
  if (text == "standard") return DesignScaling::Standard;
  if (text == "normalized") return DesignScaling::Normalized;
  return std::nullopt;
}

std::string_view design_name(DesignScaling d) { return d == DesignScaling::Standard ? "standard" : "normalized"; }

int line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) fail("config must be a JSON object");
  static const std::set<std::string> sections{"problem",    "encoder",    "regularizer", "optimizer",
                                              "stragglers", "experiment", "output"};
  for (const auto& [k, v] : doc.items()) {
    if (!sections.count(k)) fail("unknown section '" + k + "'");
  }

  ExperimentConfig c;

  Section problem(doc, "problem");
  problem.integer("n", c.problem.n);
  problem.integer("d", c.problem.d);
  problem.integer("k", c.problem.k);
  problem.number("noise_std", c.problem.noise_std);
  if (problem.has("design"))
    c.problem.design = enum_value<DesignScaling>(problem, "design", parse_design, "standard, normalized");
  problem.finish();

  Section encoder(doc, "encoder");
  if (encoder.has("kind"))
    c.encoder.kind = enum_value<EncoderKind>(encoder, "kind", parse_encoder_kind, "gaussian, dct, identity");
  encoder.integer("m", c.encoder.m);
  encoder.finish();

  Section reg(doc, "regularizer");
  if (reg.has("kind"))
    c.regularizer.kind = enum_value<RegularizerKind>(reg, "kind", parse_regularizer_kind, "l1, l2, ksparse");
  if (reg.has("radius")) {
    const json& v = reg.at("radius");
    if (v.is_string() && v.get<std::string>() == "auto") c.regularizer.radius.reset();
    else if (v.is_number()) c.regularizer.radius = v.get<double>();
    else fail("key 'regularizer.radius' must be a number or \"auto\"");
  }
  if (reg.has("k")) {
    const json& v = reg.at("k");
    if (v.is_string() && v.get<std::string>() == "auto") c.regularizer.k.reset();
    else if (v.is_number_integer()) c.regularizer.k = v.get<Index>();
    else fail("key 'regularizer.k' must be an integer or \"auto\"");
  }
  reg.finish();

  Section opt(doc, "optimizer");
  if (opt.has("step_rule"))
    c.optimizer.step.mode = enum_value<StepMode>(opt, "step_rule", parse_step_mode, "fixed, calibrated, theorem");
  opt.number("mu_tilde", c.optimizer.step.mu_tilde);
  opt.integer("iterations", c.optimizer.iterations);
  opt.number("threshold", c.optimizer.threshold);
  Index stride = c.optimizer.iterations;
  opt.integer("stride", stride);
  c.optimizer.stride = stride;
  opt.integer("workers", c.optimizer.workers);
  opt.finish();

  Section strag(doc, "stragglers");
  if (strag.has("mode"))
    c.stragglers.mode = enum_value<StragglerMode>(strag, "mode", parse_straggler_mode, "none, row, worker");
  strag.integer("s", c.stragglers.s);
  strag.finish();

  Section exp(doc, "experiment");
  exp.integer("trials", c.experiment.trials);
  exp.unsigned_integer("seed", c.experiment.seed);
  exp.integer_list("m_values", c.experiment.m_values);
  exp.integer_list("s_values", c.experiment.s_values);
  exp.number("eta", c.experiment.eta);
  exp.integer("geometry_samples", c.experiment.geometry_samples);
  exp.integer("width_draws", c.experiment.width_draws);
  exp.finish();

  Section out(doc, "output");
  if (out.has("dir")) c.output.dir = out.text("dir");
  out.finish();

  c.validate();
  return c;
}

ExperimentConfig parse_config_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("config parse error at line " + std::to_string(line_of(text, e.byte > 0 ? e.byte - 1 : 0)) + ": " +
         e.what());
  }
  return config_from_json(doc);
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read config file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_config_text(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

json config_to_json(const ExperimentConfig& c) {
  json doc;
  doc["problem"] = {{"n", c.problem.n},
                    {"d", c.problem.d},
                    {"k", c.problem.k},
                    {"noise_std", c.problem.noise_std},
                    {"design", design_name(c.problem.design)}};
  doc["encoder"] = {{"kind", to_string(c.encoder.kind)}, {"m", c.encoder.m}};
  json reg = {{"kind", to_string(c.regularizer.kind)}};
  reg["radius"] = c.regularizer.radius ? json(*c.regularizer.radius) : json("auto");
  reg["k"] = c.regularizer.k ? json(*c.regularizer.k) : json("auto");
  doc["regularizer"] = reg;
  doc["optimizer"] = {{"step_rule", to_string(c.optimizer.step.mode)},
                      {"mu_tilde", c.optimizer.step.mu_tilde},
                      {"iterations", c.optimizer.iterations},
                      {"threshold", c.optimizer.threshold},
                      {"stride", c.optimizer.stride.value_or(c.optimizer.iterations)},
                      {"workers", c.optimizer.workers}};
  doc["stragglers"] = {{"mode", to_string(c.stragglers.mode)}, {"s", c.stragglers.s}};
  doc["experiment"] = {{"trials", c.experiment.trials},
                       {"seed", c.experiment.seed},
                       {"m_values", c.experiment.m_values},
                       {"s_values", c.experiment.s_values},
                       {"eta", c.experiment.eta},
                       {"geometry_samples", c.experiment.geometry_samples},
                       {"width_draws", c.experiment.width_draws}};
  doc["output"] = {{"dir", c.output.dir}};
  return doc;
}

std::string fingerprint(const json& doc) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : doc.dump()) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return fmt::format("{:012x}", hash >> 16);
}

std::string fingerprint(const ExperimentConfig& config) {
  json doc = config_to_json(config);
  doc.erase("output");
  return fingerprint(doc);
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return config_to_json(a) == config_to_json(b);
}

}  // namespace codedopt
