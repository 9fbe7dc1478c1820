#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

namespace lab {

inline constexpr const char* kVersion = "0.3.0";

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config seed
  bool emitPlotData = false;
  std::optional<std::filesystem::path> cacheDir;
};

struct OutputFile {
  std::string name;
  std::string content;
};

struct RunResult {
  std::string kind;
  std::uint64_t seed = 0;
  std::string configHash;
  std::map<std::string, double> metrics;
  std::vector<std::string> notes;
  std::vector<OutputFile> files;
  YAML::Node assertions;  // from the config, checked by the caller
};

const std::vector<std::string>& experimentKinds();

// Parses and validates the config (ConfigError on schema problems), then runs.
RunResult runExperiment(const std::string& kind, const YAML::Node& config, const RunOptions& opt);

struct AssertionOutcome {
  std::string metric;
  std::string expectation;
  double value = 0.0;
  bool passed = false;
};

// Entries: {metric: name, le|lt|ge|gt: v} or {metric: name, between: [lo, hi]}.
std::vector<AssertionOutcome> evaluateAssertions(const YAML::Node& list,
                                                 const std::map<std::string, double>& metrics);

// Writes data files, <kind>_summary.yaml and manifest.yaml; returns the manifest path.
std::filesystem::path writeRun(const RunResult& result, const std::filesystem::path& out,
                               double wallSeconds);

std::string sha256Hex(const std::string& bytes);

}  // namespace lab
