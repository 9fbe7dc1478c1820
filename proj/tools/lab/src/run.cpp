#include "lab/run.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "common.hpp"

namespace lab {

const std::vector<std::string>& experimentKinds() {
  static const std::vector<std::string> kinds = {"selftest",   "flow",        "weyl",
                                                 "almostdiag", "dispersive",  "restriction",
                                                 "blowup",     "dyson",       "microlocal"};
  return kinds;
}

std::string sha256Hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

RunResult runExperiment(const std::string& kind, const YAML::Node& config, const RunOptions& opt) {
  const auto& kinds = experimentKinds();
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
    throw ConfigError("unknown experiment kind '" + kind + "'");
  Section root = Section::root(config);
  RunResult result;
  result.kind = kind;
  const std::uint64_t configSeed = root.unsigned64("seed", 7);
  result.seed = opt.seed.value_or(configSeed);
  if (root.has("assertions")) {
    result.assertions = YAML::Clone(root.raw("assertions"));
    if (!result.assertions.IsSequence()) throw ConfigError("config key 'assertions' must be a list");
  }
  result.configHash = sha256Hex(kind + "|" + canonicalText(config) + "|seed=" +
                                std::to_string(result.seed) + "|" + kVersion);
  Context ctx{root, result.seed, opt, result};
  try {
    if (kind == "selftest") runSelftest(ctx);
    else if (kind == "flow") runFlow(ctx);
    else if (kind == "weyl") runWeyl(ctx);
    else if (kind == "dyson") runDyson(ctx);
    else if (kind == "almostdiag") runAlmostDiag(ctx);
    else if (kind == "dispersive") runDispersive(ctx);
    else if (kind == "restriction") runRestriction(ctx);
    else if (kind == "blowup") runBlowup(ctx);
    else runMicrolocal(ctx);
  } catch (const ExceptionalTime& e) {
    throw ConfigError(std::string(e.what()) + " at t = " + formatNumber(e.time()));
  }
  // unknown keys are reported even when the run itself succeeded
  root.finish();
  return result;
}

std::vector<AssertionOutcome> evaluateAssertions(const YAML::Node& list,
                                                 const std::map<std::string, double>& metrics) {
  std::vector<AssertionOutcome> out;
  if (!list || list.IsNull()) return out;
  if (!list.IsSequence()) throw ConfigError("assertions must be a list");
  for (const auto& a : list) {
    if (!a.IsMap() || !a["metric"]) throw ConfigError("each assertion needs a metric");
    AssertionOutcome o;
    o.metric = a["metric"].as<std::string>();
    const auto it = metrics.find(o.metric);
    if (it == metrics.end()) throw ConfigError("assertion names unknown metric '" + o.metric + "'");
    o.value = it->second;
    int ops = 0;
    bool ok = true;
    std::ostringstream exp;
    for (const auto& kv : a) {
      const auto key = kv.first.as<std::string>();
      if (key == "metric") continue;
      ++ops;
      if (key == "between") {
        const auto r = kv.second.as<std::vector<double>>();
        if (r.size() != 2) throw ConfigError("assertion 'between' needs [lo, hi]");
        ok = ok && o.value >= r[0] && o.value <= r[1];
        exp << "in [" << formatNumber(r[0]) << ", " << formatNumber(r[1]) << "] ";
        continue;
      }
      const double v = kv.second.as<double>();
      if (key == "le") ok = ok && o.value <= v;
      else if (key == "lt") ok = ok && o.value < v;
      else if (key == "ge") ok = ok && o.value >= v;
      else if (key == "gt") ok = ok && o.value > v;
      else throw ConfigError("unknown assertion operator '" + key + "'");
      exp << key << " " << formatNumber(v) << " ";
    }
    if (ops == 0) throw ConfigError("assertion on '" + o.metric + "' has no operator");
    o.expectation = exp.str();
    if (!o.expectation.empty()) o.expectation.pop_back();
    o.passed = ok && std::isfinite(o.value);
    out.push_back(o);
  }
  return out;
}

std::filesystem::path writeRun(const RunResult& result, const std::filesystem::path& out,
                               double wallSeconds) {
  std::filesystem::create_directories(out);
  std::vector<std::pair<std::string, std::string>> digests;
  auto emit = [&](const std::string& name, const std::string& content) {
    std::ofstream f(out / name, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + (out / name).string());
    digests.emplace_back(name, sha256Hex(content));
  };
  for (const auto& file : result.files) emit(file.name, file.content);

  YAML::Emitter s;
  s << YAML::BeginMap;
  s << YAML::Key << "kind" << YAML::Value << result.kind;
  s << YAML::Key << "version" << YAML::Value << kVersion;
  s << YAML::Key << "seed" << YAML::Value << result.seed;
  s << YAML::Key << "config_hash" << YAML::Value << result.configHash;
  s << YAML::Key << "metrics" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : result.metrics) s << YAML::Key << k << YAML::Value << formatNumber(v);
  s << YAML::EndMap;
  if (!result.notes.empty()) s << YAML::Key << "notes" << YAML::Value << result.notes;
  s << YAML::EndMap;
  emit(result.kind + "_summary.yaml", std::string(s.c_str()) + "\n");

  YAML::Emitter m;
  m << YAML::BeginMap;
  m << YAML::Key << "version" << YAML::Value << kVersion;
  m << YAML::Key << "kind" << YAML::Value << result.kind;
  m << YAML::Key << "config_hash" << YAML::Value << result.configHash;
  m << YAML::Key << "seed" << YAML::Value << result.seed;
  m << YAML::Key << "wall_time_seconds" << YAML::Value << formatNumber(wallSeconds);
  m << YAML::Key << "files" << YAML::Value << YAML::BeginMap;
  for (const auto& [name, digest] : digests) m << YAML::Key << name << YAML::Value << digest;
  m << YAML::EndMap << YAML::EndMap;
  const auto path = out / "manifest.yaml";
  std::ofstream mf(path, std::ios::binary);
  mf << m.c_str() << "\n";
  return path;
}

}  // namespace lab
