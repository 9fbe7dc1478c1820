#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <iostream>

#ifdef PHASELAB_HAVE_OPENMP
#include <omp.h>
#endif

#include "lab/config.hpp"
#include "lab/run.hpp"

namespace {

void applyThreadEnv() {
  const char* env = std::getenv("PHASELAB_THREADS");
  if (!env) return;
  const int n = std::atoi(env);
  if (n < 1) {
    spdlog::warn("ignoring PHASELAB_THREADS={}", env);
    return;
  }
#ifdef PHASELAB_HAVE_OPENMP
  omp_set_num_threads(n);
#endif
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-space laboratory: time-frequency experiments on Schrodinger propagators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lab::kVersion));

  std::string kind, configPath, assertPath, cacheDir, outDir = "lab_out";
  std::uint64_t seed = 0;
  bool plot = false;
  std::vector<CLI::Option*> seedOpts;
  auto addRunOptions = [&](CLI::App* sub) {
    sub->add_option("--config", configPath, "YAML config (defaults when omitted)");
    seedOpts.push_back(sub->add_option("--seed", seed, "Override the config seed"));
    sub->add_option("--out", outDir, "Output directory");
    sub->add_flag("--emit-plot-data", plot, "Also write log-log plot columns");
    sub->add_option("--cache", cacheDir, "Directory for cached propagator matrices");
    sub->add_option("--assert-file", assertPath, "YAML file with an assertions list");
  };

  // `lab run <kind> ...` and the shorthand `lab <kind> ...`
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("kind", kind, "Experiment kind")
      ->required()
      ->check(CLI::IsMember(lab::experimentKinds()));
  addRunOptions(run);
  std::vector<CLI::App*> direct;
  for (const auto& k : lab::experimentKinds()) {
    direct.push_back(app.add_subcommand(k, "Run the " + k + " experiment"));
    addRunOptions(direct.back());
  }

  auto* kinds = app.add_subcommand("kinds", "List experiment kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (kinds->parsed()) {
    for (const auto& k : lab::experimentKinds()) std::cout << k << "\n";
    return 0;
  }

  for (auto* sub : direct)
    if (sub->parsed()) kind = sub->get_name();

  applyThreadEnv();
  lab::RunOptions opt;
  for (auto* o : seedOpts)
    if (o->count() > 0) opt.seed = seed;
  opt.emitPlotData = plot;
  if (!cacheDir.empty()) opt.cacheDir = cacheDir;

  const auto start = std::chrono::steady_clock::now();
  lab::RunResult result;
  std::vector<lab::AssertionOutcome> outcomes;
  try {
    const YAML::Node config = configPath.empty() ? YAML::Node() : lab::loadConfigFile(configPath);
    result = lab::runExperiment(kind, config, opt);
    outcomes = lab::evaluateAssertions(result.assertions, result.metrics);
    if (!assertPath.empty()) {
      const YAML::Node extra = lab::loadConfigFile(assertPath);
      if (!extra.IsMap() || !extra["assertions"])
        throw lab::ConfigError("assert file must hold an 'assertions' list");
      for (const auto& o : lab::evaluateAssertions(extra["assertions"], result.metrics))
        outcomes.push_back(o);
    }
  } catch (const lab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto manifest = lab::writeRun(result, outDir, wall);

  for (const auto& [k, v] : result.metrics) std::cout << k << " = " << v << "\n";
  std::cout << "manifest: " << manifest.string() << "\n";
  int failed = 0;
  for (const auto& o : outcomes) {
    if (o.passed) continue;
    ++failed;
    std::cerr << "assertion failed: " << o.metric << " = " << o.value << ", expected "
              << o.expectation << "\n";
  }
  return failed ? 1 : 0;
}
