#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <string>

#include "lab/config.hpp"
#include "lab/run.hpp"
#include "phaselab/corpus.hpp"
#include "phaselab/io.hpp"
#include "phaselab/phase_space.hpp"
#include "phaselab/propagator.hpp"

namespace lab {

using namespace phaselab;

struct Context {
  Section cfg;
  std::uint64_t seed;
  const RunOptions& opt;
  RunResult& result;

  void metric(const std::string& name, double v) { result.metrics[name] = v; }
  void file(const std::string& name, std::string content) {
    result.files.push_back({name, std::move(content)});
  }
  void note(std::string s) { result.notes.push_back(std::move(s)); }
};

inline std::string csvText(const std::function<void(std::ostream&)>& body) {
  std::ostringstream os;
  body(os);
  return os.str();
}

Grid readGrid(const Section& cfg, int d, double halfExtent, int points);
Window readWindow(const Section& cfg, const Grid& grid, double width);

struct HamiltonianDefaults {
  std::string quadratic = "harmonic";
  std::string a1 = "none";
  std::string a0 = "none";
};
HamiltonianSpec readHamiltonian(const Section& cfg, const HamiltonianDefaults& defaults, int d = 1);
QuadraticHamiltonian quadraticByName(const std::string& name, int d);

// `defaultSize` < 0 keeps every generated function.
TestCorpus readCorpus(const Section& cfg, const Grid& grid, std::uint64_t seed, int randomCount,
                      int defaultSize = -1);

// exp(-i t H^w) matrices, optionally cached on disk by (spec, t, N, L).
class PropagatorSource {
 public:
  PropagatorSource(HamiltonianSpec spec, Grid grid, const RunOptions& opt);
  CMatrix matrixAt(double t);
  const UnitaryGroup& group();

 private:
  HamiltonianSpec spec_;
  Grid grid_;
  const RunOptions& opt_;
  std::optional<UnitaryGroup> group_;
};

// Sub-blocks run by default unless `checks` in the kind section narrows them.
bool wants(const std::vector<std::string>& checks, const std::string& name);

void runSelftest(Context& ctx);
void runFlow(Context& ctx);
void runWeyl(Context& ctx);
void runDyson(Context& ctx);
void runAlmostDiag(Context& ctx);
void runDispersive(Context& ctx);
void runRestriction(Context& ctx);
void runBlowup(Context& ctx);
void runMicrolocal(Context& ctx);

}  // namespace lab
