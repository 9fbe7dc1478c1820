#include "common.hpp"

#include <filesystem>

namespace lab {

Grid readGrid(const Section& cfg, int d, double halfExtent, int points) {
  const Section g = cfg.child("grid");
  const int dim = g.integer("dimension", d);
  const double L = g.number("half_extent", halfExtent);
  const int n = g.integer("points", points);
  try {
    return Grid(dim, L, n);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

Window readWindow(const Section& cfg, const Grid& grid, double width) {
  const double w = cfg.child("window").number("width", width);
  if (!(w > 0.0)) throw ConfigError("window.width must be positive");
  return Window::gaussian(grid, w);
}

QuadraticHamiltonian quadraticByName(const std::string& name, int d) {
  if (name == "harmonic") return QuadraticHamiltonian::harmonicOscillator(d);
  if (name == "free") return QuadraticHamiltonian::freeParticle(d);
  throw ConfigError("hamiltonian.quadratic must be harmonic, free, none or a matrix, got '" + name +
                    "'");
}

HamiltonianSpec readHamiltonian(const Section& cfg, const HamiltonianDefaults& defaults, int d) {
  const Section h = cfg.child("hamiltonian");
  HamiltonianSpec spec;
  spec.d = d;
  const YAML::Node q = h.raw("quadratic");
  if (q && q.IsSequence()) {
    RMatrix Q(2 * d, 2 * d);
    try {
      const auto rows = q.as<std::vector<std::vector<double>>>();
      if (static_cast<int>(rows.size()) != 2 * d) throw ConfigError("");
      for (int i = 0; i < 2 * d; ++i) {
        if (static_cast<int>(rows[i].size()) != 2 * d) throw ConfigError("");
        for (int j = 0; j < 2 * d; ++j) Q(i, j) = rows[i][j];
      }
      spec.a2 = QuadraticHamiltonian(Q);
    } catch (const std::exception&) {
      throw ConfigError("hamiltonian.quadratic matrix must be a symmetric " +
                        std::to_string(2 * d) + "x" + std::to_string(2 * d) + " list");
    }
  } else {
    const std::string name = q ? q.as<std::string>() : defaults.quadratic;
    if (name != "none") spec.a2 = quadraticByName(name, d);
  }
  try {
    const std::string a1 = h.text("a1", defaults.a1);
    if (a1 != "none") spec.a1 = PhaseSymbol::fromTag(a1);
    const YAML::Node mu = h.raw("mu");
    if (mu) {
      if (h.has("a0")) throw ConfigError("hamiltonian: give either a0 or mu, not both");
      if (!mu.IsSequence() || mu.size() == 0) throw ConfigError("hamiltonian.mu must be a list of atoms");
      AtomicMeasure m;
      for (const auto& atom : mu) {
        for (const auto& kv : atom) {
          const auto k = kv.first.as<std::string>();
          if (k != "theta" && k != "re" && k != "im")
            throw ConfigError("unknown config key 'hamiltonian.mu." + k + "'");
        }
        if (!atom["theta"]) throw ConfigError("hamiltonian.mu atom needs theta");
        m.atoms.push_back(atom["theta"].as<double>());
        m.weights.emplace_back(atom["re"] ? atom["re"].as<double>() : 0.0,
                               atom["im"] ? atom["im"].as<double>() : 0.0);
      }
      spec.a0 = ftMeasurePotential(m);
    } else {
      const std::string a0 = h.text("a0", defaults.a0);
      if (a0 != "none") spec.a0 = PhaseSymbol::fromTag(a0);
    }
    spec.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("hamiltonian: ") + e.what());
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("hamiltonian: ") + e.what());
  }
  return spec;
}

TestCorpus readCorpus(const Section& cfg, const Grid& grid, std::uint64_t seed, int randomCount,
                      int defaultSize) {
  const Section c = cfg.child("corpus");
  const int random = c.integer("random", randomCount);
  if (random < 0) throw ConfigError("corpus.random must be >= 0");
  TestCorpus corpus(grid, seed, random);
  const int size = c.integer("size", defaultSize < 0 ? corpus.size() : defaultSize);
  if (size < 1) throw ConfigError("corpus.size must be >= 1");
  return size < corpus.size() ? corpus.head(size) : corpus;
}

PropagatorSource::PropagatorSource(HamiltonianSpec spec, Grid grid, const RunOptions& opt)
    : spec_(std::move(spec)), grid_(std::move(grid)), opt_(opt) {}

const UnitaryGroup& PropagatorSource::group() {
  if (!group_) group_.emplace(weylQuantize(spec_.total(), grid_));
  return *group_;
}

CMatrix PropagatorSource::matrixAt(double t) {
  if (!opt_.cacheDir) return group().matrixAt(t);
  const std::string key = sha256Hex(spec_.describe() + "|" + formatNumber(t) + "|" +
                                    std::to_string(grid_.pointsPerAxis()) + "|" +
                                    formatNumber(grid_.halfExtent()));
  const std::filesystem::path file = *opt_.cacheDir / ("prop_" + key.substr(0, 32) + ".bin");
  if (std::filesystem::exists(file)) return readMatrix(file.string());
  std::filesystem::create_directories(*opt_.cacheDir);
  CMatrix m = group().matrixAt(t);
  writeMatrix(file.string(), m, grid_, t, spec_.describe());
  return m;
}

bool wants(const std::vector<std::string>& checks, const std::string& name) {
  return checks.empty() || std::find(checks.begin(), checks.end(), name) != checks.end();
}

}  // namespace lab
