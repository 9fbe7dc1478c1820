#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "phaselab/corpus.hpp"
#include "phaselab/linear_map.hpp"
#include "phaselab/phase_space.hpp"
#include "phaselab/propagator.hpp"

namespace phaselab {

struct RestrictionMeasure {
  RMatrix points;  // M x d
  RVector weights;
  std::string descriptor;

  static RestrictionMeasure circle(int count, double radius);
  static RestrictionMeasure atomSet(RMatrix points, RVector weights);
  double totalMass() const { return weights.sum(); }
  void validate(const Grid& grid) const;
};

struct EstimateRow {
  std::string label;
  double t = 0.0;
  double detB = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
};

struct EstimateReport {
  double p = 2.0;
  double q = 2.0;
  std::vector<EstimateRow> rows;
  double fittedExponent = 0.0;
  double fittedIntercept = 0.0;
  double boundExponent = 0.0;
  double fittedConstant = 0.0;
  int sampleCount = 0;
  std::string configHash;
  std::map<std::string, double> metrics;

  void writeCsv(std::ostream& os) const;
  // log|detB|, log ratio, log bound
  void writePlotCsv(std::ostream& os) const;
};

// Spatial cutoff phi(x).
using Cutoff = std::function<double(const RVector&)>;
Cutoff gaussianCutoff(double width);
Cutoff unitCutoff();
SampledFunction applyCutoff(const SampledFunction& f, const Cutoff& phi);

double restrictionRatio(const LinearMap& U, const SampledFunction& f, const Cutoff& phi, double p);
double dispersiveRatio(const LinearMap& U, const SampledFunction& f, double p, double q,
                       const Window& g);
double dispersiveRatio(const LinearMap& U, const SampledFunction& f, double p, double q,
                       const Window& g, const PhaseLattice& lat);
double measureRestrictionRatio(const LinearMap& U, const SampledFunction& f,
                               const RestrictionMeasure& nu, double p, double q);
double empiricalOperatorNorm(const LinearMap& map, const Grid& grid, double p, double q,
                             int samples, int ascentSteps, std::uint64_t seed);

enum class BlowupEstimator { DetB, SampledLowerBound };

// Least squares y = c + e x; returns {e, c}.
std::pair<double, double> logLogFit(const std::vector<double>& x, const std::vector<double>& y);

EstimateReport blowupScan(const HamiltonianSpec& spec, const Grid& grid, const TestCorpus& corpus,
                          const Cutoff& phi, double p, const std::vector<double>& tList,
                          BlowupEstimator estimator = BlowupEstimator::DetB);

}  // namespace phaselab
