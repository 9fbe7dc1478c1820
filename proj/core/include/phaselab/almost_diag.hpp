#pragma once

#include <functional>
#include <vector>

#include "phaselab/linear_map.hpp"
#include "phaselab/phase_space.hpp"
#include "phaselab/symplectic_flow.hpp"

namespace phaselab {

// Canonical map on stacked phase points (x, xi).
using FlowMap = std::function<RVector(const RVector&)>;

FlowMap identityFlow();
FlowMap linearFlow(const SymplecticMatrix& S);
FlowMap translationFlow(const PhasePoint& z0);
FlowMap hamiltonianFlowMap(const TameHamiltonian& a, double s, double t, int steps);
FlowMap composeFlows(FlowMap outer, FlowMap inner);

// values(w, z) = <U pi(z) g, pi(w) g>; w index = ix * nxi + ixi, same for z.
struct GaborMatrix {
  PhaseLattice zLattice;
  PhaseLattice wLattice;
  CMatrix values;
  std::vector<RVector> zPoints;
  std::vector<RVector> wPoints;
  std::vector<RVector> flowImages;
  std::vector<bool> flagged;  // per z column

  int zCount() const { return static_cast<int>(zPoints.size()); }
  int wCount() const { return static_cast<int>(wPoints.size()); }
};

std::vector<RVector> latticePoints(const PhaseLattice& lat);

GaborMatrix gaborMatrix(const LinearMap& U, const Window& g, const PhaseLattice& zLat,
                        const PhaseLattice& wLat, const FlowMap& flow, double reliableMargin = 0.0);
// Same entries recentred at another flow (no recomputation).
GaborMatrix recentre(const GaborMatrix& m, const FlowMap& flow, double reliableMargin = 0.0);

struct EnvelopeBins {
  double width = 0.5;
  double rMax = 8.0;
  int sectors = 8;
};

struct DecayEnvelope {
  std::vector<double> edges;
  std::vector<double> sup;
  std::vector<long> counts;
  RMatrix directional;  // bins x sectors
  int phaseDimension = 2;

  int binCount() const { return static_cast<int>(sup.size()); }
  double center(int j) const { return 0.5 * (edges[j] + edges[j + 1]); }
  // sum_j E_j * |shell_j|
  double l1Norm() const;
  static DecayEnvelope synthetic(const std::vector<double>& edges, const std::vector<double>& values,
                                 int phaseDimension = 2);
};

DecayEnvelope envelope(const GaborMatrix& m, const EnvelopeBins& bins = {});

struct DecayFit {
  double exponent = 0.0;  // N-hat
  double intercept = 0.0;
  double residual = 0.0;
  int binsUsed = 0;
  bool superPolynomial = false;
};

DecayFit fitPolynomialDecay(const DecayEnvelope& e, double rMin, double rMaxFit = kInfinity);

struct CompositionReport {
  double h1 = 0.0;
  double h2 = 0.0;
  double h12 = 0.0;
  double bound = 0.0;  // h1 * h2 * (1 + slack)
  bool holds = false;
};

CompositionReport compositionEnvelopeCheck(const GaborMatrix& m1, const GaborMatrix& m2,
                                           const GaborMatrix& product, const EnvelopeBins& bins = {},
                                           double slack = 0.1);
CompositionReport compositionEnvelopeCheck(const LinearMap& u1, const LinearMap& u2,
                                           const Window& g, const PhaseLattice& zLat,
                                           const PhaseLattice& wLat, const FlowMap& flow1,
                                           const FlowMap& flow2, const EnvelopeBins& bins = {},
                                           double slack = 0.1);

void writeEnvelopeCsv(std::ostream& os, const DecayEnvelope& e, const DecayFit& fit);

}  // namespace phaselab
