#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "phaselab/corpus.hpp"
#include "phaselab/estimates.hpp"
#include "phaselab/phase_space.hpp"
#include "phaselab/symplectic_flow.hpp"
#include "phaselab/weyl_quant.hpp"

namespace phaselab {

// Angular half-width alpha around a unit direction in R^{2d}; alpha = pi/2 is a half-space.
class ConicSector {
 public:
  ConicSector(RVector direction, double halfAngle, double innerRadius = 1.0);

  const RVector& direction() const { return dir_; }
  double halfAngle() const { return alpha_; }
  double innerRadius() const { return r0_; }
  double angleTo(const RVector& z) const;
  bool contains(const RVector& z) const;

 private:
  RVector dir_;
  double alpha_;
  double r0_;
};

struct ConeProfile {
  std::vector<double> radii;
  std::vector<double> sup;
  double slope = 0.0;
};

ConeProfile coneDecay(const SampledFunction& f, const Window& g, const ConicSector& sector,
                      const std::vector<double>& radii, double latticeStep = 0.25,
                      double shellHalfWidth = 0.25);
// Sector centres (equally spaced on the circle, d=1) whose fitted slope exceeds slowThreshold.
std::vector<RVector> slowDecayDirections(const SampledFunction& f, const Window& g,
                                         int sectorCount = 16, double slowThreshold = -2.0,
                                         double rMin = 3.0, double rMax = 8.0);
void writeConeProfilesCsv(std::ostream& os, const std::vector<ConeProfile>& profiles);

// Smooth step with step(u) + step(-u) = 1, 0 for u <= -1, 1 for u >= 1.
double smoothStep(double u);

class HomogeneousCutoff {
 public:
  HomogeneousCutoff(std::vector<ConicSector> sectors, double epsilon, double transition = 0.15);

  double operator()(const RVector& z) const;
  double operator()(double x, double xi) const;
  bool isIdentity() const { return full_; }
  // Direction lies where psi = 1 outside the ball of radius 1 + epsilon.
  bool covers(const RVector& direction) const;
  const std::vector<ConicSector>& sectors() const { return sectors_; }
  double epsilon() const { return eps_; }
  double transition() const { return tau_; }
  PhaseSymbol symbol() const;

 private:
  std::vector<ConicSector> sectors_;
  double eps_;
  double tau_;
  bool full_ = false;
};

HomogeneousCutoff buildCutoff(const std::vector<ConicSector>& coveredSectors, double epsilon,
                              double transition = 0.15);

class ConeNotCovered : public std::invalid_argument {
 public:
  explicit ConeNotCovered(RVector direction);
  const RVector& direction() const { return dir_; }

 private:
  RVector dir_;
};

struct MicroRow {
  std::string label;
  double lhs = 0.0;           // ||F(phi A f)||_p
  double cutoffNorm = 0.0;    // ||psi^w f||_p
  double sobolevNorm = 0.0;   // ||<x>^{-N} f||_{H^{-N}}
  double cutoffRatio = 0.0;   // ||F(phi A psi^w f)||_p / ||psi^w f||_p
  double remainderRatio = 0.0;
  double firstTerm = 0.0;     // C * cutoffNorm
  double secondTerm = 0.0;    // C_N * sobolevNorm
  double slack = 0.0;         // first + second - lhs
};

struct MicroReport {
  double p = 1.0;
  int order = 2;
  double detB = 0.0;
  double C = 0.0;
  double CN = 0.0;
  std::vector<MicroRow> rows;
  bool holds = false;
  void writeCsv(std::ostream& os) const;
};

MicroReport microRestrictionCheck(const LinearMap& A, const SymplecticMatrix& S,
                                  const HomogeneousCutoff& psi, const Cutoff& phi,
                                  const std::vector<SampledFunction>& corpus,
                                  const std::vector<std::string>& labels, double p, int order);

// Unit directions of S^{-1}({0} x (R^d \ 0)) probed by the cone hypothesis (d=1: two rays).
std::vector<RVector> requiredDirections(const SymplecticMatrix& S);

}  // namespace phaselab
