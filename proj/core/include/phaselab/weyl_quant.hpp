#pragma once

#include <string>
#include <vector>

#include "phaselab/linear_map.hpp"
#include "phaselab/phase_space.hpp"
#include "phaselab/symplectic_flow.hpp"

namespace phaselab {

enum class SymbolClass { Quadratic, SmoothTame, Sjostrand, Product };
std::string toString(SymbolClass c);

// Symbol a(x, xi) on R^2 (d=1). Real symbols may carry analytic derivatives so the
// same object drives classical flows.
struct PhaseSymbol {
  std::function<Complex(double, double)> eval;
  SymbolClass cls = SymbolClass::SmoothTame;
  bool realValued = true;
  std::string name;
  std::function<Eigen::Vector2d(double, double)> gradient;
  std::function<Eigen::Matrix2d(double, double)> hessian;

  Complex operator()(double x, double xi) const { return eval(x, xi); }
  bool hasDerivatives() const { return static_cast<bool>(gradient) && static_cast<bool>(hessian); }

  static PhaseSymbol constant(Complex c);
  static PhaseSymbol zero() { return constant(0.0); }
  static PhaseSymbol quadratic(const QuadraticHamiltonian& q);
  static PhaseSymbol position();
  static PhaseSymbol momentum();
  static PhaseSymbol sinX();
  static PhaseSymbol cosX();
  static PhaseSymbol sinXsinXi();
  static PhaseSymbol gaussianBump(double amplitude = 1.0);
  // Registry used by experiment configs: none, sin_x, cos_x, sin_x_sin_xi, bump.
  static PhaseSymbol fromTag(const std::string& tag);
  static std::vector<std::string> tags();
};

PhaseSymbol operator+(const PhaseSymbol& a, const PhaseSymbol& b);
PhaseSymbol operator*(Complex c, const PhaseSymbol& a);
// Real-valued combination a + b with summed derivatives when both carry them.
TameHamiltonian toTameHamiltonian(const QuadraticHamiltonian& q, const PhaseSymbol& perturbation);

class WeylOperator {
 public:
  WeylOperator(Grid grid, CMatrix matrix, std::string provenance, bool hermitian);

  const Grid& grid() const { return grid_; }
  const CMatrix& matrix() const { return matrix_; }
  const std::string& provenance() const { return provenance_; }
  bool hermitian() const { return hermitian_; }
  double hermitianDefect() const;
  SampledFunction apply(const SampledFunction& f) const;
  LinearMap asMap() const { return denseMap(matrix_); }
  WeylOperator operator+(const WeylOperator& o) const;

 private:
  Grid grid_;
  CMatrix matrix_;
  std::string provenance_;
  bool hermitian_;
};

struct AtomicMeasure {
  std::vector<double> atoms;  // theta_j (d=1)
  std::vector<Complex> weights;

  double mass() const;
  bool hermitianSymmetric(double tol = 1e-14) const;
};

WeylOperator weylQuantize(const PhaseSymbol& a, const Grid& grid);
PhaseSymbol ftMeasurePotential(const AtomicMeasure& mu);

struct SjostrandLattice {
  double symbolHalfExtent = 16.0;  // symbol sampled on [-E, E)^2
  int symbolPoints = 128;
  double zStep = 1.0;
  double zRadius = 4.0;
  int zetaStride = 1;
  double windowWidth = 1.0;
};

double sjostrandNormEstimate(const PhaseSymbol& a, const SjostrandLattice& lat = {});

struct GaborNormLattice {
  double step = 0.5;
  double wRadius = 3.0;
  double zRadius = 5.0;
};

double gaborOperatorNorm(const LinearMap& A, const Window& g, const GaborNormLattice& lat = {});

}  // namespace phaselab
