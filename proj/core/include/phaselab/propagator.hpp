#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phaselab/linear_map.hpp"
#include "phaselab/symplectic_flow.hpp"
#include "phaselab/weyl_quant.hpp"

namespace phaselab {

class ExceptionalTime : public std::domain_error {
 public:
  ExceptionalTime(double t, double detB)
      : std::domain_error("exceptional time: |det B_t| below threshold"), t_(t), detB_(detB) {}
  double time() const { return t_; }
  double detB() const { return detB_; }

 private:
  double t_;
  double detB_;
};

enum class Realization { DenseMatrix, SplitStepProgram, KernelQuadrature, FourierMultiplier };
std::string toString(Realization r);

class Propagator {
 public:
  Propagator(Grid grid, double t, Realization kind, std::string source, CMatrix matrix);
  Propagator(Grid grid, double t, Realization kind, std::string source, LinearMap map);

  const Grid& grid() const { return grid_; }
  double time() const { return t_; }
  Realization realization() const { return kind_; }
  const std::string& source() const { return source_; }
  bool hasMatrix() const { return matrix_.has_value(); }
  const CMatrix& matrix() const;
  CMatrix toMatrix() const;
  SampledFunction apply(const SampledFunction& f) const;
  LinearMap asMap() const;

 private:
  Grid grid_;
  double t_;
  Realization kind_;
  std::string source_;
  std::optional<CMatrix> matrix_;
  LinearMap map_;
};

struct HamiltonianSpec {
  std::optional<QuadraticHamiltonian> a2;
  std::optional<PhaseSymbol> a1;
  std::optional<PhaseSymbol> a0;
  int d = 1;

  void validate() const;
  // a2 + a1 (zero when both absent)
  PhaseSymbol principal() const;
  PhaseSymbol total() const;
  TameHamiltonian principalFlow() const;
  // Stable text identity used for cache keys and config hashes.
  std::string describe() const;
};

// t -> exp(-i t A) for a Hermitian matrix, from one eigendecomposition.
class UnitaryGroup {
 public:
  explicit UnitaryGroup(const WeylOperator& A);

  const Grid& grid() const { return grid_; }
  const RVector& eigenvalues() const { return lambda_; }
  const CMatrix& eigenvectors() const { return V_; }
  CMatrix matrixAt(double t) const;
  Propagator at(double t) const;

 private:
  Grid grid_;
  std::string source_;
  RVector lambda_;
  CMatrix V_;
};

Propagator matrixExpPropagator(const WeylOperator& A, double t);
// exp(-i t |xi|^2 / 2) in Fourier space, i.e. i u_t = -(1/2) Laplacian u.
Propagator freePropagator(double t, const Grid& grid);
// Generating-function kernel quadrature; d=2 requires an axis-separable Q.
Propagator quadraticKernelPropagator(const QuadraticHamiltonian& q, double t, const Grid& grid,
                                     int oversample = 4);
using KineticSymbol = std::function<double(const RVector&)>;
using Potential = std::function<double(const RVector&)>;
Propagator splitStepPropagator(const KineticSymbol& kinetic, const Potential& potential, double t,
                               int steps, const Grid& grid);

// Interaction-picture pieces for a2 + a1 + a0 (d=1).
struct DysonState {
  double t = 0.0;
  int order = 0;
  int quadSteps = 0;
  std::vector<CMatrix> terms;  // b_{t,k}, k = 1..order, grid basis
  CMatrix partialSum;          // I + sum (-i)^k b_{t,k}
  double refinementDifference = 0.0;
  std::vector<double> termNorms() const;
};

class DysonSolver {
 public:
  DysonSolver(const HamiltonianSpec& spec, const Grid& grid);

  const UnitaryGroup& principal() const { return group_; }
  const WeylOperator& perturbation() const { return a0_; }
  // U1(-t) a0^w U1(t)
  CMatrix sigma(double t) const;
  DysonState expand(double t, int order, int quadSteps) const;
  Propagator propagator(double t, int order, int quadSteps) const;

 private:
  CMatrix toGrid(const CMatrix& eig) const;
  std::vector<CMatrix> recursion(double t, int order, int quadSteps) const;

  Grid grid_;
  WeylOperator a0_;
  UnitaryGroup group_;
  CMatrix a0Eigen_;
};

CMatrix dysonSigma(const HamiltonianSpec& spec, double t, const Grid& grid);
CMatrix dysonTerm(const HamiltonianSpec& spec, double t, int k, int quadSteps, const Grid& grid);
Propagator dysonPropagator(const HamiltonianSpec& spec, double t, int order, int quadSteps,
                           const Grid& grid);

// Maslov-corrected phase of the kernel prefactor, from the sign history of B_s on [0, t].
double kernelPhase(const QuadraticHamiltonian& q, double t);

}  // namespace phaselab
