#pragma once

#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "phaselab/phase_space.hpp"

namespace phaselab {

class FlowBreakdown : public std::runtime_error {
 public:
  FlowBreakdown(const std::string& what, double time, RVector state)
      : std::runtime_error(what), time_(time), state_(std::move(state)) {}
  double time() const { return time_; }
  const RVector& state() const { return state_; }

 private:
  double time_;
  RVector state_;
};

// J = [[0, I], [-I, 0]]
RMatrix standardSymplectic(int d);

class QuadraticHamiltonian {
 public:
  explicit QuadraticHamiltonian(RMatrix Q);
  static QuadraticHamiltonian freeParticle(int d);
  static QuadraticHamiltonian harmonicOscillator(int d);

  const RMatrix& matrix() const { return Q_; }
  int dimension() const { return static_cast<int>(Q_.rows() / 2); }
  double operator()(const RVector& z) const { return 0.5 * z.dot(Q_ * z); }

 private:
  RMatrix Q_;
};

class SymplecticMatrix {
 public:
  explicit SymplecticMatrix(RMatrix S);

  const RMatrix& matrix() const { return S_; }
  int dimension() const { return static_cast<int>(S_.rows() / 2); }
  RMatrix A() const { return S_.topLeftCorner(dimension(), dimension()); }
  RMatrix B() const { return S_.topRightCorner(dimension(), dimension()); }
  RMatrix C() const { return S_.bottomLeftCorner(dimension(), dimension()); }
  RMatrix D() const { return S_.bottomRightCorner(dimension(), dimension()); }
  // max |S^T J S - J|
  double symplecticDefect() const;
  RVector apply(const RVector& z) const { return S_ * z; }
  SymplecticMatrix inverse() const;

 private:
  RMatrix S_;
};

// a(t, z) with z = (x, xi) stacked, plus analytic gradient and Hessian in z.
struct TameHamiltonian {
  int d = 1;
  std::function<double(double, const RVector&)> value;
  std::function<RVector(double, const RVector&)> gradient;
  std::function<RMatrix(double, const RVector&)> hessian;
  std::map<std::string, double> derivativeBounds;
  std::string name;

  static TameHamiltonian fromQuadratic(const QuadraticHamiltonian& q);
  // q(z) + perturbation(x, xi), d=1; perturbation given with analytic derivatives
  static TameHamiltonian quadraticPlus(const QuadraticHamiltonian& q,
                                       std::function<double(double, double)> v,
                                       std::function<Eigen::Vector2d(double, double)> grad,
                                       std::function<Eigen::Matrix2d(double, double)> hess,
                                       std::string name);
};

struct FlowResult {
  PhasePoint endpoint;
  RMatrix jacobian;
  int steps = 0;
  double stepSize = 0.0;
  double volumeDefect = 0.0;  // |det M - 1|
};

SymplecticMatrix quadraticFlow(const QuadraticHamiltonian& q, double t);
double detB(const SymplecticMatrix& S);
bool isExceptional(const SymplecticMatrix& S, double threshold = 1e-6);

FlowResult hamiltonianFlow(const TameHamiltonian& a, double s, double t, const PhasePoint& z0,
                           int stepCount);

struct LowerBoundEstimate {
  double value = 0.0;  // min |det dx/deta|
  double maximum = 0.0;
  PhasePoint argmin;
  int samples = 0;
  double spread() const { return maximum - value; }
};

LowerBoundEstimate lowerBoundC(const TameHamiltonian& a, double t, double s,
                               const std::vector<PhasePoint>& sampleLattice,
                               int stepCount = 200);

// Square lattice of initial points in [-radius, radius]^{2d} with `perAxis` nodes per axis.
std::vector<PhasePoint> sampleBox(int d, double radius, int perAxis);

struct FlowTraceRow {
  double t;
  RVector z;
  double detA, detB;
};
std::vector<FlowTraceRow> flowTrace(const TameHamiltonian& a, const PhasePoint& z0, double s,
                                    const std::vector<double>& times, int stepsPerUnit);
void writeFlowTraceCsv(std::ostream& os, const std::vector<FlowTraceRow>& rows);

}  // namespace phaselab
