#include "phaselab/propagator.hpp"

#include <spdlog/spdlog.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "phaselab/fourier.hpp"

namespace phaselab {
namespace {

using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
constexpr double kPi = std::numbers::pi;

double sgn(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

// rN x N band-limited upsampling on the same periodic interval.
CMatrix upsamplingMatrix(const Grid& coarse, int factor) {
  const int n = coarse.pointsPerAxis();
  if (factor == 1) return CMatrix::Identity(n, n);
  const Grid fine(1, coarse.halfExtent(), factor * n);
  const int offset = (factor - 1) * n / 2;
  CMatrix P(factor * n, n);
  for (int k = 0; k < n; ++k) {
    SampledFunction e(coarse);
    e.values()[k] = 1.0;
    SampledFunction spec = fourierTransform(e);
    SampledFunction padded(fine.dual());
    for (int m = 0; m < n; ++m) padded.values()[m + offset] = spec.values()[m];
    padded.values()[offset] *= 0.5;
    padded.values()[offset + n] = padded.values()[offset];
    P.col(k) = inverseFourierTransform(padded).values();
  }
  return P;
}

// One-axis kernel matrix for S = [[A, B], [C, D]].
CMatrix kernelMatrix1d(double A, double B, double D, double phase, const Grid& grid, int factor) {
  const int n = grid.pointsPerAxis();
  const Grid fine(1, grid.halfExtent(), factor * n);
  const double hf = fine.spacing();
  const Complex pref = std::polar(hf / std::sqrt(2.0 * kPi * std::abs(B)), phase);
  CMatrix K(n, factor * n);
  for (int l = 0; l < factor * n; ++l) {
    const double y = fine.coordinate(l);
    for (int j = 0; j < n; ++j) {
      const double x = grid.coordinate(j);
      K(j, l) = pref * std::polar(1.0, (D * x * x - 2.0 * x * y + A * y * y) / (2.0 * B));
    }
  }
  return K * upsamplingMatrix(grid, factor);
}

QuadraticHamiltonian axisBlock(const QuadraticHamiltonian& q, int axis) {
  const RMatrix& Q = q.matrix();
  Eigen::Matrix2d b;
  b << Q(axis, axis), Q(axis, 2 + axis), Q(2 + axis, axis), Q(2 + axis, 2 + axis);
  return QuadraticHamiltonian(b);
}

bool separable(const QuadraticHamiltonian& q) {
  const RMatrix& Q = q.matrix();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if ((i % 2) != (j % 2) && Q(i, j) != 0.0) return false;
  return true;
}

}  // namespace

std::string toString(Realization r) {
  switch (r) {
    case Realization::DenseMatrix: return "denseMatrix";
    case Realization::SplitStepProgram: return "splitStepProgram";
    case Realization::KernelQuadrature: return "kernelQuadrature";
    case Realization::FourierMultiplier: return "fourierMultiplier";
  }
  return "unknown";
}

Propagator::Propagator(Grid grid, double t, Realization kind, std::string source, CMatrix matrix)
    : grid_(grid), t_(t), kind_(kind), source_(std::move(source)), matrix_(std::move(matrix)) {
  if (matrix_->rows() != grid_.size() || matrix_->cols() != grid_.size())
    throw InvalidArgument("propagator matrix shape does not match grid");
  map_ = denseMap(*matrix_);
}

Propagator::Propagator(Grid grid, double t, Realization kind, std::string source, LinearMap map)
    : grid_(grid), t_(t), kind_(kind), source_(std::move(source)), map_(std::move(map)) {}

const CMatrix& Propagator::matrix() const {
  if (!matrix_) throw std::logic_error("propagator has no stored matrix");
  return *matrix_;
}

CMatrix Propagator::toMatrix() const {
  if (matrix_) return *matrix_;
  return materialize(map_, grid_);
}

SampledFunction Propagator::apply(const SampledFunction& f) const {
  if (f.grid() != grid_) throw InvalidArgument("function and propagator grids differ");
  return map_(f);
}

LinearMap Propagator::asMap() const { return map_; }

void HamiltonianSpec::validate() const {
  if (!a2 && !a1 && !a0) throw InvalidArgument("Hamiltonian needs at least one part");
  if (d != 1 && d != 2) throw InvalidArgument("Hamiltonian dimension must be 1 or 2");
  if (a2 && a2->dimension() != d) throw InvalidArgument("quadratic part dimension mismatch");
  if ((a1 || a0) && d != 1) throw InvalidArgument("non-quadratic parts are 1-d only");
  if (a1 && a1->cls != SymbolClass::SmoothTame && a1->cls != SymbolClass::Sjostrand)
    throw InvalidArgument("a1 must be smooth-tame");
  if (a0 && a0->cls != SymbolClass::Sjostrand) throw InvalidArgument("a0 must be Sjostrand class");
}

PhaseSymbol HamiltonianSpec::principal() const {
  PhaseSymbol p = PhaseSymbol::zero();
  if (a2) p = PhaseSymbol::quadratic(*a2);
  if (a1) p = a2 ? p + *a1 : *a1;
  return p;
}

PhaseSymbol HamiltonianSpec::total() const {
  PhaseSymbol p = principal();
  if (a0) p = (a2 || a1) ? p + *a0 : *a0;
  return p;
}

TameHamiltonian HamiltonianSpec::principalFlow() const {
  const QuadraticHamiltonian q = a2 ? *a2 : QuadraticHamiltonian(RMatrix::Zero(2 * d, 2 * d));
  if (!a1) return TameHamiltonian::fromQuadratic(q);
  return toTameHamiltonian(q, *a1);
}

std::string HamiltonianSpec::describe() const {
  std::string s = "d=" + std::to_string(d) + ";a2=";
  if (a2) {
    const RMatrix& Q = a2->matrix();
    for (Eigen::Index i = 0; i < Q.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", Q.data()[i]);
      s += buf;
    }
  } else {
    s += "none";
  }
  s += ";a1=" + (a1 ? a1->name : std::string("none"));
  s += ";a0=" + (a0 ? a0->name : std::string("none"));
  return s;
}

UnitaryGroup::UnitaryGroup(const WeylOperator& A) : grid_(A.grid()), source_(A.provenance()) {
  if (A.hermitianDefect() > 1e-8) throw InvalidArgument("matrix exponential needs a Hermitian operator");
  const CMatrix H = 0.5 * (A.matrix() + A.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
  lambda_ = es.eigenvalues();
  V_ = es.eigenvectors();
}

CMatrix UnitaryGroup::matrixAt(double t) const {
  CVector phase(lambda_.size());
  for (Eigen::Index k = 0; k < lambda_.size(); ++k) phase[k] = std::polar(1.0, -t * lambda_[k]);
  return V_ * phase.asDiagonal() * V_.adjoint();
}

Propagator UnitaryGroup::at(double t) const {
  if (t == 0.0)
    return Propagator(grid_, t, Realization::DenseMatrix, source_, CMatrix::Identity(grid_.size(), grid_.size()));
  return Propagator(grid_, t, Realization::DenseMatrix, source_, matrixAt(t));
}

Propagator matrixExpPropagator(const WeylOperator& A, double t) { return UnitaryGroup(A).at(t); }

Propagator freePropagator(double t, const Grid& grid) {
  if (t == 0.0) return Propagator(grid, t, Realization::FourierMultiplier, "free", identityMap());
  const Grid dg = grid.dual();
  const int n = grid.pointsPerAxis();
  CVector mult(grid.size());
  if (grid.dimension() == 1) {
    for (int m = 0; m < n; ++m) mult[m] = std::polar(1.0, -0.5 * t * std::pow(dg.coordinate(m), 2));
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        mult[i * n + j] = std::polar(
            1.0, -0.5 * t * (std::pow(dg.coordinate(i), 2) + std::pow(dg.coordinate(j), 2)));
  }
  LinearMap map = [mult](const SampledFunction& f) {
    SampledFunction spec = fourierTransform(f);
    spec.values() = spec.values().cwiseProduct(mult);
    return inverseFourierTransform(spec);
  };
  return Propagator(grid, t, Realization::FourierMultiplier, "free", std::move(map));
}

double kernelPhase(const QuadraticHamiltonian& q, double t) {
  if (q.dimension() != 1) throw InvalidArgument("kernelPhase is per axis (d=1)");
  const int samples = 4000;
  double first = 0.0;
  double prev = 0.0;
  double jumps = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const SymplecticMatrix S = quadraticFlow(q, t * i / samples);
    const double b = S.B()(0, 0);
    if (i == 1) {
      first = sgn(b);
    } else if (sgn(b) != 0.0 && sgn(prev) != 0.0 && sgn(b) != sgn(prev)) {
      jumps += sgn((b - prev) * S.D()(0, 0));
    }
    if (b != 0.0) prev = b;
  }
  return -0.25 * kPi * first - 0.5 * kPi * jumps;
}

Propagator quadraticKernelPropagator(const QuadraticHamiltonian& q, double t, const Grid& grid,
                                     int oversample) {
  if (oversample < 1) throw InvalidArgument("oversample must be >= 1");
  if (q.dimension() != grid.dimension()) throw InvalidArgument("Hamiltonian and grid dimension differ");
  const SymplecticMatrix S = quadraticFlow(q, t);
  const double db = detB(S);
  if (std::abs(db) <= 1e-6) throw ExceptionalTime(t, db);
  if (grid.dimension() == 1) {
    CMatrix K = kernelMatrix1d(S.A()(0, 0), S.B()(0, 0), S.D()(0, 0), kernelPhase(q, t), grid,
                               oversample);
    return Propagator(grid, t, Realization::KernelQuadrature, "quadratic-kernel", std::move(K));
  }
  if (!separable(q))
    throw InvalidArgument("d=2 kernel propagator requires an axis-separable quadratic form");
  std::array<CMatrix, 2> axes;
  for (int a = 0; a < 2; ++a) {
    const QuadraticHamiltonian qa = axisBlock(q, a);
    const SymplecticMatrix Sa = quadraticFlow(qa, t);
    const double b = Sa.B()(0, 0);
    if (std::abs(b) <= 1e-6) throw ExceptionalTime(t, db);
    const Grid g1(1, grid.halfExtent(), grid.pointsPerAxis());
    axes[a] = kernelMatrix1d(Sa.A()(0, 0), b, Sa.D()(0, 0), kernelPhase(qa, t), g1, oversample);
  }
  const int n = grid.pointsPerAxis();
  LinearMap map = [axes, n](const SampledFunction& f) {
    Eigen::Map<const RowMajor> fm(f.values().data(), n, n);
    RowMajor out = axes[0] * fm * axes[1].transpose();
    return SampledFunction(f.grid(), Eigen::Map<const CVector>(out.data(), n * n));
  };
  return Propagator(grid, t, Realization::KernelQuadrature, "quadratic-kernel", std::move(map));
}

Propagator splitStepPropagator(const KineticSymbol& kinetic, const Potential& potential, double t,
                               int steps, const Grid& grid) {
  if (steps < 1) throw InvalidArgument("split-step needs at least one step");
  const double dt = t / steps;
  const int n = grid.pointsPerAxis();
  const Grid dg = grid.dual();
  CVector half(grid.size()), kin(grid.size());
  auto point = [&](const Grid& g, int idx) {
    RVector p(g.dimension());
    if (g.dimension() == 1) p[0] = g.coordinate(idx);
    else p << g.coordinate(idx / n), g.coordinate(idx % n);
    return p;
  };
  for (int i = 0; i < grid.size(); ++i) {
    half[i] = potential ? std::polar(1.0, -0.5 * dt * potential(point(grid, i))) : Complex(1.0);
    kin[i] = std::polar(1.0, -dt * kinetic(point(dg, i)));
  }
  LinearMap map = [half, kin, steps](const SampledFunction& f) {
    SampledFunction u = f;
    for (int s = 0; s < steps; ++s) {
      u.values() = u.values().cwiseProduct(half);
      SampledFunction spec = fourierTransform(u);
      spec.values() = spec.values().cwiseProduct(kin);
      u = inverseFourierTransform(spec);
      u.values() = u.values().cwiseProduct(half);
    }
    return u;
  };
  return Propagator(grid, t, Realization::SplitStepProgram, "split-step", std::move(map));
}

std::vector<double> DysonState::termNorms() const {
  std::vector<double> out;
  for (const auto& b : terms) out.push_back(operatorNorm2(b));
  return out;
}

namespace {

HamiltonianSpec principalOnly(const HamiltonianSpec& spec) {
  HamiltonianSpec p = spec;
  p.a0.reset();
  return p;
}

WeylOperator quantizePrincipal(const HamiltonianSpec& spec, const Grid& grid) {
  spec.validate();
  if (spec.d != 1 || grid.dimension() != 1) throw InvalidArgument("Dyson expansion is 1-d only");
  if (!spec.a0) throw InvalidArgument("Dyson expansion needs a perturbation a0");
  return weylQuantize(principalOnly(spec).principal(), grid);
}

}  // namespace

DysonSolver::DysonSolver(const HamiltonianSpec& spec, const Grid& grid)
    : grid_(grid),
      a0_(weylQuantize(spec.a0 ? *spec.a0 : PhaseSymbol::zero(), grid)),
      group_(quantizePrincipal(spec, grid)) {
  a0Eigen_ = group_.eigenvectors().adjoint() * a0_.matrix() * group_.eigenvectors();
}

CMatrix DysonSolver::toGrid(const CMatrix& eig) const {
  return group_.eigenvectors() * eig * group_.eigenvectors().adjoint();
}

CMatrix DysonSolver::sigma(double t) const {
  const RVector& lam = group_.eigenvalues();
  const Eigen::Index n = lam.size();
  CMatrix s(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index j = 0; j < n; ++j) s(j, k) = std::polar(1.0, t * (lam[j] - lam[k])) * a0Eigen_(j, k);
  return toGrid(s);
}

// B_k(t) = int_0^t sigma_s B_{k-1}(s) ds, trapezoid on a shared grid, eigenbasis of U1.
std::vector<CMatrix> DysonSolver::recursion(double t, int order, int quadSteps) const {
  const RVector& lam = group_.eigenvalues();
  const Eigen::Index n = lam.size();
  const double dt = t / quadSteps;
  std::vector<CMatrix> B(order + 1, CMatrix::Zero(n, n));
  std::vector<CMatrix> prevP(order + 1, CMatrix::Zero(n, n));
  B[0] = CMatrix::Identity(n, n);
  if (order >= 1) prevP[1] = a0Eigen_;
  CMatrix sig(n, n), P(n, n);
  for (int i = 1; i <= quadSteps; ++i) {
    const double s = i * dt;
    for (Eigen::Index k = 0; k < n; ++k)
      for (Eigen::Index j = 0; j < n; ++j) sig(j, k) = std::polar(1.0, s * (lam[j] - lam[k])) * a0Eigen_(j, k);
    for (int k = 1; k <= order; ++k) {
      if (k == 1) P = sig;
      else P.noalias() = sig * B[k - 1];
      B[k] += (0.5 * dt) * (prevP[k] + P);
      prevP[k] = P;
    }
  }
  B.erase(B.begin());
  return B;
}

DysonState DysonSolver::expand(double t, int order, int quadSteps) const {
  if (order < 0) throw InvalidArgument("Dyson order must be >= 0");
  if (order > 0 && quadSteps < 4 * order) throw InvalidArgument("quadSteps must be >= 4k");
  const Eigen::Index n = group_.eigenvalues().size();
  DysonState st;
  st.t = t;
  st.order = order;
  st.quadSteps = quadSteps;
  CMatrix sum = CMatrix::Identity(n, n);
  if (order > 0) {
    std::vector<CMatrix> eig = recursion(t, order, quadSteps);
    if (quadSteps % 2 == 0 && quadSteps / 2 >= 4 * order) {
      std::vector<CMatrix> coarse = recursion(t, order, quadSteps / 2);
      for (int k = 0; k < order; ++k) {
        st.refinementDifference =
            std::max(st.refinementDifference, operatorNorm2(coarse[k] - eig[k]));
        // the nested trapezoid error expands in even powers of the step
        eig[k] = (4.0 * eig[k] - coarse[k]) / 3.0;
      }
      if (st.refinementDifference > 1e-3)
        spdlog::warn("Dyson quadrature: successive refinements differ by {:.3e}",
                     st.refinementDifference);
    }
    Complex c = 1.0;
    for (int k = 0; k < order; ++k) {
      c *= Complex(0.0, -1.0);
      sum += c * eig[k];
      st.terms.push_back(toGrid(eig[k]));
    }
  }
  st.partialSum = toGrid(sum);
  return st;
}

Propagator DysonSolver::propagator(double t, int order, int quadSteps) const {
  const DysonState st = expand(t, order, quadSteps);
  CMatrix U = group_.matrixAt(t) * st.partialSum;
  return Propagator(grid_, t, Realization::DenseMatrix, "dyson", std::move(U));
}

CMatrix dysonSigma(const HamiltonianSpec& spec, double t, const Grid& grid) {
  return DysonSolver(spec, grid).sigma(t);
}

CMatrix dysonTerm(const HamiltonianSpec& spec, double t, int k, int quadSteps, const Grid& grid) {
  if (k < 1) throw InvalidArgument("Dyson term index must be >= 1");
  return DysonSolver(spec, grid).expand(t, k, quadSteps).terms.back();
}

Propagator dysonPropagator(const HamiltonianSpec& spec, double t, int order, int quadSteps,
                           const Grid& grid) {
  return DysonSolver(spec, grid).propagator(t, order, quadSteps);
}

}  // namespace phaselab
