#include "phaselab/symplectic_flow.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

#include "phaselab/io.hpp"

namespace phaselab {

RMatrix standardSymplectic(int d) {
  RMatrix J = RMatrix::Zero(2 * d, 2 * d);
  J.topRightCorner(d, d) = RMatrix::Identity(d, d);
  J.bottomLeftCorner(d, d) = -RMatrix::Identity(d, d);
  return J;
}

QuadraticHamiltonian::QuadraticHamiltonian(RMatrix Q) : Q_(std::move(Q)) {
  if (Q_.rows() != Q_.cols() || Q_.rows() % 2 != 0 || Q_.rows() == 0)
    throw InvalidArgument("quadratic form must be a square 2d x 2d matrix");
  if ((Q_ - Q_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidArgument("quadratic form must be symmetric");
  if (!Q_.allFinite()) throw InvalidArgument("quadratic form must be finite");
}

QuadraticHamiltonian QuadraticHamiltonian::freeParticle(int d) {
  RMatrix Q = RMatrix::Zero(2 * d, 2 * d);
  Q.bottomRightCorner(d, d) = RMatrix::Identity(d, d);
  return QuadraticHamiltonian(Q);
}

QuadraticHamiltonian QuadraticHamiltonian::harmonicOscillator(int d) {
  return QuadraticHamiltonian(RMatrix::Identity(2 * d, 2 * d));
}

SymplecticMatrix::SymplecticMatrix(RMatrix S) : S_(std::move(S)) {
  if (S_.rows() != S_.cols() || S_.rows() % 2 != 0)
    throw InvalidArgument("symplectic matrix must be 2d x 2d");
  // loose enough for integrated Jacobians
  const double scale = std::max(1.0, S_.cwiseAbs().maxCoeff());
  if (!S_.allFinite() || symplecticDefect() > 1e-6 * scale * scale)
    throw InvalidArgument("matrix is not symplectic");
}

double SymplecticMatrix::symplecticDefect() const {
  const RMatrix J = standardSymplectic(dimension());
  return (S_.transpose() * J * S_ - J).cwiseAbs().maxCoeff();
}

SymplecticMatrix SymplecticMatrix::inverse() const {
  // S^{-1} = -J S^T J
  const RMatrix J = standardSymplectic(dimension());
  return SymplecticMatrix(-J * S_.transpose() * J);
}

TameHamiltonian TameHamiltonian::fromQuadratic(const QuadraticHamiltonian& q) {
  TameHamiltonian a;
  a.d = q.dimension();
  const RMatrix Q = q.matrix();
  a.value = [Q](double, const RVector& z) { return 0.5 * z.dot(Q * z); };
  a.gradient = [Q](double, const RVector& z) { return RVector(Q * z); };
  a.hessian = [Q](double, const RVector&) { return Q; };
  a.derivativeBounds["order2"] = Q.cwiseAbs().maxCoeff();
  a.name = "quadratic";
  return a;
}

TameHamiltonian TameHamiltonian::quadraticPlus(const QuadraticHamiltonian& q,
                                               std::function<double(double, double)> v,
                                               std::function<Eigen::Vector2d(double, double)> grad,
                                               std::function<Eigen::Matrix2d(double, double)> hess,
                                               std::string name) {
  if (q.dimension() != 1) throw InvalidArgument("perturbed Hamiltonians are 1-d only");
  TameHamiltonian a;
  a.d = 1;
  const RMatrix Q = q.matrix();
  a.value = [Q, v](double, const RVector& z) { return 0.5 * z.dot(Q * z) + v(z[0], z[1]); };
  a.gradient = [Q, grad](double, const RVector& z) {
    return RVector(Q * z + grad(z[0], z[1]));
  };
  a.hessian = [Q, hess](double, const RVector& z) { return RMatrix(Q + hess(z[0], z[1])); };
  a.name = std::move(name);
  return a;
}

SymplecticMatrix quadraticFlow(const QuadraticHamiltonian& q, double t) {
  const RMatrix gen = t * standardSymplectic(q.dimension()) * q.matrix();
  return SymplecticMatrix(gen.exp());
}

double detB(const SymplecticMatrix& S) { return S.B().determinant(); }

bool isExceptional(const SymplecticMatrix& S, double threshold) {
  return std::abs(detB(S)) < threshold;
}

FlowResult hamiltonianFlow(const TameHamiltonian& a, double s, double t, const PhasePoint& z0,
                           int stepCount) {
  if (stepCount < 1) throw InvalidArgument("stepCount must be >= 1");
  const int d = a.d;
  if (z0.dimension() != d) throw InvalidArgument("initial point dimension mismatch");
  const RMatrix J = standardSymplectic(d);
  RVector z = z0.stacked();
  RMatrix M = RMatrix::Identity(2 * d, 2 * d);
  const double h = (t - s) / stepCount;

  auto field = [&](double tau, const RVector& y, const RMatrix& Y, RVector& dy, RMatrix& dY) {
    RVector g = a.gradient(tau, y);
    RMatrix H = a.hessian(tau, y);
    if (!g.allFinite() || !H.allFinite())
      throw FlowBreakdown("non-finite Hamiltonian derivative along trajectory", tau, y);
    dy = J * g;
    dY = J * H * Y;
  };

  if (t != s) {
    RVector k1, k2, k3, k4;
    RMatrix K1, K2, K3, K4;
    for (int n = 0; n < stepCount; ++n) {
      const double tau = s + n * h;
      field(tau, z, M, k1, K1);
      field(tau + 0.5 * h, z + 0.5 * h * k1, M + 0.5 * h * K1, k2, K2);
      field(tau + 0.5 * h, z + 0.5 * h * k2, M + 0.5 * h * K2, k3, K3);
      field(tau + h, z + h * k3, M + h * K3, k4, K4);
      z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      M += (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
      if (!z.allFinite() || !M.allFinite())
        throw FlowBreakdown("trajectory left the finite range", tau + h, z);
    }
  }
  FlowResult r;
  r.endpoint = PhasePoint::fromStacked(z);
  r.jacobian = M;
  r.steps = stepCount;
  r.stepSize = h;
  r.volumeDefect = std::abs(M.determinant() - 1.0);
  return r;
}

LowerBoundEstimate lowerBoundC(const TameHamiltonian& a, double t, double s,
                               const std::vector<PhasePoint>& sampleLattice, int stepCount) {
  if (sampleLattice.empty()) throw InvalidArgument("lowerBoundC needs at least one sample");
  LowerBoundEstimate est;
  est.value = kInfinity;
  est.maximum = 0.0;
  for (const auto& z0 : sampleLattice) {
    FlowResult r = hamiltonianFlow(a, s, t, z0, stepCount);
    const double v = std::abs(r.jacobian.topRightCorner(a.d, a.d).determinant());
    if (v < est.value) {
      est.value = v;
      est.argmin = z0;
    }
    est.maximum = std::max(est.maximum, v);
    ++est.samples;
  }
  return est;
}

std::vector<PhasePoint> sampleBox(int d, double radius, int perAxis) {
  if (perAxis < 1) throw InvalidArgument("sampleBox needs at least one node per axis");
  std::vector<double> nodes(perAxis);
  for (int i = 0; i < perAxis; ++i)
    nodes[i] = perAxis == 1 ? 0.0 : -radius + 2.0 * radius * i / (perAxis - 1);
  std::vector<PhasePoint> pts;
  const int dims = 2 * d;
  std::vector<int> idx(dims, 0);
  while (true) {
    RVector z(dims);
    for (int k = 0; k < dims; ++k) z[k] = nodes[idx[k]];
    pts.push_back(PhasePoint::fromStacked(z));
    int k = dims - 1;
    while (k >= 0 && ++idx[k] == perAxis) idx[k--] = 0;
    if (k < 0) break;
  }
  return pts;
}

std::vector<FlowTraceRow> flowTrace(const TameHamiltonian& a, const PhasePoint& z0, double s,
                                    const std::vector<double>& times, int stepsPerUnit) {
  std::vector<FlowTraceRow> rows;
  for (double t : times) {
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t - s) * stepsPerUnit)));
    FlowResult r = hamiltonianFlow(a, s, t, z0, steps);
    const int d = a.d;
    rows.push_back({t, r.endpoint.stacked(), r.jacobian.topLeftCorner(d, d).determinant(),
                    r.jacobian.topRightCorner(d, d).determinant()});
  }
  return rows;
}

void writeFlowTraceCsv(std::ostream& os, const std::vector<FlowTraceRow>& rows) {
  const int dims = rows.empty() ? 2 : static_cast<int>(rows.front().z.size());
  std::vector<std::string> header{"t"};
  for (int k = 0; k < dims / 2; ++k) header.push_back("x" + std::to_string(k));
  for (int k = 0; k < dims / 2; ++k) header.push_back("xi" + std::to_string(k));
  header.push_back("detA");
  header.push_back("detB");
  CsvWriter w(os, header);
  for (const auto& r : rows) {
    w.cell(r.t);
    for (int k = 0; k < dims; ++k) w.cell(r.z[k]);
    w.cell(r.detA).cell(r.detB);
    w.endRow();
  }
}

}  // namespace phaselab
