#include "phaselab/phase_space.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <numbers>

#include "phaselab/fourier.hpp"

namespace phaselab {
namespace {

using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double axisStep(const RVector& a) { return a.size() > 1 ? a[1] - a[0] : 1.0; }

// E(m, k) = exp(-i y_k xi_m)
CMatrix analysisExponentials(const RVector& xi, const RVector& y) {
  CMatrix e(xi.size(), y.size());
  for (Eigen::Index k = 0; k < y.size(); ++k)
    for (Eigen::Index m = 0; m < xi.size(); ++m) e(m, k) = std::polar(1.0, -y[k] * xi[m]);
  return e;
}

double powSum(const Eigen::ArrayXd& a, double p, double weight) {
  if (std::isinf(p)) return a.size() ? a.maxCoeff() : 0.0;
  return std::pow(weight * a.pow(p).sum(), 1.0 / p);
}

}  // namespace

PhasePoint::PhasePoint(RVector position, RVector frequency)
    : x(std::move(position)), xi(std::move(frequency)) {
  if (x.size() != xi.size()) throw InvalidArgument("phase point halves differ in dimension");
  if (!x.allFinite() || !xi.allFinite()) throw InvalidArgument("phase point must be finite");
}

PhasePoint PhasePoint::of(double x, double xi) {
  return PhasePoint(RVector::Constant(1, x), RVector::Constant(1, xi));
}

PhasePoint PhasePoint::fromStacked(const RVector& z) {
  const Eigen::Index d = z.size() / 2;
  return PhasePoint(z.head(d), z.tail(d));
}

RVector PhasePoint::stacked() const {
  RVector z(2 * x.size());
  z << x, xi;
  return z;
}

Window::Window(SampledFunction base, bool normalize) : base_(std::move(base)), normalized_(normalize) {
  if (normalize) {
    const double n = base_.l2Norm();
    if (!(n > 0.0)) throw InvalidArgument("cannot normalize a zero window");
    const double target = std::pow(2.0 * std::numbers::pi, -0.5 * base_.grid().dimension());
    base_.values() *= target / n;
  }
}

Window Window::gaussian(const Grid& grid, double width) {
  const double s = 1.0 / (2.0 * width * width);
  if (grid.dimension() == 1)
    return Window(sample1d(grid, [s](double y) { return Complex(std::exp(-s * y * y)); }), true);
  return Window(
      sample2d(grid, [s](double a, double b) { return Complex(std::exp(-s * (a * a + b * b))); }),
      true);
}

PhaseLattice::PhaseLattice(int dimension, RVector xAxis, RVector xiAxis)
    : d_(dimension), xAxis_(std::move(xAxis)), xiAxis_(std::move(xiAxis)) {
  if (d_ != 1 && d_ != 2) throw InvalidArgument("lattice dimension must be 1 or 2");
  if (xAxis_.size() == 0 || xiAxis_.size() == 0) throw InvalidArgument("empty lattice axis");
  dx_ = axisStep(xAxis_);
  dxi_ = axisStep(xiAxis_);
  if (!(dx_ > 0.0) || !(dxi_ > 0.0)) throw InvalidArgument("lattice steps must be positive");
}

PhaseLattice PhaseLattice::fullCover(const Grid& grid, double dx, double dxi) {
  const double L = grid.halfExtent();
  const double band = std::numbers::pi / grid.spacing();
  const int nx = static_cast<int>(std::lround(2.0 * L / dx));
  const int nxi = static_cast<int>(std::floor(2.0 * band / dxi + 1e-9));
  RVector xs(nx), xis(nxi);
  for (int k = 0; k < nx; ++k) xs[k] = -L + k * dx;
  for (int m = 0; m < nxi; ++m) xis[m] = -band + m * dxi;
  return PhaseLattice(grid.dimension(), xs, xis);
}

PhaseLattice PhaseLattice::symmetric(int dimension, double dx, double dxi, double xRadius,
                                     double xiRadius) {
  const int kx = static_cast<int>(std::floor(xRadius / dx + 1e-9));
  const int kxi = static_cast<int>(std::floor(xiRadius / dxi + 1e-9));
  RVector xs(2 * kx + 1), xis(2 * kxi + 1);
  for (int k = -kx; k <= kx; ++k) xs[k + kx] = k * dx;
  for (int k = -kxi; k <= kxi; ++k) xis[k + kxi] = k * dxi;
  return PhaseLattice(dimension, xs, xis);
}

int PhaseLattice::xCount() const {
  const int n = static_cast<int>(xAxis_.size());
  return d_ == 1 ? n : n * n;
}

int PhaseLattice::xiCount() const {
  const int n = static_cast<int>(xiAxis_.size());
  return d_ == 1 ? n : n * n;
}

double PhaseLattice::cellWeight() const { return std::pow(dx_ * dxi_, d_); }

RVector PhaseLattice::xPoint(int ix) const {
  if (d_ == 1) return RVector::Constant(1, xAxis_[ix]);
  const int n = static_cast<int>(xAxis_.size());
  RVector p(2);
  p << xAxis_[ix / n], xAxis_[ix % n];
  return p;
}

RVector PhaseLattice::xiPoint(int ixi) const {
  if (d_ == 1) return RVector::Constant(1, xiAxis_[ixi]);
  const int n = static_cast<int>(xiAxis_.size());
  RVector p(2);
  p << xiAxis_[ixi / n], xiAxis_[ixi % n];
  return p;
}

void PhaseLattice::validate(const Grid& grid) const {
  if (grid.dimension() != d_) throw InvalidArgument("lattice and grid dimensions differ");
  const double L = grid.halfExtent() + 1e-9;
  const double band = std::numbers::pi / grid.spacing() + 1e-9;
  if (xAxis_.cwiseAbs().maxCoeff() > L)
    throw InvalidArgument("lattice exceeds the grid's spatial extent");
  if (xiAxis_.cwiseAbs().maxCoeff() > band)
    throw InvalidArgument("lattice exceeds the grid's frequency extent");
}

bool shiftWraps(const Grid& grid, const PhasePoint& z) {
  return z.x.cwiseAbs().maxCoeff() > 0.5 * grid.halfExtent();
}

SampledFunction translate(const SampledFunction& g, const RVector& x) {
  const Grid& grid = g.grid();
  if (x.size() != grid.dimension()) throw InvalidArgument("shift dimension mismatch");
  if (x.cwiseAbs().maxCoeff() == 0.0) return g;
  SampledFunction spec = fourierTransform(g);
  const Grid& dg = spec.grid();
  const int n = dg.pointsPerAxis();
  CVector& v = spec.values();
  if (grid.dimension() == 1) {
    for (int m = 0; m < n; ++m) v[m] *= std::polar(1.0, -x[0] * dg.coordinate(m));
  } else {
    CVector e0(n), e1(n);
    for (int m = 0; m < n; ++m) {
      e0[m] = std::polar(1.0, -x[0] * dg.coordinate(m));
      e1[m] = std::polar(1.0, -x[1] * dg.coordinate(m));
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v[i * n + j] *= e0[i] * e1[j];
  }
  return inverseFourierTransform(spec);
}

SampledFunction phaseShift(const SampledFunction& g, const PhasePoint& z, bool warnOnWrap) {
  const Grid& grid = g.grid();
  if (z.dimension() != grid.dimension()) throw InvalidArgument("phase point dimension mismatch");
  if (warnOnWrap && shiftWraps(grid, z))
    spdlog::warn("phase-space shift |x| exceeds L/2; periodic wrap may contaminate");
  SampledFunction out = translate(g, z.x);
  const int n = grid.pointsPerAxis();
  CVector& v = out.values();
  if (grid.dimension() == 1) {
    for (int k = 0; k < n; ++k) v[k] *= std::polar(1.0, grid.coordinate(k) * z.xi[0]);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        v[i * n + j] *=
            std::polar(1.0, grid.coordinate(i) * z.xi[0] + grid.coordinate(j) * z.xi[1]);
  }
  return out;
}

StftPlan::StftPlan(const Window& g, const PhaseLattice& lat) : g_(g), lat_(lat) {
  if (!g.normalized()) throw InvalidArgument("stft requires a normalized window");
  lat_.validate(g.grid());
  E_ = analysisExponentials(lat_.xiAxis(), g.grid().axis());
  if (g.grid().dimension() == 1) {
    const int nx = lat_.xCount();
    windows_.resize(g.grid().size(), nx);
    for (int ix = 0; ix < nx; ++ix)
      windows_.col(ix) = translate(g.base(), lat_.xPoint(ix)).values().conjugate();
  }
}

SampledFunction StftPlan::shifted(int ix) const { return translate(g_.base(), lat_.xPoint(ix)); }

CMatrix StftPlan::values(const SampledFunction& f) const {
  const Grid& grid = f.grid();
  if (g_.grid() != grid) throw InvalidArgument("window and function live on different grids");
  const int n = grid.pointsPerAxis();
  const int nx = lat_.xCount();
  const double h = grid.spacing();
  if (grid.dimension() == 1) {
    CMatrix P = windows_.array().colwise() * f.values().array();
    return (h * (E_ * P)).transpose();
  }
  CMatrix out(nx, lat_.xiCount());
  const int nxi = static_cast<int>(lat_.xiAxis().size());
  Eigen::Map<const RowMajor> fm(f.values().data(), n, n);
#if defined(PHASELAB_HAVE_OPENMP)
#pragma omp parallel for schedule(static)
#endif
  for (int ix = 0; ix < nx; ++ix) {
    SampledFunction gx = shifted(ix);
    Eigen::Map<const RowMajor> gm(gx.values().data(), n, n);
    RowMajor p = fm.cwiseProduct(gm.conjugate());
    RowMajor v = (h * h) * (E_ * p * E_.transpose());
    out.row(ix) = Eigen::Map<const CVector>(v.data(), nxi * nxi).transpose();
  }
  return out;
}

SampledFunction StftPlan::adjoint(const CMatrix& F) const {
  const Grid& grid = g_.grid();
  const int n = grid.pointsPerAxis();
  const int nx = lat_.xCount();
  if (F.rows() != nx || F.cols() != lat_.xiCount())
    throw InvalidArgument("phase array shape does not match lattice");
  const CMatrix Eh = E_.adjoint();
  CVector acc = CVector::Zero(grid.size());
  if (grid.dimension() == 1) {
    const CMatrix S = Eh * F.transpose();
    acc = (windows_.conjugate().array() * S.array()).rowwise().sum();
  } else {
    const int nxi = static_cast<int>(lat_.xiAxis().size());
    const CMatrix Ec = E_.conjugate();
    for (int ix = 0; ix < nx; ++ix) {
      RowMajor fm = Eigen::Map<const RowMajor>(F.row(ix).eval().data(), nxi, nxi);
      RowMajor s = Eh * fm * Ec;
      SampledFunction gx = shifted(ix);
      acc += gx.values().cwiseProduct(Eigen::Map<const CVector>(s.data(), n * n));
    }
  }
  return SampledFunction(grid, acc * lat_.cellWeight());
}

PhaseArray stft(const SampledFunction& f, const Window& g, const PhaseLattice& lat) {
  return StftPlan(g, lat).apply(f);
}

SampledFunction stftInverse(const PhaseArray& F, const Window& g) {
  return StftPlan(g, F.lattice).adjoint(F.values);
}

void checkExponent(double p) {
  if (!(p >= 1.0)) throw InvalidArgument("Lebesgue exponent must lie in [1, inf]");
}

double mixedNorm(const PhaseArray& F, double p, double q, OuterAxis outer) {
  checkExponent(p);
  checkExponent(q);
  if (!F.values.allFinite()) throw InvalidArgument("phase array has non-finite entries");
  const PhaseLattice& lat = F.lattice;
  const int d = lat.dimension();
  const double wx = std::pow(lat.dx(), d);
  const double wxi = std::pow(lat.dxi(), d);
  const Eigen::ArrayXXd mag = F.values.cwiseAbs().array();
  if (outer == OuterAxis::Space) {
    Eigen::ArrayXd inner(mag.rows());
    for (Eigen::Index r = 0; r < mag.rows(); ++r) inner[r] = powSum(mag.row(r).transpose(), p, wxi);
    return powSum(inner, q, wx);
  }
  Eigen::ArrayXd inner(mag.cols());
  for (Eigen::Index c = 0; c < mag.cols(); ++c) inner[c] = powSum(mag.col(c), p, wx);
  return powSum(inner, q, wxi);
}

PhaseLattice defaultLattice(const Grid& grid) { return PhaseLattice::fullCover(grid, 0.5, 0.5); }

double wienerAmalgamNorm(const SampledFunction& f, const Window& g, double p, double q,
                         const PhaseLattice& lat) {
  return mixedNorm(stft(f, g, lat), p, q, OuterAxis::Space);
}

double wienerAmalgamNorm(const SampledFunction& f, const Window& g, double p, double q) {
  return wienerAmalgamNorm(f, g, p, q, defaultLattice(f.grid()));
}

double modulationNorm(const SampledFunction& f, const Window& g, double p, double q,
                      const PhaseLattice& lat) {
  return mixedNorm(stft(f, g, lat), p, q, OuterAxis::Frequency);
}

double modulationNorm(const SampledFunction& f, const Window& g, double p, double q) {
  return modulationNorm(f, g, p, q, defaultLattice(f.grid()));
}

double lpNorm(const SampledFunction& f, double p) {
  checkExponent(p);
  return powSum(f.values().cwiseAbs().array(), p, f.grid().cellVolume());
}

double weightedSobolevNorm(const SampledFunction& f, int order) {
  if (order < 0) throw InvalidArgument("Sobolev order must be nonnegative");
  if (order == 0) return lpNorm(f, 2.0);
  const Grid& grid = f.grid();
  const int n = grid.pointsPerAxis();
  auto bracket = [order](double r2) { return std::pow(1.0 + r2, -0.5 * order); };
  SampledFunction u = f;
  if (grid.dimension() == 1) {
    for (int k = 0; k < n; ++k) u.values()[k] *= bracket(std::pow(grid.coordinate(k), 2));
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        u.values()[i * n + j] *=
            bracket(std::pow(grid.coordinate(i), 2) + std::pow(grid.coordinate(j), 2));
  }
  SampledFunction spec = fourierTransform(u);
  const Grid& dg = spec.grid();
  if (grid.dimension() == 1) {
    for (int m = 0; m < n; ++m) spec.values()[m] *= bracket(std::pow(dg.coordinate(m), 2));
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        spec.values()[i * n + j] *=
            bracket(std::pow(dg.coordinate(i), 2) + std::pow(dg.coordinate(j), 2));
  }
  return lpNorm(spec, 2.0) * std::pow(2.0 * std::numbers::pi, -0.5 * grid.dimension());
}

}  // namespace phaselab
