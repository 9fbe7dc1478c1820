#include "phaselab/weyl_quant.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "phaselab/fourier.hpp"

namespace phaselab {

std::string toString(SymbolClass c) {
  switch (c) {
    case SymbolClass::Quadratic: return "quadratic";
    case SymbolClass::SmoothTame: return "smooth-tame";
    case SymbolClass::Sjostrand: return "sjostrand";
    case SymbolClass::Product: return "product";
  }
  return "unknown";
}

CMatrix materialize(const LinearMap& map, const Grid& grid) {
  const int n = grid.size();
  CMatrix m(n, n);
  for (int k = 0; k < n; ++k) {
    SampledFunction e(grid);
    e.values()[k] = 1.0;
    m.col(k) = map(e).values();
  }
  return m;
}

PhaseSymbol PhaseSymbol::constant(Complex c) {
  PhaseSymbol a;
  a.eval = [c](double, double) { return c; };
  a.cls = SymbolClass::Sjostrand;
  a.realValued = c.imag() == 0.0;
  a.name = "constant";
  a.gradient = [](double, double) { return Eigen::Vector2d::Zero().eval(); };
  a.hessian = [](double, double) { return Eigen::Matrix2d::Zero().eval(); };
  return a;
}

PhaseSymbol PhaseSymbol::quadratic(const QuadraticHamiltonian& q) {
  if (q.dimension() != 1) throw InvalidArgument("phase symbols are 1-d");
  const Eigen::Matrix2d Q = q.matrix();
  PhaseSymbol a;
  a.eval = [Q](double x, double xi) {
    return Complex(0.5 * (Q(0, 0) * x * x + 2.0 * Q(0, 1) * x * xi + Q(1, 1) * xi * xi));
  };
  a.cls = SymbolClass::Quadratic;
  a.name = "quadratic";
  a.gradient = [Q](double x, double xi) { return (Q * Eigen::Vector2d(x, xi)).eval(); };
  a.hessian = [Q](double, double) { return Q; };
  return a;
}

PhaseSymbol PhaseSymbol::position() {
  PhaseSymbol a;
  a.eval = [](double x, double) { return Complex(x); };
  a.cls = SymbolClass::Product;
  a.name = "x";
  a.gradient = [](double, double) { return Eigen::Vector2d(1.0, 0.0); };
  a.hessian = [](double, double) { return Eigen::Matrix2d::Zero().eval(); };
  return a;
}

PhaseSymbol PhaseSymbol::momentum() {
  PhaseSymbol a;
  a.eval = [](double, double xi) { return Complex(xi); };
  a.cls = SymbolClass::Product;
  a.name = "xi";
  a.gradient = [](double, double) { return Eigen::Vector2d(0.0, 1.0); };
  a.hessian = [](double, double) { return Eigen::Matrix2d::Zero().eval(); };
  return a;
}

PhaseSymbol PhaseSymbol::sinX() {
  PhaseSymbol a;
  a.eval = [](double x, double) { return Complex(std::sin(x)); };
  a.cls = SymbolClass::SmoothTame;
  a.name = "sin_x";
  a.gradient = [](double x, double) { return Eigen::Vector2d(std::cos(x), 0.0); };
  a.hessian = [](double x, double) {
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    h(0, 0) = -std::sin(x);
    return h;
  };
  return a;
}

PhaseSymbol PhaseSymbol::cosX() {
  PhaseSymbol a;
  a.eval = [](double x, double) { return Complex(std::cos(x)); };
  a.cls = SymbolClass::Sjostrand;
  a.name = "cos_x";
  a.gradient = [](double x, double) { return Eigen::Vector2d(-std::sin(x), 0.0); };
  a.hessian = [](double x, double) {
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    h(0, 0) = -std::cos(x);
    return h;
  };
  return a;
}

PhaseSymbol PhaseSymbol::sinXsinXi() {
  PhaseSymbol a;
  a.eval = [](double x, double xi) { return Complex(std::sin(x) * std::sin(xi)); };
  a.cls = SymbolClass::SmoothTame;
  a.name = "sin_x_sin_xi";
  a.gradient = [](double x, double xi) {
    return Eigen::Vector2d(std::cos(x) * std::sin(xi), std::sin(x) * std::cos(xi));
  };
  a.hessian = [](double x, double xi) {
    Eigen::Matrix2d h;
    h << -std::sin(x) * std::sin(xi), std::cos(x) * std::cos(xi), std::cos(x) * std::cos(xi),
        -std::sin(x) * std::sin(xi);
    return h;
  };
  return a;
}

PhaseSymbol PhaseSymbol::gaussianBump(double amplitude) {
  PhaseSymbol a;
  a.eval = [amplitude](double x, double xi) {
    return Complex(amplitude * std::exp(-0.5 * (x * x + xi * xi)));
  };
  a.cls = SymbolClass::SmoothTame;
  a.name = "bump";
  a.gradient = [amplitude](double x, double xi) {
    const double e = amplitude * std::exp(-0.5 * (x * x + xi * xi));
    return Eigen::Vector2d(-x * e, -xi * e);
  };
  a.hessian = [amplitude](double x, double xi) {
    const double e = amplitude * std::exp(-0.5 * (x * x + xi * xi));
    Eigen::Matrix2d h;
    h << (x * x - 1.0) * e, x * xi * e, x * xi * e, (xi * xi - 1.0) * e;
    return h;
  };
  return a;
}

std::vector<std::string> PhaseSymbol::tags() {
  return {"none", "sin_x", "cos_x", "sin_x_sin_xi", "bump"};
}

PhaseSymbol PhaseSymbol::fromTag(const std::string& tag) {
  if (tag == "none") return zero();
  if (tag == "sin_x") return sinX();
  if (tag == "cos_x") return cosX();
  if (tag == "sin_x_sin_xi") return sinXsinXi();
  if (tag == "bump") return gaussianBump();
  throw InvalidArgument("unknown symbol tag '" + tag + "'");
}

PhaseSymbol operator+(const PhaseSymbol& a, const PhaseSymbol& b) {
  PhaseSymbol c;
  c.eval = [ea = a.eval, eb = b.eval](double x, double xi) { return ea(x, xi) + eb(x, xi); };
  c.cls = a.cls == b.cls ? a.cls : SymbolClass::Product;
  c.realValued = a.realValued && b.realValued;
  c.name = a.name + "+" + b.name;
  if (a.hasDerivatives() && b.hasDerivatives()) {
    c.gradient = [ga = a.gradient, gb = b.gradient](double x, double xi) {
      return (ga(x, xi) + gb(x, xi)).eval();
    };
    c.hessian = [ha = a.hessian, hb = b.hessian](double x, double xi) {
      return (ha(x, xi) + hb(x, xi)).eval();
    };
  }
  return c;
}

PhaseSymbol operator*(Complex s, const PhaseSymbol& a) {
  PhaseSymbol c = a;
  c.eval = [s, ea = a.eval](double x, double xi) { return s * ea(x, xi); };
  c.realValued = a.realValued && s.imag() == 0.0;
  if (a.hasDerivatives() && s.imag() == 0.0) {
    const double r = s.real();
    c.gradient = [r, ga = a.gradient](double x, double xi) { return (r * ga(x, xi)).eval(); };
    c.hessian = [r, ha = a.hessian](double x, double xi) { return (r * ha(x, xi)).eval(); };
  } else {
    c.gradient = nullptr;
    c.hessian = nullptr;
  }
  return c;
}

TameHamiltonian toTameHamiltonian(const QuadraticHamiltonian& q, const PhaseSymbol& perturbation) {
  if (!perturbation.realValued || !perturbation.hasDerivatives())
    throw InvalidArgument("flow perturbation must be real with analytic derivatives");
  return TameHamiltonian::quadraticPlus(
      q, [ev = perturbation.eval](double x, double xi) { return ev(x, xi).real(); },
      perturbation.gradient, perturbation.hessian, "quadratic+" + perturbation.name);
}

WeylOperator::WeylOperator(Grid grid, CMatrix matrix, std::string provenance, bool hermitian)
    : grid_(grid), matrix_(std::move(matrix)), provenance_(std::move(provenance)),
      hermitian_(hermitian) {
  if (grid_.dimension() != 1) throw InvalidArgument("dense Weyl operators are 1-d only");
  if (matrix_.rows() != grid_.size() || matrix_.cols() != grid_.size())
    throw InvalidArgument("Weyl matrix shape does not match grid");
}

double WeylOperator::hermitianDefect() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

SampledFunction WeylOperator::apply(const SampledFunction& f) const {
  if (f.grid() != grid_) throw InvalidArgument("function and operator grids differ");
  return SampledFunction(grid_, matrix_ * f.values());
}

WeylOperator WeylOperator::operator+(const WeylOperator& o) const {
  if (o.grid_ != grid_) throw InvalidArgument("operator grids differ");
  return WeylOperator(grid_, matrix_ + o.matrix_, provenance_ + "+" + o.provenance_,
                      hermitian_ && o.hermitian_);
}

// K[j,k] = (1/2N) sum_m exp(i pi (j-k)(m-N)/N) a(x_mid, xi'_m), xi'_m = (m-N) pi/(2L):
// for fixed s=j+k this is one length-2N backward DFT in m.
WeylOperator weylQuantize(const PhaseSymbol& a, const Grid& grid) {
  if (grid.dimension() != 1)
    throw InvalidArgument("Weyl quantization is dense 1-d only; use split-step for d=2");
  if (!a.eval) throw InvalidArgument("symbol has no evaluator");
  const int n = grid.pointsPerAxis();
  const int m2 = 2 * n;
  const double L = grid.halfExtent();
  const double h = grid.spacing();
  const double dxi = std::numbers::pi / (2.0 * L);
  CMatrix K(n, n);
  const bool real = a.realValued;

#if defined(PHASELAB_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic, 8)
#endif
  for (int s = 0; s <= 2 * n - 2; ++s) {
    CVector col(m2);
    const double mid = -L + 0.5 * s * h;
    for (int m = 0; m < m2; ++m) {
      const Complex v = a.eval(mid, (m - n) * dxi);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::runtime_error("symbol evaluator returned a non-finite value");
      col[m] = real ? Complex(v.real(), 0.0) : v;
    }
    dft1d(col.data(), m2, +1);
    const int jlo = std::max(0, s - (n - 1));
    const int jhi = std::min(s, n - 1);
    for (int j = jlo; j <= jhi; ++j) {
      const int k = s - j;
      if (real && j < k) continue;
      const int diff = j - k;
      const int idx = ((diff % m2) + m2) % m2;
      const double sign = (diff & 1) ? -1.0 : 1.0;
      K(j, k) = sign * col[idx] / static_cast<double>(m2);
    }
  }
  if (real) {
    for (int j = 0; j < n; ++j) {
      K(j, j) = Complex(K(j, j).real(), 0.0);
      for (int k = j + 1; k < n; ++k) K(j, k) = std::conj(K(k, j));
    }
  }
  return WeylOperator(grid, std::move(K), a.name, real);
}

double AtomicMeasure::mass() const {
  double m = 0.0;
  for (const auto& c : weights) m += std::abs(c);
  return m;
}

bool AtomicMeasure::hermitianSymmetric(double tol) const {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < atoms.size() && !found; ++j)
      found = std::abs(atoms[j] + atoms[i]) <= tol && std::abs(weights[j] - std::conj(weights[i])) <= tol;
    if (!found) return false;
  }
  return true;
}

PhaseSymbol ftMeasurePotential(const AtomicMeasure& mu) {
  if (mu.atoms.size() != mu.weights.size())
    throw InvalidArgument("measure atoms and weights differ in count");
  for (std::size_t i = 0; i < mu.atoms.size(); ++i)
    if (!std::isfinite(mu.atoms[i]) || !std::isfinite(std::abs(mu.weights[i])))
      throw InvalidArgument("measure entries must be finite");
  PhaseSymbol a;
  const auto atoms = mu.atoms;
  const auto weights = mu.weights;
  a.eval = [atoms, weights](double x, double) {
    Complex v = 0.0;
    for (std::size_t j = 0; j < atoms.size(); ++j) v += weights[j] * std::polar(1.0, x * atoms[j]);
    return v;
  };
  a.cls = SymbolClass::Sjostrand;
  a.realValued = mu.hermitianSymmetric();
  a.name = "mu[";
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s%.17g:%.17g:%.17g", j ? "," : "", atoms[j],
                  weights[j].real(), weights[j].imag());
    a.name += buf;
  }
  a.name += "]";
  if (a.realValued) {
    a.gradient = [atoms, weights](double x, double) {
      Complex v = 0.0;
      for (std::size_t j = 0; j < atoms.size(); ++j)
        v += Complex(0.0, atoms[j]) * weights[j] * std::polar(1.0, x * atoms[j]);
      return Eigen::Vector2d(v.real(), 0.0);
    };
    a.hessian = [atoms, weights](double x, double) {
      Complex v = 0.0;
      for (std::size_t j = 0; j < atoms.size(); ++j)
        v -= atoms[j] * atoms[j] * weights[j] * std::polar(1.0, x * atoms[j]);
      Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
      h(0, 0) = v.real();
      return h;
    };
  }
  return a;
}

double sjostrandNormEstimate(const PhaseSymbol& a, const SjostrandLattice& lat) {
  if (lat.zetaStride < 1 || !(lat.zStep > 0.0)) throw InvalidArgument("invalid Sjostrand lattice");
  const Grid g2(2, lat.symbolHalfExtent, lat.symbolPoints);
  const Window phi = Window::gaussian(g2, lat.windowWidth);
  const SampledFunction samples =
      sample2d(g2, [&a](double x, double xi) { return a.eval(x, xi); });
  const int kz = static_cast<int>(std::floor(lat.zRadius / lat.zStep + 1e-9));
  const int n = g2.pointsPerAxis();
  Eigen::ArrayXd sup = Eigen::ArrayXd::Zero(g2.size());
  for (int i = -kz; i <= kz; ++i)
    for (int j = -kz; j <= kz; ++j) {
      RVector z(2);
      z << i * lat.zStep, j * lat.zStep;
      SampledFunction shifted = translate(phi.base(), z);
      SampledFunction prod(g2, samples.values().cwiseProduct(shifted.values().conjugate()));
      sup = sup.max(fourierTransform(prod).values().cwiseAbs().array());
    }
  const double dz = lat.zetaStride * g2.dual().spacing();
  double total = 0.0;
  for (int i = 0; i < n; i += lat.zetaStride)
    for (int j = 0; j < n; j += lat.zetaStride) total += sup[i * n + j];
  return total * dz * dz;
}

double gaborOperatorNorm(const LinearMap& A, const Window& g, const GaborNormLattice& lat) {
  const Grid& grid = g.grid();
  if (grid.dimension() != 1) throw InvalidArgument("gaborOperatorNorm is implemented for d=1");
  const double step = lat.step;
  const int kw = static_cast<int>(std::floor(lat.wRadius / step + 1e-9));
  const int kz = static_cast<int>(std::floor(lat.zRadius / step + 1e-9));
  const int ku = kw + kz;
  const int nu = 2 * ku + 1;
  const PhaseLattice wLat = PhaseLattice::symmetric(1, step, step, kw * step, kw * step);
  const StftPlan plan(g, wLat);
  // M[u](w) for every u in the enlarged box
  std::vector<Eigen::ArrayXXd> mags(static_cast<std::size_t>(nu) * nu);
#if defined(PHASELAB_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic)
#endif
  for (int idx = 0; idx < nu * nu; ++idx) {
    const int a = idx / nu - ku;
    const int b = idx % nu - ku;
    SampledFunction packet = phaseShift(g.base(), PhasePoint::of(a * step, b * step), false);
    mags[idx] = plan.values(A(packet)).cwiseAbs().array();
  }
  double total = 0.0;
  for (int p = -kz; p <= kz; ++p)
    for (int q = -kz; q <= kz; ++q) {
      double best = 0.0;
      for (int i = -kw; i <= kw; ++i)
        for (int j = -kw; j <= kw; ++j) {
          const int ui = i + p + ku;
          const int uj = j + q + ku;
          best = std::max(best, mags[ui * nu + uj](i + kw, j + kw));
        }
      total += best;
    }
  return total * step * step;
}

}  // namespace phaselab

namespace phaselab {

double operatorNorm2(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace phaselab
