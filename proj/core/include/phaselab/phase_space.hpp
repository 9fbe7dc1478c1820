#pragma once

#include <limits>

#include "phaselab/grid.hpp"

namespace phaselab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PhasePoint {
  RVector x;
  RVector xi;

  PhasePoint() = default;
  PhasePoint(RVector position, RVector frequency);
  static PhasePoint of(double x, double xi);
  static PhasePoint fromStacked(const RVector& z);
  int dimension() const { return static_cast<int>(x.size()); }
  RVector stacked() const;
};

class Window {
 public:
  Window(SampledFunction base, bool normalize);
  // c * exp(-|y|^2 / (2 width^2)), normalized to ||g||_2 = (2pi)^{-d/2}
  static Window gaussian(const Grid& grid, double width = 1.0);

  const SampledFunction& base() const { return base_; }
  const Grid& grid() const { return base_.grid(); }
  bool normalized() const { return normalized_; }

 private:
  SampledFunction base_;
  bool normalized_;
};

// Product lattice of x-positions and xi-positions (same 1-d axis used per coordinate).
// Enumeration is x-major: x index outer, xi index inner; for d=2 a point index is i0*n+i1.
class PhaseLattice {
 public:
  PhaseLattice(int dimension, RVector xAxis, RVector xiAxis);

  // Full period in x and full band in xi.
  static PhaseLattice fullCover(const Grid& grid, double dx, double dxi);
  // Points k*step with |k*step| <= radius.
  static PhaseLattice symmetric(int dimension, double dx, double dxi, double xRadius,
                                double xiRadius);

  int dimension() const { return d_; }
  const RVector& xAxis() const { return xAxis_; }
  const RVector& xiAxis() const { return xiAxis_; }
  double dx() const { return dx_; }
  double dxi() const { return dxi_; }
  int xCount() const;
  int xiCount() const;
  int size() const { return xCount() * xiCount(); }
  double cellWeight() const;
  RVector xPoint(int ix) const;
  RVector xiPoint(int ixi) const;
  PhasePoint point(int ix, int ixi) const { return PhasePoint(xPoint(ix), xiPoint(ixi)); }

  void validate(const Grid& grid) const;

 private:
  int d_;
  RVector xAxis_;
  RVector xiAxis_;
  double dx_;
  double dxi_;
};

// values(ix, ixi) on a PhaseLattice.
struct PhaseArray {
  PhaseLattice lattice;
  CMatrix values;
};

enum class OuterAxis { Space, Frequency };

SampledFunction phaseShift(const SampledFunction& g, const PhasePoint& z, bool warnOnWrap = true);
// Exact band-limited translation g(. - x).
SampledFunction translate(const SampledFunction& g, const RVector& x);
bool shiftWraps(const Grid& grid, const PhasePoint& z);

PhaseArray stft(const SampledFunction& f, const Window& g, const PhaseLattice& lat);
SampledFunction stftInverse(const PhaseArray& F, const Window& g);

double mixedNorm(const PhaseArray& F, double p, double q, OuterAxis outer);
PhaseLattice defaultLattice(const Grid& grid);
double wienerAmalgamNorm(const SampledFunction& f, const Window& g, double p, double q);
double wienerAmalgamNorm(const SampledFunction& f, const Window& g, double p, double q,
                         const PhaseLattice& lat);
double modulationNorm(const SampledFunction& f, const Window& g, double p, double q);
double modulationNorm(const SampledFunction& f, const Window& g, double p, double q,
                      const PhaseLattice& lat);

double lpNorm(const SampledFunction& f, double p);
double weightedSobolevNorm(const SampledFunction& f, int order);

void checkExponent(double p);

}  // namespace phaselab

namespace phaselab {

// Precomputed analysis operator for one (window, lattice) pair. Shifted windows are
// cached in d=1; d=2 recomputes them per slice.
class StftPlan {
 public:
  StftPlan(const Window& g, const PhaseLattice& lat);

  const PhaseLattice& lattice() const { return lat_; }
  const Window& window() const { return g_; }
  // rows: x index, cols: xi index
  CMatrix values(const SampledFunction& f) const;
  PhaseArray apply(const SampledFunction& f) const { return PhaseArray{lat_, values(f)}; }
  SampledFunction adjoint(const CMatrix& F) const;

 private:
  SampledFunction shifted(int ix) const;

  Window g_;
  PhaseLattice lat_;
  CMatrix E_;
  CMatrix windows_;  // d=1: N x nx, conjugated shifted windows
};

}  // namespace phaselab
