#include "phaselab/almost_diag.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "phaselab/io.hpp"

namespace phaselab {
namespace {

constexpr double kFloor = 1e-12;

struct LineFit {
  double slope = 0.0, intercept = 0.0, residual = 0.0;
};

LineFit leastSquares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit f;
  const double den = n * sxx - sx * sx;
  f.slope = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  f.intercept = (sy - f.slope * sx) / n;
  for (std::size_t i = 0; i < x.size(); ++i)
    f.residual = std::max(f.residual, std::abs(y[i] - (f.intercept + f.slope * x[i])));
  return f;
}

void flagColumns(GaborMatrix& m, double margin) {
  const int d = m.wLattice.dimension();
  const double xlo = m.wLattice.xAxis().minCoeff() + margin;
  const double xhi = m.wLattice.xAxis().maxCoeff() - margin;
  const double klo = m.wLattice.xiAxis().minCoeff() + margin;
  const double khi = m.wLattice.xiAxis().maxCoeff() - margin;
  m.flagged.assign(m.zPoints.size(), false);
  for (std::size_t i = 0; i < m.zPoints.size(); ++i) {
    const RVector& c = m.flowImages[i];
    bool out = !c.allFinite();
    for (int k = 0; k < d && !out; ++k)
      out = c[k] < xlo || c[k] > xhi || c[d + k] < klo || c[d + k] > khi;
    m.flagged[i] = out;
  }
}

double shellVolume(int dim, double r0, double r1) {
  if (dim == 2) return std::numbers::pi * (r1 * r1 - r0 * r0);
  if (dim == 4) return 0.5 * std::numbers::pi * std::numbers::pi * (std::pow(r1, 4) - std::pow(r0, 4));
  throw InvalidArgument("unsupported phase-space dimension");
}

}  // namespace

FlowMap identityFlow() {
  return [](const RVector& z) { return z; };
}

FlowMap linearFlow(const SymplecticMatrix& S) {
  const RMatrix m = S.matrix();
  return [m](const RVector& z) { return RVector(m * z); };
}

FlowMap translationFlow(const PhasePoint& z0) {
  const RVector shift = z0.stacked();
  return [shift](const RVector& z) { return RVector(z + shift); };
}

FlowMap hamiltonianFlowMap(const TameHamiltonian& a, double s, double t, int steps) {
  return [a, s, t, steps](const RVector& z) {
    return hamiltonianFlow(a, s, t, PhasePoint::fromStacked(z), steps).endpoint.stacked();
  };
}

FlowMap composeFlows(FlowMap outer, FlowMap inner) {
  return [outer = std::move(outer), inner = std::move(inner)](const RVector& z) {
    return outer(inner(z));
  };
}

std::vector<RVector> latticePoints(const PhaseLattice& lat) {
  std::vector<RVector> pts;
  pts.reserve(lat.size());
  for (int ix = 0; ix < lat.xCount(); ++ix)
    for (int ixi = 0; ixi < lat.xiCount(); ++ixi) pts.push_back(lat.point(ix, ixi).stacked());
  return pts;
}

GaborMatrix gaborMatrix(const LinearMap& U, const Window& g, const PhaseLattice& zLat,
                        const PhaseLattice& wLat, const FlowMap& flow, double reliableMargin) {
  zLat.validate(g.grid());
  const StftPlan plan(g, wLat);
  GaborMatrix m{zLat, wLat, CMatrix(wLat.size(), zLat.size()), latticePoints(zLat),
                latticePoints(wLat), {}, {}};
  const int nz = m.zCount();
  const int nxi = wLat.xiCount();
  m.flowImages.resize(nz);
#if defined(PHASELAB_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic)
#endif
  for (int iz = 0; iz < nz; ++iz) {
    SampledFunction packet = phaseShift(g.base(), PhasePoint::fromStacked(m.zPoints[iz]), false);
    const CMatrix v = plan.values(U(packet));
    for (int ix = 0; ix < v.rows(); ++ix)
      for (int ixi = 0; ixi < nxi; ++ixi) m.values(ix * nxi + ixi, iz) = v(ix, ixi);
    m.flowImages[iz] = flow(m.zPoints[iz]);
  }
  flagColumns(m, reliableMargin);
  return m;
}

GaborMatrix recentre(const GaborMatrix& m, const FlowMap& flow, double reliableMargin) {
  GaborMatrix out = m;
  for (std::size_t i = 0; i < out.zPoints.size(); ++i) out.flowImages[i] = flow(out.zPoints[i]);
  flagColumns(out, reliableMargin);
  return out;
}

double DecayEnvelope::l1Norm() const {
  double total = 0.0;
  for (int j = 0; j < binCount(); ++j)
    if (counts[j] > 0) total += sup[j] * shellVolume(phaseDimension, edges[j], edges[j + 1]);
  return total;
}

DecayEnvelope DecayEnvelope::synthetic(const std::vector<double>& edges,
                                       const std::vector<double>& values, int phaseDimension) {
  if (edges.size() != values.size() + 1) throw InvalidArgument("bin edges and values mismatch");
  DecayEnvelope e;
  e.edges = edges;
  e.sup = values;
  e.counts.assign(values.size(), 1);
  e.directional = RMatrix::Zero(static_cast<Eigen::Index>(values.size()), 1);
  e.phaseDimension = phaseDimension;
  return e;
}

DecayEnvelope envelope(const GaborMatrix& m, const EnvelopeBins& bins) {
  if (!(bins.width > 0.0) || !(bins.rMax > bins.width) || bins.sectors < 1)
    throw InvalidArgument("invalid envelope bins");
  if (std::all_of(m.flagged.begin(), m.flagged.end(), [](bool f) { return f; }))
    throw std::runtime_error("every Gabor matrix column is flagged");
  const int nb = static_cast<int>(std::lround(bins.rMax / bins.width));
  const int d = m.zLattice.dimension();
  DecayEnvelope e;
  e.phaseDimension = 2 * d;
  for (int j = 0; j <= nb; ++j) e.edges.push_back(j * bins.width);
  e.sup.assign(nb, 0.0);
  e.counts.assign(nb, 0);
  e.directional = RMatrix::Zero(nb, bins.sectors);
  for (int iz = 0; iz < m.zCount(); ++iz) {
    if (m.flagged[iz]) continue;
    for (int iw = 0; iw < m.wCount(); ++iw) {
      const RVector delta = m.wPoints[iw] - m.flowImages[iz];
      const double r = delta.norm();
      if (r >= bins.rMax) continue;
      const int j = std::min(nb - 1, static_cast<int>(r / bins.width));
      const double v = std::abs(m.values(iw, iz));
      e.sup[j] = std::max(e.sup[j], v);
      ++e.counts[j];
      const double ang = std::atan2(delta[d], delta[0]) + std::numbers::pi;
      const int s = std::min(bins.sectors - 1,
                             static_cast<int>(ang / (2.0 * std::numbers::pi) * bins.sectors));
      e.directional(j, s) = std::max(e.directional(j, s), v);
    }
  }
  return e;
}

DecayFit fitPolynomialDecay(const DecayEnvelope& e, double rMin, double rMaxFit) {
  std::vector<double> x, y;
  for (int j = 0; j < e.binCount(); ++j) {
    const double r = e.center(j);
    if (e.counts[j] == 0 || r < rMin || r > rMaxFit) continue;
    x.push_back(std::log1p(r));
    y.push_back(std::log(std::max(e.sup[j], kFloor)));
  }
  if (x.size() < 4) throw InvalidArgument("decay fit needs at least 4 usable bins");
  const LineFit all = leastSquares(x, y);
  DecayFit fit;
  fit.exponent = -all.slope;
  fit.intercept = all.intercept;
  fit.residual = all.residual;
  fit.binsUsed = static_cast<int>(x.size());
  const std::size_t half = x.size() / 2;
  if (half >= 2 && x.size() - half >= 2) {
    const LineFit lo = leastSquares({x.begin(), x.begin() + half}, {y.begin(), y.begin() + half});
    const LineFit hi = leastSquares({x.begin() + half, x.end()}, {y.begin() + half, y.end()});
    fit.superPolynomial = (-hi.slope) > (-lo.slope) + 1.0;
  }
  return fit;
}

CompositionReport compositionEnvelopeCheck(const GaborMatrix& m1, const GaborMatrix& m2,
                                           const GaborMatrix& product, const EnvelopeBins& bins,
                                           double slack) {
  auto same = [](const PhaseLattice& a, const PhaseLattice& b) {
    return a.dimension() == b.dimension() && a.xAxis().size() == b.xAxis().size() &&
           a.xiAxis().size() == b.xiAxis().size() && a.xAxis().isApprox(b.xAxis()) &&
           a.xiAxis().isApprox(b.xiAxis());
  };
  if (!same(m1.zLattice, m2.zLattice) || !same(m1.wLattice, m2.wLattice) ||
      !same(m1.zLattice, product.zLattice) || !same(m1.wLattice, product.wLattice))
    throw InvalidArgument("composition check needs matching lattices");
  CompositionReport r;
  r.h1 = envelope(m1, bins).l1Norm();
  r.h2 = envelope(m2, bins).l1Norm();
  r.h12 = envelope(product, bins).l1Norm();
  r.bound = r.h1 * r.h2 * (1.0 + slack);
  r.holds = r.h12 <= r.bound;
  return r;
}

CompositionReport compositionEnvelopeCheck(const LinearMap& u1, const LinearMap& u2,
                                           const Window& g, const PhaseLattice& zLat,
                                           const PhaseLattice& wLat, const FlowMap& flow1,
                                           const FlowMap& flow2, const EnvelopeBins& bins,
                                           double slack) {
  const GaborMatrix m1 = gaborMatrix(u1, g, zLat, wLat, flow1);
  const GaborMatrix m2 = gaborMatrix(u2, g, zLat, wLat, flow2);
  const GaborMatrix m12 = gaborMatrix(compose(u1, u2), g, zLat, wLat, composeFlows(flow1, flow2));
  return compositionEnvelopeCheck(m1, m2, m12, bins, slack);
}

void writeEnvelopeCsv(std::ostream& os, const DecayEnvelope& e, const DecayFit& fit) {
  CsvWriter w(os, {"r_lo", "r_hi", "r", "E", "count", "log1p_r", "log_E", "fit_log_E"});
  for (int j = 0; j < e.binCount(); ++j) {
    const double r = e.center(j);
    w.cell(e.edges[j]).cell(e.edges[j + 1]).cell(r).cell(e.sup[j]).cell(static_cast<long long>(e.counts[j]));
    w.cell(std::log1p(r)).cell(std::log(std::max(e.sup[j], kFloor)));
    w.cell(fit.intercept - fit.exponent * std::log1p(r));
    w.endRow();
  }
}

}  // namespace phaselab
