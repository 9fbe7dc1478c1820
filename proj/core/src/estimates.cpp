#include "phaselab/estimates.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "phaselab/fourier.hpp"
#include "phaselab/io.hpp"

namespace phaselab {

RestrictionMeasure RestrictionMeasure::circle(int count, double radius) {
  if (count < 1 || !(radius > 0.0)) throw InvalidArgument("circle measure needs M >= 1, R > 0");
  RestrictionMeasure nu;
  nu.points.resize(count, 2);
  for (int m = 0; m < count; ++m) {
    const double th = 2.0 * std::numbers::pi * m / count;
    nu.points(m, 0) = radius * std::cos(th);
    nu.points(m, 1) = radius * std::sin(th);
  }
  nu.weights = RVector::Constant(count, 2.0 * std::numbers::pi * radius / count);
  nu.descriptor = "circle(" + std::to_string(count) + ")";
  return nu;
}

RestrictionMeasure RestrictionMeasure::atomSet(RMatrix points, RVector weights) {
  if (points.rows() != weights.size() || points.rows() == 0)
    throw InvalidArgument("atom set needs one positive weight per point");
  if ((weights.array() <= 0.0).any()) throw InvalidArgument("atom weights must be positive");
  return RestrictionMeasure{std::move(points), std::move(weights), "atomSet"};
}

void RestrictionMeasure::validate(const Grid& grid) const {
  if (points.cols() != grid.dimension()) throw InvalidArgument("measure dimension mismatch");
  if (points.cwiseAbs().maxCoeff() > grid.halfExtent())
    throw InvalidArgument("measure support outside the reliable region");
}

void EstimateReport::writeCsv(std::ostream& os) const {
  CsvWriter w(os, {"label", "t", "detB", "ratio", "bound"});
  for (const auto& r : rows) {
    w.cell(r.label).cell(r.t).cell(r.detB).cell(r.ratio).cell(r.bound);
    w.endRow();
  }
}

void EstimateReport::writePlotCsv(std::ostream& os) const {
  CsvWriter w(os, {"t", "log_abs_detB", "log_ratio", "log_bound"});
  for (const auto& r : rows) {
    w.cell(r.t).cell(std::log(std::abs(r.detB))).cell(std::log(r.ratio)).cell(std::log(r.bound));
    w.endRow();
  }
}

Cutoff gaussianCutoff(double width) {
  if (!(width > 0.0)) throw InvalidArgument("cutoff width must be positive");
  return [width](const RVector& x) { return std::exp(-x.squaredNorm() / (2.0 * width * width)); };
}

Cutoff unitCutoff() {
  return [](const RVector&) { return 1.0; };
}

SampledFunction applyCutoff(const SampledFunction& f, const Cutoff& phi) {
  const Grid& g = f.grid();
  const int n = g.pointsPerAxis();
  SampledFunction out = f;
  RVector x(g.dimension());
  for (int i = 0; i < g.size(); ++i) {
    if (g.dimension() == 1) x[0] = g.coordinate(i);
    else x << g.coordinate(i / n), g.coordinate(i % n);
    out.values()[i] *= phi(x);
  }
  return out;
}

double restrictionRatio(const LinearMap& U, const SampledFunction& f, const Cutoff& phi, double p) {
  if (!(p >= 1.0 && p <= 2.0)) throw InvalidArgument("restriction exponent must lie in [1, 2]");
  const double den = lpNorm(f, p);
  if (!(den > 0.0)) throw InvalidArgument("restriction ratio of a zero function");
  return lpNorm(fourierTransform(applyCutoff(U(f), phi)), p) / den;
}

double dispersiveRatio(const LinearMap& U, const SampledFunction& f, double p, double q,
                       const Window& g, const PhaseLattice& lat) {
  checkExponent(p);
  checkExponent(q);
  if (p > q) throw InvalidArgument("dispersive ratio needs p <= q");
  const StftPlan plan(g, lat);
  const double den = mixedNorm(plan.apply(f), q, p, OuterAxis::Space);
  if (!(den > 0.0)) throw InvalidArgument("dispersive ratio of a zero function");
  return mixedNorm(plan.apply(U(f)), p, q, OuterAxis::Space) / den;
}

double dispersiveRatio(const LinearMap& U, const SampledFunction& f, double p, double q,
                       const Window& g) {
  return dispersiveRatio(U, f, p, q, g, defaultLattice(f.grid()));
}

double measureRestrictionRatio(const LinearMap& U, const SampledFunction& f,
                               const RestrictionMeasure& nu, double p, double q) {
  checkExponent(p);
  checkExponent(q);
  const double den = lpNorm(f, p);
  if (den == 0.0) return 0.0;
  const SampledFunction u = U(f);
  nu.validate(u.grid());
  const Eigen::ArrayXd mag = evaluateInterpolant(u, nu.points).cwiseAbs().array();
  double num;
  if (std::isinf(q)) num = mag.maxCoeff();
  else num = std::pow((nu.weights.array() * mag.pow(q)).sum(), 1.0 / q);
  return num / den;
}

double empiricalOperatorNorm(const LinearMap& map, const Grid& grid, double p, double q,
                             int samples, int ascentSteps, std::uint64_t seed) {
  checkExponent(p);
  checkExponent(q);
  if (samples < 1) throw InvalidArgument("empiricalOperatorNorm needs samples >= 1");
  Rng rng(seed);
  auto ratio = [&](const SampledFunction& f) {
    const double den = lpNorm(f, p);
    return den > 0.0 ? lpNorm(map(f), q) / den : 0.0;
  };
  double best = 0.0;
  SampledFunction bestF(grid);
  for (int s = 0; s < samples; ++s) {
    SampledFunction f(grid);
    for (int i = 0; i < grid.size(); ++i) f.values()[i] = rng.complexNormal();
    f.values() /= lpNorm(f, p);
    const double r = ratio(f);
    if (r > best) {
      best = r;
      bestF = f;
    }
  }
  SampledFunction f = bestF;
  double step = 0.5;
  for (int sweep = 0; sweep < ascentSteps; ++sweep, step *= 0.7) {
    bool improved = false;
    for (int k = 0; k < grid.size(); ++k) {
      const Complex orig = f.values()[k];
      const double scale = f.values().cwiseAbs().maxCoeff();
      const Complex moves[4] = {2.0 * orig, 0.5 * orig, orig + step * scale, orig - step * scale};
      Complex keep = orig;
      for (const Complex& m : moves) {
        f.values()[k] = m;
        const double r = ratio(f);
        if (r > best) {
          best = r;
          keep = m;
          improved = true;
        }
      }
      f.values()[k] = keep;
    }
    f.values() /= lpNorm(f, p);
    if (!improved && step < 1e-6) break;
  }
  return best;
}

std::pair<double, double> logLogFit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) throw InvalidArgument("fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double e = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {e, (sy - e * sx) / n};
}

EstimateReport blowupScan(const HamiltonianSpec& spec, const Grid& grid, const TestCorpus& corpus,
                          const Cutoff& phi, double p, const std::vector<double>& tList,
                          BlowupEstimator estimator) {
  spec.validate();
  if (spec.d != 1 || grid.dimension() != 1) throw InvalidArgument("blowupScan runs in d=1");
  if (!spec.a2) throw InvalidArgument("blowupScan needs a quadratic part");
  const UnitaryGroup group(weylQuantize(spec.total(), grid));
  EstimateReport rep;
  rep.p = p;
  rep.q = p;
  rep.boundExponent = -(2.0 / p - 1.0);
  rep.sampleCount = corpus.size();
  std::vector<double> lx, ly;
  for (double t : tList) {
    const double db = detB(quadraticFlow(*spec.a2, t));
    if (std::abs(db) < 1e-3) {
      spdlog::warn("blowupScan: skipping exceptional time t={} (det B = {:.3e})", t, db);
      continue;
    }
    double x = db;
    if (estimator == BlowupEstimator::SampledLowerBound)
      x = lowerBoundC(spec.principalFlow(), t, 0.0, sampleBox(1, 3.0, 7)).value;
    const Propagator U = group.at(t);
    double best = 0.0;
    for (const auto& f : corpus.functions()) best = std::max(best, restrictionRatio(U.asMap(), f, phi, p));
    rep.rows.push_back({"t", t, x, best, 0.0});
    lx.push_back(std::log(std::abs(x)));
    ly.push_back(std::log(best));
  }
  if (rep.rows.empty()) throw InvalidArgument("every time in the scan is exceptional");
  if (rep.rows.size() >= 2) {
    auto [e, c] = logLogFit(lx, ly);
    rep.fittedExponent = e;
    rep.fittedIntercept = c;
  }
  double lo = kInfinity, hi = 0.0;
  for (const auto& r : rep.rows) {
    const double scaled = r.ratio * std::pow(std::abs(r.detB), -rep.boundExponent);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  rep.fittedConstant = hi;
  for (auto& r : rep.rows) r.bound = hi * std::pow(std::abs(r.detB), rep.boundExponent);
  rep.metrics["scaled_min"] = lo;
  rep.metrics["scaled_max"] = hi;
  rep.metrics["scaled_spread"] = hi / lo;
  return rep;
}

}  // namespace phaselab
