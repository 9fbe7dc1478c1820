#include "phaselab/microlocal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phaselab/fourier.hpp"
#include "phaselab/io.hpp"

namespace phaselab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double angleBetween(const RVector& a, const RVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return kPi;
  return std::acos(std::clamp(a.dot(b) / (na * nb), -1.0, 1.0));
}

double smoothBase(double v) { return v <= 0.0 ? 0.0 : std::exp(-1.0 / v); }

// 0 on (-inf, 0], 1 on [1, inf)
double transitionFn(double v) {
  const double a = smoothBase(v);
  const double b = smoothBase(1.0 - v);
  return a / (a + b);
}

std::string describeDirection(const RVector& v) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")";
  return os.str();
}

}  // namespace

ConicSector::ConicSector(RVector direction, double halfAngle, double innerRadius)
    : dir_(std::move(direction)), alpha_(halfAngle), r0_(innerRadius) {
  const double n = dir_.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("sector direction must be nonzero");
  if (dir_.size() % 2 != 0) throw InvalidArgument("sector direction must live in R^{2d}");
  dir_ /= n;
  // alpha = pi/2 admitted for half-spaces
  if (!(alpha_ > 0.0 && alpha_ <= kPi / 2)) throw InvalidArgument("sector half-angle out of (0, pi/2]");
  if (!(r0_ >= 1.0)) throw InvalidArgument("sector inner radius must be >= 1");
}

double ConicSector::angleTo(const RVector& z) const { return angleBetween(dir_, z); }

bool ConicSector::contains(const RVector& z) const {
  return z.norm() >= r0_ && angleTo(z) <= alpha_;
}

ConeProfile coneDecay(const SampledFunction& f, const Window& g, const ConicSector& sector,
                      const std::vector<double>& radii, double latticeStep,
                      double shellHalfWidth) {
  const Grid& grid = f.grid();
  if (grid.dimension() != 1) throw InvalidArgument("coneDecay runs in d=1");
  if (sector.direction().size() != 2) throw InvalidArgument("sector dimension mismatch");
  if (radii.size() < 2) throw InvalidArgument("coneDecay needs at least two radii");
  if (!(latticeStep > 0.0) || !(shellHalfWidth > 0.0)) throw InvalidArgument("bad lattice step");
  const double rMax = *std::max_element(radii.begin(), radii.end()) + shellHalfWidth;
  const PhaseLattice lat = PhaseLattice::symmetric(1, latticeStep, latticeStep, rMax, rMax);
  lat.validate(grid);
  const PhaseArray V = stft(f, g, lat);

  ConeProfile out;
  out.radii = radii;
  out.sup.assign(radii.size(), 0.0);
  std::vector<int> hits(radii.size(), 0);
  RVector z(2);
  for (int ix = 0; ix < lat.xCount(); ++ix) {
    for (int ik = 0; ik < lat.xiCount(); ++ik) {
      z << lat.xAxis()[ix], lat.xiAxis()[ik];
      if (sector.angleTo(z) > sector.halfAngle()) continue;
      const double r = z.norm();
      for (std::size_t j = 0; j < radii.size(); ++j) {
        if (std::abs(r - radii[j]) > shellHalfWidth || r < sector.innerRadius()) continue;
        out.sup[j] = std::max(out.sup[j], std::abs(V.values(ix, ik)));
        ++hits[j];
      }
    }
  }
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < radii.size(); ++j) {
    if (hits[j] == 0) {
      throw InvalidArgument("sector has no lattice points at radius " + formatNumber(radii[j]));
    }
    lx.push_back(std::log(radii[j]));
    ly.push_back(std::log(std::max(out.sup[j], 1e-300)));
  }
  out.slope = logLogFit(lx, ly).first;
  return out;
}

std::vector<RVector> slowDecayDirections(const SampledFunction& f, const Window& g,
                                         int sectorCount, double slowThreshold, double rMin,
                                         double rMax) {
  if (sectorCount < 4) throw InvalidArgument("need at least four sectors");
  std::vector<double> radii;
  for (double r = rMin; r <= rMax + 1e-12; r += 0.5) radii.push_back(r);
  const double alpha = std::min(kPi / sectorCount * 1.01, kPi / 2);
  std::vector<RVector> out;
  for (int s = 0; s < sectorCount; ++s) {
    const double th = 2.0 * kPi * s / sectorCount;
    RVector w(2);
    w << std::cos(th), std::sin(th);
    const auto prof = coneDecay(f, g, ConicSector(w, alpha), radii);
    if (prof.slope > slowThreshold) out.push_back(w);
  }
  return out;
}

void writeConeProfilesCsv(std::ostream& os, const std::vector<ConeProfile>& profiles) {
  CsvWriter w(os, {"r", "sup", "sector"});
  for (std::size_t s = 0; s < profiles.size(); ++s) {
    for (std::size_t j = 0; j < profiles[s].radii.size(); ++j) {
      w.cell(profiles[s].radii[j]).cell(profiles[s].sup[j]).cell(static_cast<long long>(s));
      w.endRow();
    }
  }
}

double smoothStep(double u) { return transitionFn((1.0 + u) / 2.0); }

HomogeneousCutoff::HomogeneousCutoff(std::vector<ConicSector> sectors, double epsilon,
                                     double transition)
    : sectors_(std::move(sectors)), eps_(epsilon), tau_(transition) {
  if (!(eps_ > 0.0)) throw InvalidArgument("cutoff smoothing scale must be positive");
  if (!(tau_ > 0.0)) throw InvalidArgument("cutoff transition width must be positive");
  int dim = -1;
  for (const auto& s : sectors_) {
    if (dim >= 0 && s.direction().size() != dim) throw InvalidArgument("mixed sector dimensions");
    dim = static_cast<int>(s.direction().size());
    if (s.halfAngle() <= tau_) throw InvalidArgument("sector narrower than transition width");
  }
  if (dim == 2) {
    // whole circle inside the union of the inner cones
    full_ = true;
    for (int k = 0; k < 3600 && full_; ++k) {
      const double th = 2.0 * kPi * k / 3600;
      RVector w(2);
      w << std::cos(th), std::sin(th);
      full_ = covers(w);
    }
  }
}

double HomogeneousCutoff::operator()(const RVector& z) const {
  if (full_) return 1.0;
  if (sectors_.empty()) return 0.0;
  const double r = z.norm();
  if (r <= 1.0) return 0.0;
  const double radial = transitionFn((r - 1.0) / eps_);
  double miss = 1.0;
  for (const auto& s : sectors_) miss *= 1.0 - smoothStep((s.halfAngle() - s.angleTo(z)) / tau_);
  return radial * (1.0 - miss);
}

double HomogeneousCutoff::operator()(double x, double xi) const {
  RVector z(2);
  z << x, xi;
  return (*this)(z);
}

bool HomogeneousCutoff::covers(const RVector& direction) const {
  for (const auto& s : sectors_) {
    if (s.direction().size() != direction.size()) continue;
    if (s.angleTo(direction) <= s.halfAngle() - tau_) return true;
  }
  return false;
}

PhaseSymbol HomogeneousCutoff::symbol() const {
  if (full_) {
    PhaseSymbol one = PhaseSymbol::constant(1.0);
    one.name = "cutoff[full]";
    return one;
  }
  PhaseSymbol s;
  const HomogeneousCutoff self = *this;
  s.eval = [self](double x, double xi) { return Complex(self(x, xi), 0.0); };
  s.cls = SymbolClass::SmoothTame;
  s.realValued = true;
  s.name = "cutoff[" + std::to_string(sectors_.size()) + " sectors]";
  return s;
}

HomogeneousCutoff buildCutoff(const std::vector<ConicSector>& coveredSectors, double epsilon,
                              double transition) {
  return HomogeneousCutoff(coveredSectors, epsilon, transition);
}

ConeNotCovered::ConeNotCovered(RVector direction)
    : std::invalid_argument("cutoff does not cover direction " + describeDirection(direction)),
      dir_(std::move(direction)) {}

std::vector<RVector> requiredDirections(const SymplecticMatrix& S) {
  if (S.dimension() != 1) throw InvalidArgument("cone hypothesis probed in d=1 only");
  const RMatrix inv = S.inverse().matrix();
  RVector up(2);
  up << 0.0, 1.0;
  RVector a = inv * up;
  a.normalize();
  return {a, RVector(-a)};
}

MicroReport microRestrictionCheck(const LinearMap& A, const SymplecticMatrix& S,
                                  const HomogeneousCutoff& psi, const Cutoff& phi,
                                  const std::vector<SampledFunction>& corpus,
                                  const std::vector<std::string>& labels, double p, int order) {
  if (!(p >= 1.0 && p <= 2.0)) throw InvalidArgument("microRestrictionCheck needs p in [1,2]");
  if (order != 2 && order != 4) throw InvalidArgument("Sobolev order must be 2 or 4");
  if (corpus.empty()) throw InvalidArgument("empty corpus");
  if (labels.size() != corpus.size()) throw InvalidArgument("label count mismatch");
  const double db = detB(S);
  if (std::abs(db) < 1e-3) throw ExceptionalTime(0.0, db);
  for (const auto& dir : requiredDirections(S)) {
    if (!psi.covers(dir)) throw ConeNotCovered(dir);
  }
  const Grid& grid = corpus.front().grid();
  if (grid.dimension() != 1) throw InvalidArgument("microlocal checks run in d=1");

  const bool identity = psi.isIdentity();
  CMatrix cut;
  if (!identity) cut = weylQuantize(psi.symbol(), grid).matrix();

  MicroReport rep;
  rep.p = p;
  rep.order = order;
  rep.detB = db;
  const auto transformedNorm = [&](const SampledFunction& u) {
    return lpNorm(fourierTransform(applyCutoff(A(u), phi)), p);
  };
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const SampledFunction& f = corpus[i];
    MicroRow row;
    row.label = labels[i];
    const SampledFunction pf = identity ? f : SampledFunction(grid, cut * f.values());
    const SampledFunction rest = f - pf;
    row.lhs = transformedNorm(f);
    row.cutoffNorm = lpNorm(pf, p);
    row.sobolevNorm = weightedSobolevNorm(f, order);
    row.cutoffRatio = row.cutoffNorm > 0.0 ? transformedNorm(pf) / row.cutoffNorm : 0.0;
    row.remainderRatio = row.sobolevNorm > 0.0 ? transformedNorm(rest) / row.sobolevNorm : 0.0;
    rep.C = std::max(rep.C, row.cutoffRatio);
    rep.CN = std::max(rep.CN, row.remainderRatio);
    rep.rows.push_back(row);
  }
  rep.holds = true;
  for (auto& row : rep.rows) {
    row.firstTerm = rep.C * row.cutoffNorm;
    row.secondTerm = rep.CN * row.sobolevNorm;
    row.slack = row.firstTerm + row.secondTerm - row.lhs;
    // triangle inequality leaves only rounding as a source of violation
    if (row.slack < -1e-10 * std::max(1.0, row.lhs)) rep.holds = false;
  }
  return rep;
}

void MicroReport::writeCsv(std::ostream& os) const {
  CsvWriter w(os, {"label", "lhs", "cutoff_norm", "sobolev_norm", "cutoff_ratio",
                   "remainder_ratio", "first_term", "second_term", "slack"});
  for (const auto& r : rows) {
    w.cell(r.label).cell(r.lhs).cell(r.cutoffNorm).cell(r.sobolevNorm).cell(r.cutoffRatio);
    w.cell(r.remainderRatio).cell(r.firstTerm).cell(r.secondTerm).cell(r.slack);
    w.endRow();
  }
}

}  // namespace phaselab
