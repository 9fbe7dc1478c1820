#include <cmath>
#include <cstdio>
#include <numbers>

#include "common.hpp"
#include "phaselab/estimates.hpp"
#include "phaselab/fourier.hpp"
#include "phaselab/microlocal.hpp"
#include "phaselab/symplectic_flow.hpp"

namespace lab {

namespace {

double readExponent(const Section& s, const std::string& key, double fallback) {
  if (!s.has(key)) return fallback;
  const YAML::Node n = s.raw(key);
  const std::string txt = n.IsScalar() ? n.Scalar() : "";
  if (txt == "inf" || txt == ".inf" || txt == "infinity") return kInfinity;
  try {
    const double p = n.as<double>();
    checkExponent(p);
    return p;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + s.path() + "." + key + "' must be an exponent in [1, inf]");
  }
}

std::string label(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

std::vector<double> spacedTimes(double lo, double hi, int n) {
  std::vector<double> t;
  for (int k = 0; k < n; ++k) t.push_back(lo + (hi - lo) * k / (n - 1));
  return t;
}

SampledFunction gaussianProbe(const Grid& grid, double width) {
  SampledFunction f = sample1d(grid, [width](double x) { return Complex(std::exp(-x * x / (2 * width * width))); });
  f.values() /= f.l2Norm();
  return f;
}

}  // namespace

void runDispersive(Context& ctx) {
  const Section dc = ctx.cfg.child("dispersive");
  const std::string model = dc.text("model", "free");
  if (model != "free" && model != "harmonic") throw ConfigError("dispersive.model must be free or harmonic");
  const bool free = model == "free";
  const Grid grid = free ? readGrid(ctx.cfg, 1, 40.0, 2048) : readGrid(ctx.cfg, 1, 12.0, 256);
  if (grid.dimension() != 1) throw ConfigError("dispersive runs in d=1");
  const Window g = readWindow(ctx.cfg, grid, free ? 1.5 : 1.0);
  const std::vector<double> times =
      dc.numbers("times", free ? std::vector<double>{0.5, 0.7, 1.0, 1.4, 2.0, 2.8, 4.0}
                               : spacedTimes(0.3, std::numbers::pi - 0.3, 9));
  const double p = readExponent(dc, "p", 1.0);
  const double q = readExponent(dc, "q", kInfinity);
  const double probeWidth = dc.number("probe_width", 0.5);
  const double xiCut = dc.number("xi_cut", 25.0);
  const double step = dc.number("lattice_step", 0.5);
  const bool useCorpus = dc.flag("use_corpus", false);
  if (p > q) throw ConfigError("dispersive needs p <= q");
  if (!(step > 0.0) || !(xiCut > 0.0) || !(probeWidth > 0.0)) throw ConfigError("dispersive: bad lattice settings");

  // full period in x, band limited to |xi| < xiCut
  const PhaseLattice full = PhaseLattice::fullCover(grid, step, step);
  std::vector<double> xi;
  for (int k = 0; k < full.xiAxis().size(); ++k)
    if (std::abs(full.xiAxis()[k]) < xiCut) xi.push_back(full.xiAxis()[k]);
  const PhaseLattice lat(1, full.xAxis(), Eigen::Map<const RVector>(xi.data(), xi.size()));

  std::vector<SampledFunction> fs{gaussianProbe(grid, probeWidth)};
  if (useCorpus) {
    const TestCorpus corpus = readCorpus(ctx.cfg, grid, ctx.seed, 12);
    fs.insert(fs.end(), corpus.functions().begin(), corpus.functions().end());
  }
  std::optional<PropagatorSource> ho;
  if (!free) {
    HamiltonianSpec spec;
    spec.a2 = QuadraticHamiltonian::harmonicOscillator(1);
    ho.emplace(spec, grid, ctx.opt);
  }
  std::ostringstream os;
  CsvWriter w(os, {"t", "ratio", "scaled"});
  std::vector<double> lt, lr, scaled;
  for (double t : times) {
    const LinearMap U = free ? freePropagator(t, grid).asMap() : denseMap(ho->matrixAt(t));
    double r = 0.0;
    for (const auto& f : fs) r = std::max(r, dispersiveRatio(U, f, p, q, g, lat));
    const double s = free ? r * std::abs(t) : r * std::abs(std::sin(t));
    lt.push_back(std::log(std::abs(t)));
    lr.push_back(std::log(r));
    scaled.push_back(s);
    w.cell(t).cell(r).cell(s);
    w.endRow();
  }
  ctx.file("dispersive.csv", os.str());
  const auto [slope, intercept] = logLogFit(lt, lr);
  ctx.metric("log_slope", slope);
  ctx.metric("scaled_spread", *std::max_element(scaled.begin(), scaled.end()) /
                                  *std::min_element(scaled.begin(), scaled.end()));
  if (ctx.opt.emitPlotData) {
    ctx.file("dispersive_plot.csv", csvText([&](std::ostream& o) {
               CsvWriter pw(o, {"log_t", "log_ratio", "fit"});
               for (std::size_t i = 0; i < lt.size(); ++i) {
                 pw.cell(lt[i]).cell(lr[i]).cell(intercept + slope * lt[i]);
                 pw.endRow();
               }
             }));
  }
}

void runRestriction(Context& ctx) {
  const Grid grid = readGrid(ctx.cfg, 2, 16.0, 256);
  if (grid.dimension() != 2) throw ConfigError("restriction runs the circle check in d=2");
  const Section rc = ctx.cfg.child("restriction");
  const double t = rc.number("time", 1.0);
  const int points = rc.integer("points", 256);
  const double radius = rc.number("radius", 2.0);
  const double p = readExponent(rc, "p", 1.2);
  const double q = readExponent(rc, "q", 2.0);
  const double ringP = readExponent(rc, "ring_p", 1.9);
  const std::vector<double> widths = rc.numbers("ring_widths", {1.0, 0.7, 0.5, 0.35, 0.25});
  const int half = rc.integer("corpus_half", 10);
  const TestCorpus corpus = readCorpus(ctx.cfg, grid, ctx.seed, 12);
  if (half < 1 || 2 * half > corpus.size())
    throw ConfigError("restriction.corpus_half must be >= 1 with 2 x half <= corpus size");
  if (widths.size() < 2) throw ConfigError("restriction.ring_widths needs at least two widths");
  RestrictionMeasure nu;
  try {
    nu = RestrictionMeasure::circle(points, radius);
    nu.validate(grid);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("restriction measure: ") + e.what());
  }
  const LinearMap U = freePropagator(t, grid).asMap();
  const LinearMap back = freePropagator(-t, grid).asMap();

  std::ostringstream os;
  CsvWriter w(os, {"family", "label", "p", "ratio"});
  double maxHalf = 0.0, maxFull = 0.0;
  for (int i = 0; i < 2 * half; ++i) {
    const double r = measureRestrictionRatio(U, corpus[i], nu, p, q);
    if (i < half) maxHalf = std::max(maxHalf, r);
    maxFull = std::max(maxFull, r);
    w.cell("corpus").cell(corpus.name(i)).cell(p).cell(r);
    w.endRow();
  }
  // f_delta = U(-t) of a thin ring, so U(t) f_delta concentrates on the circle
  std::vector<double> ringRatios;
  for (double d : widths) {
    const SampledFunction ring = sample2d(grid, [radius, d](double x, double y) {
      const double r = std::hypot(x, y) - radius;
      return Complex(std::exp(-r * r / (2 * d * d)));
    });
    SampledFunction f = back(ring);
    f.values() /= f.l2Norm();
    const double rr = measureRestrictionRatio(U, f, nu, ringP, q);
    const double rs = measureRestrictionRatio(U, f, nu, p, q);
    ringRatios.push_back(rr);
    w.cell("ring").cell("width=" + label(d)).cell(ringP).cell(rr);
    w.endRow();
    w.cell("ring").cell("width=" + label(d)).cell(p).cell(rs);
    w.endRow();
  }
  ctx.file("restriction.csv", os.str());
  ctx.metric("corpus_max_half", maxHalf);
  ctx.metric("corpus_max_full", maxFull);
  ctx.metric("corpus_doubling_ratio", maxFull / maxHalf);
  double minGrowth = kInfinity;
  for (std::size_t i = 1; i < ringRatios.size(); ++i)
    minGrowth = std::min(minGrowth, ringRatios[i] / ringRatios[i - 1]);
  ctx.metric("ring_min_growth", minGrowth);
  ctx.metric("ring_last_growth", ringRatios.back() / ringRatios[ringRatios.size() - 2]);
  ctx.metric("ring_total_growth", ringRatios.back() / ringRatios.front());
}

void runBlowup(Context& ctx) {
  const Grid grid = readGrid(ctx.cfg, 1, 12.0, 256);
  const HamiltonianSpec spec = readHamiltonian(ctx.cfg, {"harmonic", "none", "none"});
  const TestCorpus corpus = readCorpus(ctx.cfg, grid, ctx.seed, 12);
  const Section bc = ctx.cfg.child("blowup");
  const std::vector<double> ps = bc.numbers("ps", {1.0, 1.2, 2.0});
  const std::vector<double> times =
      bc.numbers("times", spacedTimes(0.3, std::numbers::pi - 0.3, 9));
  const double width = bc.number("cutoff_width", 2.0);
  const std::string est = bc.text("estimator", "det_b");
  if (est != "det_b" && est != "lower_bound") throw ConfigError("blowup.estimator must be det_b or lower_bound");
  if (!(width > 0.0)) throw ConfigError("blowup.cutoff_width must be positive");
  for (double p : ps)
    if (!(p >= 1.0 && p <= 2.0)) throw ConfigError("blowup.ps entries must lie in [1, 2]");

  std::ostringstream os, plot;
  CsvWriter w(os, {"p", "t", "detB", "ratio", "bound"});
  CsvWriter pw(plot, {"p", "log_abs_detB", "log_ratio", "log_bound"});
  for (double p : ps) {
    EstimateReport rep;
    try {
      rep = blowupScan(spec, grid, corpus, gaussianCutoff(width), p, times,
                       est == "det_b" ? BlowupEstimator::DetB : BlowupEstimator::SampledLowerBound);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("blowup: ") + e.what());
    }
    for (const auto& r : rep.rows) {
      w.cell(p).cell(r.t).cell(r.detB).cell(r.ratio).cell(r.bound);
      w.endRow();
      pw.cell(p).cell(std::log(std::abs(r.detB))).cell(std::log(r.ratio)).cell(std::log(r.bound));
      pw.endRow();
    }
    const std::string key = "p" + label(p);
    ctx.metric("fitted_exponent_" + key, rep.fittedExponent);
    ctx.metric("bound_exponent_" + key, rep.boundExponent);
    ctx.metric("fitted_constant_" + key, rep.fittedConstant);
    ctx.metric("scaled_spread_" + key, rep.metrics.at("scaled_spread"));
  }
  ctx.file("blowup.csv", os.str());
  if (ctx.opt.emitPlotData) ctx.file("blowup_plot.csv", plot.str());
}

void runMicrolocal(Context& ctx) {
  const Grid grid = readGrid(ctx.cfg, 1, 16.0, 256);
  if (grid.dimension() != 1) throw ConfigError("microlocal checks run in d=1");
  const HamiltonianSpec spec = readHamiltonian(ctx.cfg, {"harmonic", "none", "none"});
  if (!spec.a2) throw ConfigError("microlocal needs a quadratic part");
  if (spec.a0) throw ConfigError("microlocal takes a2 + a1 only");
  const Window g = readWindow(ctx.cfg, grid, 1.0);
  const TestCorpus corpus = readCorpus(ctx.cfg, grid, ctx.seed, 12);
  const Section mc = ctx.cfg.child("microlocal");
  const double t = mc.number("time", 1.0);
  const double p = readExponent(mc, "p", 1.0);
  const int order = mc.integer("order", 2);
  const double halfAngle = mc.number("half_angle", 0.5);
  const double eps = mc.number("epsilon", 0.5);
  const double transition = mc.number("transition", 0.15);
  const double width = mc.number("cutoff_width", 2.0);
  const bool witness = mc.flag("witness", true);
  const std::vector<double> band = mc.numbers("witness_radii", {10.0, 13.0});
  const double witnessAngle = mc.number("witness_half_angle", 0.2);
  const double witnessStep = mc.number("witness_step", 0.5);
  std::vector<double> radii;
  for (double r = 4.0; r <= 12.0 + 1e-12; r += 0.5) radii.push_back(r);
  radii = mc.numbers("profile_radii", radii);
  if (band.size() != 2 || !(band[0] < band[1])) throw ConfigError("microlocal.witness_radii must be [lo, hi]");

  const SymplecticMatrix S = quadraticFlow(*spec.a2, t);
  if (std::abs(detB(S)) < 1e-3) throw ConfigError("microlocal.time is exceptional (|det B| < 1e-3)");
  HamiltonianSpec principal = spec;
  PropagatorSource source(principal, grid, ctx.opt);
  const LinearMap A = denseMap(source.matrixAt(t));
  const std::vector<RVector> dirs = requiredDirections(S);
  std::vector<ConicSector> sectors;
  std::optional<HomogeneousCutoff> psi;
  try {
    for (const auto& d : dirs) sectors.emplace_back(d, halfAngle);
    psi.emplace(buildCutoff(sectors, eps, transition));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("microlocal cutoff: ") + e.what());
  }

  std::vector<SampledFunction> fs = corpus.functions();
  std::vector<std::string> labels;
  for (int i = 0; i < corpus.size(); ++i) labels.push_back(corpus.name(i));
  std::optional<SampledFunction> wit;
  if (witness) {
    const double reach = band[1] + 1.0;
    const PhaseLattice lat = PhaseLattice::symmetric(1, witnessStep, witnessStep, reach, reach);
    try {
      lat.validate(grid);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("microlocal witness lattice: ") + e.what());
    }
    const ConicSector cone(dirs[0], witnessAngle);
    PhaseArray coeff{lat, CMatrix::Zero(lat.xCount(), lat.xiCount())};
    RVector z(2);
    for (int i = 0; i < lat.xCount(); ++i)
      for (int k = 0; k < lat.xiCount(); ++k) {
        z << lat.xAxis()[i], lat.xiAxis()[k];
        if (cone.contains(z) && z.norm() >= band[0] && z.norm() <= band[1]) coeff.values(i, k) = 1.0;
      }
    SampledFunction f = stftInverse(coeff, g);
    f.values() /= f.l2Norm();
    wit = f;
    fs.push_back(f);
    labels.push_back("witness");
  }
  const MicroReport rep =
      microRestrictionCheck(A, S, *psi, gaussianCutoff(width), fs, labels, p, order);
  ctx.file("microlocal.csv", csvText([&](std::ostream& os) { rep.writeCsv(os); }));
  ctx.metric("C", rep.C);
  ctx.metric("C_N", rep.CN);
  ctx.metric("holds", rep.holds ? 1.0 : 0.0);
  double minSlack = kInfinity;
  for (const auto& r : rep.rows) minSlack = std::min(minSlack, r.slack);
  ctx.metric("min_slack", minSlack);
  if (wit) {
    const MicroRow& r = rep.rows.back();
    ctx.metric("witness_second_over_first", r.secondTerm / r.firstTerm);
    std::vector<ConeProfile> profiles;
    profiles.push_back(coneDecay(*wit, g, ConicSector(dirs[0], halfAngle), radii));
    profiles.push_back(coneDecay(*wit, g, ConicSector(dirs[1], halfAngle), radii));
    profiles.push_back(coneDecay(corpus[0], g, ConicSector(dirs[0], halfAngle), radii));
    ctx.file("microlocal_profiles.csv",
             csvText([&](std::ostream& os) { writeConeProfilesCsv(os, profiles); }));
  }
  ctx.note("microlocal decay statements are slope-threshold proxies on a finite grid");
}

}  // namespace lab
