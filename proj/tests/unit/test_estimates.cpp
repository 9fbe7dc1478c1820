#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "phaselab/estimates.hpp"
#include "phaselab/fourier.hpp"
#include "phaselab/symplectic_flow.hpp"

using namespace phaselab;

namespace {

constexpr double kPi = std::numbers::pi;

Grid deskGrid() { return Grid(1, 12.0, 256); }

SampledFunction gaussian(const Grid& g, double width) {
  return sample1d(g, [width](double x) { return Complex(std::exp(-x * x / (2 * width * width))); });
}

// ||exp(-x^2/(2a^2))||_p on the line
double gaussianLp(double a, double p) { return std::pow(a * std::sqrt(2 * kPi / p), 1.0 / p); }

double rmsWidth(const SampledFunction& f) {
  const Grid& g = f.grid();
  double num = 0.0, den = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double w = std::norm(f.values()[i]);
    num += g.coordinate(i) * g.coordinate(i) * w;
    den += w;
  }
  return std::sqrt(num / den);
}

double corpusMaxRestriction(const LinearMap& U, const TestCorpus& corpus, const Cutoff& phi, double p) {
  double best = 0.0;
  for (const auto& f : corpus.functions()) best = std::max(best, restrictionRatio(U, f, phi, p));
  return best;
}

const std::vector<double> kFreeTimes{0.5, 0.7, 1.0, 1.4, 2.0, 2.8, 4.0};

HamiltonianSpec quadraticOnly(const QuadraticHamiltonian& q) {
  HamiltonianSpec s;
  s.a2 = q;
  return s;
}

}  // namespace

TEST(Measure, CircleMassAndPlacement) {
  const RestrictionMeasure nu = RestrictionMeasure::circle(256, 2.0);
  EXPECT_EQ(nu.points.rows(), 256);
  EXPECT_NEAR(nu.totalMass(), 2 * kPi * 2.0, 1e-10);
  for (int m = 0; m < 256; ++m) EXPECT_NEAR(nu.points.row(m).norm(), 2.0, 1e-12);
  EXPECT_NO_THROW(nu.validate(Grid(2, 8.0, 64)));
  EXPECT_THROW(nu.validate(Grid(1, 8.0, 64)), InvalidArgument);
  EXPECT_THROW(RestrictionMeasure::circle(64, 9.0).validate(Grid(2, 8.0, 64)), InvalidArgument);
  EXPECT_THROW(RestrictionMeasure::circle(0, 1.0), InvalidArgument);
}

TEST(Measure, AtomSetRejectsBadWeights) {
  RMatrix pts(2, 1);
  pts << 0.0, 1.0;
  EXPECT_THROW(RestrictionMeasure::atomSet(pts, RVector::Constant(1, 1.0)), InvalidArgument);
  EXPECT_THROW(RestrictionMeasure::atomSet(pts, RVector::Constant(2, 0.0)), InvalidArgument);
  const RestrictionMeasure nu = RestrictionMeasure::atomSet(pts, RVector::Constant(2, 0.25));
  EXPECT_NEAR(nu.totalMass(), 0.5, 1e-15);
}

TEST(Restriction, PlancherelControlAtTwo) {
  // p = 2: ||F(phi U f)||_2 = (2pi)^{d/2} ||phi U f||_2 <= (2pi)^{d/2} sup|phi| ||f||_2
  const Grid g = deskGrid();
  const TestCorpus corpus(g, 1);
  const double width = 2.0;
  for (double t : {0.0, 1.0, 3.0}) {
    const Propagator U = freePropagator(t, g);
    for (const auto& phi : {unitCutoff(), gaussianCutoff(width)})
      EXPECT_LE(corpusMaxRestriction(U.asMap(), corpus, phi, 2.0), std::sqrt(2 * kPi) * 1.02);
  }
  // phi = 1 is exactly Plancherel
  EXPECT_NEAR(restrictionRatio(identityMap(), corpus[3], unitCutoff(), 2.0), std::sqrt(2 * kPi), 1e-10);
}

TEST(Restriction, IdentityOnWideGaussianMatchesClosedForm) {
  // phi f is a Gaussian of width sigma, 1/sigma^2 = 1/s^2 + 1/w^2; its transform is
  // sigma sqrt(2pi) exp(-sigma^2 xi^2 / 2).
  const Grid g = deskGrid();
  const double s = 1.5, w = 2.0;
  const double sigma = 1.0 / std::sqrt(1 / (s * s) + 1 / (w * w));
  const SampledFunction f = gaussian(g, s);
  for (double p : {1.0, 1.2, 1.5, 2.0}) {
    const double expect = sigma * std::sqrt(2 * kPi) * gaussianLp(1.0 / sigma, p) / gaussianLp(s, p);
    EXPECT_NEAR(restrictionRatio(identityMap(), f, gaussianCutoff(w), p) / expect, 1.0, 1e-8) << p;
  }
}

TEST(Restriction, Errors) {
  const Grid g = deskGrid();
  const SampledFunction f = gaussian(g, 1.0);
  EXPECT_THROW(restrictionRatio(identityMap(), SampledFunction(g), unitCutoff(), 1.0), InvalidArgument);
  EXPECT_THROW(restrictionRatio(identityMap(), f, unitCutoff(), 0.5), InvalidArgument);
  EXPECT_THROW(restrictionRatio(identityMap(), f, unitCutoff(), 2.5), InvalidArgument);
  EXPECT_THROW(gaussianCutoff(0.0), InvalidArgument);
}

TEST(Restriction, CutoffHelpers) {
  const Grid g(2, 8.0, 32);
  SampledFunction one(g);
  one.values().setOnes();
  const SampledFunction cut = applyCutoff(one, gaussianCutoff(1.5));
  const int n = g.pointsPerAxis();
  for (int i : {0, 17, 16 * n + 16, g.size() - 1}) {
    const double x = g.coordinate(i / n), y = g.coordinate(i % n);
    EXPECT_NEAR(cut.values()[i].real(), std::exp(-(x * x + y * y) / (2 * 1.5 * 1.5)), 1e-15);
  }
  EXPECT_EQ(applyCutoff(one, unitCutoff()).values(), one.values());
}

// Free particle, p = 1: ratio(t) * t bounded within a factor 2 over t in [0.5, 4]. Fails: the
// corpus maximum decays like t^{-1/2} at large t (stationary phase), spread measured 2.6.
TEST(Restriction, DISABLED_FreeParticleScaledRatioWithinFactorTwo) {
  const Grid g = deskGrid();
  const TestCorpus corpus(g, 1);
  std::vector<double> scaled;
  for (double t : kFreeTimes)
    scaled.push_back(t * corpusMaxRestriction(freePropagator(t, g).asMap(), corpus, gaussianCutoff(2.0), 1.0));
  EXPECT_LE(*std::max_element(scaled.begin(), scaled.end()) / *std::min_element(scaled.begin(), scaled.end()), 2.0);
}

TEST(Restriction, FailsWithoutCutoff) {
  // U(t) f spreads as f concentrates; with phi removed the p = 1 ratio grows at least in
  // proportion to that spatial extent, with phi it saturates.
  const Grid g = deskGrid();
  const Propagator U = freePropagator(1.0, g);
  std::vector<double> extent, bare, cut;
  for (double s : {1.0, 0.35, 0.12}) {
    const SampledFunction f = gaussian(g, s);
    extent.push_back(rmsWidth(U.apply(f)));
    bare.push_back(restrictionRatio(U.asMap(), f, unitCutoff(), 1.0));
    cut.push_back(restrictionRatio(U.asMap(), f, gaussianCutoff(2.0), 1.0));
  }
  for (int k = 1; k < 3; ++k) {
    ASSERT_GE(extent[k] / extent[k - 1], 2.0);
    EXPECT_GE(bare[k] / bare[k - 1], 2.0);
    EXPECT_LT(cut[k] / cut[k - 1], 2.0);
  }
  EXPECT_LT(cut[2] / cut[1], cut[1] / cut[0]);
}

TEST(Dispersive, EqualExponentsTimeUniform) {
  // p = q: exponent 0, so a constant fitted on t <= 2 covers the later times
  const Grid g = deskGrid();
  const TestCorpus corpus(g, 1);
  const Window w = Window::gaussian(g);
  auto corpusMax = [&](double t) {
    const LinearMap U = freePropagator(t, g).asMap();
    double best = 0.0;
    for (const auto& f : corpus.functions()) best = std::max(best, dispersiveRatio(U, f, 1.0, 1.0, w));
    return best;
  };
  double C = 0.0;
  for (double t : {0.5, 0.7, 1.0, 1.4, 2.0}) C = std::max(C, corpusMax(t));
  for (double t : {2.8, 4.0}) EXPECT_LE(corpusMax(t), 1.5 * C) << t;
}

TEST(Dispersive, UnitaryAtTwoTwoIsOne) {
  // W^{2,2} is L^2 up to the Parseval constant, so the ratio is 1 for any unitary
  const Grid g = deskGrid();
  const TestCorpus corpus(g, 2);
  const Window w = Window::gaussian(g);
  const LinearMap U = freePropagator(1.3, g).asMap();
  for (int i = 0; i < corpus.size(); i += 5) EXPECT_NEAR(dispersiveRatio(U, corpus[i], 2, 2, w), 1.0, 1e-10);
}

TEST(Dispersive, HarmonicScaledBySineBounded) {
  const Grid g = deskGrid();
  const Window w = Window::gaussian(g);
  const UnitaryGroup group(weylQuantize(PhaseSymbol::quadratic(QuadraticHamiltonian::harmonicOscillator(1)), g));
  SampledFunction f = gaussian(g, 0.5);
  f.values() /= f.l2Norm();
  std::vector<double> scaled;
  for (int k = 0; k < 9; ++k) {
    const double t = 0.3 + (kPi - 0.6) * k / 8;
    scaled.push_back(dispersiveRatio(group.at(t).asMap(), f, 1.0, kInfinity, w) * std::abs(std::sin(t)));
  }
  EXPECT_LE(*std::max_element(scaled.begin(), scaled.end()) / *std::min_element(scaled.begin(), scaled.end()), 2.0);
}

TEST(Dispersive, ExponentOrderAndZero) {
  const Grid g = deskGrid();
  const Window w = Window::gaussian(g);
  EXPECT_THROW(dispersiveRatio(identityMap(), gaussian(g, 1.0), 2.0, 1.0, w), InvalidArgument);
  EXPECT_THROW(dispersiveRatio(identityMap(), SampledFunction(g), 1.0, 2.0, w), InvalidArgument);
  EXPECT_THROW(dispersiveRatio(identityMap(), gaussian(g, 1.0), 0.5, 2.0, w), InvalidArgument);
}

TEST(MeasureRestriction, FourierAtomBoundedByL1) {
  // |Ff(y)| <= ||f||_1
  const Grid g = deskGrid();
  const TestCorpus corpus(g, 3);
  const LinearMap F = [](const SampledFunction& f) { return fourierTransform(f); };
  for (double y : {0.0, 1.3, -4.0}) {
    RMatrix pt(1, 1);
    pt(0, 0) = y;
    const RestrictionMeasure atom = RestrictionMeasure::atomSet(pt, RVector::Constant(1, 1.0));
    for (const auto& f : corpus.functions())
      EXPECT_LE(measureRestrictionRatio(F, f, atom, 1.0, kInfinity), 1.0 + 1e-6);
  }
  // equality for a nonnegative f at y = 0
  RMatrix origin = RMatrix::Zero(1, 1);
  const RestrictionMeasure atom = RestrictionMeasure::atomSet(origin, RVector::Constant(1, 1.0));
  EXPECT_NEAR(measureRestrictionRatio(F, gaussian(g, 1.0), atom, 1.0, kInfinity), 1.0, 1e-10);
}

TEST(MeasureRestriction, ZeroFunctionAndBadSupport) {
  const Grid g(2, 8.0, 64);
  const RestrictionMeasure nu = RestrictionMeasure::circle(64, 2.0);
  EXPECT_EQ(measureRestrictionRatio(identityMap(), SampledFunction(g), nu, 1.2, 2.0), 0.0);
  const SampledFunction f = sample2d(g, [](double x, double y) { return Complex(std::exp(-(x * x + y * y) / 2)); });
  EXPECT_THROW(measureRestrictionRatio(identityMap(), f, RestrictionMeasure::circle(64, 8.5), 1.2, 2.0),
               InvalidArgument);
}

TEST(MeasureRestriction, GaussianOnCircleClosedForm) {
  // f = exp(-|x|^2/2): ratio = (2pi R)^{1/q} e^{-R^2/2} / ||f||_p
  const Grid g(2, 8.0, 64);
  const double R = 2.0, p = 1.2, q = 2.0;
  const SampledFunction f = sample2d(g, [](double x, double y) { return Complex(std::exp(-(x * x + y * y) / 2)); });
  const double fp = std::pow(2 * kPi / p, 1.0 / p);
  const double expect = std::pow(2 * kPi * R, 1.0 / q) * std::exp(-R * R / 2) / fp;
  EXPECT_NEAR(measureRestrictionRatio(identityMap(), f, RestrictionMeasure::circle(256, R), p, q) / expect, 1.0,
              1e-6);
}

TEST(MeasureRestriction, SteinTomasCircleBounded) {
  const Grid g(2, 8.0, 64);
  const TestCorpus corpus(g, 1);
  const RestrictionMeasure nu = RestrictionMeasure::circle(256, 2.0);
  const LinearMap U = freePropagator(1.0, g).asMap();
  double half = 0.0, full = 0.0;
  for (int i = 0; i < corpus.size(); ++i) {
    const double r = measureRestrictionRatio(U, corpus[i], nu, 6.0 / 5.0, 2.0);
    ASSERT_TRUE(std::isfinite(r));
    if (i < corpus.size() / 2) half = std::max(half, r);
    full = std::max(full, r);
  }
  EXPECT_GT(half, 0.0);
  EXPECT_LE(full / half, 1.25);
}

TEST(MeasureRestriction, ConsistentWithRestrictionRatio) {
  // phi = 1 on supp nu: |Uf(y)| = |F^{-1} F(phi U f)(y)| <= (2pi)^{-d} ||F(phi U f)||_1
  const Grid g(2, 8.0, 64);
  const TestCorpus corpus(g, 2);
  const double R = 2.0, q = 2.0;
  const RestrictionMeasure nu = RestrictionMeasure::circle(256, R);
  const Cutoff plateau = [](const RVector& x) {
    const double r = x.norm();
    if (r <= 2.5) return 1.0;
    if (r >= 4.0) return 0.0;
    const double s = (r - 2.5) / 1.5;
    const double a = std::exp(-1 / s), b = std::exp(-1 / (1 - s));
    return b / (a + b);
  };
  const LinearMap U = freePropagator(1.0, g).asMap();
  const double C = std::pow(nu.totalMass(), 1.0 / q) / std::pow(2 * kPi, 2);
  for (const auto& f : corpus.functions()) {
    const double lhs = measureRestrictionRatio(U, f, nu, 1.0, q);
    EXPECT_LE(lhs, 1.01 * C * restrictionRatio(U, f, plateau, 1.0));
  }
}

TEST(OperatorNorm, ScaledIdentity) {
  const Grid g(1, 6.0, 32);
  const LinearMap twice = [](const SampledFunction& f) { return f * Complex(2.0); };
  const double n = empiricalOperatorNorm(twice, g, 2.0, 2.0, 3, 0, 7);
  EXPECT_GE(n, 2.0 - 1e-6);
  EXPECT_LE(n, 2.0 + 1e-12);
}

TEST(OperatorNorm, FourierPlancherelConstant) {
  const Grid g(1, 6.0, 32);
  const LinearMap F = [](const SampledFunction& f) { return fourierTransform(f); };
  const double n = empiricalOperatorNorm(F, g, 2.0, 2.0, 4, 2, 11);
  EXPECT_GE(n, std::sqrt(2 * kPi) * 0.99);
  EXPECT_LE(n, std::sqrt(2 * kPi) * (1 + 1e-10));
}

TEST(OperatorNorm, DiagonalAscentReachesMaxEntry) {
  const Grid g(1, 6.0, 32);
  RVector diag = RVector::LinSpaced(32, 0.1, 2.0);
  diag[13] = 3.7;
  const LinearMap D = denseMap(diag.cast<Complex>().asDiagonal().toDenseMatrix());
  const double cold = empiricalOperatorNorm(D, g, 2.0, 2.0, 1, 0, 5);
  const double warm = empiricalOperatorNorm(D, g, 2.0, 2.0, 1, 40, 5);
  EXPECT_GE(warm, 3.7 - 1e-6);
  EXPECT_LE(warm, 3.7 + 1e-12);
  EXPECT_LT(cold, warm);
}

TEST(OperatorNorm, DeterministicAndValidated) {
  const Grid g(1, 6.0, 32);
  const LinearMap F = [](const SampledFunction& f) { return fourierTransform(f); };
  EXPECT_EQ(empiricalOperatorNorm(F, g, 1.0, kInfinity, 5, 2, 3), empiricalOperatorNorm(F, g, 1.0, kInfinity, 5, 2, 3));
  EXPECT_THROW(empiricalOperatorNorm(F, g, 2.0, 2.0, 0, 0, 3), InvalidArgument);
  // ||Ff||_inf <= ||f||_1
  EXPECT_LE(empiricalOperatorNorm(F, g, 1.0, kInfinity, 5, 3, 3), 1.0 + 1e-12);
}

TEST(LogLogFit, RecoversLine) {
  const std::vector<double> x{-1.0, 0.0, 0.5, 2.0};
  std::vector<double> y;
  for (double v : x) y.push_back(0.3 - 1.7 * v);
  const auto [e, c] = logLogFit(x, y);
  EXPECT_NEAR(e, -1.7, 1e-12);
  EXPECT_NEAR(c, 0.3, 1e-12);
  EXPECT_THROW(logLogFit({1.0}, {1.0}), InvalidArgument);
}

TEST(Blowup, PlancherelExponentNearZero) {
  const Grid g = deskGrid();
  const TestCorpus corpus(g, 1);
  const EstimateReport rep = blowupScan(quadraticOnly(QuadraticHamiltonian::harmonicOscillator(1)), g, corpus,
                                        gaussianCutoff(2.0), 2.0, {0.3, 0.8, 1.3, 1.8, 2.3, 2.8});
  EXPECT_EQ(rep.boundExponent, 0.0);
  EXPECT_NEAR(rep.fittedExponent, 0.0, 0.1);
  EXPECT_EQ(rep.sampleCount, corpus.size());
  EXPECT_EQ(rep.rows.size(), 6u);
}

TEST(Blowup, HarmonicNearPiNoFasterThanBound) {
  // blow-up as det B -> 0 is at most |det B|^{-1} at p = 1, with 0.2 slack
  const Grid g = deskGrid();
  const TestCorpus corpus(g, 1);
  const EstimateReport rep = blowupScan(quadraticOnly(QuadraticHamiltonian::harmonicOscillator(1)), g, corpus,
                                        gaussianCutoff(2.0), 1.0, {2.6, 2.8, 2.95, 3.05, 3.1});
  EXPECT_EQ(rep.boundExponent, -1.0);
  EXPECT_GE(rep.fittedExponent, rep.boundExponent - 0.2);
  for (const auto& r : rep.rows) EXPECT_LE(r.ratio, r.bound * (1 + 1e-12));
}

// Free particle, p = 1, t in [0.5, 4]: fitted exponent in [-1.2, -0.8]. Fails: measured -0.60,
// the corpus maximum decays like t^{-1/2} for large t.
TEST(Blowup, DISABLED_FreeParticleExponentMatchesDetB) {
  const Grid g = deskGrid();
  const TestCorpus corpus(g, 1);
  const EstimateReport rep =
      blowupScan(quadraticOnly(QuadraticHamiltonian::freeParticle(1)), g, corpus, gaussianCutoff(2.0), 1.0, kFreeTimes);
  EXPECT_GE(rep.fittedExponent, -1.2);
  EXPECT_LE(rep.fittedExponent, -0.8);
}

TEST(Blowup, SkipsExceptionalTimes) {
  const Grid g = deskGrid();
  const TestCorpus corpus = TestCorpus(g, 1).head(4);
  const HamiltonianSpec ho = quadraticOnly(QuadraticHamiltonian::harmonicOscillator(1));
  const EstimateReport rep = blowupScan(ho, g, corpus, gaussianCutoff(2.0), 1.0, {1.0, kPi, 2.0});
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.rows[0].t, 1.0);
  EXPECT_EQ(rep.rows[1].t, 2.0);
  EXPECT_THROW(blowupScan(ho, g, corpus, gaussianCutoff(2.0), 1.0, {kPi, 2 * kPi}), InvalidArgument);
  EXPECT_THROW(blowupScan(HamiltonianSpec{}, g, corpus, gaussianCutoff(2.0), 1.0, {1.0}), InvalidArgument);
}

TEST(Blowup, ReproducibleReport) {
  const Grid g = deskGrid();
  const TestCorpus corpus = TestCorpus(g, 4).head(6);
  const HamiltonianSpec ho = quadraticOnly(QuadraticHamiltonian::harmonicOscillator(1));
  auto text = [&] {
    const EstimateReport rep = blowupScan(ho, g, corpus, gaussianCutoff(2.0), 1.2, {0.5, 1.0, 1.5});
    std::ostringstream a, b;
    rep.writeCsv(a);
    rep.writePlotCsv(b);
    return a.str() + b.str();
  };
  const std::string first = text();
  EXPECT_EQ(first, text());
  EXPECT_NE(first.find("label,t,detB,ratio,bound"), std::string::npos);
}

TEST(Transference, EachLinkBoundedAcrossCorpora) {
  // ||F(phi U f)||_p <= C1 ||phi U f||_{W^{p,p}}
  //                  <= C2 ||phi||_{W^{1,q}} ||U f||_{W^{p,p'}}   (1/q = 1/p - 1/p')
  //                  <= C3 ||f||_p
  const Grid g = deskGrid();
  const Window w = Window::gaussian(g);
  const Cutoff phi = gaussianCutoff(2.0);
  SampledFunction one(g);
  one.values().setOnes();
  const SampledFunction phiSampled = applyCutoff(one, phi);
  const UnitaryGroup group(weylQuantize(PhaseSymbol::quadratic(QuadraticHamiltonian::harmonicOscillator(1)), g));
  const LinearMap U = group.at(1.0).asMap();
  for (double p : {1.0, 1.5}) {
    const double pDual = p == 1.0 ? kInfinity : p / (p - 1);
    const double q = 1.0 / (1.0 / p - 1.0 / pDual);
    const double phiNorm = wienerAmalgamNorm(phiSampled, w, 1.0, q);
    auto links = [&](const SampledFunction& f) {
      const SampledFunction u = U(f);
      const SampledFunction pu = applyCutoff(u, phi);
      const double a = lpNorm(fourierTransform(pu), p);
      const double b = wienerAmalgamNorm(pu, w, p, p);
      const double c = wienerAmalgamNorm(u, w, p, pDual);
      return std::array<double, 3>{a / b, b / (phiNorm * c), c / lpNorm(f, p)};
    };
    std::array<double, 3> C{0, 0, 0};
    const TestCorpus fit(g, 1), check(g, 2);
    for (const auto& f : fit.functions()) {
      const auto r = links(f);
      for (int k = 0; k < 3; ++k) C[k] = std::max(C[k], r[k]);
    }
    for (const auto& f : check.functions()) {
      const auto r = links(f);
      for (int k = 0; k < 3; ++k) EXPECT_LE(r[k], 1.5 * C[k]) << "p=" << p << " link " << k;
      EXPECT_LE(restrictionRatio(U, f, phi, p), 1.5 * 1.5 * 1.5 * C[0] * C[1] * C[2] * phiNorm) << p;
    }
  }
}
