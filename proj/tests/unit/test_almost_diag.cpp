#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "phaselab/almost_diag.hpp"
#include "phaselab/propagator.hpp"

using namespace phaselab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Desk {
  Grid grid{1, 18.0, 256};
  Window window = Window::gaussian(grid);
  PhaseLattice zLat = PhaseLattice::symmetric(1, 0.5, 0.5, 2.0, 2.0);
  PhaseLattice wLat = PhaseLattice::symmetric(1, 0.5, 0.5, 11.0, 11.0);
};

UnitaryGroup groupFor(const HamiltonianSpec& spec, const Grid& g) {
  return UnitaryGroup(weylQuantize(spec.total(), g));
}

HamiltonianSpec harmonic() {
  HamiltonianSpec s;
  s.a2 = QuadraticHamiltonian::harmonicOscillator(1);
  return s;
}

// <pi(z) g, pi(w) g> by direct quadrature for the unit-width window.
Complex ambiguityOracle(const RVector& z, const RVector& w) {
  const double c2 = 1.0 / (2 * kPi * std::sqrt(kPi));
  const double dy = 1e-3;
  Complex acc = 0.0;
  for (double y = -20.0; y < 20.0; y += dy)
    acc += std::exp(-0.5 * (y - z[0]) * (y - z[0]) - 0.5 * (y - w[0]) * (y - w[0])) *
           std::polar(1.0, y * (z[1] - w[1]));
  return c2 * acc * dy;
}

}  // namespace

TEST(GaborMatrix, IdentityConcentratesOnDiagonal) {
  const Desk s;
  const GaborMatrix m = gaborMatrix(identityMap(), s.window, s.zLat, s.wLat, identityFlow());
  const double bound = 1.0 / (2 * kPi) + 1e-10;
  EXPECT_LE(m.values.cwiseAbs().maxCoeff(), bound);
  const DecayEnvelope e = envelope(m);
  // |<pi(z)g, pi(w)g>| = e^{-r^2/4} / (2 pi); the bin supremum sits at its inner edge,
  // and the 1e-6 level is crossed at r = 2 sqrt(log(1e6 / (2 pi))) ~ 6.9
  const double cross = 2.0 * std::sqrt(std::log(1e6 / (2 * kPi)));
  for (int j = 0; j < e.binCount(); ++j) {
    EXPECT_LE(e.sup[j], std::exp(-e.edges[j] * e.edges[j] / 4) / (2 * kPi) * (1 + 1e-9));
    if (e.edges[j] >= cross) EXPECT_LT(e.sup[j], 1e-6) << "r=" << e.center(j);
  }
  EXPECT_NEAR(e.sup[12], std::exp(-9.0) / (2 * kPi), 1e-12);
  EXPECT_NEAR(e.sup[0], 1.0 / (2 * kPi), 1e-12);
}

TEST(GaborMatrix, EnvelopeMatchesAmbiguityQuadrature) {
  const Desk s;
  const GaborMatrix m = gaborMatrix(identityMap(), s.window, s.zLat, s.wLat, identityFlow());
  const EnvelopeBins bins;
  const DecayEnvelope e = envelope(m, bins);
  for (double radius : {1.0, 2.5, 4.0}) {
    const int j = static_cast<int>(radius / bins.width);
    // the bin supremum sits at the smallest displacement inside the bin
    double best = kInfinity;
    RVector bz, bw;
    for (const auto& z : m.zPoints)
      for (const auto& w : m.wPoints) {
        const double r = (w - z).norm();
        if (r >= e.edges[j] && r < e.edges[j + 1] && r < best) {
          best = r;
          bz = z;
          bw = w;
        }
      }
    ASSERT_TRUE(std::isfinite(best));
    EXPECT_NEAR(e.sup[j], std::abs(ambiguityOracle(bz, bw)), 1e-6 * e.sup[0]) << "r=" << radius;
  }
}

TEST(GaborMatrix, HarmonicQuarterPeriodFollowsRotation) {
  const Desk s;
  const double t = kPi / 2;
  const Propagator U = groupFor(harmonic(), s.grid).at(t);
  const FlowMap rot = linearFlow(quadraticFlow(QuadraticHamiltonian::harmonicOscillator(1), t));
  const GaborMatrix m = gaborMatrix(U.asMap(), s.window, s.zLat, s.wLat, rot);
  const GaborMatrix id = gaborMatrix(identityMap(), s.window, s.zLat, s.wLat, identityFlow());
  const DecayEnvelope e = envelope(m);
  const DecayEnvelope eid = envelope(id);
  for (int j = 0; j < e.binCount(); ++j) {
    EXPECT_NEAR(e.sup[j], eid.sup[j], 1e-8);
    if (e.edges[j] >= 6.0) EXPECT_LE(e.sup[j], 1e-4);
  }
  // recentring at the identity flow must see the mass far from the diagonal
  const DecayEnvelope wrong = envelope(recentre(m, identityFlow()));
  EXPECT_GT(wrong.l1Norm(), 2.0 * e.l1Norm());
}

TEST(GaborMatrix, PhaseShiftFollowsTranslation) {
  const Desk s;
  const PhaseLattice small = PhaseLattice::symmetric(1, 0.5, 0.5, 1.0, 1.0);
  ASSERT_EQ(small.size(), 25);
  const PhasePoint z0 = PhasePoint::of(1.0, -0.5);
  const LinearMap shift = [z0](const SampledFunction& f) { return phaseShift(f, z0, false); };
  const DecayEnvelope e = envelope(gaborMatrix(shift, s.window, small, s.wLat, translationFlow(z0)));
  const DecayEnvelope eid = envelope(gaborMatrix(identityMap(), s.window, small, s.wLat, identityFlow()));
  for (int j = 0; j < e.binCount(); ++j) EXPECT_NEAR(e.sup[j], eid.sup[j], 1e-10);
}

TEST(GaborMatrix, OutOfWindowColumnsAreFlagged) {
  const Desk s;
  const PhasePoint far = PhasePoint::of(15.0, 0.0);
  const GaborMatrix m = gaborMatrix(identityMap(), s.window, s.zLat, s.wLat, translationFlow(far));
  EXPECT_TRUE(std::all_of(m.flagged.begin(), m.flagged.end(), [](bool f) { return f; }));
  EXPECT_THROW(envelope(m), std::runtime_error);
  const GaborMatrix near = recentre(m, identityFlow(), 1.0);
  EXPECT_TRUE(std::none_of(near.flagged.begin(), near.flagged.end(), [](bool f) { return f; }));
}

TEST(Envelope, ZeroAndScaling) {
  const Desk s;
  const LinearMap zero = [](const SampledFunction& f) { return SampledFunction(f.grid()); };
  const DecayEnvelope ez = envelope(gaborMatrix(zero, s.window, s.zLat, s.wLat, identityFlow()));
  for (double v : ez.sup) EXPECT_EQ(v, 0.0);
  const LinearMap cos = weylQuantize(PhaseSymbol::cosX(), s.grid).asMap();
  const Complex c(1.0, -2.0);
  const LinearMap scaled = [&](const SampledFunction& f) { return cos(f) * c; };
  const DecayEnvelope e1 = envelope(gaborMatrix(cos, s.window, s.zLat, s.wLat, identityFlow()));
  const DecayEnvelope e2 = envelope(gaborMatrix(scaled, s.window, s.zLat, s.wLat, identityFlow()));
  for (int j = 0; j < e1.binCount(); ++j) EXPECT_NEAR(e2.sup[j], std::abs(c) * e1.sup[j], 1e-13);
}

TEST(Envelope, RejectsBadBins) {
  const Desk s;
  const GaborMatrix m = gaborMatrix(identityMap(), s.window, s.zLat, s.wLat, identityFlow());
  EXPECT_THROW(envelope(m, EnvelopeBins{0.0, 8.0, 8}), InvalidArgument);
  EXPECT_THROW(envelope(m, EnvelopeBins{0.5, 8.0, 0}), InvalidArgument);
}

TEST(DecayFit, ExactPowerLaw) {
  std::vector<double> edges, vals;
  for (int j = 0; j <= 16; ++j) edges.push_back(0.5 * j);
  for (int j = 0; j < 16; ++j) vals.push_back(std::pow(1.0 + 0.5 * (edges[j] + edges[j + 1]), -3.0));
  const DecayFit f = fitPolynomialDecay(DecayEnvelope::synthetic(edges, vals), 2.0);
  EXPECT_NEAR(f.exponent, 3.0, 1e-6);
  EXPECT_LT(f.residual, 1e-10);
  EXPECT_FALSE(f.superPolynomial);
}

TEST(DecayFit, GaussianIsSuperPolynomial) {
  std::vector<double> edges, vals;
  for (int j = 0; j <= 16; ++j) edges.push_back(0.5 * j);
  for (int j = 0; j < 16; ++j) {
    const double r = 0.5 * (edges[j] + edges[j + 1]);
    vals.push_back(std::exp(-r * r / 8));
  }
  const DecayEnvelope e = DecayEnvelope::synthetic(edges, vals);
  const DecayFit a = fitPolynomialDecay(e, 1.0);
  const DecayFit b = fitPolynomialDecay(e, 3.0);
  const DecayFit c = fitPolynomialDecay(e, 5.0);
  EXPECT_TRUE(a.superPolynomial);
  EXPECT_LT(a.exponent, b.exponent);
  EXPECT_LT(b.exponent, c.exponent);
}

TEST(DecayFit, NoisyPowerLaw) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> noise(0.9, 1.1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> edges, vals;
    for (int j = 0; j <= 16; ++j) edges.push_back(0.5 * j);
    for (int j = 0; j < 16; ++j)
      vals.push_back(noise(rng) * std::pow(1.0 + 0.5 * (edges[j] + edges[j + 1]), -5.0));
    EXPECT_NEAR(fitPolynomialDecay(DecayEnvelope::synthetic(edges, vals), 2.0).exponent, 5.0, 0.3);
  }
}

TEST(DecayFit, NeedsFourBins) {
  const DecayEnvelope e = DecayEnvelope::synthetic({0, 1, 2, 3, 4}, {1, 0.5, 0.2, 0.1});
  EXPECT_THROW(fitPolynomialDecay(e, 1.0), InvalidArgument);
}

TEST(Composition, IdentityFactorKeepsEnvelope) {
  const Desk s;
  const LinearMap cos = weylQuantize(PhaseSymbol::cosX(), s.grid).asMap();
  const CompositionReport r = compositionEnvelopeCheck(cos, identityMap(), s.window, s.zLat, s.wLat,
                                                       identityFlow(), identityFlow());
  EXPECT_NEAR(r.h12, r.h1, 1e-10 * r.h1);
  EXPECT_TRUE(r.holds);
  EXPECT_LE(r.h12, r.bound);
}

TEST(Composition, HarmonicEighthPeriodsCompose) {
  const Desk s;
  const UnitaryGroup group = groupFor(harmonic(), s.grid);
  const QuadraticHamiltonian ho = QuadraticHamiltonian::harmonicOscillator(1);
  const FlowMap quarter = linearFlow(quadraticFlow(ho, kPi / 4));
  const LinearMap u = group.at(kPi / 4).asMap();
  const GaborMatrix m1 = gaborMatrix(u, s.window, s.zLat, s.wLat, quarter);
  const GaborMatrix m12 = gaborMatrix(compose(u, u), s.window, s.zLat, s.wLat, composeFlows(quarter, quarter));
  const GaborMatrix direct = gaborMatrix(group.at(kPi / 2).asMap(), s.window, s.zLat, s.wLat,
                                         linearFlow(quadraticFlow(ho, kPi / 2)));
  EXPECT_LT((m12.values - direct.values).cwiseAbs().maxCoeff(), 1e-10);
  for (int i = 0; i < m12.zCount(); ++i)
    EXPECT_LT((m12.flowImages[i] - direct.flowImages[i]).norm(), 1e-12);
  const CompositionReport r = compositionEnvelopeCheck(m1, m1, m12);
  EXPECT_TRUE(r.holds);
}

TEST(Composition, CosineWithItselfIsSubmultiplicative) {
  const Desk s;
  const LinearMap cos = weylQuantize(PhaseSymbol::cosX(), s.grid).asMap();
  const CompositionReport r = compositionEnvelopeCheck(cos, cos, s.window, s.zLat, s.wLat,
                                                       identityFlow(), identityFlow());
  EXPECT_TRUE(r.holds);
  EXPECT_LE(r.h12, r.h1 * r.h2 * 1.1);
}

TEST(Composition, LatticeMismatchRejected) {
  const Desk s;
  const GaborMatrix a = gaborMatrix(identityMap(), s.window, s.zLat, s.wLat, identityFlow());
  const GaborMatrix b = gaborMatrix(identityMap(), s.window, PhaseLattice::symmetric(1, 0.5, 0.5, 1, 1),
                                    s.wLat, identityFlow());
  EXPECT_THROW(compositionEnvelopeCheck(a, b, a), InvalidArgument);
}

TEST(Signature, TameFlowEnvelopeDecaysPolynomially) {
  const Desk s;
  HamiltonianSpec spec = harmonic();
  spec.a1 = PhaseSymbol::sinX();
  const UnitaryGroup group = groupFor(spec, s.grid);
  const TameHamiltonian flow = spec.principalFlow();
  for (double t : {0.5, 1.0}) {
    const GaborMatrix m = gaborMatrix(group.at(t).asMap(), s.window, s.zLat, s.wLat,
                                      hamiltonianFlowMap(flow, 0.0, t, 200));
    const DecayFit fit = fitPolynomialDecay(envelope(m), 2.0, 8.0);
    EXPECT_GE(fit.exponent, 4.0) << "t=" << t;
    // a straight log-log line cannot follow a faster-than-polynomial envelope
    if (!fit.superPolynomial) EXPECT_LE(fit.residual, 0.5) << "t=" << t;
  }
}

TEST(Signature, SjostrandPerturbationKeepsEnvelopeSummable) {
  const Desk s;
  HamiltonianSpec spec = harmonic();
  spec.a1 = PhaseSymbol::sinX();
  spec.a0 = PhaseSymbol::cosX();
  const UnitaryGroup group = groupFor(spec, s.grid);
  const TameHamiltonian flow = spec.principalFlow();
  double lo = kInfinity, hi = 0.0;
  for (double t : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const GaborMatrix m = gaborMatrix(group.at(t).asMap(), s.window, s.zLat, s.wLat,
                                      hamiltonianFlowMap(flow, 0.0, t, 200));
    const double h = envelope(m).l1Norm();
    EXPECT_TRUE(std::isfinite(h));
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  EXPECT_LE(hi / lo, 3.0);
}

TEST(Signature, WrongFlowInflatesEnvelope) {
  const Desk s;
  HamiltonianSpec spec;
  spec.a2 = QuadraticHamiltonian::freeParticle(1);
  const Propagator U = freePropagator(1.0, s.grid);
  const FlowMap right = linearFlow(quadraticFlow(*spec.a2, 1.0));
  const GaborMatrix m = gaborMatrix(U.asMap(), s.window, s.zLat, s.wLat, right);
  const double good = envelope(m).l1Norm();
  const double bad = envelope(recentre(m, identityFlow())).l1Norm();
  EXPECT_GE(bad / good, 2.0);
}

TEST(Envelope, CsvHasOneRowPerBin) {
  const DecayEnvelope e = DecayEnvelope::synthetic({0, 1, 2, 3, 4, 5}, {1, 0.5, 0.2, 0.1, 0.05});
  std::ostringstream os;
  writeEnvelopeCsv(os, e, fitPolynomialDecay(e, 0.0));
  const std::string text = os.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
  EXPECT_EQ(text.rfind("r_lo,r_hi,r,E", 0), 0u);
}
