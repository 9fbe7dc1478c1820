#include <cmath>

#include "common.hpp"
#include "phaselab/almost_diag.hpp"
#include "phaselab/symplectic_flow.hpp"

namespace lab {

namespace {

double maxCorpusError(const LinearMap& a, const LinearMap& b, const TestCorpus& corpus) {
  double e = 0.0;
  for (const auto& f : corpus.functions()) e = std::max(e, (a(f) - b(f)).l2Norm() / f.l2Norm());
  return e;
}

// Symbol that ignores xi, probed at a few points.
bool positionOnly(const PhaseSymbol& a) {
  for (double x : {-2.3, -0.4, 0.7, 1.9})
    for (double xi : {-1.7, 0.9, 2.6})
      if (std::abs(a(x, xi) - a(x, 0.0)) > 1e-14) return false;
  return true;
}

}  // namespace

void runDyson(Context& ctx) {
  const Grid grid = readGrid(ctx.cfg, 1, 16.0, 192);
  if (grid.dimension() != 1) throw ConfigError("dyson runs in d=1");
  const HamiltonianSpec spec = readHamiltonian(ctx.cfg, {"harmonic", "none", "cos_x"});
  const TestCorpus corpus = readCorpus(ctx.cfg, grid, ctx.seed, 12, 10);
  const Section dc = ctx.cfg.child("dyson");
  const std::vector<std::string> checks = dc.texts("checks", {});
  const std::vector<double> times = dc.numbers("times", {0.5, 1.0});
  const int order = dc.integer("order", 9);
  const int quadSteps = dc.integer("quad_steps", 80);
  const int splitSteps = dc.integer("split_steps", 1000);
  const int oversample = dc.integer("kernel_oversample", 4);
  const double factorialTime = dc.number("factorial_time", 1.0);
  const int factorialOrder = dc.integer("factorial_order", 5);
  for (const auto& c : checks)
    if (c != "oracle" && c != "factorial") throw ConfigError("dyson.checks: unknown check '" + c + "'");
  if (!spec.a0) throw ConfigError("dyson needs a bounded perturbation a0 (or mu)");
  if (order < 1 || factorialOrder < 1) throw ConfigError("dyson orders must be >= 1");
  if (quadSteps < 4 * std::max(order, factorialOrder))
    throw ConfigError("dyson.quad_steps must be at least 4 x order");

  const DysonSolver solver(spec, grid);
  if (wants(checks, "oracle")) {
    PropagatorSource full(spec, grid, ctx.opt);
    std::optional<PropagatorSource> quad;
    if (spec.a2) {
      HamiltonianSpec q;
      q.a2 = spec.a2;
      quad.emplace(q, grid, ctx.opt);
    }
    const bool splittable = spec.a2 && spec.a2->matrix()(0, 1) == 0.0 &&
                            (!spec.a1 || positionOnly(*spec.a1)) && positionOnly(*spec.a0);
    std::ostringstream os;
    CsvWriter w(os, {"method", "t", "max_relative_error"});
    double kernelMax = 0.0, splitMax = 0.0, dysonMax = 0.0;
    for (double t : times) {
      const LinearMap ref = denseMap(full.matrixAt(t));
      if (quad) {
        const LinearMap kernel = quadraticKernelPropagator(*spec.a2, t, grid, oversample).asMap();
        const double e = maxCorpusError(kernel, denseMap(quad->matrixAt(t)), corpus);
        kernelMax = std::max(kernelMax, e);
        w.cell("kernel").cell(t).cell(e);
        w.endRow();
      }
      if (splittable) {
        const double qxx = spec.a2->matrix()(0, 0), qkk = spec.a2->matrix()(1, 1);
        const std::optional<PhaseSymbol> a1 = spec.a1, a0 = spec.a0;
        const auto kinetic = [qkk](const RVector& xi) { return 0.5 * qkk * xi.squaredNorm(); };
        const auto potential = [qxx, a1, a0](const RVector& x) {
          double v = 0.5 * qxx * x.squaredNorm() + a0->eval(x[0], 0.0).real();
          if (a1) v += a1->eval(x[0], 0.0).real();
          return v;
        };
        const LinearMap split = splitStepPropagator(kinetic, potential, t, splitSteps, grid).asMap();
        const double e = maxCorpusError(split, ref, corpus);
        splitMax = std::max(splitMax, e);
        w.cell("split_step").cell(t).cell(e);
        w.endRow();
      }
      const double e = maxCorpusError(solver.propagator(t, order, quadSteps).asMap(), ref, corpus);
      dysonMax = std::max(dysonMax, e);
      w.cell("dyson").cell(t).cell(e);
      w.endRow();
    }
    ctx.file("dyson.csv", os.str());
    if (quad) ctx.metric("kernel_max_error", kernelMax);
    if (splittable) ctx.metric("split_max_error", splitMax);
    else ctx.note("split-step oracle skipped: Hamiltonian is not kinetic + potential");
    ctx.metric("dyson_max_error", dysonMax);
  }

  if (wants(checks, "factorial")) {
    const DysonState st = solver.expand(factorialTime, factorialOrder, quadSteps);
    const std::vector<double> norms = st.termNorms();
    // log(k! |b_k|) = k log C, least squares through the origin
    double sxy = 0.0, sxx = 0.0, fact = 1.0;
    for (int k = 1; k <= factorialOrder; ++k) {
      fact *= k;
      sxy += k * std::log(fact * norms[k - 1]);
      sxx += static_cast<double>(k) * k;
    }
    const double C = std::exp(sxy / sxx);
    std::ostringstream os;
    CsvWriter w(os, {"k", "norm", "bound", "ratio"});
    double worst = 0.0;
    fact = 1.0;
    for (int k = 1; k <= factorialOrder; ++k) {
      fact *= k;
      const double bound = std::pow(C, k) / fact;
      worst = std::max(worst, norms[k - 1] / bound);
      w.cell(k).cell(norms[k - 1]).cell(bound).cell(norms[k - 1] / bound);
      w.endRow();
    }
    ctx.file("dyson_terms.csv", os.str());
    ctx.metric("factorial_constant", C);
    ctx.metric("factorial_max_ratio", worst);
    ctx.metric("quadrature_refinement_difference", st.refinementDifference);
  }
}

void runAlmostDiag(Context& ctx) {
  const Grid grid = readGrid(ctx.cfg, 1, 18.0, 256);
  if (grid.dimension() != 1) throw ConfigError("almostdiag runs in d=1");
  const HamiltonianSpec spec = readHamiltonian(ctx.cfg, {"harmonic", "sin_x", "none"});
  const Window g = readWindow(ctx.cfg, grid, 1.0);
  const Section ac = ctx.cfg.child("almostdiag");
  const std::vector<std::string> checks = ac.texts("checks", {});
  for (const auto& c : checks)
    if (c != "decay" && c != "wrong_flow" && c != "stability" && c != "composition")
      throw ConfigError("almostdiag.checks: unknown check '" + c + "'");
  const double t = ac.number("time", 1.0);
  const double step = ac.number("lattice_step", 0.5);
  const double zRadius = ac.number("z_radius", 3.0);
  const double wRadius = ac.number("w_radius", 12.0);
  const double margin = ac.number("margin", 0.0);
  EnvelopeBins bins;
  bins.width = ac.number("bin_width", 0.5);
  bins.rMax = ac.number("r_max", 8.0);
  bins.sectors = ac.integer("sectors", 8);
  const double fitMin = ac.number("fit_min", 2.0);
  const double fitMax = ac.number("fit_max", 8.0);
  const int flowSteps = ac.integer("flow_steps", 200);
  const std::string wrong = ac.text("wrong_flow", "reversed");
  std::vector<double> stabilityTimes;
  for (int k = 0; k < 9; ++k) stabilityTimes.push_back(-1.0 + 0.25 * k);
  stabilityTimes = ac.numbers("stability_times", stabilityTimes);
  const std::string stabilityA0 = ac.text("stability_a0", "cos_x");
  if (wrong != "reversed" && wrong != "identity") throw ConfigError("almostdiag.wrong_flow must be reversed or identity");

  PhaseLattice zLat = PhaseLattice::symmetric(1, step, step, zRadius, zRadius);
  PhaseLattice wLat = PhaseLattice::symmetric(1, step, step, wRadius, wRadius);
  try {
    wLat.validate(grid);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("almostdiag lattice: ") + e.what());
  }
  const TameHamiltonian principal = spec.principalFlow();
  PropagatorSource source(spec, grid, ctx.opt);

  if (wants(checks, "decay") || wants(checks, "wrong_flow")) {
    const FlowMap flow = hamiltonianFlowMap(principal, 0.0, t, flowSteps);
    const GaborMatrix m = gaborMatrix(denseMap(source.matrixAt(t)), g, zLat, wLat, flow, margin);
    const DecayEnvelope e = envelope(m, bins);
    const DecayFit fit = fitPolynomialDecay(e, fitMin, fitMax);
    ctx.file("almostdiag.csv", csvText([&](std::ostream& os) { writeEnvelopeCsv(os, e, fit); }));
    ctx.metric("decay_exponent", fit.exponent);
    ctx.metric("decay_fit_residual", fit.residual);
    ctx.metric("decay_super_polynomial", fit.superPolynomial ? 1.0 : 0.0);
    ctx.metric("envelope_l1", e.l1Norm());
    if (wants(checks, "wrong_flow")) {
      const FlowMap bad = wrong == "identity" ? identityFlow()
                                              : hamiltonianFlowMap(principal, 0.0, -t, flowSteps);
      const DecayEnvelope eb = envelope(recentre(m, bad, margin), bins);
      const DecayFit fb = fitPolynomialDecay(eb, fitMin, fitMax);
      ctx.file("almostdiag_wrong_flow.csv",
               csvText([&](std::ostream& os) { writeEnvelopeCsv(os, eb, fb); }));
      ctx.metric("wrong_flow_l1", eb.l1Norm());
      ctx.metric("wrong_flow_inflation", eb.l1Norm() / e.l1Norm());
    }
  }

  if (wants(checks, "stability")) {
    if (!spec.a2) throw ConfigError("almostdiag stability needs a quadratic part");
    HamiltonianSpec base;
    base.a2 = spec.a2;
    HamiltonianSpec pert = base;
    try {
      pert.a0 = PhaseSymbol::fromTag(stabilityA0);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("almostdiag.stability_a0: ") + e.what());
    }
    PropagatorSource baseSrc(base, grid, ctx.opt), pertSrc(pert, grid, ctx.opt);
    std::ostringstream os;
    CsvWriter w(os, {"t", "h_base", "h_perturbed", "factor"});
    double worst = 1.0;
    for (double s : stabilityTimes) {
      const FlowMap flow = linearFlow(quadraticFlow(*spec.a2, s));
      const double hb =
          envelope(gaborMatrix(denseMap(baseSrc.matrixAt(s)), g, zLat, wLat, flow, margin), bins)
              .l1Norm();
      const double hp =
          envelope(gaborMatrix(denseMap(pertSrc.matrixAt(s)), g, zLat, wLat, flow, margin), bins)
              .l1Norm();
      const double factor = std::max(hp / hb, hb / hp);
      worst = std::max(worst, factor);
      w.cell(s).cell(hb).cell(hp).cell(factor);
      w.endRow();
    }
    ctx.file("almostdiag_stability.csv", os.str());
    ctx.metric("stability_max_factor", worst);
  }

  if (wants(checks, "composition")) {
    const double half = 0.5 * t;
    const LinearMap u = denseMap(source.matrixAt(half));
    const FlowMap flow = hamiltonianFlowMap(principal, 0.0, half, flowSteps);
    const CompositionReport r =
        compositionEnvelopeCheck(u, u, g, zLat, wLat, flow, flow, bins, 0.1);
    ctx.file("almostdiag_composition.csv", csvText([&](std::ostream& os) {
               CsvWriter w(os, {"h1", "h2", "h12", "bound", "holds"});
               w.cell(r.h1).cell(r.h2).cell(r.h12).cell(r.bound).cell(r.holds ? 1 : 0);
               w.endRow();
             }));
    ctx.metric("composition_h12", r.h12);
    ctx.metric("composition_bound", r.bound);
    ctx.metric("composition_holds", r.holds ? 1.0 : 0.0);
  }
}

}  // namespace lab
