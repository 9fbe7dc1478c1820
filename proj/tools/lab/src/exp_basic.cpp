#include <cmath>

#include "common.hpp"
#include "phaselab/symplectic_flow.hpp"
#include "phaselab/weyl_quant.hpp"

namespace lab {

void runSelftest(Context& ctx) {
  const Grid grid = readGrid(ctx.cfg, 1, 12.0, 256);
  const Window g = readWindow(ctx.cfg, grid, 1.0);
  const TestCorpus corpus = readCorpus(ctx.cfg, grid, ctx.seed, 12);
  const Section lat = ctx.cfg.child("lattice");
  const double step = lat.number("step", 0.5);
  const Section st = ctx.cfg.child("selftest");
  const bool refine = st.flag("refine", true);
  const double unitaryTime = st.number("unitarity_time", 1.0);
  if (!(step > 0.0)) throw ConfigError("lattice.step must be positive");

  std::vector<double> steps{step};
  if (refine) steps.push_back(step / 2);
  std::vector<double> isoMax, recMax;
  std::ostringstream table;
  CsvWriter w(table, {"function", "step", "isometry_error", "reconstruction_error"});
  for (double s : steps) {
    const StftPlan plan(g, PhaseLattice::fullCover(grid, s, s));
    double iso = 0.0, rec = 0.0;
    for (int i = 0; i < corpus.size(); ++i) {
      const SampledFunction& f = corpus[i];
      const double n = f.l2Norm();
      const PhaseArray V = plan.apply(f);
      const double e1 = std::abs(std::sqrt(V.values.squaredNorm() * V.lattice.cellWeight()) - n) / n;
      const double e2 = (plan.adjoint(V.values) - f).l2Norm() / n;
      iso = std::max(iso, e1);
      rec = std::max(rec, e2);
      w.cell(corpus.name(i)).cell(s).cell(e1).cell(e2);
      w.endRow();
    }
    isoMax.push_back(iso);
    recMax.push_back(rec);
  }
  ctx.file("selftest.csv", table.str());
  ctx.metric("isometry_max_error", isoMax[0]);
  ctx.metric("reconstruction_max_error", recMax[0]);
  if (refine) {
    ctx.metric("isometry_refined_max_error", isoMax[1]);
    ctx.metric("reconstruction_refined_max_error", recMax[1]);
    ctx.metric("isometry_refinement_ratio", isoMax[1] / isoMax[0]);
    ctx.metric("reconstruction_refinement_ratio", recMax[1] / recMax[0]);
  }

  // unitarity: operator defect for d=1, corpus norm drift otherwise
  std::ostringstream ut;
  CsvWriter u(ut, {"operator", "t", "defect"});
  auto record = [&](const std::string& name, const LinearMap& U) {
    double defect = 0.0;
    if (grid.dimension() == 1) {
      const CMatrix M = materialize(U, grid);
      defect = operatorNorm2(M.adjoint() * M - CMatrix::Identity(M.rows(), M.cols()));
    } else {
      for (const auto& f : corpus.functions())
        defect = std::max(defect, std::abs(U(f).l2Norm() - f.l2Norm()));
    }
    u.cell(name).cell(unitaryTime).cell(defect);
    u.endRow();
    ctx.metric("unitarity_defect_" + name, defect);
  };
  record("free", freePropagator(unitaryTime, grid).asMap());
  if (grid.dimension() == 1) {
    const UnitaryGroup ho(weylQuantize(PhaseSymbol::quadratic(QuadraticHamiltonian::harmonicOscillator(1)), grid));
    record("harmonic", ho.at(unitaryTime).asMap());
  } else {
    record("harmonic_kernel",
           quadraticKernelPropagator(QuadraticHamiltonian::harmonicOscillator(2), unitaryTime, grid)
               .asMap());
  }
  ctx.file("selftest_unitarity.csv", ut.str());
}

void runFlow(Context& ctx) {
  const Section fl = ctx.cfg.child("flow");
  const std::vector<double> times = fl.numbers("times", {0.25, 0.5, 1.0, 2.0, 3.0, 5.0});
  const std::string perturbation = fl.text("perturbation", "sin_x");
  const double tameTime = fl.number("tame_time", 1.0);
  const int steps = fl.integer("steps", 400);
  const double fdStep = fl.number("fd_step", 1e-5);
  const double radius = fl.number("probe_radius", 2.0);
  const int perAxis = fl.integer("probe_per_axis", 3);
  const bool emitTrace = fl.flag("trace", true);
  const HamiltonianSpec spec = readHamiltonian(ctx.cfg, {"harmonic", "none", "none"});
  if (!spec.a2) throw ConfigError("flow needs a quadratic part");
  if (steps < 1 || perAxis < 1 || !(fdStep > 0.0)) throw ConfigError("flow: bad integration settings");

  std::ostringstream lin;
  CsvWriter w(lin, {"hamiltonian", "t", "symplectic_defect", "detB"});
  double linDefect = 0.0;
  std::vector<std::pair<std::string, QuadraticHamiltonian>> quads = {
      {"config", *spec.a2},
      {"harmonic", QuadraticHamiltonian::harmonicOscillator(spec.d)},
      {"free", QuadraticHamiltonian::freeParticle(spec.d)}};
  for (const auto& [name, q] : quads) {
    for (double t : times) {
      const SymplecticMatrix S = quadraticFlow(q, t);
      const double defect = S.symplecticDefect();
      linDefect = std::max(linDefect, defect);
      w.cell(name).cell(t).cell(defect).cell(detB(S));
      w.endRow();
    }
  }
  ctx.file("flow.csv", lin.str());
  ctx.metric("linear_symplectic_defect", linDefect);

  if (spec.d != 1) return;
  PhaseSymbol pert;
  try {
    pert = PhaseSymbol::fromTag(perturbation);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("flow.perturbation: ") + e.what());
  }
  const TameHamiltonian a = toTameHamiltonian(*spec.a2, pert);
  const RMatrix J = standardSymplectic(1);
  std::ostringstream tame;
  CsvWriter tw(tame, {"x0", "xi0", "t", "symplectic_defect", "volume_defect", "fd_error"});
  double tameDefect = 0.0, fdError = 0.0;
  for (const PhasePoint& z0 : sampleBox(1, radius, perAxis)) {
    const FlowResult r = hamiltonianFlow(a, 0.0, tameTime, z0, steps);
    const RMatrix& M = r.jacobian;
    const double defect = (M.transpose() * J * M - J).cwiseAbs().maxCoeff();
    double fd = 0.0;
    for (int j = 0; j < 2; ++j) {
      RVector plus = z0.stacked(), minus = z0.stacked();
      plus[j] += fdStep;
      minus[j] -= fdStep;
      const RVector dp = hamiltonianFlow(a, 0.0, tameTime, PhasePoint::fromStacked(plus), steps)
                             .endpoint.stacked();
      const RVector dm = hamiltonianFlow(a, 0.0, tameTime, PhasePoint::fromStacked(minus), steps)
                             .endpoint.stacked();
      fd = std::max(fd, ((dp - dm) / (2.0 * fdStep) - M.col(j)).cwiseAbs().maxCoeff());
    }
    tameDefect = std::max(tameDefect, defect);
    fdError = std::max(fdError, fd);
    tw.cell(z0.x[0]).cell(z0.xi[0]).cell(tameTime).cell(defect).cell(r.volumeDefect).cell(fd);
    tw.endRow();
  }
  ctx.file("flow_tame.csv", tame.str());
  ctx.metric("tame_symplectic_defect", tameDefect);
  ctx.metric("jacobian_fd_error", fdError);

  if (emitTrace) {
    std::vector<double> ts;
    for (int k = 0; k <= 40; ++k) ts.push_back(tameTime * k / 40.0);
    ctx.file("flow_trace.csv", csvText([&](std::ostream& os) {
               writeFlowTraceCsv(os, flowTrace(a, PhasePoint::of(1.0, 0.0), 0.0, ts, steps));
             }));
  }
}

void runWeyl(Context& ctx) {
  const Grid grid = readGrid(ctx.cfg, 1, 12.0, 256);
  if (grid.dimension() != 1) throw ConfigError("weyl runs in d=1");
  const Section wc = ctx.cfg.child("weyl");
  const std::vector<std::string> tags =
      wc.texts("tags", {"sin_x", "cos_x", "sin_x_sin_xi", "bump"});
  const bool gabor = wc.flag("gabor_norm", true);
  const bool sjostrand = wc.flag("sjostrand_norm", true);
  const Window g = readWindow(ctx.cfg, grid, 1.0);

  std::ostringstream os;
  CsvWriter w(os, {"symbol", "class", "hermitian_defect", "operator_norm", "sjostrand_norm",
                   "gabor_norm"});
  double herm = 0.0, ratio = 0.0;
  for (const auto& tag : tags) {
    PhaseSymbol a;
    try {
      a = PhaseSymbol::fromTag(tag);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("weyl.tags: ") + e.what());
    }
    const WeylOperator A = weylQuantize(a, grid);
    const double hd = A.hermitianDefect();
    const double op = operatorNorm2(A.matrix());
    const double sj = sjostrand ? sjostrandNormEstimate(a) : 0.0;
    const double gb = gabor ? gaborOperatorNorm(A.asMap(), g) : 0.0;
    if (a.realValued) herm = std::max(herm, hd);
    if (sj > 0.0) ratio = std::max(ratio, op / sj);
    w.cell(tag).cell(toString(a.cls)).cell(hd).cell(op).cell(sj).cell(gb);
    w.endRow();
  }
  ctx.file("weyl.csv", os.str());
  ctx.metric("max_hermitian_defect", herm);
  if (sjostrand) ctx.metric("max_norm_over_sjostrand", ratio);
}

}  // namespace lab
