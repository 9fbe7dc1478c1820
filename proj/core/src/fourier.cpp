#include "phaselab/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace phaselab {
namespace {

struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  fftw_plan get(int n0, int n1, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(n0, n1, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    const int total = n1 > 0 ? n0 * n1 : n0;
    auto* scratch = fftw_alloc_complex(total);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = n1 > 0 ? fftw_plan_dft_2d(n0, n1, scratch, scratch, sign, flags)
                         : fftw_plan_dft_1d(n0, scratch, scratch, sign, flags);
    fftw_free(scratch);
    plans.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& kv : plans) fftw_destroy_plan(kv.second);
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

inline double alternating(int k) { return (k & 1) ? -1.0 : 1.0; }

void applyCheckerboard(CVector& v, int n, int d) {
  if (d == 1) {
    for (int k = 0; k < n; ++k) v[k] *= alternating(k);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v[i * n + j] *= alternating(i + j);
  }
}

}  // namespace

void dft1d(Complex* data, int n, int sign) {
  fftw_plan p = cache().get(n, 0, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, d, d);
}

void dft2d(Complex* data, int n0, int n1, int sign) {
  fftw_plan p = cache().get(n0, n1, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, d, d);
}

// x_k xi_m = pi N/2 - pi m - pi k + 2 pi k m / N  (per axis), so the transform is a
// checkerboard-modulated DFT with global factor (-1)^{N/2} per axis.
SampledFunction fourierTransform(const SampledFunction& f) {
  const Grid& g = f.grid();
  const int n = g.pointsPerAxis();
  const int d = g.dimension();
  CVector v = f.values();
  applyCheckerboard(v, n, d);
  if (d == 1) dft1d(v.data(), n, -1);
  else dft2d(v.data(), n, n, -1);
  applyCheckerboard(v, n, d);
  double scale = g.cellVolume();
  if (d == 1 && (n / 2) % 2 == 1) scale = -scale;
  v *= scale;
  return SampledFunction(g.dual(), std::move(v));
}

SampledFunction inverseFourierTransform(const SampledFunction& F) {
  const Grid& g = F.grid();
  const int n = g.pointsPerAxis();
  const int d = g.dimension();
  CVector v = F.values();
  applyCheckerboard(v, n, d);
  if (d == 1) dft1d(v.data(), n, +1);
  else dft2d(v.data(), n, n, +1);
  applyCheckerboard(v, n, d);
  // (h_F / 2 pi)^d with h_F the spacing of F's own grid
  double scale = std::pow(g.spacing() / (2.0 * std::numbers::pi), d);
  if (d == 1 && (n / 2) % 2 == 1) scale = -scale;
  v *= scale;
  return SampledFunction(g.dual(), std::move(v));
}

CVector evaluateInterpolant(const SampledFunction& f, const RMatrix& points) {
  const Grid& g = f.grid();
  const int d = g.dimension();
  const int n = g.pointsPerAxis();
  if (points.cols() != d) throw InvalidArgument("point dimension does not match grid");
  // f(y) = (h'/2pi)^d sum_m Ff_m e^{i y.xi_m}
  SampledFunction spectrum = fourierTransform(f);
  const Grid& dg = spectrum.grid();
  const double w = dg.spacing() / (2.0 * std::numbers::pi);
  const int rows = static_cast<int>(points.rows());
  CVector out(rows);
  auto basis = [&](double y) {
    CVector e(n);
    for (int m = 0; m < n; ++m) e[m] = std::polar(w, y * dg.coordinate(m));
    // Nyquist column (m=0, xi=-pi/h) split between +-pi/h
    e[0] = w * std::cos(y * dg.coordinate(0));
    return e;
  };
  if (d == 1) {
    for (int r = 0; r < rows; ++r) out[r] = basis(points(r, 0)).cwiseProduct(spectrum.values()).sum();
  } else {
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> c(
        spectrum.values().data(), n, n);
    for (int r = 0; r < rows; ++r) {
      CVector e0 = basis(points(r, 0));
      CVector e1 = basis(points(r, 1));
      out[r] = (e0.transpose() * c * e1)(0, 0);
    }
  }
  return out;
}

}  // namespace phaselab
