#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace phaselab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Uniform periodic grid on [-L, L)^d with N points per axis.
class Grid {
 public:
  Grid(int dimension, double halfExtent, int pointsPerAxis);

  int dimension() const { return d_; }
  double halfExtent() const { return L_; }
  int pointsPerAxis() const { return N_; }
  double spacing() const { return 2.0 * L_ / N_; }
  int size() const;
  double cellVolume() const;
  double coordinate(int k) const { return -L_ + k * spacing(); }
  RVector axis() const;

  // Frequency grid: spacing pi/L, extent [-pi/h, pi/h).
  Grid dual() const;

  bool operator==(const Grid& other) const;
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  int d_;
  double L_;
  int N_;
};

// Complex samples on a grid, row-major over axes for d=2 (index = i0*N + i1).
class SampledFunction {
 public:
  SampledFunction(Grid grid, CVector values);
  explicit SampledFunction(Grid grid);

  const Grid& grid() const { return grid_; }
  const CVector& values() const { return values_; }
  CVector& values() { return values_; }
  int size() const { return static_cast<int>(values_.size()); }

  Complex inner(const SampledFunction& other) const;
  double l2Norm() const;
  bool allFinite() const;

  SampledFunction operator+(const SampledFunction& o) const;
  SampledFunction operator-(const SampledFunction& o) const;
  SampledFunction operator*(Complex c) const;

 private:
  Grid grid_;
  CVector values_;
};

// Sample f(x) (d=1) or f(x0,x1) (d=2) on the grid.
template <class Fn>
SampledFunction sample1d(const Grid& grid, Fn&& fn) {
  if (grid.dimension() != 1) throw InvalidArgument("sample1d needs a 1-d grid");
  CVector v(grid.size());
  for (int k = 0; k < grid.pointsPerAxis(); ++k) v[k] = fn(grid.coordinate(k));
  return SampledFunction(grid, std::move(v));
}

template <class Fn>
SampledFunction sample2d(const Grid& grid, Fn&& fn) {
  if (grid.dimension() != 2) throw InvalidArgument("sample2d needs a 2-d grid");
  const int n = grid.pointsPerAxis();
  CVector v(grid.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v[i * n + j] = fn(grid.coordinate(i), grid.coordinate(j));
  return SampledFunction(grid, std::move(v));
}

}  // namespace phaselab
