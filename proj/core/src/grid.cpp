#include "phaselab/grid.hpp"

#include <cmath>
#include <numbers>

namespace phaselab {

Grid::Grid(int dimension, double halfExtent, int pointsPerAxis)
    : d_(dimension), L_(halfExtent), N_(pointsPerAxis) {
  if (d_ != 1 && d_ != 2) throw InvalidArgument("grid dimension must be 1 or 2");
  if (!(L_ > 0.0) || !std::isfinite(L_)) throw InvalidArgument("grid half-extent must be positive");
  if (N_ < 2 || N_ % 2 != 0) throw InvalidArgument("points per axis must be even and >= 2");
}

int Grid::size() const { return d_ == 1 ? N_ : N_ * N_; }

double Grid::cellVolume() const { return std::pow(spacing(), d_); }

RVector Grid::axis() const {
  RVector a(N_);
  for (int k = 0; k < N_; ++k) a[k] = coordinate(k);
  return a;
}

Grid Grid::dual() const { return Grid(d_, std::numbers::pi / spacing(), N_); }

bool Grid::operator==(const Grid& other) const {
  return d_ == other.d_ && N_ == other.N_ && std::abs(L_ - other.L_) <= 1e-12 * L_;
}

SampledFunction::SampledFunction(Grid grid, CVector values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InvalidArgument("sample count does not match grid size");
}

SampledFunction::SampledFunction(Grid grid) : grid_(grid), values_(CVector::Zero(grid.size())) {}

Complex SampledFunction::inner(const SampledFunction& other) const {
  if (grid_ != other.grid_) throw InvalidArgument("inner product across different grids");
  // <f,g> = h^d sum f conj(g)
  return grid_.cellVolume() * other.values_.dot(values_);
}

double SampledFunction::l2Norm() const {
  return std::sqrt(grid_.cellVolume()) * values_.norm();
}

bool SampledFunction::allFinite() const { return values_.allFinite(); }

SampledFunction SampledFunction::operator+(const SampledFunction& o) const {
  if (grid_ != o.grid_) throw InvalidArgument("sum across different grids");
  return SampledFunction(grid_, values_ + o.values_);
}

SampledFunction SampledFunction::operator-(const SampledFunction& o) const {
  if (grid_ != o.grid_) throw InvalidArgument("difference across different grids");
  return SampledFunction(grid_, values_ - o.values_);
}

SampledFunction SampledFunction::operator*(Complex c) const {
  return SampledFunction(grid_, values_ * c);
}

}  // namespace phaselab
