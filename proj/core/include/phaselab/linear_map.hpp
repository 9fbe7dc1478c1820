#pragma once

#include <functional>

#include "phaselab/grid.hpp"

namespace phaselab {

using LinearMap = std::function<SampledFunction(const SampledFunction&)>;

inline LinearMap denseMap(CMatrix m) {
  return [m = std::move(m)](const SampledFunction& f) {
    if (f.size() != m.cols()) throw InvalidArgument("dense operator size mismatch");
    return SampledFunction(f.grid(), m * f.values());
  };
}

inline LinearMap identityMap() {
  return [](const SampledFunction& f) { return f; };
}

inline LinearMap compose(LinearMap outer, LinearMap inner) {
  return [outer = std::move(outer), inner = std::move(inner)](const SampledFunction& f) {
    return outer(inner(f));
  };
}

// Matrix of a linear map on a 1-d grid, built column by column.
CMatrix materialize(const LinearMap& map, const Grid& grid);

}  // namespace phaselab

namespace phaselab {

// Largest singular value.
double operatorNorm2(const CMatrix& m);

}  // namespace phaselab
