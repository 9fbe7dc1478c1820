#pragma once

#include "phaselab/grid.hpp"

namespace phaselab {

// Unnormalized in-place DFT of length n (sign -1: e^{-2 pi i km/n}).
void dft1d(Complex* data, int n, int sign);
// Unnormalized in-place 2-d DFT of an n0 x n1 row-major block.
void dft2d(Complex* data, int n0, int n1, int sign);

// Ff(xi) = int e^{-i x.xi} f(x) dx sampled on grid.dual().
SampledFunction fourierTransform(const SampledFunction& f);
// Inverse of fourierTransform; F lives on some grid G, result on G.dual().
SampledFunction inverseFourierTransform(const SampledFunction& F);

// Trigonometric interpolant of f evaluated at arbitrary points (rows of `points`, d columns).
// The Nyquist mode is split symmetrically.
CVector evaluateInterpolant(const SampledFunction& f, const RMatrix& points);

}  // namespace phaselab
