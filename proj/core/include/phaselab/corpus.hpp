#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "phaselab/grid.hpp"

namespace phaselab {

// mt19937_64 with explicit uniform/normal transforms so streams are identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  Complex complexNormal() { return {normal(), normal()}; }

 private:
  std::mt19937_64 engine_;
  bool hasSpare_ = false;
  double spare_ = 0.0;
};

// 8 fixed shapes followed by seeded random wave-packet superpositions, unit L2 norm.
class TestCorpus {
 public:
  static constexpr int kShapeCount = 8;

  TestCorpus(const Grid& grid, std::uint64_t seed, int randomCount = 12);

  const Grid& grid() const { return grid_; }
  std::uint64_t seed() const { return seed_; }
  int size() const { return static_cast<int>(functions_.size()); }
  const SampledFunction& operator[](int i) const { return functions_.at(i); }
  const std::string& name(int i) const { return names_.at(i); }
  const std::vector<SampledFunction>& functions() const { return functions_; }
  TestCorpus head(int n) const;

 private:
  struct Empty {};
  TestCorpus(Empty, const Grid& grid, std::uint64_t seed) : grid_(grid), seed_(seed) {}
  void add(std::string name, SampledFunction f);

  Grid grid_;
  std::uint64_t seed_;
  std::vector<SampledFunction> functions_;
  std::vector<std::string> names_;
};

}  // namespace phaselab
