#include "phaselab/corpus.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace phaselab {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (hasSpare_) {
    hasSpare_ = false;
    return spare_;
  }
  double u = 0.0;
  while (u <= 0.0) u = uniform();
  const double v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  spare_ = r * std::sin(2.0 * std::numbers::pi * v);
  hasSpare_ = true;
  return r * std::cos(2.0 * std::numbers::pi * v);
}

void TestCorpus::add(std::string name, SampledFunction f) {
  const double n = f.l2Norm();
  if (!(n > 0.0)) throw InvalidArgument("corpus function " + name + " vanishes on the grid");
  f.values() /= n;
  functions_.push_back(std::move(f));
  names_.push_back(std::move(name));
}

TestCorpus TestCorpus::head(int n) const {
  TestCorpus c(Empty{}, grid_, seed_);
  for (int i = 0; i < std::min(n, size()); ++i) {
    c.functions_.push_back(functions_[i]);
    c.names_.push_back(names_[i]);
  }
  return c;
}

namespace {

Complex gauss(double r2, double width) { return std::exp(-r2 / (2.0 * width * width)); }

}  // namespace

TestCorpus::TestCorpus(const Grid& grid, std::uint64_t seed, int randomCount)
    : grid_(grid), seed_(seed) {
  if (randomCount < 0) throw InvalidArgument("random corpus size must be nonnegative");
  const Complex I(0.0, 1.0);
  Rng rng(seed);
  if (grid.dimension() == 1) {
    add("gaussian", sample1d(grid, [](double x) { return gauss(x * x, 1.0); }));
    add("packet", sample1d(grid, [&](double x) { return std::exp(2.0 * I * x) * gauss(std::pow(x - 1.5, 2), 1.0); }));
    add("narrow", sample1d(grid, [](double x) { return gauss(x * x, 0.3); }));
    add("wide", sample1d(grid, [](double x) { return gauss(x * x, 1.6); }));
    add("hermite1", sample1d(grid, [](double x) { return x * gauss(x * x, 1.0); }));
    add("hermite3", sample1d(grid, [](double x) { return (2.0 * x * x * x - 3.0 * x) * gauss(x * x, 1.0); }));
    add("chirp", sample1d(grid, [&](double x) { return std::exp(0.5 * I * x * x) * gauss(x * x, 1.5); }));
    add("two_bump", sample1d(grid, [&](double x) {
          return gauss(std::pow(x - 2.0, 2), 1.0) - std::exp(I * x) * gauss(std::pow(x + 2.0, 2), 1.0);
        }));
    for (int r = 0; r < randomCount; ++r) {
      std::vector<std::array<double, 3>> packets;
      std::vector<Complex> amps;
      for (int j = 0; j < 5; ++j) {
        packets.push_back({rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0), rng.uniform(0.6, 1.4)});
        amps.push_back(rng.complexNormal());
      }
      add("random" + std::to_string(r), sample1d(grid, [&](double x) {
            Complex v = 0.0;
            for (std::size_t j = 0; j < packets.size(); ++j) {
              const auto& [c, k, w] = packets[j];
              v += amps[j] * std::polar(1.0, k * x) * gauss(std::pow(x - c, 2), w);
            }
            return v;
          }));
    }
    return;
  }
  add("gaussian", sample2d(grid, [](double x, double y) { return gauss(x * x + y * y, 1.0); }));
  add("packet", sample2d(grid, [&](double x, double y) {
        return std::exp(I * (1.5 * x - y)) * gauss(std::pow(x - 1.0, 2) + std::pow(y + 0.5, 2), 1.0);
      }));
  add("narrow", sample2d(grid, [](double x, double y) { return gauss(x * x + y * y, 0.65); }));
  add("wide", sample2d(grid, [](double x, double y) { return gauss(x * x + y * y, 1.05); }));
  add("hermite10", sample2d(grid, [](double x, double y) { return x * gauss(x * x + y * y, 1.0); }));
  add("hermite11", sample2d(grid, [](double x, double y) { return x * y * gauss(x * x + y * y, 1.0); }));
  add("chirp", sample2d(grid, [&](double x, double y) {
        return std::exp(0.5 * I * (x * x + y * y)) * gauss(x * x + y * y, 1.0);
      }));
  add("two_bump", sample2d(grid, [&](double x, double y) {
        return gauss(std::pow(x - 1.5, 2) + y * y, 0.8) -
               std::exp(I * y) * gauss(std::pow(x + 1.5, 2) + y * y, 0.8);
      }));
  for (int r = 0; r < randomCount; ++r) {
    std::vector<std::array<double, 5>> packets;
    std::vector<Complex> amps;
    for (int j = 0; j < 5; ++j) {
      packets.push_back({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                         rng.uniform(-2.0, 2.0), rng.uniform(0.7, 1.0)});
      amps.push_back(rng.complexNormal());
    }
    add("random" + std::to_string(r), sample2d(grid, [&](double x, double y) {
          Complex v = 0.0;
          for (std::size_t j = 0; j < packets.size(); ++j) {
            const auto& [cx, cy, kx, ky, w] = packets[j];
            v += amps[j] * std::polar(1.0, kx * x + ky * y) *
                 gauss(std::pow(x - cx, 2) + std::pow(y - cy, 2), w);
          }
          return v;
        }));
  }
}

}  // namespace phaselab
