// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "mexec/optimize.hpp"

namespace mexec {

// splitmix64 finalizer; derives independent per-run seeds from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Starting points: per coordinate, 80% uniform over the box, 15% signed
// log-uniform magnitude in [1e-300, 1e300], 5% special values.
template <class Rng>
Vec sample_start(std::size_t arity, const Box& box, Rng& rng) {
  static constexpr double kSpecials[] = {
      0.0, 1.0, -1.0,
      std::numeric_limits<double>::min(), -std::numeric_limits<double>::min(),
      std::numeric_limits<double>::max(), -std::numeric_limits<double>::max()};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> exponent(-300.0, 300.0);
  std::uniform_int_distribution<int> special(0, static_cast<int>(std::size(kSpecials)) - 1);
  Vec x(arity);
  for (std::size_t i = 0; i < arity; ++i) {
    double u = unit(rng);
    if (u < 0.8) {
      std::uniform_real_distribution<double> in_box(box.lower(i), box.upper(i));
      x[i] = in_box(rng);
    } else if (u < 0.95) {
      double mag = std::pow(10.0, exponent(rng));
      x[i] = unit(rng) < 0.5 ? -mag : mag;
    } else {
      x[i] = kSpecials[special(rng)];
    }
  }
  return x;
}

}  // namespace mexec
