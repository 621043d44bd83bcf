/*
 * Copyright 2026 The skmpc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "skmpc/sampling.hpp"

#include <cmath>

namespace skmpc::sampling {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream & 0xffffffffu),
                    static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

Vector uniform_in_box(const Box& box, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector v(box.dim());
  for (int i = 0; i < box.dim(); ++i) {
    v(i) = box.lower(i) + (box.upper(i) - box.lower(i)) * unit(rng);
  }
  return v;
}

Vector unit_direction(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v(i) = normal(rng);
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

std::vector<Vector> ball_with_shell(int dim, double r, int count, std::uint64_t seed,
                                    double shell_fraction) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int shell = static_cast<int>(std::lround(shell_fraction * count));
  std::vector<Vector> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    Vector d = unit_direction(dim, rng);
    double radius;
    if (k < shell) {
      radius = r * (0.99 + 0.01 * unit(rng));
    } else {
      double s;
      do {
        s = unit(rng);
      } while (s <= 0.0);
      radius = r * std::pow(s, 1.0 / dim);
    }
    out.push_back(radius * d);
  }
  return out;
}

}  // namespace skmpc::sampling
