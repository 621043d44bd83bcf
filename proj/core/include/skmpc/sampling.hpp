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

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "skmpc/box.hpp"

namespace skmpc::sampling {

using Rng = std::mt19937_64;

/// Independent stream `stream` of the master seed.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

Vector uniform_in_box(const Box& box, Rng& rng);

/// Uniform direction on the unit sphere in R^dim.
Vector unit_direction(int dim, Rng& rng);

/// `count` points: a `shell_fraction` share with radius in [0.99 r, r], the
/// rest uniform in the ball. Zero vectors are never produced.
std::vector<Vector> ball_with_shell(int dim, double r, int count, std::uint64_t seed,
                                    double shell_fraction = 0.2);

}  // namespace skmpc::sampling
