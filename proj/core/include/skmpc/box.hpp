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

#include <string_view>

#include "skmpc/linalg.hpp"

namespace skmpc {

/// Axis-aligned box [lower, upper].
struct Box {
  Vector lower;
  Vector upper;

  static Box symmetric(const Vector& half_width);
  int dim() const noexcept { return static_cast<int>(lower.size()); }
  bool contains(const Vector& v, double tol = 0.0) const;
  Vector clamp(const Vector& v) const;
  void validate(std::string_view what) const;
};

/// Radius of the largest origin-centred Euclidean ball inside the box.
/// Throws DesignError when the origin is not interior.
double inscribed_radius(const Box& box);

}  // namespace skmpc
