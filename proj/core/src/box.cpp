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

#include "skmpc/box.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "skmpc/errors.hpp"

namespace skmpc {

Box Box::symmetric(const Vector& half_width) { return Box{-half_width, half_width}; }

bool Box::contains(const Vector& v, double tol) const {
  if (v.size() != lower.size()) return false;
  return ((v - lower).array() >= -tol).all() && ((upper - v).array() >= -tol).all();
}

Vector Box::clamp(const Vector& v) const { return v.cwiseMax(lower).cwiseMin(upper); }

void Box::validate(std::string_view what) const {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw InputError(std::string(what) + ": box bounds must be nonempty and equally sized");
  }
  if ((upper.array() < lower.array()).any()) {
    throw InputError(std::string(what) + ": box has lower > upper");
  }
}

double inscribed_radius(const Box& box) {
  box.validate("input box");
  double r = std::numeric_limits<double>::infinity();
  for (int i = 0; i < box.dim(); ++i) {
    if (!(box.lower(i) < 0.0 && box.upper(i) > 0.0)) {
      throw DesignError("input box must contain the origin in its interior");
    }
    r = std::min({r, -box.lower(i), box.upper(i)});
  }
  return r;
}

}  // namespace skmpc
