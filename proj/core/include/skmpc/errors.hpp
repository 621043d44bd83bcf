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

#include <stdexcept>
#include <string>

namespace skmpc {

// Exception hierarchy. The CLI maps each family onto a distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: dimension mismatch, non-positive step sizes, empty ranges.
class InputError : public Error {
 public:
  using Error::Error;
};

/// EDMD failures: rank-deficient regressors, failed stabilizability or
/// observability checks on the identified model.
class IdentificationError : public Error {
 public:
  using Error::Error;
};

/// Terminal-ingredient construction failures.
class DesignError : public Error {
 public:
  using Error::Error;
};

/// Numerical solver failures.
class SolverError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public SolverError {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : SolverError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ConditioningError : public SolverError {
 public:
  using SolverError::SolverError;
};

class InstabilityError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// The MPC problem has no feasible input sequence at the queried state.
class FeasibilityError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Too many samples had to be skipped for an estimate to be meaningful.
class CoverageError : public Error {
 public:
  using Error::Error;
};

}  // namespace skmpc
