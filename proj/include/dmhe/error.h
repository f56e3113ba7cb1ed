// Copyright 2026 The DMHE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DMHE_ERROR_H_
#define DMHE_ERROR_H_

#include <stdexcept>
#include <string>

namespace dmhe {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent matrix or vector sizes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Subsystem id outside the partition.
class UnknownSubsystemError : public Error {
 public:
  explicit UnknownSubsystemError(int id)
      : Error("unknown subsystem id " + std::to_string(id)), id_(id) {}
  int id() const { return id_; }

 private:
  int id_;
};

// A matrix that must be symmetric positive definite failed to factorize.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

// An iterative solver hit its iteration cap before reaching tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

// Iterate exchange violated the Jacobi round contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or model file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dmhe

#endif  // DMHE_ERROR_H_
