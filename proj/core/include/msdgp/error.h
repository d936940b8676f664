// core/include/msdgp/error.h

// Copyright 2026  msdgp authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MSDGP_ERROR_H_
#define MSDGP_ERROR_H_

#include <stdexcept>
#include <string>

namespace msdgp {

// Base class for all library errors. The CLI maps subclasses to exit codes:
// config/usage errors -> 2, numeric divergence -> 3, anything else -> 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

class ShapeMismatch : public Error {
 public:
  explicit ShapeMismatch(const std::string &what)
      : Error("ShapeMismatch: " + what) {}
};

class IndexOutOfRange : public Error {
 public:
  explicit IndexOutOfRange(const std::string &what)
      : Error("IndexOutOfRange: " + what) {}
};

// A kernel Gram matrix failed to factorize after the jitter retry policy.
class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(const std::string &what)
      : Error("NotPositiveDefinite: " + what) {}
};

class InvalidConfig : public Error {
 public:
  explicit InvalidConfig(const std::string &what)
      : Error("InvalidConfig: " + what) {}
};

class InvalidSpec : public Error {
 public:
  explicit InvalidSpec(const std::string &what)
      : Error("InvalidSpec: " + what) {}
};

class EmptyTrainSplit : public Error {
 public:
  explicit EmptyTrainSplit(const std::string &what)
      : Error("EmptyTrainSplit: " + what) {}
};

class InsufficientData : public Error {
 public:
  explicit InsufficientData(const std::string &what)
      : Error("InsufficientData: " + what) {}
};

class DivergenceDetected : public Error {
 public:
  explicit DivergenceDetected(const std::string &what)
      : Error("DivergenceDetected: " + what) {}
};

class NonPositiveF0 : public Error {
 public:
  explicit NonPositiveF0(const std::string &what)
      : Error("NonPositiveF0: " + what) {}
};

class WrongModelKind : public Error {
 public:
  explicit WrongModelKind(const std::string &what)
      : Error("WrongModelKind: " + what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string &what) : Error("IoError: " + what) {}
};

}  // namespace msdgp

#endif  // MSDGP_ERROR_H_
