// Copyright 2026 The sdploc Authors
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

#ifndef SDPLOC_ERRORS_HPP_
#define SDPLOC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace sdploc {

// Error hierarchy shared across modules. Everything derives from Error so
// callers can catch the library as a whole.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// No measurement edge survived graph construction (radio range too small).
class EmptyGraphError : public Error {
 public:
  explicit EmptyGraphError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

// Malformed instance or config file; message carries the field diagnostics.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

class LengthMismatchError : public Error {
 public:
  explicit LengthMismatchError(const std::string& what) : Error(what) {}
};

class NotNormalizedError : public Error {
 public:
  explicit NotNormalizedError(const std::string& what) : Error(what) {}
};

class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(const std::string& what) : Error(what) {}
};

// Extraction attempted on a solve that failed.
class BadStatusError : public Error {
 public:
  explicit BadStatusError(const std::string& what) : Error(what) {}
};

}  // namespace sdploc

#endif  // SDPLOC_ERRORS_HPP_
