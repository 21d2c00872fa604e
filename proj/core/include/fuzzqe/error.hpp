/*
 * Copyright 2026 The fuzzqe Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FUZZQE_ERROR_HPP_
#define FUZZQE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace fuzzqe {

// Invalid configuration or command-line usage.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, ids, query encodings).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation produced a NaN/Inf or left its valid domain.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A verification suite found a violated property.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fuzzqe

#endif  // FUZZQE_ERROR_HPP_
