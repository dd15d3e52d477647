/*
 * Copyright 2026 The ERAlign Authors.
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

#ifndef ERALIGN_COMMON_H_
#define ERALIGN_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace eralign {

// Dense 0-based ids, independent per graph. In a dual graph the roles swap:
// nodes are the original relations and edge labels the original entities.
using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

using DenseMatrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input file. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line,
             const std::string& what);

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

// Violated precondition on shapes, ranges or statistics.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// The semantic-similarity scorer failed (external worker died, bad reply).
class ScorerError : public Error {
 public:
  ScorerError(const std::string& what, std::size_t reached)
      : Error(what), reached_(reached) {}

  // Index of the request (candidate) being scored when the failure happened.
  std::size_t reached() const { return reached_; }

 private:
  std::size_t reached_;
};

}  // namespace eralign

#endif  // ERALIGN_COMMON_H_
