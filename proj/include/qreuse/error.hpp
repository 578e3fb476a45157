// Copyright 2026 The qreuse authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace qreuse {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input files or JSON documents.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A graph failed validation and was rejected by a pass.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A block partition cannot be summarized or does not cover the graph.
class PartitionError : public Error {
 public:
  using Error::Error;
};

/// A run configuration is inconsistent with the input (e.g. depth strategy
/// on nodes without depth data) or a parameter is out of range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An API precondition was violated by the caller (unknown ids, orders that
/// are not topological, inconsistent bindings, enumeration guards).
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace qreuse
