// Copyright 2026 The qkdist Authors
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

namespace qkdist {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char *kind() const noexcept { return "error"; }
};

/// A requested simulation exceeds the configured qubit capacity.
class CapacityError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "capacity"; }
};

/// A caller broke an operation's precondition (bad index, wrong shape, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "contract"; }
};

class EncodingError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "encoding"; }
};

/// Misuse of protocol resources, e.g. consuming a Bell pair twice.
class ProtocolViolation : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "protocol"; }
};

class DataError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "data"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "config"; }
};

}  // namespace qkdist
