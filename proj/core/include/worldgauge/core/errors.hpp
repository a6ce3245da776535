// Copyright 2026 The WorldGauge Authors.
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

namespace worldgauge {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated a documented precondition (out-of-range id, empty suffix,
// bad parameter).
class InputError : public Error {
 public:
  using Error::Error;
};

// The request is well formed but impossible in the given world, e.g. asking
// for a prefix that reaches an unreachable state.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed. Indicates a bug or a misbehaving
// plug-in (sampler, model), never bad user input.
class InternalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Bridge transport failure: timeout, broken pipe, refused connection.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, bool retriable)
      : Error(what), retriable_(retriable) {}

  bool retriable() const noexcept { return retriable_; }

 private:
  bool retriable_;
};

// The peer spoke the bridge protocol incorrectly (malformed JSON, version
// mismatch, non-finite log-probabilities, unsupported capability).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace worldgauge
