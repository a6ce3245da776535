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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "worldgauge/core/errors.hpp"
#include "worldgauge/core/types.hpp"

namespace worldgauge::bridge {

inline constexpr std::string_view kProtocolVersion = "wgv1";
inline constexpr std::size_t kMaxBatch = 64;

inline constexpr std::string_view kCapNextDist = "next_distribution";
inline constexpr std::string_view kCapAccepts = "accept_judgment";

// Error codes carried in {"error": {"code", "message"}}.
namespace codes {
inline constexpr std::string_view kBadRequest = "bad_request";
inline constexpr std::string_view kUnsupported = "unsupported_op";
inline constexpr std::string_view kCapability = "capability";
inline constexpr std::string_view kVersion = "version_mismatch";
inline constexpr std::string_view kAlphabet = "alphabet_mismatch";
inline constexpr std::string_view kTooLarge = "batch_too_large";
inline constexpr std::string_view kInternal = "internal";
}  // namespace codes

struct Hello {
  std::string version;
  std::vector<std::string> alphabet;
  friend bool operator==(const Hello&, const Hello&) = default;
};
struct NextDistRequest {
  TokenSeq prefix;
  friend bool operator==(const NextDistRequest&, const NextDistRequest&) = default;
};
struct AcceptsRequest {
  TokenSeq prefix;
  TokenSeq suffix;
  friend bool operator==(const AcceptsRequest&, const AcceptsRequest&) = default;
};
using BatchItem = std::variant<NextDistRequest, AcceptsRequest>;
struct BatchRequest {
  std::vector<BatchItem> items;
  friend bool operator==(const BatchRequest&, const BatchRequest&) = default;
};
struct Bye {
  friend bool operator==(const Bye&, const Bye&) = default;
};

using Request = std::variant<Hello, NextDistRequest, AcceptsRequest, BatchRequest, Bye>;

struct HelloAck {
  std::string version;
  std::vector<std::string> capabilities;
  std::vector<std::string> alphabet;
  friend bool operator==(const HelloAck&, const HelloAck&) = default;
};
// -infinity encodes a token with zero probability ("null" on the wire).
struct NextDistResponse {
  std::vector<double> logprobs;
  friend bool operator==(const NextDistResponse&, const NextDistResponse&) = default;
};
struct AcceptsResponse {
  bool accepts = false;
  friend bool operator==(const AcceptsResponse&, const AcceptsResponse&) = default;
};
struct ErrorInfo {
  std::string code;
  std::string message;
  friend bool operator==(const ErrorInfo&, const ErrorInfo&) = default;
};
using BatchResult = std::variant<NextDistResponse, AcceptsResponse, ErrorInfo>;
struct BatchResponse {
  std::vector<BatchResult> results;
  friend bool operator==(const BatchResponse&, const BatchResponse&) = default;
};
struct ByeAck {
  friend bool operator==(const ByeAck&, const ByeAck&) = default;
};

using Response =
    std::variant<HelloAck, NextDistResponse, AcceptsResponse, BatchResponse, ByeAck, ErrorInfo>;

struct RequestEnvelope {
  std::uint64_t id = 0;
  Request body;
  friend bool operator==(const RequestEnvelope&, const RequestEnvelope&) = default;
};
struct ResponseEnvelope {
  std::uint64_t id = 0;
  Response body;
  friend bool operator==(const ResponseEnvelope&, const ResponseEnvelope&) = default;
};

// One JSON object per line, without the trailing "\n". Keys appear in a
// fixed order so encodings are canonical.
std::string encode(const RequestEnvelope& message);
std::string encode(const ResponseEnvelope& message);

// Decoding failure with the wire error code to report and, when it could be
// read, the id of the offending message.
class MessageError : public ProtocolError {
 public:
  MessageError(std::string code, const std::string& what,
               std::optional<std::uint64_t> id = std::nullopt)
      : ProtocolError(what), code_(std::move(code)), id_(id) {}
  const std::string& code() const noexcept { return code_; }
  const std::optional<std::uint64_t>& id() const noexcept { return id_; }

 private:
  std::string code_;
  std::optional<std::uint64_t> id_;
};

// Both throw MessageError on malformed input. Unknown keys are ignored.
RequestEnvelope decode_request(std::string_view line);
ResponseEnvelope decode_response(std::string_view line);

std::string op_name(const Request& request);

}  // namespace worldgauge::bridge
