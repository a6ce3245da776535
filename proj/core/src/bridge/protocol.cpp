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

#include "worldgauge/bridge/protocol.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace worldgauge::bridge {

namespace {

using Json = nlohmann::ordered_json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Json logprobs_json(const std::vector<double>& lp) {
  Json out = Json::array();
  for (double v : lp) {
    if (v == -std::numeric_limits<double>::infinity()) {
      out.push_back(nullptr);
    } else {
      out.push_back(v);
    }
  }
  return out;
}

Json item_json(const BatchItem& item) {
  return std::visit(Overloaded{
                        [](const NextDistRequest& r) {
                          return Json{{"op", "next_dist"}, {"prefix", r.prefix}};
                        },
                        [](const AcceptsRequest& r) {
                          return Json{{"op", "accepts"}, {"prefix", r.prefix}, {"suffix", r.suffix}};
                        },
                    },
                    item);
}

Json error_json(const ErrorInfo& e) {
  return Json{{"code", e.code}, {"message", e.message}};
}

Json result_json(const BatchResult& r) {
  return std::visit(Overloaded{
                        [](const NextDistResponse& x) { return Json{{"logprobs", logprobs_json(x.logprobs)}}; },
                        [](const AcceptsResponse& x) { return Json{{"accepts", x.accepts}}; },
                        [](const ErrorInfo& x) { return Json{{"error", error_json(x)}}; },
                    },
                    r);
}

// ---- decoding helpers -------------------------------------------------------

struct Reader {
  std::optional<std::uint64_t> id;

  [[noreturn]] void fail(std::string_view code, const std::string& what) const {
    throw MessageError(std::string(code), what, id);
  }

  const nlohmann::json& field(const nlohmann::json& obj, const char* key) const {
    if (!obj.is_object()) fail(codes::kBadRequest, "expected a JSON object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(codes::kBadRequest, std::string("missing field '") + key + "'");
    return *it;
  }

  std::string string_field(const nlohmann::json& obj, const char* key) const {
    const auto& v = field(obj, key);
    if (!v.is_string()) fail(codes::kBadRequest, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<std::string> strings(const nlohmann::json& obj, const char* key) const {
    const auto& v = field(obj, key);
    if (!v.is_array()) fail(codes::kBadRequest, std::string("field '") + key + "' must be an array");
    std::vector<std::string> out;
    for (const auto& x : v) {
      if (!x.is_string()) fail(codes::kBadRequest, std::string("field '") + key + "' must hold strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }

  TokenSeq tokens(const nlohmann::json& obj, const char* key) const {
    const auto& v = field(obj, key);
    if (!v.is_array()) fail(codes::kBadRequest, std::string("field '") + key + "' must be an array");
    TokenSeq out;
    out.reserve(v.size());
    for (const auto& x : v) {
      if (!x.is_number_unsigned() ||
          x.get<std::uint64_t>() > std::numeric_limits<TokenId>::max()) {
        fail(codes::kBadRequest, std::string("field '") + key + "' must hold token ids");
      }
      out.push_back(x.get<TokenId>());
    }
    return out;
  }

  std::vector<double> logprobs(const nlohmann::json& obj) const {
    const auto& v = field(obj, "logprobs");
    if (!v.is_array()) fail(codes::kBadRequest, "field 'logprobs' must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
      if (x.is_null()) {
        out.push_back(-std::numeric_limits<double>::infinity());
      } else if (x.is_number()) {
        const double d = x.get<double>();
        if (!std::isfinite(d)) fail(codes::kBadRequest, "log-probabilities must be finite or null");
        out.push_back(d);
      } else {
        fail(codes::kBadRequest, "log-probabilities must be numbers or null");
      }
    }
    return out;
  }

  bool boolean(const nlohmann::json& obj, const char* key) const {
    const auto& v = field(obj, key);
    if (!v.is_boolean()) fail(codes::kBadRequest, std::string("field '") + key + "' must be a boolean");
    return v.get<bool>();
  }

  ErrorInfo error(const nlohmann::json& obj) const {
    const auto& e = field(obj, "error");
    return {string_field(e, "code"), string_field(e, "message")};
  }
};

nlohmann::json parse_object(std::string_view line) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    // The library's own wording varies between releases; keep replies stable.
    throw MessageError(std::string(codes::kBadRequest),
                       "malformed JSON near byte " + std::to_string(e.byte));
  } catch (const nlohmann::json::exception&) {
    throw MessageError(std::string(codes::kBadRequest), "JSON number out of range");
  }
  if (!doc.is_object()) {
    throw MessageError(std::string(codes::kBadRequest), "a message must be a JSON object");
  }
  return doc;
}

std::optional<std::uint64_t> read_id(const nlohmann::json& doc) {
  auto it = doc.find("id");
  if (it == doc.end() || !it->is_number_unsigned()) return std::nullopt;
  return it->get<std::uint64_t>();
}

BatchItem decode_item(const Reader& rd, const nlohmann::json& obj) {
  const std::string op = rd.string_field(obj, "op");
  if (op == "next_dist") return NextDistRequest{rd.tokens(obj, "prefix")};
  if (op == "accepts") return AcceptsRequest{rd.tokens(obj, "prefix"), rd.tokens(obj, "suffix")};
  rd.fail(codes::kUnsupported, "operation '" + op + "' cannot appear in a batch");
}

BatchResult decode_result(const Reader& rd, const nlohmann::json& obj) {
  if (!obj.is_object()) rd.fail(codes::kBadRequest, "batch results must be objects");
  if (obj.contains("error")) return rd.error(obj);
  if (obj.contains("logprobs")) return NextDistResponse{rd.logprobs(obj)};
  if (obj.contains("accepts")) return AcceptsResponse{rd.boolean(obj, "accepts")};
  rd.fail(codes::kBadRequest, "unrecognized batch result");
}

}  // namespace

std::string op_name(const Request& request) {
  return std::visit(Overloaded{
                        [](const Hello&) { return "hello"; },
                        [](const NextDistRequest&) { return "next_dist"; },
                        [](const AcceptsRequest&) { return "accepts"; },
                        [](const BatchRequest&) { return "batch"; },
                        [](const Bye&) { return "bye"; },
                    },
                    request);
}

std::string encode(const RequestEnvelope& m) {
  Json doc{{"id", m.id}, {"op", op_name(m.body)}};
  std::visit(Overloaded{
                 [&](const Hello& r) {
                   doc["version"] = r.version;
                   doc["alphabet"] = r.alphabet;
                 },
                 [&](const NextDistRequest& r) { doc["prefix"] = r.prefix; },
                 [&](const AcceptsRequest& r) {
                   doc["prefix"] = r.prefix;
                   doc["suffix"] = r.suffix;
                 },
                 [&](const BatchRequest& r) {
                   Json items = Json::array();
                   for (const auto& item : r.items) items.push_back(item_json(item));
                   doc["requests"] = std::move(items);
                 },
                 [&](const Bye&) {},
             },
             m.body);
  return doc.dump();
}

std::string encode(const ResponseEnvelope& m) {
  Json doc{{"id", m.id}};
  std::visit(Overloaded{
                 [&](const HelloAck& r) {
                   doc["op"] = "hello_ack";
                   doc["version"] = r.version;
                   doc["capabilities"] = r.capabilities;
                   doc["alphabet"] = r.alphabet;
                 },
                 [&](const NextDistResponse& r) { doc["logprobs"] = logprobs_json(r.logprobs); },
                 [&](const AcceptsResponse& r) { doc["accepts"] = r.accepts; },
                 [&](const BatchResponse& r) {
                   Json results = Json::array();
                   for (const auto& x : r.results) results.push_back(result_json(x));
                   doc["results"] = std::move(results);
                 },
                 [&](const ByeAck&) { doc["op"] = "bye_ack"; },
                 [&](const ErrorInfo& e) { doc["error"] = error_json(e); },
             },
             m.body);
  return doc.dump();
}

RequestEnvelope decode_request(std::string_view line) {
  const auto doc = parse_object(line);
  Reader rd{read_id(doc)};
  if (!rd.id) rd.fail(codes::kBadRequest, "missing or invalid 'id'");
  const std::string op = rd.string_field(doc, "op");
  RequestEnvelope out;
  out.id = *rd.id;
  if (op == "hello") {
    out.body = Hello{rd.string_field(doc, "version"), rd.strings(doc, "alphabet")};
  } else if (op == "next_dist") {
    out.body = NextDistRequest{rd.tokens(doc, "prefix")};
  } else if (op == "accepts") {
    out.body = AcceptsRequest{rd.tokens(doc, "prefix"), rd.tokens(doc, "suffix")};
  } else if (op == "batch") {
    const auto& items = rd.field(doc, "requests");
    if (!items.is_array()) rd.fail(codes::kBadRequest, "field 'requests' must be an array");
    if (items.size() > kMaxBatch) {
      rd.fail(codes::kTooLarge, "a batch holds at most " + std::to_string(kMaxBatch) + " requests");
    }
    BatchRequest batch;
    for (const auto& item : items) batch.items.push_back(decode_item(rd, item));
    out.body = std::move(batch);
  } else if (op == "bye") {
    out.body = Bye{};
  } else {
    rd.fail(codes::kUnsupported, "unknown operation '" + op + "'");
  }
  return out;
}

ResponseEnvelope decode_response(std::string_view line) {
  const auto doc = parse_object(line);
  Reader rd{read_id(doc)};
  if (!rd.id) rd.fail(codes::kBadRequest, "missing or invalid 'id'");
  ResponseEnvelope out;
  out.id = *rd.id;
  if (doc.contains("error")) {
    out.body = rd.error(doc);
  } else if (doc.contains("op")) {
    const std::string op = rd.string_field(doc, "op");
    if (op == "hello_ack") {
      out.body = HelloAck{rd.string_field(doc, "version"), rd.strings(doc, "capabilities"),
                          rd.strings(doc, "alphabet")};
    } else if (op == "bye_ack") {
      out.body = ByeAck{};
    } else {
      rd.fail(codes::kUnsupported, "unknown response op '" + op + "'");
    }
  } else if (doc.contains("logprobs")) {
    out.body = NextDistResponse{rd.logprobs(doc)};
  } else if (doc.contains("accepts")) {
    out.body = AcceptsResponse{rd.boolean(doc, "accepts")};
  } else if (doc.contains("results")) {
    const auto& results = rd.field(doc, "results");
    if (!results.is_array()) rd.fail(codes::kBadRequest, "field 'results' must be an array");
    BatchResponse batch;
    for (const auto& r : results) batch.results.push_back(decode_result(rd, r));
    out.body = std::move(batch);
  } else {
    rd.fail(codes::kBadRequest, "unrecognized response");
  }
  return out;
}

}  // namespace worldgauge::bridge
