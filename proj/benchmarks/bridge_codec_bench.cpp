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

#include <benchmark/benchmark.h>

#include <cmath>
#include <limits>
#include <string>

#include "worldgauge/bridge/protocol.hpp"

namespace wg = worldgauge;
namespace bridge = worldgauge::bridge;

namespace {

bridge::ResponseEnvelope distribution(std::size_t tokens) {
  bridge::NextDistResponse r;
  for (std::size_t i = 0; i < tokens; ++i) {
    r.logprobs.push_back(i % 5 == 0 ? -std::numeric_limits<double>::infinity()
                                    : -std::log(static_cast<double>(tokens)) - 1e-3 * i);
  }
  return {7, r};
}

void BM_EncodeNextDist(benchmark::State& state) {
  const auto msg = distribution(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bridge::encode(msg));
}
BENCHMARK(BM_EncodeNextDist)->Arg(7)->Arg(409);

void BM_DecodeNextDist(benchmark::State& state) {
  const auto line = bridge::encode(distribution(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(bridge::decode_response(line));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * line.size()));
}
BENCHMARK(BM_DecodeNextDist)->Arg(7)->Arg(409);

void BM_DecodeBatchRequest(benchmark::State& state) {
  bridge::BatchRequest batch;
  for (std::size_t i = 0; i < bridge::kMaxBatch; ++i) {
    wg::TokenSeq prefix;
    for (std::size_t j = 0; j < 40; ++j) prefix.push_back(static_cast<wg::TokenId>((i + j) % 409));
    batch.items.emplace_back(bridge::NextDistRequest{prefix});
  }
  const auto line = bridge::encode(bridge::RequestEnvelope{3, batch});
  for (auto _ : state) benchmark::DoNotOptimize(bridge::decode_request(line));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * line.size()));
}
BENCHMARK(BM_DecodeBatchRequest);

}  // namespace

BENCHMARK_MAIN();
