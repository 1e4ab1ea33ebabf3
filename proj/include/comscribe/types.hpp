/*
 Copyright 2026 The ComScribe Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace comscribe {

using Bytes = std::uint64_t;

enum class EndpointKind : std::uint8_t { Host, Gpu, NetAggregator };

// One side of a transfer. Host and NetAggregator always carry index 0.
struct Endpoint {
    EndpointKind kind = EndpointKind::Host;
    int index = 0;

    static constexpr Endpoint host() { return {EndpointKind::Host, 0}; }
    static constexpr Endpoint gpu(int device) { return {EndpointKind::Gpu, device}; }
    static constexpr Endpoint aggregator() { return {EndpointKind::NetAggregator, 0}; }

    friend constexpr auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

std::string to_string(const Endpoint& e);

enum class CollectiveKind : std::uint8_t { AllReduce, Broadcast, Reduce, ReduceScatter, AllGather };

inline constexpr std::array<CollectiveKind, 5> kAllCollectives = {
    CollectiveKind::AllReduce, CollectiveKind::Broadcast, CollectiveKind::Reduce,
    CollectiveKind::ReduceScatter, CollectiveKind::AllGather};

constexpr bool is_rooted(CollectiveKind c) {
    return c == CollectiveKind::Broadcast || c == CollectiveKind::Reduce;
}

enum class AlgorithmKind : std::uint8_t { Ring, Tree, Collnet };

// What a trace line requests; Auto is resolved by select_algorithm.
enum class AlgorithmChoice : std::uint8_t { Ring, Tree, Collnet, Auto };

constexpr AlgorithmChoice to_choice(AlgorithmKind a) {
    return static_cast<AlgorithmChoice>(static_cast<std::uint8_t>(a));
}

enum class DataType : std::uint8_t {
    Int8, Uint8, Int32, Uint32, Int64, Uint64, Float16, Bfloat16, Float32, Float64
};

constexpr Bytes width_bytes(DataType t) {
    switch (t) {
    case DataType::Int8:
    case DataType::Uint8: return 1;
    case DataType::Float16:
    case DataType::Bfloat16: return 2;
    case DataType::Int32:
    case DataType::Uint32:
    case DataType::Float32: return 4;
    case DataType::Int64:
    case DataType::Uint64:
    case DataType::Float64: return 8;
    }
    return 0;
}

// Wire names used by the trace format ("allreduce", "ring", "float32", ...).
std::string_view to_string(CollectiveKind c);
std::string_view to_string(AlgorithmKind a);
std::string_view to_string(AlgorithmChoice a);
std::string_view to_string(DataType t);
std::string_view to_string(EndpointKind k);

// Display names ("AllReduce", "Broadcast", ...).
std::string_view display_name(CollectiveKind c);

std::optional<CollectiveKind> parse_collective(std::string_view s);
std::optional<AlgorithmChoice> parse_algorithm(std::string_view s);
// Also accepts the NCCL spellings: char, int, half, float, double.
std::optional<DataType> parse_dtype(std::string_view s);
std::optional<EndpointKind> parse_endpoint_kind(std::string_view s);

// Overflow-checked arithmetic on byte counters; throws CounterOverflow.
Bytes checked_add(Bytes a, Bytes b);
Bytes checked_mul(Bytes a, Bytes b);

} // namespace comscribe
