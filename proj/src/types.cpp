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
#include "comscribe/types.hpp"

#include "comscribe/error.hpp"

#include <utility>

namespace comscribe {

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(const std::pair<std::string_view, E> (&table)[N], std::string_view s) {
    for (const auto& [name, value] : table) {
        if (name == s) {
            return value;
        }
    }
    return std::nullopt;
}

constexpr std::pair<std::string_view, CollectiveKind> kCollectiveNames[] = {
    {"allreduce", CollectiveKind::AllReduce},
    {"broadcast", CollectiveKind::Broadcast},
    {"reduce", CollectiveKind::Reduce},
    {"reducescatter", CollectiveKind::ReduceScatter},
    {"allgather", CollectiveKind::AllGather},
};

constexpr std::pair<std::string_view, AlgorithmChoice> kAlgorithmNames[] = {
    {"ring", AlgorithmChoice::Ring},
    {"tree", AlgorithmChoice::Tree},
    {"collnet", AlgorithmChoice::Collnet},
    {"auto", AlgorithmChoice::Auto},
};

// Canonical names first; the aliases after them are accepted on input only.
constexpr std::pair<std::string_view, DataType> kDtypeNames[] = {
    {"int8", DataType::Int8},         {"uint8", DataType::Uint8},
    {"int32", DataType::Int32},       {"uint32", DataType::Uint32},
    {"int64", DataType::Int64},       {"uint64", DataType::Uint64},
    {"float16", DataType::Float16},   {"bfloat16", DataType::Bfloat16},
    {"float32", DataType::Float32},   {"float64", DataType::Float64},
    {"char", DataType::Int8},         {"int", DataType::Int32},
    {"half", DataType::Float16},      {"float", DataType::Float32},
    {"double", DataType::Float64},
};

constexpr std::pair<std::string_view, EndpointKind> kEndpointNames[] = {
    {"host", EndpointKind::Host},
    {"gpu", EndpointKind::Gpu},
    {"net", EndpointKind::NetAggregator},
};

template <typename E, std::size_t N>
std::string_view reverse_lookup(const std::pair<std::string_view, E> (&table)[N], E value) {
    for (const auto& [name, v] : table) {
        if (v == value) {
            return name;
        }
    }
    return "?";
}

} // namespace

std::string_view to_string(CollectiveKind c) { return reverse_lookup(kCollectiveNames, c); }
std::string_view to_string(AlgorithmChoice a) { return reverse_lookup(kAlgorithmNames, a); }
std::string_view to_string(AlgorithmKind a) { return to_string(to_choice(a)); }
std::string_view to_string(DataType t) { return reverse_lookup(kDtypeNames, t); }
std::string_view to_string(EndpointKind k) { return reverse_lookup(kEndpointNames, k); }

std::string_view display_name(CollectiveKind c) {
    switch (c) {
    case CollectiveKind::AllReduce: return "AllReduce";
    case CollectiveKind::Broadcast: return "Broadcast";
    case CollectiveKind::Reduce: return "Reduce";
    case CollectiveKind::ReduceScatter: return "ReduceScatter";
    case CollectiveKind::AllGather: return "AllGather";
    }
    return "?";
}

std::string to_string(const Endpoint& e) {
    switch (e.kind) {
    case EndpointKind::Host: return "host";
    case EndpointKind::Gpu: return "gpu" + std::to_string(e.index);
    case EndpointKind::NetAggregator: return "net";
    }
    return "?";
}

std::optional<CollectiveKind> parse_collective(std::string_view s) { return lookup(kCollectiveNames, s); }
std::optional<AlgorithmChoice> parse_algorithm(std::string_view s) { return lookup(kAlgorithmNames, s); }
std::optional<DataType> parse_dtype(std::string_view s) { return lookup(kDtypeNames, s); }
std::optional<EndpointKind> parse_endpoint_kind(std::string_view s) { return lookup(kEndpointNames, s); }

Bytes checked_add(Bytes a, Bytes b) {
    Bytes r = 0;
    if (__builtin_add_overflow(a, b, &r)) {
        throw CounterOverflow("byte counter overflow in addition");
    }
    return r;
}

Bytes checked_mul(Bytes a, Bytes b) {
    Bytes r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw CounterOverflow("byte counter overflow in multiplication");
    }
    return r;
}

} // namespace comscribe
