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
#include "comscribe/error.hpp"
#include "comscribe/types.hpp"

#include <doctest.h>

#include <limits>

using namespace comscribe;

TEST_CASE("wire names round-trip") {
    for (CollectiveKind c : kAllCollectives) CHECK(parse_collective(to_string(c)) == c);
    for (auto a : {AlgorithmChoice::Ring, AlgorithmChoice::Tree, AlgorithmChoice::Collnet, AlgorithmChoice::Auto}) {
        CHECK(parse_algorithm(to_string(a)) == a);
    }
    for (auto t : {DataType::Int8, DataType::Uint8, DataType::Int32, DataType::Uint32, DataType::Int64,
                   DataType::Uint64, DataType::Float16, DataType::Bfloat16, DataType::Float32, DataType::Float64}) {
        CHECK(parse_dtype(to_string(t)) == t);
    }
    CHECK(parse_collective("gather") == std::nullopt);
    CHECK(parse_algorithm("") == std::nullopt);
}

TEST_CASE("dtype aliases and widths") {
    CHECK(parse_dtype("float") == DataType::Float32);
    CHECK(parse_dtype("half") == DataType::Float16);
    CHECK(parse_dtype("double") == DataType::Float64);
    CHECK(parse_dtype("char") == DataType::Int8);
    CHECK(parse_dtype("int") == DataType::Int32);
    CHECK(width_bytes(DataType::Bfloat16) == 2);
    CHECK(width_bytes(DataType::Uint64) == 8);
}

TEST_CASE("endpoints") {
    CHECK(to_string(Endpoint::host()) == "host");
    CHECK(to_string(Endpoint::gpu(3)) == "gpu3");
    CHECK(to_string(Endpoint::aggregator()) == "net");
    CHECK(Endpoint::host() < Endpoint::gpu(0));
    CHECK(Endpoint::gpu(1) < Endpoint::gpu(2));
    CHECK(display_name(CollectiveKind::ReduceScatter) == "ReduceScatter");
}

TEST_CASE("checked arithmetic") {
    constexpr Bytes max = std::numeric_limits<Bytes>::max();
    CHECK(checked_add(1, 2) == 3);
    CHECK(checked_mul(1u << 20, 1u << 20) == Bytes{1} << 40);
    CHECK_THROWS_AS(checked_add(max, 1), CounterOverflow);
    CHECK_THROWS_AS(checked_mul(max / 2 + 1, 2), CounterOverflow);
}
