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

#include "comscribe/decomposition.hpp"
#include "comscribe/matrix.hpp"

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace comscribe {

enum class CommType : std::uint8_t {
    AllReduce, Broadcast, Reduce, ReduceScatter, AllGather,
    SendRecv, ExplicitTransfer, UnifiedMemory, ZeroCopy
};

inline constexpr std::array<CommType, 9> kAllCommTypes = {
    CommType::AllReduce, CommType::Broadcast,        CommType::Reduce,
    CommType::ReduceScatter, CommType::AllGather,    CommType::SendRecv,
    CommType::ExplicitTransfer, CommType::UnifiedMemory, CommType::ZeroCopy};

CommType comm_type(CollectiveKind c);
// Throws InvariantViolation for non-copy events.
CommType comm_type_of_copy(EventKind k);

// Identifier used for file names and JSON keys ("AllReduce", "SendRecv", ...).
std::string_view key_name(CommType t);
// Table label ("Explicit Transfers", "Zero Copy Memory", ...).
std::string_view display_name(CommType t);
std::optional<CommType> parse_comm_type(std::string_view key);

// One decomposed call: a collective instance, a matched send/recv pair, or a
// copy event.
struct CallRecord {
    CommType type = CommType::AllReduce;
    Bytes payload_bytes = 0;
    Decomposition decomposition;
};

struct TypeStats {
    std::uint64_t calls = 0;
    Bytes payload_bytes = 0; // sum of S over calls
    Bytes wire_bytes = 0;    // sum of modeled transfer bytes

    friend bool operator==(const TypeStats&, const TypeStats&) = default;
};

struct StatsSummary {
    std::array<TypeStats, kAllCommTypes.size()> rows{};

    TypeStats& operator[](CommType t) { return rows[static_cast<std::size_t>(t)]; }
    const TypeStats& operator[](CommType t) const { return rows[static_cast<std::size_t>(t)]; }

    friend bool operator==(const StatsSummary&, const StatsSummary&) = default;
};

StatsSummary summarize(std::span<const CallRecord> records);

// One matrix of dimension `gpus` per communication type that occurs.
std::map<CommType, CommMatrix> split_by_primitive(std::span<const CallRecord> records, int gpus);

CommMatrix combined_matrix(std::span<const CallRecord> records, int gpus);

} // namespace comscribe
