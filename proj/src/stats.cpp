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
#include "comscribe/stats.hpp"

#include "comscribe/error.hpp"

namespace comscribe {

namespace {

struct TypeNames {
    CommType type;
    std::string_view key;
    std::string_view display;
};

constexpr TypeNames kTypeNames[] = {
    {CommType::AllReduce, "AllReduce", "AllReduce"},
    {CommType::Broadcast, "Broadcast", "Broadcast"},
    {CommType::Reduce, "Reduce", "Reduce"},
    {CommType::ReduceScatter, "ReduceScatter", "ReduceScatter"},
    {CommType::AllGather, "AllGather", "AllGather"},
    {CommType::SendRecv, "SendRecv", "Send/Recv"},
    {CommType::ExplicitTransfer, "ExplicitTransfer", "Explicit Transfers"},
    {CommType::UnifiedMemory, "UnifiedMemory", "Unified Memory"},
    {CommType::ZeroCopy, "ZeroCopy", "Zero Copy Memory"},
};

} // namespace

CommType comm_type(CollectiveKind c) {
    switch (c) {
    case CollectiveKind::AllReduce: return CommType::AllReduce;
    case CollectiveKind::Broadcast: return CommType::Broadcast;
    case CollectiveKind::Reduce: return CommType::Reduce;
    case CollectiveKind::ReduceScatter: return CommType::ReduceScatter;
    case CollectiveKind::AllGather: return CommType::AllGather;
    }
    return CommType::AllReduce;
}

CommType comm_type_of_copy(EventKind k) {
    switch (k) {
    case EventKind::Memcpy: return CommType::ExplicitTransfer;
    case EventKind::UnifiedMemory: return CommType::UnifiedMemory;
    case EventKind::ZeroCopy: return CommType::ZeroCopy;
    default: throw InvariantViolation("not a copy event kind");
    }
}

std::string_view key_name(CommType t) { return kTypeNames[static_cast<std::size_t>(t)].key; }
std::string_view display_name(CommType t) { return kTypeNames[static_cast<std::size_t>(t)].display; }

std::optional<CommType> parse_comm_type(std::string_view key) {
    for (const auto& n : kTypeNames) {
        if (n.key == key) return n.type;
    }
    return std::nullopt;
}

StatsSummary summarize(std::span<const CallRecord> records) {
    StatsSummary s;
    for (const auto& rec : records) {
        TypeStats& row = s[rec.type];
        row.calls += 1;
        row.payload_bytes = checked_add(row.payload_bytes, rec.payload_bytes);
        row.wire_bytes = checked_add(row.wire_bytes, rec.decomposition.total_bytes());
    }
    return s;
}

std::map<CommType, CommMatrix> split_by_primitive(std::span<const CallRecord> records, int gpus) {
    std::map<CommType, CommMatrix> out;
    for (const auto& rec : records) {
        auto [it, inserted] = out.try_emplace(rec.type, gpus);
        it->second.add(rec.decomposition);
    }
    return out;
}

CommMatrix combined_matrix(std::span<const CallRecord> records, int gpus) {
    CommMatrix m(gpus);
    for (const auto& rec : records) {
        m.add(rec.decomposition);
    }
    return m;
}

} // namespace comscribe
