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

#include "comscribe/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace comscribe {

enum class EventKind : std::uint8_t { Collective, Send, Recv, Memcpy, UnifiedMemory, ZeroCopy };

constexpr bool is_copy(EventKind k) {
    return k == EventKind::Memcpy || k == EventKind::UnifiedMemory || k == EventKind::ZeroCopy;
}

enum class CopyKind : std::uint8_t { H2D, D2H, D2D };

std::string_view to_string(EventKind k);
std::string_view to_string(CopyKind k);
std::optional<EventKind> parse_event_kind(std::string_view s);
std::optional<CopyKind> parse_copy_kind(std::string_view s);

// One logged communication action of one rank.
//
// Which optional fields are present depends on `kind`:
//   Collective          collective, algorithm, count, dtype, root (Broadcast/Reduce)
//   Send / Recv         peer, count, dtype
//   Memcpy / UM / ZC    copy_kind, copy_src, copy_dst, bytes
struct TraceEvent {
    std::uint64_t seq = 0;
    std::int64_t timestamp_ns = 0;
    EventKind kind = EventKind::Collective;
    std::string comm_id;
    int n_ranks = 1;
    int rank = 0;
    int device = 0;

    std::optional<CollectiveKind> collective;
    std::optional<AlgorithmChoice> algorithm;
    std::optional<int> root;
    std::optional<int> peer;
    std::optional<std::uint64_t> count;
    std::optional<DataType> dtype;

    std::optional<CopyKind> copy_kind;
    std::optional<Endpoint> copy_src;
    std::optional<Endpoint> copy_dst;
    std::optional<Bytes> bytes;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

// Checks the per-event invariants. Throws InvariantViolation.
void validate_event(const TraceEvent& e);

// Reads JSON Lines. Blank lines are skipped, unknown keys ignored. Besides
// per-event validation, seq must strictly increase per (comm, rank) within
// the stream. Throws MalformedLine, SchemaViolation or InvariantViolation;
// line numbers are 1-based.
std::vector<TraceEvent> parse_trace(std::istream& in);
std::vector<TraceEvent> parse_trace(std::string_view text);

// Canonical serialization: fixed key order, one line per event, '\n' ended.
// parse_trace(write_trace(e)) == e for valid input.
void write_trace(std::ostream& out, const std::vector<TraceEvent>& events);
std::string write_trace(const std::vector<TraceEvent>& events);

// Single-line form without the trailing newline.
std::string to_json_line(const TraceEvent& e);

} // namespace comscribe
