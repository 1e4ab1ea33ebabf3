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

#include "comscribe/algorithm_selection.hpp"
#include "comscribe/trace.hpp"
#include "comscribe/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace comscribe {

// One logical collective call: the ordinal-th collective of every rank of a
// communicator, all with compatible arguments.
struct CollectiveInstance {
    std::string comm_id;
    std::size_t ordinal = 0;
    CollectiveKind collective = CollectiveKind::AllReduce;
    AlgorithmChoice requested = AlgorithmChoice::Ring;
    AlgorithmKind algorithm = AlgorithmKind::Ring; // resolved, never Auto
    int n_ranks = 1;
    std::optional<int> root;
    std::uint64_t count = 0;
    DataType dtype = DataType::Uint8;
    Bytes payload_bytes = 0;             // S
    std::vector<int> per_rank_devices;   // rank -> GPU id

    friend bool operator==(const CollectiveInstance&, const CollectiveInstance&) = default;
};

// Payload S of a collective call. AllGather counts are per-rank send counts
// and ReduceScatter counts per-rank receive counts, so both scale by N.
Bytes collective_payload(CollectiveKind c, int n_ranks, std::uint64_t count, DataType dtype);

// Builds an instance directly, e.g. for tests and the verify command. Devices
// default to the identity mapping rank r -> GPU r.
CollectiveInstance make_instance(CollectiveKind c, AlgorithmKind algo, int n_ranks, std::uint64_t count,
                                 DataType dtype, std::optional<int> root = std::nullopt,
                                 std::vector<int> devices = {});

// A Send matched with its Recv.
struct P2PInstance {
    std::string comm_id;
    std::size_t ordinal = 0; // k-th message from src_rank to dst_rank
    int src_rank = 0;
    int dst_rank = 0;
    int src_device = 0;
    int dst_device = 0;
    std::uint64_t count = 0;
    DataType dtype = DataType::Uint8;
    Bytes bytes = 0;

    friend bool operator==(const P2PInstance&, const P2PInstance&) = default;
};

struct Diagnostic {
    enum class Kind {
        IncompatibleArguments,
        IncompleteInstance,
        DeviceConflict,
        InconsistentCommunicator,
        UnmatchedSend,
        UnmatchedRecv,
        P2PMismatch,
    };
    Kind kind;
    std::string comm_id;
    std::optional<std::size_t> ordinal;
    std::string message;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

std::string_view to_string(Diagnostic::Kind k);
std::string to_string(const Diagnostic& d);

struct GroupingResult {
    std::vector<CollectiveInstance> instances; // by comm id, then ordinal
    std::vector<P2PInstance> p2p;
    std::vector<TraceEvent> copies;            // copy events, in input order
    std::vector<TraceEvent> unmatched;
    std::vector<Diagnostic> diagnostics;
};

// Matches the k-th collective (by seq) of every rank of a communicator into
// instance ordinal k, and the k-th Send a->b with the k-th Recv b<-a.
// Incomplete or incompatible groups end up in `unmatched` with a diagnostic.
GroupingResult group_collectives(const std::vector<TraceEvent>& events,
                                 const SelectionPolicy& policy = {});

} // namespace comscribe
