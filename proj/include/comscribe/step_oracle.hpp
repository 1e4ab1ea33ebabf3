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

// Chunk-level, lockstep simulation of the ring and double-binary-tree
// schedules. Every rank tracks which contributions each chunk holds; a rank
// only forwards data it actually has, and the final buffers are checked for
// completeness. Used as the reference for the closed-form models in
// decomposition.hpp, so nothing here reuses their arithmetic.

#include "comscribe/decomposition.hpp"
#include "comscribe/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace comscribe::oracle {

// Largest communicator the simulator accepts (contributions are bitmasks).
inline constexpr int kMaxRanks = 64;

struct ChunkSend {
    int src = 0;
    int dst = 0;
    Bytes bytes = 0; // always > 0

    friend bool operator==(const ChunkSend&, const ChunkSend&) = default;
};

struct Step {
    std::size_t index = 0;
    std::vector<ChunkSend> sends;
};

// Steps in temporal order. Steps in which nothing moves (zero-byte chunks
// only) are left out.
struct StepLog {
    std::vector<Step> steps;
};

StepLog simulate_ring(CollectiveKind collective, int n_ranks, Bytes payload, std::optional<int> root = std::nullopt,
                      std::span<const int> ring_order = {});

StepLog simulate_tree(int n_ranks, Bytes payload, const DoubleBinaryTree& dbt);

// Sums chunk sends per directed pair. Rank r maps to endpoints[r], or to
// GPU r when no endpoints are given.
Decomposition aggregate(const StepLog& log, int n_ranks, std::span<const Endpoint> endpoints = {});

} // namespace comscribe::oracle
