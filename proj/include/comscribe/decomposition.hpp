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

// Algorithm-aware byte models: each collective call becomes a list of
// directed (src, dst, bytes) transfers between endpoints.
//
// Ring collectives split S into N chunks of ceil(S/N) bytes (the last ones
// smaller, possibly empty); chunk i belongs to rank i. AllReduce is a
// reduce-scatter followed by an all-gather, so the rank at ring position p
// sends every chunk except its own (reduce-scatter) and every chunk except its
// successor's (all-gather):
//
//     sent(p) = 2S - chunk(order[p]) - chunk(order[p+1])
//
// which is 2(N-1)S/N when N divides S.
//
// Tree AllReduce uses two binary trees, each carrying half the payload (the
// first tree takes the odd byte). Every tree edge moves its share once up
// (reduce) and once down (broadcast).
//
// Collnet exchanges the full payload with a virtual in-network aggregator.

#include "comscribe/algorithm_selection.hpp"
#include "comscribe/grouping.hpp"
#include "comscribe/types.hpp"

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace comscribe {

struct PairTransfer {
    Endpoint src;
    Endpoint dst;
    Bytes bytes = 0;

    friend bool operator==(const PairTransfer&, const PairTransfer&) = default;
};

struct Decomposition {
    std::vector<PairTransfer> transfers;
    // Filled for every participating rank, including ones that move nothing.
    // Traffic to the aggregator endpoint is counted here too (collnet), so
    // the per-rank sums equal the transfer total only when no transfer has a
    // non-rank endpoint on the other side.
    std::map<int, Bytes> per_rank_sent;
    std::map<int, Bytes> per_rank_recv;

    Bytes total_bytes() const;

    friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

using EdgeKey = std::pair<Endpoint, Endpoint>;
using EdgeTotals = std::map<EdgeKey, Bytes>;

// Sums transfers by directed pair, dropping zero-byte entries.
EdgeTotals edge_totals(const Decomposition& d);

// Two spanning binary trees over ranks 0..N-1.
struct DoubleBinaryTree {
    struct Node {
        std::optional<int> parent;
        std::vector<int> children;

        friend bool operator==(const Node&, const Node&) = default;
    };
    using Tree = std::vector<Node>; // indexed by rank

    int n_ranks = 0;
    std::array<Tree, 2> trees;
    std::array<int, 2> roots{};

    // Byte share of tree t (0 or 1) for payload S. Shares sum to S.
    static Bytes share(Bytes payload, int t) { return t == 0 ? payload - payload / 2 : payload / 2; }

    bool is_leaf(int tree, int rank) const {
        return trees[static_cast<std::size_t>(tree)][static_cast<std::size_t>(rank)].children.empty();
    }

    friend bool operator==(const DoubleBinaryTree&, const DoubleBinaryTree&) = default;
};

// First tree: in-order binary tree over positions 0..N-1, where the root of
// a range is placed right after the largest perfect left subtree that still
// leaves room for it. Rank at position p is p. Second tree: the same shape
// with rank (p + 1) mod N at position p. For even N every rank is a leaf in
// exactly one tree.
DoubleBinaryTree build_double_binary_tree(int n_ranks);

// Throws DegenerateTree if the structure is not two spanning trees over
// n_ranks ranks.
void validate_tree(const DoubleBinaryTree& dbt, int n_ranks);

// Throws InvariantViolation unless `order` is a permutation of 0..n-1. An
// empty order means identity.
std::vector<int> normalize_ring_order(std::span<const int> order, int n_ranks);

// Byte-level models. `ranks[r]` is the endpoint of rank r; payload is S.
namespace model {

Decomposition ring_allreduce(std::span<const Endpoint> ranks, std::span<const int> ring_order, Bytes payload);
Decomposition ring_reducescatter(std::span<const Endpoint> ranks, std::span<const int> ring_order,
                                 Bytes payload);
Decomposition ring_allgather(std::span<const Endpoint> ranks, std::span<const int> ring_order, Bytes payload);
Decomposition ring_broadcast(std::span<const Endpoint> ranks, std::span<const int> ring_order, int root,
                             Bytes payload);
Decomposition ring_reduce(std::span<const Endpoint> ranks, std::span<const int> ring_order, int root,
                          Bytes payload);
Decomposition tree_allreduce(std::span<const Endpoint> ranks, const DoubleBinaryTree& dbt, Bytes payload);
Decomposition collnet_allreduce(std::span<const Endpoint> ranks, Bytes payload);

std::vector<Endpoint> identity_endpoints(int n_ranks);

} // namespace model

// Instance-level entry points. Throw WrongAlgorithm when the instance was
// resolved to another algorithm (or is another collective), MissingRoot for
// rooted collectives without a root.
Decomposition decompose_allreduce_ring(const CollectiveInstance& inst, std::span<const int> ring_order = {});
Decomposition decompose_allreduce_tree(const CollectiveInstance& inst, const DoubleBinaryTree& dbt);
Decomposition decompose_allreduce_collnet(const CollectiveInstance& inst);
Decomposition decompose_broadcast_ring(const CollectiveInstance& inst, std::span<const int> ring_order = {});
Decomposition decompose_reduce_ring(const CollectiveInstance& inst, std::span<const int> ring_order = {});
Decomposition decompose_allgather_ring(const CollectiveInstance& inst, std::span<const int> ring_order = {});
Decomposition decompose_reducescatter_ring(const CollectiveInstance& inst, std::span<const int> ring_order = {});

// Single device-to-device transfer; empty when both ranks sit on one GPU.
Decomposition decompose_p2p(const P2PInstance& p);
// Single transfer src -> dst of the logged byte count (kept when zero).
// Copies within one GPU produce no transfer.
Decomposition decompose_copy(const TraceEvent& e);

// Ring orders per communicator. Lookup order: exact comm id, then a default
// for the communicator size, then identity.
struct RingConfig {
    std::map<std::string, std::vector<int>> by_comm;
    std::map<int, std::vector<int>> by_size;

    std::vector<int> order_for(const std::string& comm_id, int n_ranks) const;
};

// Dispatches on (collective, resolved algorithm).
Decomposition decompose(const CollectiveInstance& inst, const RingConfig& rings = {});

} // namespace comscribe
