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
#include "comscribe/decomposition.hpp"

#include "comscribe/error.hpp"

#include <algorithm>

namespace comscribe {

namespace {

// Collects transfers per directed pair and keeps per-rank totals.
class Builder {
public:
    Builder(std::span<const Endpoint> ranks) : ranks_(ranks) {
        for (int r = 0; r < static_cast<int>(ranks.size()); ++r) {
            dec_.per_rank_sent[r] = 0;
            dec_.per_rank_recv[r] = 0;
        }
    }

    void rank_to_rank(int src, int dst, Bytes bytes) {
        if (bytes == 0) return;
        add(endpoint(src), endpoint(dst), bytes);
        bump(dec_.per_rank_sent, src, bytes);
        bump(dec_.per_rank_recv, dst, bytes);
    }

    void rank_to_endpoint(int src, Endpoint dst, Bytes bytes) {
        if (bytes == 0) return;
        add(endpoint(src), dst, bytes);
        bump(dec_.per_rank_sent, src, bytes);
    }

    void endpoint_to_rank(Endpoint src, int dst, Bytes bytes) {
        if (bytes == 0) return;
        add(src, endpoint(dst), bytes);
        bump(dec_.per_rank_recv, dst, bytes);
    }

    Decomposition finish() {
        for (const auto& [edge, bytes] : edges_) {
            dec_.transfers.push_back({edge.first, edge.second, bytes});
        }
        return std::move(dec_);
    }

private:
    Endpoint endpoint(int rank) const { return ranks_[static_cast<std::size_t>(rank)]; }

    void add(Endpoint src, Endpoint dst, Bytes bytes) {
        if (src == dst) {
            throw InvariantViolation("self transfer on " + to_string(src));
        }
        Bytes& cell = edges_[{src, dst}];
        cell = checked_add(cell, bytes);
    }

    static void bump(std::map<int, Bytes>& totals, int rank, Bytes bytes) {
        Bytes& t = totals[rank];
        t = checked_add(t, bytes);
    }

    std::span<const Endpoint> ranks_;
    EdgeTotals edges_;
    Decomposition dec_;
};

// Size of ring chunk i when S is split into n chunks of ceil(S/n).
Bytes ring_chunk(Bytes payload, int n, int i) {
    const Bytes step = payload / static_cast<Bytes>(n) + (payload % static_cast<Bytes>(n) != 0 ? 1 : 0);
    const Bytes start = step * static_cast<Bytes>(i);
    if (start >= payload) return 0;
    return std::min(step, payload - start);
}

int ring_size(std::span<const Endpoint> ranks) { return static_cast<int>(ranks.size()); }

int position_of(const std::vector<int>& order, int rank) {
    auto it = std::find(order.begin(), order.end(), rank);
    if (it == order.end()) {
        throw InvariantViolation("root " + std::to_string(rank) + " is not part of the ring");
    }
    return static_cast<int>(it - order.begin());
}

int build_range(DoubleBinaryTree::Tree& tree, const std::vector<int>& rank_at, int lo, int hi) {
    const int n = hi - lo;
    if (n <= 0) return -1;
    int left = 0;
    while (2 * left + 1 <= n - 1) {
        left = 2 * left + 1;
    }
    const int root_pos = lo + left;
    const int root = rank_at[static_cast<std::size_t>(root_pos)];
    for (int child_pos : {build_range(tree, rank_at, lo, root_pos), build_range(tree, rank_at, root_pos + 1, hi)}) {
        if (child_pos < 0) continue;
        const int child = rank_at[static_cast<std::size_t>(child_pos)];
        tree[static_cast<std::size_t>(child)].parent = root;
        tree[static_cast<std::size_t>(root)].children.push_back(child);
    }
    return root_pos;
}

std::vector<Endpoint> device_endpoints(const CollectiveInstance& inst) {
    if (inst.per_rank_devices.size() != static_cast<std::size_t>(inst.n_ranks)) {
        throw InvariantViolation("instance device map does not cover all ranks");
    }
    std::vector<Endpoint> eps;
    eps.reserve(inst.per_rank_devices.size());
    for (int dev : inst.per_rank_devices) eps.push_back(Endpoint::gpu(dev));
    return eps;
}

void expect(const CollectiveInstance& inst, CollectiveKind c, AlgorithmKind a) {
    if (inst.collective != c || inst.algorithm != a) {
        throw WrongAlgorithm("expected " + std::string(display_name(c)) + "/" + std::string(to_string(a)) +
                             ", got " + std::string(display_name(inst.collective)) + "/" +
                             std::string(to_string(inst.algorithm)));
    }
}

int require_root(const CollectiveInstance& inst) {
    if (!inst.root) {
        throw MissingRoot(std::string(display_name(inst.collective)) + " instance has no root");
    }
    if (*inst.root < 0 || *inst.root >= inst.n_ranks) {
        throw InvariantViolation("root outside communicator");
    }
    return *inst.root;
}

} // namespace

Bytes Decomposition::total_bytes() const {
    Bytes total = 0;
    for (const auto& t : transfers) total = checked_add(total, t.bytes);
    return total;
}

EdgeTotals edge_totals(const Decomposition& d) {
    EdgeTotals totals;
    for (const auto& t : d.transfers) {
        if (t.bytes == 0) continue;
        Bytes& cell = totals[{t.src, t.dst}];
        cell = checked_add(cell, t.bytes);
    }
    return totals;
}

DoubleBinaryTree build_double_binary_tree(int n_ranks) {
    if (n_ranks < 1) {
        throw InvariantViolation("double binary tree needs at least one rank");
    }
    DoubleBinaryTree dbt;
    dbt.n_ranks = n_ranks;
    for (int t = 0; t < 2; ++t) {
        std::vector<int> rank_at(static_cast<std::size_t>(n_ranks));
        for (int p = 0; p < n_ranks; ++p) {
            rank_at[static_cast<std::size_t>(p)] = (p + t) % n_ranks;
        }
        auto& tree = dbt.trees[static_cast<std::size_t>(t)];
        tree.assign(static_cast<std::size_t>(n_ranks), {});
        const int root_pos = build_range(tree, rank_at, 0, n_ranks);
        dbt.roots[static_cast<std::size_t>(t)] = rank_at[static_cast<std::size_t>(root_pos)];
    }
    return dbt;
}

void validate_tree(const DoubleBinaryTree& dbt, int n_ranks) {
    if (dbt.n_ranks != n_ranks) {
        throw DegenerateTree("tree spans " + std::to_string(dbt.n_ranks) + " ranks, instance has " +
                             std::to_string(n_ranks));
    }
    for (int t = 0; t < 2; ++t) {
        const auto& tree = dbt.trees[static_cast<std::size_t>(t)];
        if (tree.size() != static_cast<std::size_t>(n_ranks)) {
            throw DegenerateTree("tree node table has wrong size");
        }
        const int root = dbt.roots[static_cast<std::size_t>(t)];
        int roots = 0;
        for (int r = 0; r < n_ranks; ++r) {
            const auto& node = tree[static_cast<std::size_t>(r)];
            if (!node.parent) {
                ++roots;
                if (r != root) throw DegenerateTree("parentless rank is not the recorded root");
            }
            for (int c : node.children) {
                if (c < 0 || c >= n_ranks || tree[static_cast<std::size_t>(c)].parent != r) {
                    throw DegenerateTree("child/parent links disagree");
                }
            }
        }
        if (roots != 1) throw DegenerateTree("tree must have exactly one root");
        // Everything must be reachable from the root exactly once.
        std::vector<char> seen(static_cast<std::size_t>(n_ranks), 0);
        std::vector<int> stack{root};
        int visited = 0;
        while (!stack.empty()) {
            int r = stack.back();
            stack.pop_back();
            if (seen[static_cast<std::size_t>(r)]) throw DegenerateTree("cycle in tree");
            seen[static_cast<std::size_t>(r)] = 1;
            ++visited;
            for (int c : tree[static_cast<std::size_t>(r)].children) stack.push_back(c);
        }
        if (visited != n_ranks) throw DegenerateTree("tree does not span all ranks");
    }
}

std::vector<int> normalize_ring_order(std::span<const int> order, int n_ranks) {
    std::vector<int> out;
    if (order.empty()) {
        out.resize(static_cast<std::size_t>(n_ranks));
        for (int r = 0; r < n_ranks; ++r) out[static_cast<std::size_t>(r)] = r;
        return out;
    }
    out.assign(order.begin(), order.end());
    std::vector<int> sorted = out;
    std::sort(sorted.begin(), sorted.end());
    bool ok = sorted.size() == static_cast<std::size_t>(n_ranks);
    for (int r = 0; ok && r < n_ranks; ++r) ok = sorted[static_cast<std::size_t>(r)] == r;
    if (!ok) {
        throw InvariantViolation("ring order is not a permutation of 0.." + std::to_string(n_ranks - 1));
    }
    return out;
}

namespace model {

std::vector<Endpoint> identity_endpoints(int n_ranks) {
    std::vector<Endpoint> eps;
    for (int r = 0; r < n_ranks; ++r) eps.push_back(Endpoint::gpu(r));
    return eps;
}

Decomposition ring_allreduce(std::span<const Endpoint> ranks, std::span<const int> ring_order, Bytes payload) {
    const int n = ring_size(ranks);
    const auto order = normalize_ring_order(ring_order, n);
    Builder b(ranks);
    if (n > 1) {
        const Bytes twice = checked_mul(payload, 2);
        for (int p = 0; p < n; ++p) {
            const int self = order[static_cast<std::size_t>(p)];
            const int next = order[static_cast<std::size_t>((p + 1) % n)];
            b.rank_to_rank(self, next, twice - ring_chunk(payload, n, self) - ring_chunk(payload, n, next));
        }
    }
    return b.finish();
}

Decomposition ring_reducescatter(std::span<const Endpoint> ranks, std::span<const int> ring_order,
                                 Bytes payload) {
    const int n = ring_size(ranks);
    const auto order = normalize_ring_order(ring_order, n);
    Builder b(ranks);
    if (n > 1) {
        for (int p = 0; p < n; ++p) {
            const int self = order[static_cast<std::size_t>(p)];
            const int next = order[static_cast<std::size_t>((p + 1) % n)];
            b.rank_to_rank(self, next, payload - ring_chunk(payload, n, self));
        }
    }
    return b.finish();
}

Decomposition ring_allgather(std::span<const Endpoint> ranks, std::span<const int> ring_order, Bytes payload) {
    const int n = ring_size(ranks);
    const auto order = normalize_ring_order(ring_order, n);
    Builder b(ranks);
    if (n > 1) {
        for (int p = 0; p < n; ++p) {
            const int self = order[static_cast<std::size_t>(p)];
            const int next = order[static_cast<std::size_t>((p + 1) % n)];
            b.rank_to_rank(self, next, payload - ring_chunk(payload, n, next));
        }
    }
    return b.finish();
}

// Rooted pipelines: N-1 hops of the whole payload. Broadcast starts at the
// root, reduce ends there.
Decomposition ring_broadcast(std::span<const Endpoint> ranks, std::span<const int> ring_order, int root,
                             Bytes payload) {
    const int n = ring_size(ranks);
    const auto order = normalize_ring_order(ring_order, n);
    const int start = position_of(order, root);
    Builder b(ranks);
    for (int hop = 0; hop + 1 < n; ++hop) {
        b.rank_to_rank(order[static_cast<std::size_t>((start + hop) % n)],
                       order[static_cast<std::size_t>((start + hop + 1) % n)], payload);
    }
    return b.finish();
}

Decomposition ring_reduce(std::span<const Endpoint> ranks, std::span<const int> ring_order, int root,
                          Bytes payload) {
    const int n = ring_size(ranks);
    const auto order = normalize_ring_order(ring_order, n);
    const int end = position_of(order, root);
    Builder b(ranks);
    for (int hop = 1; hop < n; ++hop) {
        b.rank_to_rank(order[static_cast<std::size_t>((end + hop) % n)],
                       order[static_cast<std::size_t>((end + hop + 1) % n)], payload);
    }
    return b.finish();
}

Decomposition tree_allreduce(std::span<const Endpoint> ranks, const DoubleBinaryTree& dbt, Bytes payload) {
    const int n = ring_size(ranks);
    validate_tree(dbt, n);
    Builder b(ranks);
    for (int t = 0; t < 2; ++t) {
        const Bytes share = DoubleBinaryTree::share(payload, t);
        const auto& tree = dbt.trees[static_cast<std::size_t>(t)];
        for (int r = 0; r < n; ++r) {
            if (const auto& parent = tree[static_cast<std::size_t>(r)].parent) {
                b.rank_to_rank(r, *parent, share); // reduce
                b.rank_to_rank(*parent, r, share); // broadcast
            }
        }
    }
    return b.finish();
}

Decomposition collnet_allreduce(std::span<const Endpoint> ranks, Bytes payload) {
    Builder b(ranks);
    for (int r = 0; r < ring_size(ranks); ++r) {
        b.rank_to_endpoint(r, Endpoint::aggregator(), payload);
        b.endpoint_to_rank(Endpoint::aggregator(), r, payload);
    }
    return b.finish();
}

} // namespace model

Decomposition decompose_allreduce_ring(const CollectiveInstance& inst, std::span<const int> ring_order) {
    expect(inst, CollectiveKind::AllReduce, AlgorithmKind::Ring);
    return model::ring_allreduce(device_endpoints(inst), ring_order, inst.payload_bytes);
}

Decomposition decompose_allreduce_tree(const CollectiveInstance& inst, const DoubleBinaryTree& dbt) {
    expect(inst, CollectiveKind::AllReduce, AlgorithmKind::Tree);
    return model::tree_allreduce(device_endpoints(inst), dbt, inst.payload_bytes);
}

Decomposition decompose_allreduce_collnet(const CollectiveInstance& inst) {
    expect(inst, CollectiveKind::AllReduce, AlgorithmKind::Collnet);
    return model::collnet_allreduce(device_endpoints(inst), inst.payload_bytes);
}

Decomposition decompose_broadcast_ring(const CollectiveInstance& inst, std::span<const int> ring_order) {
    expect(inst, CollectiveKind::Broadcast, AlgorithmKind::Ring);
    return model::ring_broadcast(device_endpoints(inst), ring_order, require_root(inst), inst.payload_bytes);
}

Decomposition decompose_reduce_ring(const CollectiveInstance& inst, std::span<const int> ring_order) {
    expect(inst, CollectiveKind::Reduce, AlgorithmKind::Ring);
    return model::ring_reduce(device_endpoints(inst), ring_order, require_root(inst), inst.payload_bytes);
}

Decomposition decompose_allgather_ring(const CollectiveInstance& inst, std::span<const int> ring_order) {
    expect(inst, CollectiveKind::AllGather, AlgorithmKind::Ring);
    return model::ring_allgather(device_endpoints(inst), ring_order, inst.payload_bytes);
}

Decomposition decompose_reducescatter_ring(const CollectiveInstance& inst, std::span<const int> ring_order) {
    expect(inst, CollectiveKind::ReduceScatter, AlgorithmKind::Ring);
    return model::ring_reducescatter(device_endpoints(inst), ring_order, inst.payload_bytes);
}

Decomposition decompose_p2p(const P2PInstance& p) {
    Decomposition d;
    d.per_rank_sent[p.src_rank] = 0;
    d.per_rank_recv[p.dst_rank] = 0;
    if (p.src_device == p.dst_device) {
        return d;
    }
    d.transfers.push_back({Endpoint::gpu(p.src_device), Endpoint::gpu(p.dst_device), p.bytes});
    d.per_rank_sent[p.src_rank] = p.bytes;
    d.per_rank_recv[p.dst_rank] = p.bytes;
    return d;
}

Decomposition decompose_copy(const TraceEvent& e) {
    if (!is_copy(e.kind) || !e.copy_src || !e.copy_dst || !e.bytes) {
        throw InvariantViolation("decompose_copy needs a copy event with endpoints and bytes");
    }
    Decomposition d;
    if (*e.copy_src != *e.copy_dst) {
        d.transfers.push_back({*e.copy_src, *e.copy_dst, *e.bytes});
    }
    return d;
}

std::vector<int> RingConfig::order_for(const std::string& comm_id, int n_ranks) const {
    if (auto it = by_comm.find(comm_id); it != by_comm.end()) {
        return normalize_ring_order(it->second, n_ranks);
    }
    if (auto it = by_size.find(n_ranks); it != by_size.end()) {
        return normalize_ring_order(it->second, n_ranks);
    }
    return normalize_ring_order({}, n_ranks);
}

Decomposition decompose(const CollectiveInstance& inst, const RingConfig& rings) {
    if (inst.algorithm != AlgorithmKind::Ring && inst.collective != CollectiveKind::AllReduce) {
        throw WrongAlgorithm(std::string(display_name(inst.collective)) + " supports only ring");
    }
    switch (inst.algorithm) {
    case AlgorithmKind::Tree:
        return decompose_allreduce_tree(inst, build_double_binary_tree(inst.n_ranks));
    case AlgorithmKind::Collnet:
        return decompose_allreduce_collnet(inst);
    case AlgorithmKind::Ring:
        break;
    }
    const auto order = rings.order_for(inst.comm_id, inst.n_ranks);
    switch (inst.collective) {
    case CollectiveKind::AllReduce: return decompose_allreduce_ring(inst, order);
    case CollectiveKind::Broadcast: return decompose_broadcast_ring(inst, order);
    case CollectiveKind::Reduce: return decompose_reduce_ring(inst, order);
    case CollectiveKind::ReduceScatter: return decompose_reducescatter_ring(inst, order);
    case CollectiveKind::AllGather: return decompose_allgather_ring(inst, order);
    }
    throw WrongAlgorithm("unknown collective");
}

} // namespace comscribe
