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
#include "comscribe/step_oracle.hpp"

#include "comscribe/error.hpp"

#include <deque>
#include <map>
#include <stdexcept>

namespace comscribe::oracle {

namespace {

using Mask = std::uint64_t;

Mask everyone(int n) { return n == 64 ? ~Mask{0} : ((Mask{1} << n) - 1); }

void check_size(int n) {
    if (n < 1 || n > kMaxRanks) {
        throw InvariantViolation("oracle supports 1.." + std::to_string(kMaxRanks) + " ranks");
    }
}

std::vector<int> ring_positions(std::span<const int> ring_order, int n) {
    std::vector<int> order(ring_order.begin(), ring_order.end());
    if (order.empty()) {
        for (int r = 0; r < n; ++r) order.push_back(r);
    }
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    if (order.size() != static_cast<std::size_t>(n)) {
        throw InvariantViolation("ring order has wrong length");
    }
    for (int r : order) {
        if (r < 0 || r >= n || used[static_cast<std::size_t>(r)]) {
            throw InvariantViolation("ring order is not a permutation");
        }
        used[static_cast<std::size_t>(r)] = 1;
    }
    return order;
}

// Carves the payload into n pieces front to back, each at most ceil(S/n).
std::vector<Bytes> carve(Bytes payload, int n) {
    Bytes piece = 0;
    while (piece * static_cast<Bytes>(n) < payload) {
        ++piece;
    }
    std::vector<Bytes> sizes;
    Bytes left = payload;
    for (int i = 0; i < n; ++i) {
        Bytes take = left < piece ? left : piece;
        sizes.push_back(take);
        left -= take;
    }
    return sizes;
}

[[noreturn]] void broken(const char* what) { throw std::logic_error(std::string("oracle: ") + what); }

class Recorder {
public:
    void send(int src, int dst, Bytes bytes) {
        if (bytes > 0) current_.sends.push_back({src, dst, bytes});
    }
    void end_step() {
        if (!current_.sends.empty()) {
            log_.steps.push_back(std::move(current_));
        }
        current_ = Step{};
        current_.index = ++index_;
    }
    StepLog take() { return std::move(log_); }

private:
    StepLog log_;
    Step current_;
    std::size_t index_ = 0;
};

// Ring over positions; buffer[pos][chunk] is the set of ranks whose
// contribution is folded into that chunk at that position.
struct RingState {
    int n;
    std::vector<int> order;
    std::vector<Bytes> chunk_bytes; // by chunk (= owning rank)
    std::vector<std::vector<Mask>> buffer;

    int next(int pos) const { return (pos + 1) % n; }
};

// Reduce-scatter: each position starts by sending its predecessor's chunk and
// then forwards whatever it just reduced.
void reduce_scatter_phase(RingState& st, Recorder& rec) {
    const int n = st.n;
    std::vector<int> outgoing(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) outgoing[static_cast<std::size_t>(p)] = st.order[static_cast<std::size_t>((p + n - 1) % n)];
    for (int s = 0; s < n - 1; ++s) {
        std::vector<Mask> in_flight(static_cast<std::size_t>(n));
        for (int p = 0; p < n; ++p) {
            int chunk = outgoing[static_cast<std::size_t>(p)];
            in_flight[static_cast<std::size_t>(p)] = st.buffer[static_cast<std::size_t>(p)][static_cast<std::size_t>(chunk)];
            rec.send(st.order[static_cast<std::size_t>(p)], st.order[static_cast<std::size_t>(st.next(p))],
                     st.chunk_bytes[static_cast<std::size_t>(chunk)]);
        }
        for (int p = 0; p < n; ++p) {
            int q = st.next(p);
            int chunk = outgoing[static_cast<std::size_t>(p)];
            st.buffer[static_cast<std::size_t>(q)][static_cast<std::size_t>(chunk)] |= in_flight[static_cast<std::size_t>(p)];
        }
        std::vector<int> forwarded(static_cast<std::size_t>(n));
        for (int p = 0; p < n; ++p) forwarded[static_cast<std::size_t>(st.next(p))] = outgoing[static_cast<std::size_t>(p)];
        outgoing = forwarded;
        rec.end_step();
    }
    for (int p = 0; p < n; ++p) {
        int own = st.order[static_cast<std::size_t>(p)];
        if (st.buffer[static_cast<std::size_t>(p)][static_cast<std::size_t>(own)] != everyone(n)) broken("reduce-scatter incomplete");
    }
}

// All-gather: each position starts with its own complete chunk and forwards
// what it receives.
void all_gather_phase(RingState& st, Recorder& rec) {
    const int n = st.n;
    std::vector<int> outgoing(st.order);
    for (int s = 0; s < n - 1; ++s) {
        std::vector<Mask> in_flight(static_cast<std::size_t>(n));
        for (int p = 0; p < n; ++p) {
            int chunk = outgoing[static_cast<std::size_t>(p)];
            in_flight[static_cast<std::size_t>(p)] = st.buffer[static_cast<std::size_t>(p)][static_cast<std::size_t>(chunk)];
            if (in_flight[static_cast<std::size_t>(p)] != everyone(n)) broken("forwarding an unfinished chunk");
            rec.send(st.order[static_cast<std::size_t>(p)], st.order[static_cast<std::size_t>(st.next(p))],
                     st.chunk_bytes[static_cast<std::size_t>(chunk)]);
        }
        for (int p = 0; p < n; ++p) {
            int chunk = outgoing[static_cast<std::size_t>(p)];
            st.buffer[static_cast<std::size_t>(st.next(p))][static_cast<std::size_t>(chunk)] = in_flight[static_cast<std::size_t>(p)];
        }
        std::vector<int> forwarded(static_cast<std::size_t>(n));
        for (int p = 0; p < n; ++p) forwarded[static_cast<std::size_t>(st.next(p))] = outgoing[static_cast<std::size_t>(p)];
        outgoing = forwarded;
        rec.end_step();
    }
}

StepLog simulate_chunked(CollectiveKind collective, int n, Bytes payload, std::vector<int> order) {
    RingState st{n, std::move(order), carve(payload, n), {}};
    st.buffer.assign(static_cast<std::size_t>(n), std::vector<Mask>(static_cast<std::size_t>(n), 0));
    for (int p = 0; p < n; ++p) {
        const int rank = st.order[static_cast<std::size_t>(p)];
        for (int c = 0; c < n; ++c) {
            if (collective == CollectiveKind::AllGather) {
                // Only the own block is present, already final.
                st.buffer[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)] = c == rank ? everyone(n) : 0;
            } else {
                st.buffer[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)] = Mask{1} << rank;
            }
        }
    }
    Recorder rec;
    if (collective != CollectiveKind::AllGather) {
        reduce_scatter_phase(st, rec);
    }
    if (collective != CollectiveKind::ReduceScatter) {
        all_gather_phase(st, rec);
        for (int p = 0; p < n; ++p) {
            for (int c = 0; c < n; ++c) {
                if (st.buffer[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)] != everyone(n)) broken("all-gather incomplete");
            }
        }
    }
    return rec.take();
}

// Store-and-forward of the whole payload along the ring.
StepLog simulate_pipeline(CollectiveKind collective, int n, Bytes payload, int root, const std::vector<int>& order) {
    int root_pos = -1;
    for (int p = 0; p < n; ++p) {
        if (order[static_cast<std::size_t>(p)] == root) root_pos = p;
    }
    if (root_pos < 0) throw InvariantViolation("root outside communicator");

    Recorder rec;
    if (collective == CollectiveKind::Broadcast) {
        std::vector<char> has(static_cast<std::size_t>(n), 0);
        has[static_cast<std::size_t>(root_pos)] = 1;
        int holder = root_pos;
        for (int hop = 0; hop < n - 1; ++hop) {
            int target = (holder + 1) % n;
            if (!has[static_cast<std::size_t>(holder)] || has[static_cast<std::size_t>(target)]) broken("broadcast order");
            rec.send(order[static_cast<std::size_t>(holder)], order[static_cast<std::size_t>(target)], payload);
            has[static_cast<std::size_t>(target)] = 1;
            holder = target;
            rec.end_step();
        }
    } else {
        // The running partial starts right after the root and travels
        // around until it lands on the root.
        int holder = (root_pos + 1) % n;
        Mask partial = Mask{1} << order[static_cast<std::size_t>(holder)];
        for (int hop = 0; hop < n - 1; ++hop) {
            int target = (holder + 1) % n;
            rec.send(order[static_cast<std::size_t>(holder)], order[static_cast<std::size_t>(target)], payload);
            partial |= Mask{1} << order[static_cast<std::size_t>(target)];
            holder = target;
            rec.end_step();
        }
        if (holder != root_pos || partial != everyone(n)) broken("reduce did not finish at root");
    }
    return rec.take();
}

} // namespace

StepLog simulate_ring(CollectiveKind collective, int n_ranks, Bytes payload, std::optional<int> root,
                      std::span<const int> ring_order) {
    check_size(n_ranks);
    auto order = ring_positions(ring_order, n_ranks);
    if (is_rooted(collective)) {
        if (!root) throw MissingRoot("rooted collective needs a root");
        return simulate_pipeline(collective, n_ranks, payload, *root, order);
    }
    return simulate_chunked(collective, n_ranks, payload, std::move(order));
}

StepLog simulate_tree(int n_ranks, Bytes payload, const DoubleBinaryTree& dbt) {
    check_size(n_ranks);
    if (dbt.n_ranks != n_ranks) throw DegenerateTree("tree built for another communicator size");

    Recorder rec;
    const Bytes halves[2] = {(payload + 1) / 2, payload / 2};
    for (int t = 0; t < 2; ++t) {
        const auto& tree = dbt.trees[static_cast<std::size_t>(t)];
        if (tree.size() != static_cast<std::size_t>(n_ranks)) throw DegenerateTree("bad node table");
        const Bytes share = halves[t];

        // Breadth-first levels from the root.
        std::vector<std::vector<int>> levels;
        std::vector<int> depth(static_cast<std::size_t>(n_ranks), -1);
        std::deque<int> queue{dbt.roots[static_cast<std::size_t>(t)]};
        depth[static_cast<std::size_t>(queue.front())] = 0;
        int reached = 0;
        while (!queue.empty()) {
            int r = queue.front();
            queue.pop_front();
            ++reached;
            int d = depth[static_cast<std::size_t>(r)];
            if (static_cast<int>(levels.size()) <= d) levels.emplace_back();
            levels[static_cast<std::size_t>(d)].push_back(r);
            for (int c : tree[static_cast<std::size_t>(r)].children) {
                if (c < 0 || c >= n_ranks || depth[static_cast<std::size_t>(c)] != -1) throw DegenerateTree("not a tree");
                depth[static_cast<std::size_t>(c)] = d + 1;
                queue.push_back(c);
            }
        }
        if (reached != n_ranks) throw DegenerateTree("tree does not span all ranks");

        // Reduce: deepest level first; a rank sends once all its children did.
        std::vector<Mask> partial(static_cast<std::size_t>(n_ranks));
        for (int r = 0; r < n_ranks; ++r) partial[static_cast<std::size_t>(r)] = Mask{1} << r;
        for (std::size_t d = levels.size(); d-- > 1;) {
            for (int r : levels[d]) {
                for (int c : tree[static_cast<std::size_t>(r)].children) {
                    if (!(partial[static_cast<std::size_t>(r)] & (Mask{1} << c))) broken("child not folded in");
                }
                int parent = -1;
                for (int q : levels[d - 1]) {
                    for (int c : tree[static_cast<std::size_t>(q)].children) {
                        if (c == r) parent = q;
                    }
                }
                if (parent < 0) broken("orphan rank");
                rec.send(r, parent, share);
                partial[static_cast<std::size_t>(parent)] |= partial[static_cast<std::size_t>(r)];
            }
            rec.end_step();
        }
        if (partial[static_cast<std::size_t>(dbt.roots[static_cast<std::size_t>(t)])] != everyone(n_ranks)) {
            broken("root missing contributions");
        }

        // Broadcast: shallowest level first.
        std::vector<char> has(static_cast<std::size_t>(n_ranks), 0);
        has[static_cast<std::size_t>(dbt.roots[static_cast<std::size_t>(t)])] = 1;
        for (std::size_t d = 0; d + 1 < levels.size(); ++d) {
            for (int r : levels[d]) {
                if (!has[static_cast<std::size_t>(r)]) broken("forwarding before receiving");
                for (int c : tree[static_cast<std::size_t>(r)].children) {
                    rec.send(r, c, share);
                    has[static_cast<std::size_t>(c)] = 1;
                }
            }
            rec.end_step();
        }
    }
    return rec.take();
}

Decomposition aggregate(const StepLog& log, int n_ranks, std::span<const Endpoint> endpoints) {
    auto endpoint_of = [&](int r) {
        return endpoints.empty() ? Endpoint::gpu(r) : endpoints[static_cast<std::size_t>(r)];
    };
    Decomposition d;
    for (int r = 0; r < n_ranks; ++r) {
        d.per_rank_sent[r] = 0;
        d.per_rank_recv[r] = 0;
    }
    std::map<std::pair<Endpoint, Endpoint>, Bytes> sums;
    for (const auto& step : log.steps) {
        for (const auto& s : step.sends) {
            sums[{endpoint_of(s.src), endpoint_of(s.dst)}] += s.bytes;
            d.per_rank_sent[s.src] += s.bytes;
            d.per_rank_recv[s.dst] += s.bytes;
        }
    }
    for (const auto& [edge, bytes] : sums) {
        d.transfers.push_back({edge.first, edge.second, bytes});
    }
    return d;
}

} // namespace comscribe::oracle
