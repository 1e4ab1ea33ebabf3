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

// Small random generators for property tests.

#include "comscribe/grouping.hpp"
#include "comscribe/trace.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace comscribe::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t u64(std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_);
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    template <typename T, std::size_t N>
    T pick(const std::array<T, N>& items) {
        return items[static_cast<std::size_t>(integer(0, static_cast<int>(N) - 1))];
    }

    std::vector<int> permutation(int n) {
        std::vector<int> p(static_cast<std::size_t>(n));
        std::iota(p.begin(), p.end(), 0);
        std::shuffle(p.begin(), p.end(), rng_);
        return p;
    }

    DataType dtype() {
        static constexpr std::array<DataType, 10> all = {
            DataType::Int8,    DataType::Uint8,   DataType::Int32,   DataType::Uint32,   DataType::Int64,
            DataType::Uint64,  DataType::Float16, DataType::Bfloat16, DataType::Float32, DataType::Float64};
        return pick(all);
    }

    // Any valid event.
    TraceEvent event() {
        TraceEvent e;
        e.seq = u64(0, 1u << 20);
        e.timestamp_ns = static_cast<std::int64_t>(u64(0, 1ull << 40));
        e.comm_id = "c" + std::to_string(integer(0, 9));
        e.n_ranks = integer(1, 16);
        e.rank = integer(0, e.n_ranks - 1);
        e.device = integer(0, 15);
        static constexpr std::array<EventKind, 6> kinds = {EventKind::Collective, EventKind::Send,
                                                           EventKind::Recv,       EventKind::Memcpy,
                                                           EventKind::UnifiedMemory, EventKind::ZeroCopy};
        e.kind = pick(kinds);
        if (e.kind == EventKind::Send || e.kind == EventKind::Recv) {
            if (e.n_ranks == 1) e.n_ranks = 2;
            e.peer = (e.rank + integer(1, e.n_ranks - 1)) % e.n_ranks;
            e.count = u64(0, 1ull << 32);
            e.dtype = dtype();
        } else if (e.kind == EventKind::Collective) {
            e.collective = pick(kAllCollectives);
            static constexpr std::array<AlgorithmChoice, 4> algos = {AlgorithmChoice::Ring, AlgorithmChoice::Tree,
                                                                     AlgorithmChoice::Collnet, AlgorithmChoice::Auto};
            e.algorithm = *e.collective == CollectiveKind::AllReduce ? pick(algos)
                          : coin()                                   ? AlgorithmChoice::Ring
                                                                     : AlgorithmChoice::Auto;
            if (is_rooted(*e.collective)) e.root = integer(0, e.n_ranks - 1);
            e.count = u64(0, 1ull << 32);
            e.dtype = dtype();
        } else {
            static constexpr std::array<CopyKind, 3> copies = {CopyKind::H2D, CopyKind::D2H, CopyKind::D2D};
            e.copy_kind = pick(copies);
            const Endpoint a = Endpoint::gpu(integer(0, 15));
            const Endpoint b = Endpoint::gpu(integer(0, 15));
            switch (*e.copy_kind) {
            case CopyKind::H2D: e.copy_src = Endpoint::host(); e.copy_dst = a; break;
            case CopyKind::D2H: e.copy_src = a; e.copy_dst = Endpoint::host(); break;
            case CopyKind::D2D: e.copy_src = a; e.copy_dst = b; break;
            }
            e.bytes = u64(0, 1ull << 36);
        }
        return e;
    }

    // A collective instance with random shape, payload and device mapping.
    CollectiveInstance instance(int max_ranks = 16, std::uint64_t max_count = 4096) {
        const CollectiveKind c = pick(kAllCollectives);
        const int n = integer(1, max_ranks);
        AlgorithmKind algo = AlgorithmKind::Ring;
        if (c == CollectiveKind::AllReduce) {
            static constexpr std::array<AlgorithmKind, 3> algos = {AlgorithmKind::Ring, AlgorithmKind::Tree,
                                                                   AlgorithmKind::Collnet};
            algo = pick(algos);
        }
        std::optional<int> root;
        if (is_rooted(c)) root = integer(0, n - 1);
        std::vector<int> devices = permutation(std::max(n, 16));
        devices.resize(static_cast<std::size_t>(n));
        return make_instance(c, algo, n, u64(0, max_count), dtype(), root, devices);
    }

private:
    std::mt19937_64 rng_;
};

} // namespace comscribe::testing
