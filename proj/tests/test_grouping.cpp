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
#include "comscribe/grouping.hpp"

#include "gen.hpp"

#include <doctest.h>

#include <algorithm>

using namespace comscribe;

namespace {

TraceEvent coll(const std::string& comm, int n, int rank, std::uint64_t seq, CollectiveKind c, std::uint64_t count,
                std::optional<int> root = {}, AlgorithmChoice a = AlgorithmChoice::Ring) {
    TraceEvent e;
    e.seq = seq;
    e.kind = EventKind::Collective;
    e.comm_id = comm;
    e.n_ranks = n;
    e.rank = rank;
    e.device = rank;
    e.collective = c;
    e.algorithm = a;
    e.count = count;
    e.dtype = DataType::Float32;
    e.root = root;
    return e;
}

TraceEvent p2p(EventKind k, int rank, int peer, std::uint64_t seq, std::uint64_t count) {
    TraceEvent e;
    e.seq = seq;
    e.kind = k;
    e.comm_id = "p";
    e.n_ranks = 4;
    e.rank = rank;
    e.device = rank;
    e.peer = peer;
    e.count = count;
    e.dtype = DataType::Float32;
    return e;
}

bool has_kind(const GroupingResult& g, Diagnostic::Kind k) {
    return std::any_of(g.diagnostics.begin(), g.diagnostics.end(), [k](const Diagnostic& d) { return d.kind == k; });
}

} // namespace

TEST_CASE("single-rank communicator") {
    std::vector<TraceEvent> ev;
    for (std::uint64_t s = 0; s < 3; ++s) ev.push_back(coll("solo", 1, 0, s, CollectiveKind::AllReduce, 10));
    const auto g = group_collectives(ev);
    REQUIRE(g.instances.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(g.instances[k].n_ranks == 1);
        CHECK(g.instances[k].ordinal == k);
    }
    CHECK(g.unmatched.empty());
}

TEST_CASE("ordinal matching across ranks") {
    std::vector<TraceEvent> ev;
    for (int r = 0; r < 4; ++r) {
        ev.push_back(coll("c", 4, r, 0, CollectiveKind::AllReduce, 256));
        ev.push_back(coll("c", 4, r, 1, CollectiveKind::AllReduce, 512));
        ev.push_back(coll("c", 4, r, 2, CollectiveKind::Broadcast, 64, 0));
    }
    const auto g = group_collectives(ev);
    REQUIRE(g.instances.size() == 3);
    CHECK(g.instances[0].payload_bytes == 1024);
    CHECK(g.instances[1].payload_bytes == 2048);
    CHECK(g.instances[2].collective == CollectiveKind::Broadcast);
    CHECK(g.instances[2].root == 0);
    CHECK(g.instances[2].per_rank_devices == std::vector<int>{0, 1, 2, 3});
    CHECK(g.diagnostics.empty());

    SUBCASE("interleaving does not matter") {
        auto shuffled = ev;
        std::reverse(shuffled.begin(), shuffled.end());
        CHECK(group_collectives(shuffled).instances == g.instances);
    }
}

TEST_CASE("incompatible arguments") {
    const std::vector<TraceEvent> ev{coll("c", 2, 0, 0, CollectiveKind::AllReduce, 256),
                                     coll("c", 2, 1, 0, CollectiveKind::AllReduce, 128)};
    const auto g = group_collectives(ev);
    CHECK(g.instances.empty());
    CHECK(g.unmatched.size() == 2);
    REQUIRE(g.diagnostics.size() == 1);
    CHECK(g.diagnostics[0].kind == Diagnostic::Kind::IncompatibleArguments);
    CHECK(g.diagnostics[0].ordinal == 0u);
}

TEST_CASE("missing rank and device conflict") {
    std::vector<TraceEvent> ev{coll("c", 3, 0, 0, CollectiveKind::AllReduce, 8),
                               coll("c", 3, 1, 0, CollectiveKind::AllReduce, 8)};
    auto g = group_collectives(ev);
    CHECK(g.instances.empty());
    CHECK(has_kind(g, Diagnostic::Kind::IncompleteInstance));

    ev.push_back(coll("c", 3, 2, 0, CollectiveKind::AllReduce, 8));
    ev.back().device = 1;
    g = group_collectives(ev);
    CHECK(g.instances.empty());
    CHECK(has_kind(g, Diagnostic::Kind::DeviceConflict));
}

TEST_CASE("inconsistent communicator size") {
    const std::vector<TraceEvent> ev{coll("c", 2, 0, 0, CollectiveKind::AllReduce, 8),
                                     coll("c", 3, 1, 0, CollectiveKind::AllReduce, 8)};
    const auto g = group_collectives(ev);
    CHECK(g.instances.empty());
    CHECK(g.unmatched.size() == 2);
    CHECK(has_kind(g, Diagnostic::Kind::InconsistentCommunicator));
}

TEST_CASE("auto requests resolve by payload") {
    std::vector<TraceEvent> ev;
    for (int r = 0; r < 2; ++r) {
        ev.push_back(coll("c", 2, r, 0, CollectiveKind::AllReduce, 1024, {}, AlgorithmChoice::Auto));
        ev.push_back(coll("c", 2, r, 1, CollectiveKind::AllReduce, 1 << 20, {}, AlgorithmChoice::Auto));
        ev.push_back(coll("c", 2, r, 2, CollectiveKind::AllGather, 16, {}, AlgorithmChoice::Auto));
    }
    auto g = group_collectives(ev);
    REQUIRE(g.instances.size() == 3);
    CHECK(g.instances[0].requested == AlgorithmChoice::Auto);
    CHECK(g.instances[0].algorithm == AlgorithmKind::Tree);
    CHECK(g.instances[1].algorithm == AlgorithmKind::Ring);
    CHECK(g.instances[2].algorithm == AlgorithmKind::Ring);
    g = group_collectives(ev, SelectionPolicy{0});
    CHECK(g.instances[0].algorithm == AlgorithmKind::Ring);
}

TEST_CASE("one trace file per process") {
    // What two separately profiled processes would write.
    const std::string rank0 =
        R"({"seq":0,"ts":100,"kind":"collective","comm":"0xabc","nranks":2,"rank":0,"dev":0,"coll":"allreduce","algo":"auto","count":256,"dtype":"float32"})"
        "\n"
        R"({"seq":1,"ts":200,"kind":"send","comm":"0xabc","nranks":2,"rank":0,"dev":0,"peer":1,"count":16,"dtype":"float64"})"
        "\n";
    const std::string rank1 =
        R"({"seq":0,"ts":101,"kind":"collective","comm":"0xabc","nranks":2,"rank":1,"dev":1,"coll":"allreduce","algo":"auto","count":256,"dtype":"float32"})"
        "\n"
        R"({"seq":1,"ts":201,"kind":"recv","comm":"0xabc","nranks":2,"rank":1,"dev":1,"peer":0,"count":16,"dtype":"float64"})"
        "\n";
    auto ev = parse_trace(std::string_view(rank1));
    auto ev0 = parse_trace(std::string_view(rank0));
    ev.insert(ev.end(), ev0.begin(), ev0.end());
    const auto g = group_collectives(ev);
    REQUIRE(g.instances.size() == 1);
    CHECK(g.instances[0].algorithm == AlgorithmKind::Tree);
    REQUIRE(g.p2p.size() == 1);
    CHECK(g.p2p[0].bytes == 128);
    CHECK(g.diagnostics.empty());
}

TEST_CASE("send/recv pairing") {
    std::vector<TraceEvent> ev{p2p(EventKind::Send, 0, 1, 0, 256), p2p(EventKind::Recv, 1, 0, 0, 256),
                               p2p(EventKind::Send, 0, 1, 1, 8),   p2p(EventKind::Recv, 1, 0, 1, 8),
                               p2p(EventKind::Send, 2, 3, 0, 4)};
    auto g = group_collectives(ev);
    REQUIRE(g.p2p.size() == 2);
    CHECK(g.p2p[0].bytes == 1024);
    CHECK(g.p2p[1].bytes == 32);
    CHECK(g.p2p[1].ordinal == 1);
    CHECK(has_kind(g, Diagnostic::Kind::UnmatchedSend));
    CHECK(g.unmatched.size() == 1);

    ev.push_back(p2p(EventKind::Recv, 3, 2, 0, 5));
    g = group_collectives(ev);
    CHECK(has_kind(g, Diagnostic::Kind::P2PMismatch));

    ev.push_back(p2p(EventKind::Recv, 1, 2, 0, 5));
    g = group_collectives(ev);
    CHECK(has_kind(g, Diagnostic::Kind::UnmatchedRecv));
}

TEST_CASE("copies pass through in order") {
    testing::Gen gen(3);
    std::vector<TraceEvent> ev;
    for (int i = 0; i < 50; ++i) {
        TraceEvent e = gen.event();
        if (is_copy(e.kind)) ev.push_back(e);
    }
    const auto g = group_collectives(ev);
    CHECK(g.copies == ev);
}

TEST_CASE("property: complete random traces group without leftovers") {
    testing::Gen gen(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = gen.integer(1, 8);
        const int calls = gen.integer(0, 12);
        std::vector<TraceEvent> ev;
        std::vector<CollectiveKind> kinds;
        for (int k = 0; k < calls; ++k) kinds.push_back(gen.pick(kAllCollectives));
        for (int r = 0; r < n; ++r) {
            for (int k = 0; k < calls; ++k) {
                std::optional<int> root;
                if (is_rooted(kinds[static_cast<std::size_t>(k)])) root = k % n;
                ev.push_back(coll("c" + std::to_string(trial % 3), n, r, static_cast<std::uint64_t>(k) * 3,
                                  kinds[static_cast<std::size_t>(k)], 100 + static_cast<std::uint64_t>(k), root));
            }
        }
        std::vector<int> order = gen.permutation(static_cast<int>(ev.size()));
        std::vector<TraceEvent> shuffled;
        for (int i : order) shuffled.push_back(ev[static_cast<std::size_t>(i)]);
        const auto g = group_collectives(shuffled);
        CHECK(g.instances.size() == static_cast<std::size_t>(calls));
        CHECK(g.unmatched.empty());
        for (std::size_t k = 0; k < g.instances.size(); ++k) {
            CHECK(g.instances[k].collective == kinds[k]);
        }
    }
}
