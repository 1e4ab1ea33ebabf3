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
#include "comscribe/error.hpp"
#include "comscribe/matrix.hpp"
#include "comscribe/pipeline.hpp"
#include "comscribe/stats.hpp"

#include "gen.hpp"

#include <doctest.h>

#include <limits>

using namespace comscribe;

namespace {

CallRecord record(const CollectiveInstance& inst) {
    return {comm_type(inst.collective), inst.payload_bytes, decompose(inst)};
}

CommMatrix random_matrix(testing::Gen& g, int gpus, bool aggregator) {
    CommMatrix m(gpus, aggregator);
    for (std::size_t r = 0; r < m.dim(); ++r)
        for (std::size_t c = 0; c < m.dim(); ++c)
            if (r != c && g.coin()) m.add_cell(r, c, g.u64(0, 1u << 30));
    return m;
}

} // namespace

TEST_CASE("accumulate examples") {
    CommMatrix m(4);
    CHECK(accumulate(m, Decomposition{}) == m);

    const auto ring = make_instance(CollectiveKind::AllReduce, AlgorithmKind::Ring, 4, 4096, DataType::Uint8);
    m = accumulate(m, decompose(ring));
    CHECK(m.at(1, 2) == 6144);
    CHECK(m.at(2, 3) == 6144);
    CHECK(m.at(3, 4) == 6144);
    CHECK(m.at(4, 1) == 6144);
    CHECK(m.total() == 4 * 6144);

    Decomposition h2d;
    h2d.transfers.push_back({Endpoint::host(), Endpoint::gpu(2), 4096});
    m = accumulate(m, h2d);
    CHECK(m.at(0, 3) == 4096);
    CHECK(m.at(0, 0) == 0);
}

TEST_CASE("matrix shape and indexing") {
    CommMatrix m(2);
    CHECK(m.dim() == 3);
    CHECK(m.labels() == std::vector<std::string>{"host", "gpu0", "gpu1"});
    CHECK(m.index_of(Endpoint::gpu(1)) == 2);
    CHECK(m.endpoint_at(0) == Endpoint::host());
    CHECK_THROWS_AS(m.index_of(Endpoint::gpu(2)), EndpointOutOfRange);
    CHECK_THROWS_AS(m.index_of(Endpoint::aggregator()), EndpointOutOfRange);
    CHECK_THROWS(m.add_cell(1, 1, 5));
    CHECK_NOTHROW(m.add_cell(1, 1, 0));

    const auto collnet = make_instance(CollectiveKind::AllReduce, AlgorithmKind::Collnet, 2, 100, DataType::Uint8);
    m.add(decompose(collnet));
    CHECK(m.has_aggregator());
    CHECK(m.dim() == 4);
    CHECK(m.labels().back() == "net");
    CHECK(m.at(Endpoint::gpu(0), Endpoint::aggregator()) == 100);
    CHECK(m.at(Endpoint::aggregator(), Endpoint::gpu(1)) == 100);

    // a failed add leaves the matrix untouched
    CommMatrix before = m;
    Decomposition bad;
    bad.transfers.push_back({Endpoint::gpu(0), Endpoint::gpu(1), 1});
    bad.transfers.push_back({Endpoint::gpu(0), Endpoint::gpu(7), 1});
    CHECK_THROWS_AS(m.add(bad), EndpointOutOfRange);
    CHECK(m == before);
}

TEST_CASE("counter overflow") {
    CommMatrix m(1);
    m.add(Endpoint::host(), Endpoint::gpu(0), std::numeric_limits<Bytes>::max());
    CHECK_THROWS_AS(m.add(Endpoint::host(), Endpoint::gpu(0), 1), CounterOverflow);
}

TEST_CASE("symmetrize and sums") {
    CommMatrix m(2);
    m.add(Endpoint::gpu(0), Endpoint::gpu(1), 10);
    m.add(Endpoint::gpu(1), Endpoint::gpu(0), 3);
    m.add(Endpoint::host(), Endpoint::gpu(1), 5);
    const auto s = m.symmetrized();
    CHECK(s.at(1, 2) == 13);
    CHECK(s.at(2, 1) == 13);
    CHECK(s.at(0, 2) == 5);
    CHECK(s.at(2, 0) == 5);
    CHECK(m.row_sum(1) == 10);
    CHECK(m.col_sum(2) == 15);
    CHECK(m.total() == 18);
}

TEST_CASE("merge") {
    testing::Gen g(5);
    CommMatrix zero(3);
    for (int i = 0; i < 100; ++i) {
        const auto a = random_matrix(g, g.integer(0, 6), g.coin());
        const auto b = random_matrix(g, g.integer(0, 6), g.coin());
        CHECK(merge(a, b) == merge(b, a));
        CHECK(merge(a, b).total() == a.total() + b.total());
    }
    const auto a = random_matrix(g, 3, false);
    CHECK(merge(a, zero) == a);
    const auto widened = merge(a, CommMatrix(1, true));
    CHECK(widened.has_aggregator());
    for (std::size_t r = 0; r < a.dim(); ++r)
        for (std::size_t c = 0; c < a.dim(); ++c) CHECK(widened.at(r, c) == a.at(r, c));
}

TEST_CASE("summarize examples") {
    std::vector<CallRecord> records;
    CHECK(summarize(records) == StatsSummary{});
    CHECK(split_by_primitive(records, 8).empty());

    // 5 broadcasts of 122.4 MB, 3 all-gathers of 1 MB, 8 GPUs
    for (int i = 0; i < 5; ++i) {
        records.push_back(record(
            make_instance(CollectiveKind::Broadcast, AlgorithmKind::Ring, 8, 30'600'000, DataType::Float32, 0)));
    }
    for (int i = 0; i < 3; ++i) {
        records.push_back(
            record(make_instance(CollectiveKind::AllGather, AlgorithmKind::Ring, 8, 31'250, DataType::Float32)));
    }
    const auto s = summarize(records);
    CHECK(s[CommType::Broadcast].calls == 5);
    CHECK(s[CommType::Broadcast].payload_bytes == 612'000'000);
    CHECK(s[CommType::Broadcast].wire_bytes == 5 * 7 * Bytes{122'400'000});
    CHECK(s[CommType::AllGather].calls == 3);
    CHECK(s[CommType::AllGather].payload_bytes == 3'000'000);
    CHECK(s[CommType::AllReduce].calls == 0);

    const auto split = split_by_primitive(records, 8);
    CHECK(split.size() == 2);
    CHECK(merge(split.at(CommType::Broadcast), split.at(CommType::AllGather)) == combined_matrix(records, 8));
}

TEST_CASE("comm type names") {
    for (CommType t : kAllCommTypes) CHECK(parse_comm_type(key_name(t)) == t);
    CHECK(display_name(CommType::ExplicitTransfer) == "Explicit Transfers");
    CHECK(display_name(CommType::SendRecv) == "Send/Recv");
    CHECK(comm_type_of_copy(EventKind::ZeroCopy) == CommType::ZeroCopy);
    CHECK_THROWS_AS(comm_type_of_copy(EventKind::Send), InvariantViolation);
}

TEST_CASE("property: row sums are per-GPU send totals") {
    testing::Gen g(99);
    for (int i = 0; i < 300; ++i) {
        const auto inst = g.instance();
        const auto d = decompose(inst);
        CommMatrix m(16);
        m.add(d);
        Bytes rows = 0, cols = 0;
        for (std::size_t k = 0; k < m.dim(); ++k) {
            rows += m.row_sum(k);
            cols += m.col_sum(k);
        }
        CHECK(rows == cols);
        for (int r = 0; r < inst.n_ranks; ++r) {
            const auto idx = m.index_of(Endpoint::gpu(inst.per_rank_devices[static_cast<std::size_t>(r)]));
            CHECK(m.row_sum(idx) == d.per_rank_sent.at(r));
            CHECK(m.col_sum(idx) == d.per_rank_recv.at(r));
        }
    }
}

TEST_CASE("analysis pipeline") {
    std::vector<TraceEvent> ev;
    for (int r = 0; r < 4; ++r) {
        TraceEvent e;
        e.seq = 0;
        e.kind = EventKind::Collective;
        e.comm_id = "c";
        e.n_ranks = 4;
        e.rank = r;
        e.device = r;
        e.collective = CollectiveKind::AllReduce;
        e.algorithm = AlgorithmChoice::Ring;
        e.count = 1024;
        e.dtype = DataType::Float32;
        ev.push_back(e);
    }
    TraceEvent copy;
    copy.kind = EventKind::Memcpy;
    copy.comm_id = "cuda";
    copy.copy_kind = CopyKind::H2D;
    copy.copy_src = Endpoint::host();
    copy.copy_dst = Endpoint::gpu(5);
    copy.bytes = 77;
    ev.push_back(copy);

    const auto a = analyze(ev);
    CHECK(a.gpus == 6);
    CHECK(infer_gpu_count(ev) == 6);
    CHECK(a.combined.at(1, 2) == 6144);
    CHECK(a.combined.at(0, 6) == 77);
    CHECK(a.stats[CommType::ExplicitTransfer].calls == 1);
    CHECK(a.per_primitive.size() == 2);

    AnalysisOptions threaded;
    threaded.threads = 4;
    const auto b = analyze(ev, threaded);
    CHECK(b.combined == a.combined);
    CHECK(b.stats == a.stats);

    AnalysisOptions small;
    small.gpus = 3;
    CHECK_THROWS_AS(analyze(ev, small), EndpointOutOfRange);

    const auto empty = analyze({});
    CHECK(empty.gpus == 0);
    CHECK(empty.combined.is_zero());
    CHECK(empty.combined.dim() == 1);
    CHECK(empty.per_primitive.empty());
}
