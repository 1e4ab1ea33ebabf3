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
#include "comscribe/pipeline.hpp"

#include "comscribe/error.hpp"

#include <algorithm>
#include <exception>
#include <thread>

namespace comscribe {

int infer_gpu_count(const std::vector<TraceEvent>& events) {
    int max_dev = -1;
    for (const auto& e : events) {
        if (is_copy(e.kind)) {
            for (const auto& ep : {e.copy_src, e.copy_dst}) {
                if (ep && ep->kind == EndpointKind::Gpu) max_dev = std::max(max_dev, ep->index);
            }
        } else {
            max_dev = std::max(max_dev, e.device);
        }
    }
    return max_dev + 1;
}

std::vector<CallRecord> decompose_all(const GroupingResult& grouping, const RingConfig& rings, unsigned threads) {
    const std::size_t n_coll = grouping.instances.size();
    std::vector<CallRecord> records(n_coll);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto& inst = grouping.instances[i];
            records[i] = {comm_type(inst.collective), inst.payload_bytes, decompose(inst, rings)};
        }
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, n_coll))));
    if (threads == 1) {
        work(0, n_coll);
    } else {
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        const std::size_t per = (n_coll + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = std::min(n_coll, per * t);
            const std::size_t end = std::min(n_coll, begin + per);
            pool.emplace_back([&, t, begin, end] {
                try {
                    work(begin, end);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }

    for (const auto& p : grouping.p2p) {
        records.push_back({CommType::SendRecv, p.bytes, decompose_p2p(p)});
    }
    for (const auto& e : grouping.copies) {
        records.push_back({comm_type_of_copy(e.kind), *e.bytes, decompose_copy(e)});
    }
    return records;
}

Analysis analyze(const std::vector<TraceEvent>& events, const AnalysisOptions& options) {
    Analysis a;
    const int needed = infer_gpu_count(events);
    a.gpus = options.gpus.value_or(needed);
    if (a.gpus < needed) {
        throw EndpointOutOfRange("trace references GPU " + std::to_string(needed - 1) + " but only " +
                                 std::to_string(a.gpus) + " GPUs were configured");
    }
    a.grouping = group_collectives(events, options.selection);
    a.records = decompose_all(a.grouping, options.rings, options.threads);
    a.per_primitive = split_by_primitive(a.records, a.gpus);
    a.combined = combined_matrix(a.records, a.gpus);
    a.stats = summarize(a.records);
    return a;
}

} // namespace comscribe
