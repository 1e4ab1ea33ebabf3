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

#include "comscribe/decomposition.hpp"
#include "comscribe/grouping.hpp"
#include "comscribe/matrix.hpp"
#include "comscribe/stats.hpp"
#include "comscribe/trace.hpp"

#include <map>
#include <optional>
#include <vector>

namespace comscribe {

struct AnalysisOptions {
    SelectionPolicy selection;
    RingConfig rings;
    // Matrix GPU count; inferred from the highest device id when unset.
    std::optional<int> gpus;
    unsigned threads = 1;
};

struct Analysis {
    int gpus = 0;
    GroupingResult grouping;
    std::vector<CallRecord> records; // collectives, then send/recv pairs, then copies
    CommMatrix combined;
    std::map<CommType, CommMatrix> per_primitive;
    StatsSummary stats;
};

// Highest GPU id referenced by any event (rank devices and copy endpoints)
// plus one; 0 for an empty trace.
int infer_gpu_count(const std::vector<TraceEvent>& events);

// Decomposes instances in parallel when threads > 1; the result does not
// depend on the thread count.
std::vector<CallRecord> decompose_all(const GroupingResult& grouping, const RingConfig& rings = {},
                                      unsigned threads = 1);

// group -> decompose -> accumulate. Throws on invariant violations
// (EndpointOutOfRange, CounterOverflow, ...); unmatched events only produce
// diagnostics.
Analysis analyze(const std::vector<TraceEvent>& events, const AnalysisOptions& options = {});

} // namespace comscribe
