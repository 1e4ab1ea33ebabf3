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

#include "comscribe/types.hpp"

namespace comscribe {

inline constexpr Bytes kDefaultTreeThreshold = Bytes{1} << 20;

struct SelectionPolicy {
    // AllReduce payloads strictly below this use Tree, the rest Ring.
    Bytes tree_threshold = kDefaultTreeThreshold;
};

// Resolves an "auto" request. Only AllReduce has a choice; Collnet is never
// picked automatically.
AlgorithmKind select_algorithm(CollectiveKind c, Bytes payload, const SelectionPolicy& policy = {});

// Explicit choices pass through unchanged.
AlgorithmKind resolve_algorithm(CollectiveKind c, AlgorithmChoice requested, Bytes payload,
                                const SelectionPolicy& policy = {});

} // namespace comscribe
