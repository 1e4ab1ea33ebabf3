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
#include "comscribe/algorithm_selection.hpp"

namespace comscribe {

AlgorithmKind select_algorithm(CollectiveKind c, Bytes payload, const SelectionPolicy& policy) {
    if (c != CollectiveKind::AllReduce) {
        return AlgorithmKind::Ring;
    }
    return payload < policy.tree_threshold ? AlgorithmKind::Tree : AlgorithmKind::Ring;
}

AlgorithmKind resolve_algorithm(CollectiveKind c, AlgorithmChoice requested, Bytes payload,
                                const SelectionPolicy& policy) {
    switch (requested) {
    case AlgorithmChoice::Ring: return AlgorithmKind::Ring;
    case AlgorithmChoice::Tree: return AlgorithmKind::Tree;
    case AlgorithmChoice::Collnet: return AlgorithmKind::Collnet;
    case AlgorithmChoice::Auto: break;
    }
    return select_algorithm(c, payload, policy);
}

} // namespace comscribe
