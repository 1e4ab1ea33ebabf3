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
#include "comscribe/types.hpp"

#include <string>
#include <vector>

namespace comscribe {

// Directed byte counts between endpoints: row = source, column = destination.
// Index 0 is the host, GPU g is index g + 1, and the collnet aggregator (if
// any traffic reached it) is the last index d + 1. Cell (0,0) and the GPU
// diagonal stay zero since transfers never have src == dst.
class CommMatrix {
public:
    CommMatrix() = default;
    explicit CommMatrix(int gpus, bool aggregator = false);

    int gpus() const noexcept { return gpus_; }
    bool has_aggregator() const noexcept { return aggregator_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(gpus_) + 1 + (aggregator_ ? 1 : 0); }

    Bytes at(std::size_t row, std::size_t col) const;
    Bytes at(Endpoint src, Endpoint dst) const { return at(index_of(src), index_of(dst)); }

    // Throws EndpointOutOfRange for GPUs >= d and for the aggregator when the
    // matrix has no aggregator row.
    std::size_t index_of(Endpoint e) const;
    Endpoint endpoint_at(std::size_t index) const;

    // Adds every transfer; widens to include the aggregator on demand.
    // Throws EndpointOutOfRange, CounterOverflow.
    void add(const Decomposition& d);
    void add(Endpoint src, Endpoint dst, Bytes bytes);
    void add_cell(std::size_t row, std::size_t col, Bytes bytes);

    void widen_aggregator();

    Bytes row_sum(std::size_t row) const;
    Bytes col_sum(std::size_t col) const;
    Bytes total() const;
    bool is_zero() const;

    // M + M^T
    CommMatrix symmetrized() const;

    // "host", "gpu0".."gpu{d-1}", and "net" for the aggregator.
    std::vector<std::string> labels() const;

    friend bool operator==(const CommMatrix&, const CommMatrix&) = default;

private:
    int gpus_ = 0;
    bool aggregator_ = false;
    std::vector<Bytes> cells_ = std::vector<Bytes>(1, 0);
};

CommMatrix accumulate(CommMatrix matrix, const Decomposition& d);

// Cellwise sum. The result covers the larger GPU count and has an aggregator
// row if either input has one.
CommMatrix merge(const CommMatrix& a, const CommMatrix& b);

} // namespace comscribe
