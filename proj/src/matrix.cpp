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
#include "comscribe/matrix.hpp"

#include "comscribe/error.hpp"

#include <algorithm>

namespace comscribe {

CommMatrix::CommMatrix(int gpus, bool aggregator) : gpus_(gpus), aggregator_(aggregator) {
    if (gpus < 0) {
        throw EndpointOutOfRange("negative GPU count");
    }
    cells_.assign(dim() * dim(), 0);
}

Bytes CommMatrix::at(std::size_t row, std::size_t col) const {
    if (row >= dim() || col >= dim()) {
        throw EndpointOutOfRange("matrix cell (" + std::to_string(row) + "," + std::to_string(col) +
                                 ") outside " + std::to_string(dim()) + "x" + std::to_string(dim()));
    }
    return cells_[row * dim() + col];
}

std::size_t CommMatrix::index_of(Endpoint e) const {
    switch (e.kind) {
    case EndpointKind::Host:
        return 0;
    case EndpointKind::Gpu:
        if (e.index < 0 || e.index >= gpus_) {
            throw EndpointOutOfRange("GPU " + std::to_string(e.index) + " outside matrix with d=" +
                                     std::to_string(gpus_));
        }
        return static_cast<std::size_t>(e.index) + 1;
    case EndpointKind::NetAggregator:
        if (!aggregator_) {
            throw EndpointOutOfRange("matrix has no aggregator row");
        }
        return static_cast<std::size_t>(gpus_) + 1;
    }
    throw EndpointOutOfRange("unknown endpoint kind");
}

Endpoint CommMatrix::endpoint_at(std::size_t index) const {
    if (index == 0) return Endpoint::host();
    if (index <= static_cast<std::size_t>(gpus_)) return Endpoint::gpu(static_cast<int>(index) - 1);
    if (aggregator_ && index == static_cast<std::size_t>(gpus_) + 1) return Endpoint::aggregator();
    throw EndpointOutOfRange("index " + std::to_string(index) + " outside matrix");
}

void CommMatrix::widen_aggregator() {
    if (aggregator_) return;
    CommMatrix wider(gpus_, true);
    for (std::size_t r = 0; r < dim(); ++r) {
        for (std::size_t c = 0; c < dim(); ++c) {
            wider.cells_[r * wider.dim() + c] = cells_[r * dim() + c];
        }
    }
    *this = std::move(wider);
}

void CommMatrix::add_cell(std::size_t row, std::size_t col, Bytes bytes) {
    if (row >= dim() || col >= dim()) {
        throw EndpointOutOfRange("matrix cell outside range");
    }
    if (row == col && bytes != 0) {
        throw InvariantViolation("self transfer attributed to diagonal cell " + std::to_string(row));
    }
    Bytes& cell = cells_[row * dim() + col];
    cell = checked_add(cell, bytes);
}

void CommMatrix::add(Endpoint src, Endpoint dst, Bytes bytes) {
    if (src.kind == EndpointKind::NetAggregator || dst.kind == EndpointKind::NetAggregator) {
        widen_aggregator();
    }
    add_cell(index_of(src), index_of(dst), bytes);
}

void CommMatrix::add(const Decomposition& d) {
    // Resolve every index first so an out-of-range endpoint leaves the matrix
    // untouched.
    for (const auto& t : d.transfers) {
        if (t.src.kind == EndpointKind::NetAggregator || t.dst.kind == EndpointKind::NetAggregator) {
            widen_aggregator();
            break;
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    cells.reserve(d.transfers.size());
    for (const auto& t : d.transfers) {
        cells.emplace_back(index_of(t.src), index_of(t.dst));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        add_cell(cells[i].first, cells[i].second, d.transfers[i].bytes);
    }
}

Bytes CommMatrix::row_sum(std::size_t row) const {
    Bytes s = 0;
    for (std::size_t c = 0; c < dim(); ++c) s = checked_add(s, at(row, c));
    return s;
}

Bytes CommMatrix::col_sum(std::size_t col) const {
    Bytes s = 0;
    for (std::size_t r = 0; r < dim(); ++r) s = checked_add(s, at(r, col));
    return s;
}

Bytes CommMatrix::total() const {
    Bytes s = 0;
    for (Bytes v : cells_) s = checked_add(s, v);
    return s;
}

bool CommMatrix::is_zero() const {
    return std::all_of(cells_.begin(), cells_.end(), [](Bytes v) { return v == 0; });
}

CommMatrix CommMatrix::symmetrized() const {
    CommMatrix out(gpus_, aggregator_);
    for (std::size_t r = 0; r < dim(); ++r) {
        for (std::size_t c = 0; c < dim(); ++c) {
            out.cells_[r * dim() + c] = checked_add(at(r, c), at(c, r));
        }
    }
    return out;
}

std::vector<std::string> CommMatrix::labels() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < dim(); ++i) out.push_back(to_string(endpoint_at(i)));
    return out;
}

CommMatrix accumulate(CommMatrix matrix, const Decomposition& d) {
    matrix.add(d);
    return matrix;
}

CommMatrix merge(const CommMatrix& a, const CommMatrix& b) {
    CommMatrix out(std::max(a.gpus(), b.gpus()), a.has_aggregator() || b.has_aggregator());
    for (const CommMatrix* m : {&a, &b}) {
        for (std::size_t r = 0; r < m->dim(); ++r) {
            for (std::size_t c = 0; c < m->dim(); ++c) {
                if (Bytes v = m->at(r, c)) {
                    out.add_cell(out.index_of(m->endpoint_at(r)), out.index_of(m->endpoint_at(c)), v);
                }
            }
        }
    }
    return out;
}

} // namespace comscribe
