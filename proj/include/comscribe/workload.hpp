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

// Synthetic traces of data-parallel training: every iteration packs the
// gradient tensors into buckets (walking them in reverse, as they become
// ready during the backward pass) and issues one AllReduce per bucket on
// every rank.

#include "comscribe/trace.hpp"
#include "comscribe/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace comscribe {

struct TrainingConfig {
    int gpus = 1;
    std::vector<Bytes> tensor_sizes_bytes;
    std::uint64_t iterations_per_epoch = 1;
    std::uint64_t epochs = 1;
    Bytes bucket_cap_bytes = Bytes{25} << 20;
    bool broadcast_init = false; // one Broadcast from rank 0 per tensor before training
    AlgorithmChoice algorithm = AlgorithmChoice::Auto;
    // Element type of the gradients. When unset: float32 if every tensor size
    // is a multiple of 4 bytes, uint8 otherwise.
    std::optional<DataType> dtype;

    struct HostLoads {
        std::uint64_t count = 0; // per GPU per iteration
        Bytes bytes = 0;
    };
    std::optional<HostLoads> explicit_h2d_per_iteration;

    std::string comm_id = "train";
};

// Extra traffic that is not part of the gradient exchange.
struct AuxiliaryPlan {
    std::uint64_t setup_allgathers = 0;       // issued once, after the init broadcasts
    std::uint64_t allgather_count_per_rank = 0;
    DataType allgather_dtype = DataType::Float32;
    std::uint64_t explicit_transfers = 0;      // H2D copies spread evenly over all iterations
    Bytes explicit_bytes = 0;

    friend bool operator==(const AuxiliaryPlan&, const AuxiliaryPlan&) = default;
};

struct WorkloadPlan {
    TrainingConfig training;
    AuxiliaryPlan aux;
};

// Throws InvalidConfig.
void validate(const TrainingConfig& cfg);
void validate(const WorkloadPlan& plan);

DataType gradient_dtype(const TrainingConfig& cfg);

// Greedy packing over the tensors in reverse order. A bucket is closed when
// the next tensor would overflow it; a tensor larger than the cap gets a
// bucket of its own. Returns tensor indices per bucket, in issue order.
std::vector<std::vector<std::size_t>> pack_buckets(const std::vector<Bytes>& tensor_sizes, Bytes cap);

std::vector<TraceEvent> generate_training_trace(const TrainingConfig& cfg, std::uint64_t seed);
std::vector<TraceEvent> generate_trace(const WorkloadPlan& plan, std::uint64_t seed);

// Machine-translation profile: many explicit host transfers, a steady stream
// of AllReduces, five parameter broadcasts and three all-gathers at setup.
// `scale` shrinks the AllReduce and explicit-transfer counts (rounded to
// nearest, at least 1); broadcast and all-gather counts stay exact.
WorkloadPlan gnmt_like_preset(int gpus, double scale = 1e-3);

// Image-classification profile: the 62 parameter tensors of an 18-layer
// residual network (float32), 25 MiB buckets, init broadcasts.
WorkloadPlan resnet_like_preset(int gpus, std::uint64_t iterations = 587);

// Parameter tensor sizes (bytes) used by resnet_like_preset.
std::vector<Bytes> resnet18_tensor_sizes();

// JSON form: {"gpus", "tensor_sizes_bytes", "iterations_per_epoch",
// "epochs", "bucket_cap_bytes", "broadcast_init", "algorithm", "dtype",
// "explicit_h2d_per_iteration": {"count","bytes"}, "comm",
// "aux": {"setup_allgathers", "allgather_count_per_rank",
// "allgather_dtype", "explicit_transfers", "explicit_bytes"}}.
// Missing keys keep their defaults. Throws InvalidConfig.
WorkloadPlan plan_from_json(const std::string& text);
std::string plan_to_json(const WorkloadPlan& plan);

} // namespace comscribe
