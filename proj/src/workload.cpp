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
#include "comscribe/workload.hpp"

#include "comscribe/error.hpp"

#include <json.hpp>

#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace comscribe {

namespace {

// Per-rank seq and timestamp bookkeeping while emitting a trace.
class Emitter {
public:
    Emitter(const TrainingConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
        std::mt19937_64 rng(seed);
        for (int r = 0; r < cfg.gpus; ++r) {
            clock_.push_back(static_cast<std::int64_t>(rng() % 1'000'000));
        }
        copy_comm_ = cfg.comm_id + ".cuda";
    }

    void collective(CollectiveKind c, AlgorithmChoice algo, std::uint64_t count, DataType dtype,
                    std::optional<int> root = std::nullopt) {
        for (int r = 0; r < cfg_.gpus; ++r) {
            TraceEvent e = base(cfg_.comm_id, r);
            e.kind = EventKind::Collective;
            e.collective = c;
            e.algorithm = algo;
            e.count = count;
            e.dtype = dtype;
            e.root = root;
            events_.push_back(std::move(e));
        }
    }

    void host_to_device(int gpu, Bytes bytes) {
        TraceEvent e = base(copy_comm_, gpu);
        e.kind = EventKind::Memcpy;
        e.copy_kind = CopyKind::H2D;
        e.copy_src = Endpoint::host();
        e.copy_dst = Endpoint::gpu(gpu);
        e.bytes = bytes;
        events_.push_back(std::move(e));
    }

    std::vector<TraceEvent> take() { return std::move(events_); }

private:
    TraceEvent base(const std::string& comm, int rank) {
        TraceEvent e;
        e.seq = seq_[{comm, rank}]++;
        auto& clock = clock_[static_cast<std::size_t>(rank)];
        clock += 1000;
        e.timestamp_ns = clock;
        e.comm_id = comm;
        e.n_ranks = cfg_.gpus;
        e.rank = rank;
        e.device = rank;
        return e;
    }

    const TrainingConfig& cfg_;
    std::string copy_comm_;
    std::vector<std::int64_t> clock_;
    std::map<std::pair<std::string, int>, std::uint64_t> seq_;
    std::vector<TraceEvent> events_;
};

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception& ex) {
        throw InvalidConfig(std::string("config key \"") + key + "\": " + ex.what());
    }
}

template <typename E>
E enum_or(const nlohmann::json& j, const char* key, E fallback, std::optional<E> (*parse)(std::string_view)) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_string()) throw InvalidConfig(std::string("config key \"") + key + "\" must be a string");
    auto v = parse(it->get<std::string>());
    if (!v) throw InvalidConfig(std::string("config key \"") + key + "\": unknown value");
    return *v;
}

} // namespace

DataType gradient_dtype(const TrainingConfig& cfg) {
    if (cfg.dtype) return *cfg.dtype;
    for (Bytes s : cfg.tensor_sizes_bytes) {
        if (s % 4 != 0) return DataType::Uint8;
    }
    return DataType::Float32;
}

void validate(const TrainingConfig& cfg) {
    if (cfg.gpus < 1) throw InvalidConfig("gpus must be >= 1");
    if (cfg.tensor_sizes_bytes.empty()) throw InvalidConfig("at least one tensor is required");
    if (cfg.iterations_per_epoch < 1) throw InvalidConfig("iterations_per_epoch must be >= 1");
    if (cfg.epochs < 1) throw InvalidConfig("epochs must be >= 1");
    if (cfg.bucket_cap_bytes == 0) throw InvalidConfig("bucket_cap_bytes must be > 0");
    if (cfg.comm_id.empty()) throw InvalidConfig("comm must not be empty");
    const Bytes width = width_bytes(gradient_dtype(cfg));
    for (Bytes s : cfg.tensor_sizes_bytes) {
        if (s == 0) throw InvalidConfig("tensor sizes must be > 0");
        if (s % width != 0) throw InvalidConfig("tensor size " + std::to_string(s) + " is not a whole number of elements");
    }
    if (cfg.explicit_h2d_per_iteration && cfg.explicit_h2d_per_iteration->count > 0 &&
        cfg.explicit_h2d_per_iteration->bytes == 0) {
        throw InvalidConfig("explicit host loads need a byte size");
    }
}

void validate(const WorkloadPlan& plan) {
    validate(plan.training);
    if (plan.aux.setup_allgathers > 0 && plan.aux.allgather_count_per_rank == 0) {
        throw InvalidConfig("all-gathers need a per-rank count");
    }
    if (plan.aux.explicit_transfers > 0 && plan.aux.explicit_bytes == 0) {
        throw InvalidConfig("explicit transfers need a byte size");
    }
}

std::vector<std::vector<std::size_t>> pack_buckets(const std::vector<Bytes>& tensor_sizes, Bytes cap) {
    std::vector<std::vector<std::size_t>> buckets;
    std::vector<std::size_t> current;
    Bytes filled = 0;
    for (std::size_t k = tensor_sizes.size(); k-- > 0;) {
        const Bytes size = tensor_sizes[k];
        if (!current.empty() && (size > cap || filled + size > cap)) {
            buckets.push_back(std::move(current));
            current.clear();
            filled = 0;
        }
        current.push_back(k);
        filled += size;
    }
    if (!current.empty()) buckets.push_back(std::move(current));
    return buckets;
}

std::vector<TraceEvent> generate_trace(const WorkloadPlan& plan, std::uint64_t seed) {
    validate(plan);
    const TrainingConfig& cfg = plan.training;
    const DataType dtype = gradient_dtype(cfg);
    const Bytes width = width_bytes(dtype);
    Emitter out(cfg, seed);

    if (cfg.broadcast_init) {
        for (Bytes size : cfg.tensor_sizes_bytes) {
            out.collective(CollectiveKind::Broadcast, AlgorithmChoice::Ring, size / width, dtype, 0);
        }
    }
    for (std::uint64_t k = 0; k < plan.aux.setup_allgathers; ++k) {
        out.collective(CollectiveKind::AllGather, AlgorithmChoice::Ring, plan.aux.allgather_count_per_rank,
                       plan.aux.allgather_dtype);
    }

    const auto buckets = pack_buckets(cfg.tensor_sizes_bytes, cfg.bucket_cap_bytes);
    std::vector<std::uint64_t> bucket_counts;
    for (const auto& b : buckets) {
        Bytes bytes = 0;
        for (std::size_t k : b) bytes = checked_add(bytes, cfg.tensor_sizes_bytes[k]);
        bucket_counts.push_back(bytes / width);
    }

    const std::uint64_t total_iters = cfg.iterations_per_epoch * cfg.epochs;
    std::uint64_t explicit_sent = 0;
    for (std::uint64_t it = 0; it < total_iters; ++it) {
        if (cfg.explicit_h2d_per_iteration) {
            for (int g = 0; g < cfg.gpus; ++g) {
                for (std::uint64_t c = 0; c < cfg.explicit_h2d_per_iteration->count; ++c) {
                    out.host_to_device(g, cfg.explicit_h2d_per_iteration->bytes);
                }
            }
        }
        // Spread the auxiliary copies so that the first `it + 1` iterations
        // carry floor((it + 1) * T / I) of them.
        const auto due = static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(it + 1) * plan.aux.explicit_transfers) / total_iters);
        for (; explicit_sent < due; ++explicit_sent) {
            out.host_to_device(static_cast<int>(explicit_sent % static_cast<std::uint64_t>(cfg.gpus)),
                               plan.aux.explicit_bytes);
        }
        for (std::uint64_t count : bucket_counts) {
            out.collective(CollectiveKind::AllReduce, cfg.algorithm, count, dtype);
        }
    }
    return out.take();
}

std::vector<TraceEvent> generate_training_trace(const TrainingConfig& cfg, std::uint64_t seed) {
    return generate_trace(WorkloadPlan{cfg, {}}, seed);
}

WorkloadPlan gnmt_like_preset(int gpus, double scale) {
    if (gpus < 1) throw InvalidConfig("gpus must be >= 1");
    if (!(scale > 0.0)) throw InvalidConfig("scale must be positive");
    auto scaled = [scale](double full) {
        return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(full * scale)));
    };

    WorkloadPlan plan;
    TrainingConfig& cfg = plan.training;
    cfg.gpus = gpus;
    cfg.comm_id = "gnmt";
    // Five parameter groups of 122.4 MB, broadcast once (612 MB in total)
    // and reduced together in a single bucket every iteration.
    cfg.tensor_sizes_bytes.assign(5, 122'400'000);
    cfg.bucket_cap_bytes = 5 * Bytes{122'400'000};
    cfg.broadcast_init = true;
    cfg.algorithm = AlgorithmChoice::Ring;
    cfg.dtype = DataType::Float32;
    cfg.iterations_per_epoch = scaled(30739);
    cfg.epochs = 1;

    plan.aux.setup_allgathers = 3;
    plan.aux.allgather_dtype = DataType::Float32;
    plan.aux.allgather_count_per_rank = 1'000'000 / (static_cast<std::uint64_t>(gpus) * 4); // ~1 MB per call
    plan.aux.explicit_transfers = scaled(778694);
    plan.aux.explicit_bytes = 20'176; // 15,711 MB over 778,694 copies
    return plan;
}

std::vector<Bytes> resnet18_tensor_sizes() {
    std::vector<std::uint64_t> params;
    auto conv = [&](std::uint64_t out, std::uint64_t in, std::uint64_t k) { params.push_back(out * in * k * k); };
    auto bn = [&](std::uint64_t c) {
        params.push_back(c);
        params.push_back(c);
    };
    conv(64, 3, 7);
    bn(64);
    const std::uint64_t widths[] = {64, 128, 256, 512};
    std::uint64_t in = 64;
    for (std::uint64_t w : widths) {
        for (int block = 0; block < 2; ++block) {
            conv(w, block == 0 ? in : w, 3);
            bn(w);
            conv(w, w, 3);
            bn(w);
            if (block == 0 && in != w) {
                conv(w, in, 1);
                bn(w);
            }
        }
        in = w;
    }
    params.push_back(512 * 1000); // fc weight
    params.push_back(1000);       // fc bias

    std::vector<Bytes> sizes;
    for (auto p : params) sizes.push_back(p * 4);
    return sizes;
}

WorkloadPlan resnet_like_preset(int gpus, std::uint64_t iterations) {
    WorkloadPlan plan;
    TrainingConfig& cfg = plan.training;
    cfg.gpus = gpus;
    cfg.comm_id = "resnet";
    cfg.tensor_sizes_bytes = resnet18_tensor_sizes();
    cfg.bucket_cap_bytes = Bytes{25} << 20;
    cfg.broadcast_init = true;
    cfg.algorithm = AlgorithmChoice::Auto;
    cfg.dtype = DataType::Float32;
    cfg.iterations_per_epoch = iterations;
    validate(plan);
    return plan;
}

WorkloadPlan plan_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw InvalidConfig(std::string("config is not valid JSON: ") + ex.what());
    }
    if (!j.is_object()) throw InvalidConfig("config must be a JSON object");

    WorkloadPlan plan;
    TrainingConfig& cfg = plan.training;
    cfg.gpus = get_or<int>(j, "gpus", cfg.gpus);
    cfg.tensor_sizes_bytes = get_or<std::vector<Bytes>>(j, "tensor_sizes_bytes", {});
    cfg.iterations_per_epoch = get_or<std::uint64_t>(j, "iterations_per_epoch", cfg.iterations_per_epoch);
    cfg.epochs = get_or<std::uint64_t>(j, "epochs", cfg.epochs);
    cfg.bucket_cap_bytes = get_or<Bytes>(j, "bucket_cap_bytes", cfg.bucket_cap_bytes);
    cfg.broadcast_init = get_or<bool>(j, "broadcast_init", cfg.broadcast_init);
    cfg.algorithm = enum_or<AlgorithmChoice>(j, "algorithm", cfg.algorithm, &parse_algorithm);
    if (j.contains("dtype")) cfg.dtype = enum_or<DataType>(j, "dtype", DataType::Float32, &parse_dtype);
    cfg.comm_id = get_or<std::string>(j, "comm", cfg.comm_id);
    if (auto it = j.find("explicit_h2d_per_iteration"); it != j.end() && !it->is_null()) {
        cfg.explicit_h2d_per_iteration = TrainingConfig::HostLoads{get_or<std::uint64_t>(*it, "count", 0),
                                                                   get_or<Bytes>(*it, "bytes", 0)};
    }
    if (auto it = j.find("aux"); it != j.end()) {
        const auto& a = *it;
        plan.aux.setup_allgathers = get_or<std::uint64_t>(a, "setup_allgathers", 0);
        plan.aux.allgather_count_per_rank = get_or<std::uint64_t>(a, "allgather_count_per_rank", 0);
        plan.aux.allgather_dtype = enum_or<DataType>(a, "allgather_dtype", DataType::Float32, &parse_dtype);
        plan.aux.explicit_transfers = get_or<std::uint64_t>(a, "explicit_transfers", 0);
        plan.aux.explicit_bytes = get_or<Bytes>(a, "explicit_bytes", 0);
    }
    validate(plan);
    return plan;
}

std::string plan_to_json(const WorkloadPlan& plan) {
    const TrainingConfig& cfg = plan.training;
    nlohmann::ordered_json j;
    j["gpus"] = cfg.gpus;
    j["tensor_sizes_bytes"] = cfg.tensor_sizes_bytes;
    j["iterations_per_epoch"] = cfg.iterations_per_epoch;
    j["epochs"] = cfg.epochs;
    j["bucket_cap_bytes"] = cfg.bucket_cap_bytes;
    j["broadcast_init"] = cfg.broadcast_init;
    j["algorithm"] = to_string(cfg.algorithm);
    if (cfg.dtype) j["dtype"] = to_string(*cfg.dtype);
    j["comm"] = cfg.comm_id;
    if (cfg.explicit_h2d_per_iteration) {
        j["explicit_h2d_per_iteration"] = {{"count", cfg.explicit_h2d_per_iteration->count},
                                           {"bytes", cfg.explicit_h2d_per_iteration->bytes}};
    }
    j["aux"] = {{"setup_allgathers", plan.aux.setup_allgathers},
                {"allgather_count_per_rank", plan.aux.allgather_count_per_rank},
                {"allgather_dtype", to_string(plan.aux.allgather_dtype)},
                {"explicit_transfers", plan.aux.explicit_transfers},
                {"explicit_bytes", plan.aux.explicit_bytes}};
    return j.dump(2);
}

} // namespace comscribe
