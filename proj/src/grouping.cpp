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

#include "comscribe/error.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

namespace comscribe {

namespace {

using EventRefs = std::vector<const TraceEvent*>;

void sort_by_seq(EventRefs& refs) {
    std::stable_sort(refs.begin(), refs.end(),
                     [](const TraceEvent* a, const TraceEvent* b) { return a->seq < b->seq; });
}

struct CommEvents {
    std::set<int> n_ranks_seen;
    std::vector<const TraceEvent*> all;
    std::map<int, EventRefs> collectives;               // rank -> events
    std::map<std::pair<int, int>, EventRefs> sends;     // (rank, peer)
    std::map<std::pair<int, int>, EventRefs> recvs;     // (rank, peer)
};

bool compatible(const TraceEvent& a, const TraceEvent& b) {
    return a.collective == b.collective && a.algorithm == b.algorithm && a.count == b.count &&
           a.dtype == b.dtype && a.root == b.root;
}

std::string describe_args(const TraceEvent& e) {
    std::string s = std::string(to_string(*e.collective)) + "/" + std::string(to_string(*e.algorithm)) +
                    " count=" + std::to_string(*e.count) + " dtype=" + std::string(to_string(*e.dtype));
    if (e.root) {
        s += " root=" + std::to_string(*e.root);
    }
    return s;
}

void group_comm_collectives(const std::string& comm, int n_ranks, CommEvents& ce,
                            const SelectionPolicy& policy, GroupingResult& out) {
    std::size_t max_len = 0;
    for (auto& [rank, refs] : ce.collectives) {
        sort_by_seq(refs);
        max_len = std::max(max_len, refs.size());
    }

    for (std::size_t k = 0; k < max_len; ++k) {
        EventRefs group;
        for (const auto& [rank, refs] : ce.collectives) {
            if (k < refs.size()) {
                group.push_back(refs[k]);
            }
        }
        auto reject = [&](Diagnostic::Kind kind, std::string msg) {
            out.diagnostics.push_back({kind, comm, k, std::move(msg)});
            for (const TraceEvent* e : group) {
                out.unmatched.push_back(*e);
            }
        };

        if (group.size() != static_cast<std::size_t>(n_ranks)) {
            reject(Diagnostic::Kind::IncompleteInstance,
                   "only " + std::to_string(group.size()) + " of " + std::to_string(n_ranks) +
                       " ranks logged this collective");
            continue;
        }
        const TraceEvent& first = *group.front();
        auto odd = std::find_if(group.begin(), group.end(),
                                [&](const TraceEvent* e) { return !compatible(first, *e); });
        if (odd != group.end()) {
            reject(Diagnostic::Kind::IncompatibleArguments,
                   "rank " + std::to_string(first.rank) + " called " + describe_args(first) + " but rank " +
                       std::to_string((*odd)->rank) + " called " + describe_args(**odd));
            continue;
        }
        std::vector<int> devices(static_cast<std::size_t>(n_ranks));
        for (const TraceEvent* e : group) {
            devices[static_cast<std::size_t>(e->rank)] = e->device;
        }
        std::set<int> distinct(devices.begin(), devices.end());
        if (distinct.size() != devices.size()) {
            reject(Diagnostic::Kind::DeviceConflict, "two ranks report the same GPU device");
            continue;
        }

        CollectiveInstance inst;
        inst.comm_id = comm;
        inst.ordinal = k;
        inst.collective = *first.collective;
        inst.requested = *first.algorithm;
        inst.n_ranks = n_ranks;
        inst.root = first.root;
        inst.count = *first.count;
        inst.dtype = *first.dtype;
        inst.payload_bytes = collective_payload(inst.collective, n_ranks, inst.count, inst.dtype);
        inst.algorithm = resolve_algorithm(inst.collective, inst.requested, inst.payload_bytes, policy);
        inst.per_rank_devices = std::move(devices);
        out.instances.push_back(std::move(inst));
    }
}

void group_comm_p2p(const std::string& comm, CommEvents& ce, GroupingResult& out) {
    std::set<std::pair<int, int>> directions; // (src rank, dst rank)
    for (const auto& [key, refs] : ce.sends) directions.insert(key);
    for (const auto& [key, refs] : ce.recvs) directions.insert({key.second, key.first});

    static const EventRefs kNone;
    for (const auto& [src, dst] : directions) {
        auto s_it = ce.sends.find({src, dst});
        auto r_it = ce.recvs.find({dst, src});
        EventRefs sends = s_it != ce.sends.end() ? s_it->second : kNone;
        EventRefs recvs = r_it != ce.recvs.end() ? r_it->second : kNone;
        sort_by_seq(sends);
        sort_by_seq(recvs);

        const std::string route = std::to_string(src) + "->" + std::to_string(dst);
        std::size_t paired = std::min(sends.size(), recvs.size());
        for (std::size_t k = 0; k < paired; ++k) {
            const TraceEvent& s = *sends[k];
            const TraceEvent& r = *recvs[k];
            if (s.count != r.count || s.dtype != r.dtype) {
                out.diagnostics.push_back({Diagnostic::Kind::P2PMismatch, comm, k,
                                           "send " + route + " count/dtype differ from the matching recv"});
                out.unmatched.push_back(s);
                out.unmatched.push_back(r);
                continue;
            }
            P2PInstance p;
            p.comm_id = comm;
            p.ordinal = k;
            p.src_rank = src;
            p.dst_rank = dst;
            p.src_device = s.device;
            p.dst_device = r.device;
            p.count = *s.count;
            p.dtype = *s.dtype;
            p.bytes = checked_mul(p.count, width_bytes(p.dtype));
            out.p2p.push_back(std::move(p));
        }
        for (std::size_t k = paired; k < sends.size(); ++k) {
            out.diagnostics.push_back(
                {Diagnostic::Kind::UnmatchedSend, comm, k, "send " + route + " has no matching recv"});
            out.unmatched.push_back(*sends[k]);
        }
        for (std::size_t k = paired; k < recvs.size(); ++k) {
            out.diagnostics.push_back(
                {Diagnostic::Kind::UnmatchedRecv, comm, k, "recv " + route + " has no matching send"});
            out.unmatched.push_back(*recvs[k]);
        }
    }
}

} // namespace

Bytes collective_payload(CollectiveKind c, int n_ranks, std::uint64_t count, DataType dtype) {
    Bytes s = checked_mul(count, width_bytes(dtype));
    if (c == CollectiveKind::AllGather || c == CollectiveKind::ReduceScatter) {
        s = checked_mul(s, static_cast<Bytes>(n_ranks));
    }
    return s;
}

CollectiveInstance make_instance(CollectiveKind c, AlgorithmKind algo, int n_ranks, std::uint64_t count,
                                 DataType dtype, std::optional<int> root, std::vector<int> devices) {
    if (n_ranks < 1) {
        throw InvariantViolation("instance needs at least one rank");
    }
    if (devices.empty()) {
        devices.resize(static_cast<std::size_t>(n_ranks));
        for (int r = 0; r < n_ranks; ++r) devices[static_cast<std::size_t>(r)] = r;
    }
    if (devices.size() != static_cast<std::size_t>(n_ranks)) {
        throw InvariantViolation("device map size differs from rank count");
    }
    CollectiveInstance inst;
    inst.comm_id = "local";
    inst.collective = c;
    inst.requested = to_choice(algo);
    inst.algorithm = algo;
    inst.n_ranks = n_ranks;
    inst.root = root;
    inst.count = count;
    inst.dtype = dtype;
    inst.payload_bytes = collective_payload(c, n_ranks, count, dtype);
    inst.per_rank_devices = std::move(devices);
    return inst;
}

std::string_view to_string(Diagnostic::Kind k) {
    switch (k) {
    case Diagnostic::Kind::IncompatibleArguments: return "IncompatibleArguments";
    case Diagnostic::Kind::IncompleteInstance: return "IncompleteInstance";
    case Diagnostic::Kind::DeviceConflict: return "DeviceConflict";
    case Diagnostic::Kind::InconsistentCommunicator: return "InconsistentCommunicator";
    case Diagnostic::Kind::UnmatchedSend: return "UnmatchedSend";
    case Diagnostic::Kind::UnmatchedRecv: return "UnmatchedRecv";
    case Diagnostic::Kind::P2PMismatch: return "P2PMismatch";
    }
    return "?";
}

std::string to_string(const Diagnostic& d) {
    std::string s = std::string(to_string(d.kind)) + " comm=" + d.comm_id;
    if (d.ordinal) {
        s += " ordinal=" + std::to_string(*d.ordinal);
    }
    return s + ": " + d.message;
}

GroupingResult group_collectives(const std::vector<TraceEvent>& events, const SelectionPolicy& policy) {
    GroupingResult out;
    std::map<std::string, CommEvents> comms;
    for (const auto& e : events) {
        if (is_copy(e.kind)) {
            out.copies.push_back(e);
            continue;
        }
        CommEvents& ce = comms[e.comm_id];
        ce.n_ranks_seen.insert(e.n_ranks);
        ce.all.push_back(&e);
        switch (e.kind) {
        case EventKind::Collective: ce.collectives[e.rank].push_back(&e); break;
        case EventKind::Send: ce.sends[{e.rank, *e.peer}].push_back(&e); break;
        case EventKind::Recv: ce.recvs[{e.rank, *e.peer}].push_back(&e); break;
        default: break;
        }
    }

    for (auto& [comm, ce] : comms) {
        if (ce.n_ranks_seen.size() != 1) {
            out.diagnostics.push_back({Diagnostic::Kind::InconsistentCommunicator, comm, std::nullopt,
                                       "events disagree on the communicator size"});
            for (const TraceEvent* e : ce.all) out.unmatched.push_back(*e);
            continue;
        }
        group_comm_collectives(comm, *ce.n_ranks_seen.begin(), ce, policy, out);
        group_comm_p2p(comm, ce, out);
    }
    return out;
}

} // namespace comscribe
