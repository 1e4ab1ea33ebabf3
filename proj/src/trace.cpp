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
#include "comscribe/trace.hpp"

#include "comscribe/error.hpp"

#include <json.hpp>

#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

namespace comscribe {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::pair<std::string_view, EventKind> kEventKindNames[] = {
    {"collective", EventKind::Collective}, {"send", EventKind::Send},
    {"recv", EventKind::Recv},             {"memcpy", EventKind::Memcpy},
    {"um", EventKind::UnifiedMemory},      {"zerocopy", EventKind::ZeroCopy},
};

constexpr std::pair<std::string_view, CopyKind> kCopyKindNames[] = {
    {"h2d", CopyKind::H2D}, {"d2h", CopyKind::D2H}, {"d2d", CopyKind::D2D}};

std::string describe(const TraceEvent& e) {
    return "event (comm \"" + e.comm_id + "\", rank " + std::to_string(e.rank) + ", seq " +
           std::to_string(e.seq) + ")";
}

[[noreturn]] void violation(const TraceEvent& e, const std::string& what) {
    throw InvariantViolation(describe(e) + ": " + what);
}

void expect_endpoint(const TraceEvent& e, const Endpoint& ep, EndpointKind kind, const char* role) {
    if (ep.kind != kind) {
        violation(e, std::string(role) + " endpoint must be " + std::string(to_string(kind)) + " for " +
                         std::string(to_string(*e.copy_kind)));
    }
    if (ep.index < 0 || (kind == EndpointKind::Host && ep.index != 0)) {
        violation(e, std::string(role) + " endpoint has invalid index " + std::to_string(ep.index));
    }
}

// ---- JSON field readers ------------------------------------------------------

class LineReader {
public:
    LineReader(const json& obj, std::size_t line_no) : obj_(obj), line_no_(line_no) {}

    const json& require(const char* key) const {
        auto it = obj_.find(key);
        if (it == obj_.end()) {
            throw SchemaViolation(line_no_, key, "missing required field");
        }
        return *it;
    }

    bool has(const char* key) const { return obj_.contains(key); }

    std::int64_t integer(const char* key) const { return as_integer(require(key), key); }

    std::uint64_t non_negative(const char* key) const {
        const json& v = require(key);
        if (v.is_number_unsigned()) {
            return v.get<std::uint64_t>();
        }
        if (v.is_number_integer()) {
            throw InvariantViolation("line " + std::to_string(line_no_) + ": field \"" + key +
                                     "\" must be non-negative");
        }
        throw SchemaViolation(line_no_, key, "expected integer");
    }

    int small_int(const char* key) const {
        std::int64_t v = integer(key);
        if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
            throw InvariantViolation("line " + std::to_string(line_no_) + ": field \"" + key +
                                     "\" out of range");
        }
        return static_cast<int>(v);
    }

    std::string string(const char* key) const {
        const json& v = require(key);
        if (!v.is_string()) {
            throw SchemaViolation(line_no_, key, "expected string");
        }
        return v.get<std::string>();
    }

    template <typename E>
    E enumeration(const char* key, std::optional<E> (*parse)(std::string_view)) const {
        std::string s = string(key);
        auto v = parse(s);
        if (!v) {
            throw SchemaViolation(line_no_, key, "unknown value \"" + s + "\"");
        }
        return *v;
    }

    Endpoint endpoint(const char* key) const {
        const json& v = require(key);
        if (!v.is_object()) {
            throw SchemaViolation(line_no_, key, "expected object {\"kind\",\"idx\"}");
        }
        LineReader inner(v, line_no_);
        Endpoint ep;
        ep.kind = inner.enumeration<EndpointKind>("kind", &parse_endpoint_kind);
        ep.index = inner.small_int("idx");
        return ep;
    }

private:
    std::int64_t as_integer(const json& v, const char* key) const {
        if (v.is_number_unsigned()) {
            auto u = v.get<std::uint64_t>();
            if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
                throw InvariantViolation("line " + std::to_string(line_no_) + ": field \"" + key +
                                         "\" out of range");
            }
            return static_cast<std::int64_t>(u);
        }
        if (v.is_number_integer()) {
            return v.get<std::int64_t>();
        }
        throw SchemaViolation(line_no_, key, "expected integer");
    }

    const json& obj_;
    std::size_t line_no_;
};

TraceEvent event_from_json(const json& obj, std::size_t line_no) {
    if (!obj.is_object()) {
        throw SchemaViolation(line_no, "<line>", "expected a JSON object");
    }
    LineReader r(obj, line_no);
    TraceEvent e;
    e.seq = r.non_negative("seq");
    e.timestamp_ns = r.integer("ts");
    e.kind = r.enumeration<EventKind>("kind", &parse_event_kind);
    e.comm_id = r.string("comm");
    e.n_ranks = r.small_int("nranks");
    e.rank = r.small_int("rank");
    e.device = r.small_int("dev");

    switch (e.kind) {
    case EventKind::Collective:
        e.collective = r.enumeration<CollectiveKind>("coll", &parse_collective);
        e.algorithm = r.enumeration<AlgorithmChoice>("algo", &parse_algorithm);
        e.count = r.non_negative("count");
        e.dtype = r.enumeration<DataType>("dtype", &parse_dtype);
        if (r.has("root")) {
            e.root = r.small_int("root");
        }
        break;
    case EventKind::Send:
    case EventKind::Recv:
        e.peer = r.small_int("peer");
        e.count = r.non_negative("count");
        e.dtype = r.enumeration<DataType>("dtype", &parse_dtype);
        break;
    case EventKind::Memcpy:
    case EventKind::UnifiedMemory:
    case EventKind::ZeroCopy:
        e.copy_kind = r.enumeration<CopyKind>("ckind", &parse_copy_kind);
        e.copy_src = r.endpoint("src");
        e.copy_dst = r.endpoint("dst");
        e.bytes = r.non_negative("bytes");
        break;
    }

    try {
        validate_event(e);
    } catch (const InvariantViolation& ex) {
        throw InvariantViolation("line " + std::to_string(line_no) + ": " + ex.what());
    }
    return e;
}

ordered_json endpoint_json(const Endpoint& ep) {
    ordered_json j;
    j["kind"] = to_string(ep.kind);
    j["idx"] = ep.index;
    return j;
}

} // namespace

std::string_view to_string(EventKind k) {
    for (const auto& [name, v] : kEventKindNames) {
        if (v == k) return name;
    }
    return "?";
}

std::string_view to_string(CopyKind k) {
    for (const auto& [name, v] : kCopyKindNames) {
        if (v == k) return name;
    }
    return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
    for (const auto& [name, v] : kEventKindNames) {
        if (name == s) return v;
    }
    return std::nullopt;
}

std::optional<CopyKind> parse_copy_kind(std::string_view s) {
    for (const auto& [name, v] : kCopyKindNames) {
        if (name == s) return v;
    }
    return std::nullopt;
}

void validate_event(const TraceEvent& e) {
    if (e.comm_id.empty()) {
        violation(e, "empty communicator id");
    }
    if (e.n_ranks < 1) {
        violation(e, "nranks must be >= 1");
    }
    if (e.rank < 0 || e.rank >= e.n_ranks) {
        violation(e, "rank " + std::to_string(e.rank) + " outside [0, " + std::to_string(e.n_ranks) + ")");
    }
    if (e.device < 0) {
        violation(e, "negative device id");
    }

    const bool has_copy_fields = e.copy_kind || e.copy_src || e.copy_dst || e.bytes;
    switch (e.kind) {
    case EventKind::Collective: {
        if (!e.collective || !e.algorithm || !e.count || !e.dtype) {
            violation(e, "collective event requires coll, algo, count and dtype");
        }
        if (e.peer || has_copy_fields) {
            violation(e, "collective event carries send/recv or copy fields");
        }
        if (is_rooted(*e.collective)) {
            if (!e.root) {
                violation(e, std::string(to_string(*e.collective)) + " requires a root");
            }
            if (*e.root < 0 || *e.root >= e.n_ranks) {
                violation(e, "root " + std::to_string(*e.root) + " outside communicator");
            }
        } else if (e.root) {
            violation(e, std::string(to_string(*e.collective)) + " does not take a root");
        }
        if (*e.collective != CollectiveKind::AllReduce &&
            (*e.algorithm == AlgorithmChoice::Tree || *e.algorithm == AlgorithmChoice::Collnet)) {
            violation(e, std::string(to_string(*e.collective)) + " supports only the ring algorithm");
        }
        break;
    }
    case EventKind::Send:
    case EventKind::Recv:
        if (!e.peer || !e.count || !e.dtype) {
            violation(e, "send/recv event requires peer, count and dtype");
        }
        if (e.collective || e.algorithm || e.root || has_copy_fields) {
            violation(e, "send/recv event carries collective or copy fields");
        }
        if (*e.peer < 0 || *e.peer >= e.n_ranks) {
            violation(e, "peer " + std::to_string(*e.peer) + " outside communicator");
        }
        if (*e.peer == e.rank) {
            violation(e, "peer equals own rank");
        }
        break;
    case EventKind::Memcpy:
    case EventKind::UnifiedMemory:
    case EventKind::ZeroCopy:
        if (!e.copy_kind || !e.copy_src || !e.copy_dst || !e.bytes) {
            violation(e, "copy event requires ckind, src, dst and bytes");
        }
        if (e.collective || e.algorithm || e.root || e.peer || e.count || e.dtype) {
            violation(e, "copy event carries collective or send/recv fields");
        }
        switch (*e.copy_kind) {
        case CopyKind::H2D:
            expect_endpoint(e, *e.copy_src, EndpointKind::Host, "src");
            expect_endpoint(e, *e.copy_dst, EndpointKind::Gpu, "dst");
            break;
        case CopyKind::D2H:
            expect_endpoint(e, *e.copy_src, EndpointKind::Gpu, "src");
            expect_endpoint(e, *e.copy_dst, EndpointKind::Host, "dst");
            break;
        case CopyKind::D2D:
            expect_endpoint(e, *e.copy_src, EndpointKind::Gpu, "src");
            expect_endpoint(e, *e.copy_dst, EndpointKind::Gpu, "dst");
            break;
        }
        break;
    }
}

std::vector<TraceEvent> parse_trace(std::istream& in) {
    std::vector<TraceEvent> events;
    std::map<std::pair<std::string, int>, std::uint64_t> last_seq;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& ex) {
            throw MalformedLine(line_no, ex.what());
        }
        TraceEvent e = event_from_json(obj, line_no);
        auto [it, inserted] = last_seq.try_emplace({e.comm_id, e.rank}, e.seq);
        if (!inserted) {
            if (e.seq <= it->second) {
                throw InvariantViolation("line " + std::to_string(line_no) + ": seq " +
                                         std::to_string(e.seq) + " does not increase for comm \"" +
                                         e.comm_id + "\" rank " + std::to_string(e.rank));
            }
            it->second = e.seq;
        }
        events.push_back(std::move(e));
    }
    if (in.bad()) {
        throw IoError("error while reading trace stream");
    }
    return events;
}

std::vector<TraceEvent> parse_trace(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_trace(in);
}

std::string to_json_line(const TraceEvent& e) {
    validate_event(e);
    ordered_json j;
    j["seq"] = e.seq;
    j["ts"] = e.timestamp_ns;
    j["kind"] = to_string(e.kind);
    j["comm"] = e.comm_id;
    j["nranks"] = e.n_ranks;
    j["rank"] = e.rank;
    j["dev"] = e.device;
    switch (e.kind) {
    case EventKind::Collective:
        j["coll"] = to_string(*e.collective);
        j["algo"] = to_string(*e.algorithm);
        j["count"] = *e.count;
        j["dtype"] = to_string(*e.dtype);
        if (e.root) {
            j["root"] = *e.root;
        }
        break;
    case EventKind::Send:
    case EventKind::Recv:
        j["peer"] = *e.peer;
        j["count"] = *e.count;
        j["dtype"] = to_string(*e.dtype);
        break;
    default:
        j["ckind"] = to_string(*e.copy_kind);
        j["src"] = endpoint_json(*e.copy_src);
        j["dst"] = endpoint_json(*e.copy_dst);
        j["bytes"] = *e.bytes;
        break;
    }
    return j.dump();
}

void write_trace(std::ostream& out, const std::vector<TraceEvent>& events) {
    for (const auto& e : events) {
        out << to_json_line(e) << '\n';
    }
}

std::string write_trace(const std::vector<TraceEvent>& events) {
    std::ostringstream out;
    write_trace(out, events);
    return out.str();
}

} // namespace comscribe
