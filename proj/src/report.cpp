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
#include "comscribe/report.hpp"

#include "comscribe/error.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <memory>
#include <sstream>

namespace comscribe {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    return s;
}

Bytes parse_bytes(std::string_view s) {
    Bytes v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw InvalidConfig("matrix cell \"" + std::string(s) + "\" is not a byte count");
    }
    return v;
}

// Recovers the shape from endpoint labels and checks they are canonical.
CommMatrix shape_from_labels(const std::vector<std::string>& labels) {
    if (labels.empty() || labels.front() != "host") {
        throw InvalidConfig("matrix labels must start with \"host\"");
    }
    const bool aggregator = labels.back() == "net";
    const int gpus = static_cast<int>(labels.size()) - 1 - (aggregator ? 1 : 0);
    CommMatrix m(gpus, aggregator);
    if (m.labels() != labels) {
        throw InvalidConfig("matrix labels are not host, gpu0..gpuN[, net]");
    }
    return m;
}

std::string hex_color(Rgb c) {
    std::ostringstream s;
    s << '#' << std::hex << std::setfill('0') << std::setw(2) << int(c.r) << std::setw(2) << int(c.g)
      << std::setw(2) << int(c.b);
    return s.str();
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string axis_label(const CommMatrix& m, std::size_t i) {
    if (m.has_aggregator() && i + 1 == m.dim()) return "net";
    return std::to_string(i);
}

} // namespace

std::string matrix_to_csv(const CommMatrix& m) {
    std::ostringstream out;
    const auto labels = m.labels();
    out << "src\\dst";
    for (const auto& l : labels) out << ',' << l;
    out << '\n';
    for (std::size_t r = 0; r < m.dim(); ++r) {
        out << labels[r];
        for (std::size_t c = 0; c < m.dim(); ++c) out << ',' << m.at(r, c);
        out << '\n';
    }
    return out.str();
}

CommMatrix matrix_from_csv(std::string_view text) {
    std::vector<std::string_view> lines;
    for (auto line : split(text, '\n')) {
        line = trim(line);
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw InvalidConfig("empty matrix CSV");
    auto header = split(lines.front(), ',');
    std::vector<std::string> labels(header.begin() + 1, header.end());
    CommMatrix m = shape_from_labels(labels);
    if (lines.size() != m.dim() + 1) throw InvalidConfig("matrix CSV row count does not match header");
    for (std::size_t r = 0; r < m.dim(); ++r) {
        auto fields = split(lines[r + 1], ',');
        if (fields.size() != m.dim() + 1 || fields.front() != labels[r]) {
            throw InvalidConfig("matrix CSV row " + std::to_string(r + 1) + " is malformed");
        }
        for (std::size_t c = 0; c < m.dim(); ++c) {
            m.add_cell(r, c, parse_bytes(trim(fields[c + 1])));
        }
    }
    return m;
}

std::string matrix_to_json(const CommMatrix& m, const MatrixMeta& meta) {
    nlohmann::ordered_json j;
    j["format"] = "comscribe-matrix";
    j["version"] = 1;
    j["primitive"] = meta.primitive;
    j["gpus"] = m.gpus();
    j["aggregator"] = m.has_aggregator();
    j["symmetrized"] = meta.symmetrized;
    j["labels"] = m.labels();
    auto cells = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < m.dim(); ++r) {
        auto row = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < m.dim(); ++c) row.push_back(m.at(r, c));
        cells.push_back(std::move(row));
    }
    j["cells"] = std::move(cells);
    nlohmann::ordered_json flags = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta.flags) flags[k] = v;
    j["flags"] = std::move(flags);
    j["trace_digest"] = meta.trace_digest;
    return j.dump(1) + "\n";
}

CommMatrix matrix_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        auto labels = j.at("labels").get<std::vector<std::string>>();
        CommMatrix m = shape_from_labels(labels);
        const auto& cells = j.at("cells");
        if (!cells.is_array() || cells.size() != m.dim()) throw InvalidConfig("matrix JSON has wrong row count");
        for (std::size_t r = 0; r < m.dim(); ++r) {
            if (!cells[r].is_array() || cells[r].size() != m.dim()) {
                throw InvalidConfig("matrix JSON row " + std::to_string(r) + " has wrong length");
            }
            for (std::size_t c = 0; c < m.dim(); ++c) m.add_cell(r, c, cells[r][c].get<Bytes>());
        }
        return m;
    } catch (const nlohmann::json::exception& ex) {
        throw InvalidConfig(std::string("matrix JSON: ") + ex.what());
    }
}

std::string stats_to_csv(const StatsSummary& s) {
    std::ostringstream out;
    out << "type,calls,payload_bytes,wire_bytes\n";
    for (CommType t : kAllCommTypes) {
        out << key_name(t) << ',' << s[t].calls << ',' << s[t].payload_bytes << ',' << s[t].wire_bytes << '\n';
    }
    return out.str();
}

std::string stats_to_json(const StatsSummary& s) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (CommType t : kAllCommTypes) {
        j[std::string(key_name(t))] = {{"calls", s[t].calls},
                                       {"payload_bytes", s[t].payload_bytes},
                                       {"wire_bytes", s[t].wire_bytes}};
    }
    return j.dump(1) + "\n";
}

std::string stats_to_table(const StatsSummary& s) {
    std::ostringstream out;
    out << std::left << std::setw(22) << "Communication Type" << std::right << std::setw(14) << "Calls"
        << std::setw(22) << "Payload (bytes)" << std::setw(22) << "Wire (bytes)" << '\n';
    for (CommType t : kAllCommTypes) {
        out << std::left << std::setw(22) << display_name(t) << std::right << std::setw(14) << s[t].calls
            << std::setw(22) << s[t].payload_bytes << std::setw(22) << s[t].wire_bytes << '\n';
    }
    return out.str();
}

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
        throw Error("sha256 computation failed");
    }
    std::ostringstream out;
    out << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << int(digest[i]);
    return out.str();
}

RenderSpec RenderSpec::defaults() {
    RenderSpec spec;
    for (std::size_t i = 0; i < kDefaultStops.size(); ++i) {
        const std::uint32_t c = kDefaultStops[i];
        spec.stops.push_back({static_cast<double>(i) / static_cast<double>(kDefaultStops.size() - 1),
                              Rgb{static_cast<std::uint8_t>(c >> 16), static_cast<std::uint8_t>(c >> 8),
                                  static_cast<std::uint8_t>(c)}});
    }
    return spec;
}

void validate(const RenderSpec& spec) {
    if (spec.stops.size() < 2) throw InvalidConfig("a colormap needs at least two stops");
    if (spec.stops.front().fraction != 0.0 || spec.stops.back().fraction != 1.0) {
        throw InvalidConfig("colormap stops must run from 0 to 1");
    }
    for (std::size_t i = 1; i < spec.stops.size(); ++i) {
        if (!(spec.stops[i].fraction > spec.stops[i - 1].fraction)) {
            throw InvalidConfig("colormap fractions must strictly increase");
        }
    }
    if (spec.cell_px < 1 || spec.font_px < 1) throw InvalidConfig("cell and font sizes must be positive");
}

double intensity(Bytes value, Bytes max_value, RenderSpec::Scale scale) {
    if (max_value == 0 || value == 0) return 0.0;
    double t = scale == RenderSpec::Scale::Log
                   ? std::log10(1.0 + static_cast<double>(value)) / std::log10(1.0 + static_cast<double>(max_value))
                   : static_cast<double>(value) / static_cast<double>(max_value);
    return std::clamp(t, 0.0, 1.0);
}

Rgb color_at(const RenderSpec& spec, double t) {
    t = std::clamp(t, 0.0, 1.0);
    std::size_t hi = 1;
    while (hi + 1 < spec.stops.size() && spec.stops[hi].fraction < t) ++hi;
    const ColorStop& a = spec.stops[hi - 1];
    const ColorStop& b = spec.stops[hi];
    const double u = std::clamp((t - a.fraction) / (b.fraction - a.fraction), 0.0, 1.0);
    auto mix = [u](std::uint8_t x, std::uint8_t y) {
        return static_cast<std::uint8_t>(std::lround(x + (static_cast<double>(y) - x) * u));
    };
    return {mix(a.color.r, b.color.r), mix(a.color.g, b.color.g), mix(a.color.b, b.color.b)};
}

std::string render_heatmap(const CommMatrix& m, const RenderSpec& spec, std::string_view title) {
    validate(spec);
    const int cell = spec.cell_px;
    const int margin = std::max(3 * spec.font_px, 24);
    const int top = margin + (title.empty() ? 0 : 2 * spec.font_px);
    const int n = static_cast<int>(m.dim());
    const int width = margin + n * cell + 8;
    const int height = top + n * cell + 8;

    Bytes max_value = 0;
    for (std::size_t r = 0; r < m.dim(); ++r)
        for (std::size_t c = 0; c < m.dim(); ++c) max_value = std::max(max_value, m.at(r, c));

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"monospace\" font-size=\""
        << spec.font_px << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
    if (!title.empty()) {
        svg << "<text x=\"" << margin << "\" y=\"" << spec.font_px + 4 << "\">" << xml_escape(title) << "</text>\n";
    }
    for (int i = 0; i < n; ++i) {
        const std::string label = axis_label(m, static_cast<std::size_t>(i));
        svg << "<text x=\"" << margin + i * cell + cell / 2 << "\" y=\"" << top - 6
            << "\" text-anchor=\"middle\">" << label << "</text>\n";
        svg << "<text x=\"" << margin - 6 << "\" y=\"" << top + i * cell + cell / 2 + spec.font_px / 3
            << "\" text-anchor=\"end\">" << label << "</text>\n";
    }
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const Bytes v = m.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            const Rgb color = color_at(spec, intensity(v, max_value, spec.scale));
            svg << "<rect x=\"" << margin + c * cell << "\" y=\"" << top + r * cell << "\" width=\"" << cell
                << "\" height=\"" << cell << "\" fill=\"" << hex_color(color) << "\"><title>"
                << axis_label(m, static_cast<std::size_t>(r)) << "->" << axis_label(m, static_cast<std::size_t>(c))
                << ": " << v << " bytes</title></rect>\n";
            if (spec.show_values && v != 0) {
                svg << "<text x=\"" << margin + c * cell + cell / 2 << "\" y=\"" << top + r * cell + cell / 2
                    << "\" text-anchor=\"middle\" fill=\"#808080\">" << v << "</text>\n";
            }
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace comscribe
