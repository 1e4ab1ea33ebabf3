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

#include "comscribe/matrix.hpp"
#include "comscribe/stats.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace comscribe {

// ---- matrix serialization -----------------------------------------------------

// CSV: a header row "src\dst,host,gpu0,...[,net]" followed by one row per
// source endpoint, label first, cells as decimal byte counts.
std::string matrix_to_csv(const CommMatrix& m);
CommMatrix matrix_from_csv(std::string_view text);

struct MatrixMeta {
    std::string primitive = "combined";
    bool symmetrized = false;
    std::string trace_digest;                   // "sha256:<hex>" of the input trace bytes
    std::map<std::string, std::string> flags;   // analyzer settings, for provenance
};

std::string matrix_to_json(const CommMatrix& m, const MatrixMeta& meta = {});
CommMatrix matrix_from_json(std::string_view text);

// ---- statistics tables --------------------------------------------------------

std::string stats_to_csv(const StatsSummary& s);
std::string stats_to_json(const StatsSummary& s);
// Fixed-width table for terminals.
std::string stats_to_table(const StatsSummary& s);

std::string sha256_hex(std::string_view data);

// ---- heatmaps -----------------------------------------------------------------

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct ColorStop {
    double fraction = 0.0;
    Rgb color;
};

struct RenderSpec {
    enum class Scale { Log, Linear };
    Scale scale = Scale::Log;
    std::vector<ColorStop> stops;
    int cell_px = 32;
    int font_px = 11;
    bool show_values = false; // write byte counts into cells

    // Five stops, dark to bright.
    static RenderSpec defaults();
};

// Default gradient: 0.00 #0b0b1e, 0.25 #3b0f70, 0.50 #8c2981, 0.75 #de4968,
// 1.00 #fcfdbf.
inline constexpr std::array<std::uint32_t, 5> kDefaultStops = {0x0b0b1e, 0x3b0f70, 0x8c2981, 0xde4968, 0xfcfdbf};

// Throws InvalidConfig unless the fractions strictly increase from 0 to 1.
void validate(const RenderSpec& spec);

// Cell intensity in [0, 1]: log10(1 + v) / log10(1 + max) under Log,
// v / max under Linear; 0 when the matrix is all zero.
double intensity(Bytes value, Bytes max_value, RenderSpec::Scale scale);
Rgb color_at(const RenderSpec& spec, double t);

// Deterministic SVG document; axes labeled 0 (host), 1..d (GPUs) and "net".
std::string render_heatmap(const CommMatrix& m, const RenderSpec& spec, std::string_view title = {});

} // namespace comscribe
