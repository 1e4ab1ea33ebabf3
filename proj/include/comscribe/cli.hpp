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

// Subcommands of the `comscribe` tool, callable in-process.

#include "comscribe/decomposition.hpp"
#include "comscribe/report.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace comscribe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitValidation = 2;

// Output directory used when none is given: $COMSCRIBE_OUT, else
// "comscribe_out".
std::string default_output_dir();

// Parses "--ring-perm" values: "0,2,1,3" applies to every communicator of
// that size, "COMM=0,2,1,3" to one communicator. Throws InvalidConfig.
void add_ring_perm(RingConfig& rings, const std::string& spec);

struct AnalyzeCommand {
    std::vector<std::string> traces; // one file per process is fine
    std::string out_dir;
    bool split = false;
    bool symmetrize = false;
    std::vector<std::string> ring_perms;
    Bytes tree_threshold = kDefaultTreeThreshold;
    std::string format = "both"; // csv | json | both
    std::optional<int> gpus;
    unsigned threads = 1;
    bool heatmaps = true;
    RenderSpec::Scale scale = RenderSpec::Scale::Log;
};

// Writes matrix.{csv,json}, matrix_<Type>.{csv,json} with --split,
// stats.{csv,json}, diagnostics.txt and heatmap*.svg into out_dir. Nothing
// is written when the trace fails validation.
int run_analyze(const AnalyzeCommand& cmd, std::ostream& out, std::ostream& err);

struct GenCommand {
    std::string preset;                 // resnet-like | gnmt-like, or empty with config
    std::optional<std::string> config;  // JSON workload plan
    std::optional<int> gpus;
    std::optional<Bytes> bucket_bytes;
    std::optional<std::uint64_t> iterations;
    std::optional<std::uint64_t> epochs;
    std::optional<std::string> algorithm;
    double scale = 1e-3;                // gnmt-like only
    std::uint64_t seed = 0;
    std::string out;                    // "-" for stdout
};

int run_gen(const GenCommand& cmd, std::ostream& out, std::ostream& err);

struct VerifyCommand {
    std::string collective;
    std::string algorithm;
    int ranks = 1;
    Bytes bytes = 0; // payload S
    std::optional<int> root;
    std::optional<std::string> ring_perm;
};

// Model vs oracle per-rank totals plus the closed form where it applies.
// Exit 0 iff everything matches.
int run_verify(const VerifyCommand& cmd, std::ostream& out, std::ostream& err);

struct RenderCommand {
    std::string input; // matrix .csv or .json
    std::string out;
    RenderSpec::Scale scale = RenderSpec::Scale::Log;
    int cell_px = 32;
    bool show_values = false;
    std::string title;
};

int run_render(const RenderCommand& cmd, std::ostream& out, std::ostream& err);

} // namespace comscribe::cli
