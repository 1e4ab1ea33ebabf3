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
#include "comscribe/error.hpp"
#include "comscribe/report.hpp"

#include "gen.hpp"

#include <doctest.h>

#include <regex>

using namespace comscribe;

namespace {

std::vector<std::string> cell_fills(const std::string& svg) {
    static const std::regex rect(R"re(<rect x="\d+" y="\d+" width="\d+" height="\d+" fill="(#[0-9a-f]{6})")re");
    std::vector<std::string> out;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), rect); it != std::sregex_iterator(); ++it) {
        out.push_back((*it)[1]);
    }
    return out;
}

} // namespace

TEST_CASE("matrix CSV") {
    CommMatrix m(2);
    m.add(Endpoint::host(), Endpoint::gpu(1), 5);
    m.add(Endpoint::gpu(0), Endpoint::gpu(1), 70);
    const auto csv = matrix_to_csv(m);
    CHECK(csv == "src\\dst,host,gpu0,gpu1\nhost,0,0,5\ngpu0,0,0,70\ngpu1,0,0,0\n");
    CHECK(matrix_from_csv(csv) == m);
    CHECK_THROWS_AS(matrix_from_csv("src\\dst,gpu0\ngpu0,0\n"), InvalidConfig);
    CHECK_THROWS_AS(matrix_from_csv("src\\dst,host,gpu0\nhost,0,x\ngpu0,0,0\n"), InvalidConfig);
    CHECK_THROWS_AS(matrix_from_csv("src\\dst,host,gpu0\nhost,0,1\n"), InvalidConfig);
}

TEST_CASE("property: CSV and JSON round-trip") {
    testing::Gen g(17);
    for (int i = 0; i < 100; ++i) {
        CommMatrix m(g.integer(0, 9), g.coin());
        for (std::size_t r = 0; r < m.dim(); ++r)
            for (std::size_t c = 0; c < m.dim(); ++c)
                if (r != c) m.add_cell(r, c, g.u64(0, ~Bytes{0}));
        CHECK(matrix_from_csv(matrix_to_csv(m)) == m);
        MatrixMeta meta;
        meta.trace_digest = "sha256:00";
        meta.flags["split"] = "true";
        CHECK(matrix_from_json(matrix_to_json(m, meta)) == m);
    }
}

TEST_CASE("matrix JSON carries metadata") {
    MatrixMeta meta;
    meta.primitive = "AllReduce";
    meta.symmetrized = true;
    meta.trace_digest = "sha256:abc";
    const auto j = matrix_to_json(CommMatrix(1), meta);
    CHECK(j.find(R"("primitive": "AllReduce")") != std::string::npos);
    CHECK(j.find(R"("symmetrized": true)") != std::string::npos);
    CHECK(j.find(R"("trace_digest": "sha256:abc")") != std::string::npos);
    CHECK_THROWS_AS(matrix_from_json("not json"), InvalidConfig);
}

TEST_CASE("stats output") {
    StatsSummary s;
    s[CommType::Broadcast] = {5, 612'000'000, 4'284'000'000};
    const auto csv = stats_to_csv(s);
    CHECK(csv.find("type,calls,payload_bytes,wire_bytes\n") == 0);
    CHECK(csv.find("Broadcast,5,612000000,4284000000\n") != std::string::npos);
    CHECK(stats_to_json(s).find(R"("calls": 5)") != std::string::npos);
    CHECK(stats_to_table(s).find("Zero Copy Memory") != std::string::npos);
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("colour scale") {
    const auto spec = RenderSpec::defaults();
    CHECK_NOTHROW(validate(spec));
    CHECK(color_at(spec, 0.0) == Rgb{0x0b, 0x0b, 0x1e});
    CHECK(color_at(spec, 1.0) == Rgb{0xfc, 0xfd, 0xbf});
    CHECK(color_at(spec, 0.5) == Rgb{0x8c, 0x29, 0x81});
    CHECK(intensity(0, 100, RenderSpec::Scale::Log) == 0.0);
    CHECK(intensity(100, 100, RenderSpec::Scale::Log) == 1.0);
    CHECK(intensity(9, 99, RenderSpec::Scale::Log) == doctest::Approx(0.5));
    CHECK(intensity(25, 100, RenderSpec::Scale::Linear) == doctest::Approx(0.25));
    CHECK(intensity(5, 0, RenderSpec::Scale::Linear) == 0.0);

    RenderSpec bad = spec;
    bad.stops[1].fraction = 0.9;
    CHECK_THROWS_AS(validate(bad), InvalidConfig);
    bad = spec;
    bad.stops.resize(1);
    CHECK_THROWS_AS(validate(bad), InvalidConfig);
}

TEST_CASE("heatmaps") {
    const auto spec = RenderSpec::defaults();
    SUBCASE("zero matrix is uniform") {
        const auto fills = cell_fills(render_heatmap(CommMatrix(3), spec));
        CHECK(fills.size() == 16);
        for (const auto& f : fills) CHECK(f == "#0b0b1e");
    }
    SUBCASE("single cell at full intensity") {
        CommMatrix m(2);
        m.add(Endpoint::gpu(0), Endpoint::gpu(1), 1'000'000);
        const auto fills = cell_fills(render_heatmap(m, spec));
        REQUIRE(fills.size() == 9);
        CHECK(fills[1 * 3 + 2] == "#fcfdbf");
        CHECK(std::count(fills.begin(), fills.end(), "#0b0b1e") == 8);
    }
    SUBCASE("ring of four") {
        CommMatrix m(4);
        for (int g = 0; g < 4; ++g) m.add(Endpoint::gpu(g), Endpoint::gpu((g + 1) % 4), 6144);
        const auto svg = render_heatmap(m, spec, "ring <4>");
        const auto fills = cell_fills(svg);
        CHECK(std::count(fills.begin(), fills.end(), "#0b0b1e") == 25 - 4);
        CHECK(svg.find("ring &lt;4&gt;") != std::string::npos);
        CHECK(svg == render_heatmap(m, spec, "ring <4>"));
    }
    SUBCASE("aggregator axis") {
        CommMatrix m(1, true);
        m.add(Endpoint::gpu(0), Endpoint::aggregator(), 3);
        const auto svg = render_heatmap(m, spec);
        CHECK(svg.find(">net</text>") != std::string::npos);
        CHECK(cell_fills(svg).size() == 9);
    }
}
