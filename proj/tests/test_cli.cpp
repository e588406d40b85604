// Copyright 2026 The bfuf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bfuf/cli.hpp"

namespace bfuf {
namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

TEST(ParseGrid, ListsAndRanges) {
    EXPECT_EQ(parse_grid("0.1,0.2"), (std::vector<double>{0.1, 0.2}));
    auto r = parse_grid("0.08:0.12:0.005");
    ASSERT_EQ(r.size(), 9u);
    EXPECT_EQ(r[3], 0.095);
    EXPECT_EQ(r.back(), 0.12);
    EXPECT_EQ(parse_grid("0"), (std::vector<double>{0.0}));
    EXPECT_THROW(parse_grid("a"), ConfigError);
    EXPECT_THROW(parse_grid("0.1:0.2"), ConfigError);
    EXPECT_THROW(parse_grid("0.2:0.1:0.01"), ConfigError);
    EXPECT_THROW(parse_grid(""), ConfigError);
}

TEST(Cli, NoiselessPoint) {
    CliRun r = run({"point", "--code", "toric2d", "--L", "8", "--alg", "improved", "--p", "0", "--eps", "0", "--shots",
                 "100", "--seed", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto l = lines(r.out);
    ASSERT_EQ(l.size(), 2u);
    EXPECT_EQ(l[0], csv_header());
    EXPECT_EQ(l[1], "toric2d,128,2,8,8,improved,0,0,100,0,0,0,,,0,0");
}

TEST(Cli, ReproducibleOutput) {
    std::vector<std::string> args{"grid", "--code", "toric3d", "--L", "4", "--p", "0.02,0.04",
                                  "--eps", "0,0.1", "--shots", "500", "--threads", "2"};
    CliRun a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    args.back() = "1";
    EXPECT_EQ(run(args).out, a.out);
    EXPECT_EQ(lines(a.out).size(), 5u);
}

TEST(Cli, SweepOfSimpleAlgorithmHasNoClearThreshold) {
    CliRun r = run({"sweep", "--code", "toric2d", "--alg", "simple", "--L", "8,16", "--p", "0.08:0.12:0.01",
                 "--shots", "2000"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("# eps=0: no clear threshold"), std::string::npos) << r.out;
}

TEST(Cli, SweepOfBicycleCodeReportsPseudoThreshold) {
    CliRun r = run({"sweep", "--code", "bicycle:bb72", "--p", "0.005,0.01,0.04,0.06", "--shots", "1000"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("# bb72/worst: pseudo-threshold 0.0"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("bb72/worst,72,12,6,,qldpc,"), std::string::npos);
}

TEST(Cli, BicycleAndCssFiles) {
    std::string data = BFUF_DATA_DIR;
    CliRun a = run({"point", "--code", "bicycle:" + data + "/bicycle/bb90.txt", "--sector", "z", "--p", "0.01",
                 "--shots", "200"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_NE(a.out.find("bb90/z,90,8,10,,qldpc,0.01,0,200,"), std::string::npos) << a.out;
    CliRun b = run({"point", "--code", "css:" + data + "/codes/toric2d_L2.txt", "--alg", "improved", "--p", "0.05",
                 "--shots", "200"});
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_NE(b.out.find("toric2d_L2.txt/worst,8,2,,,improved,"), std::string::npos) << b.out;
}

TEST(Cli, JsonOutput) {
    CliRun r = run({"sweep", "--code", "toric2d", "--L", "4,6", "--p", "0.05,0.1,0.15", "--shots", "200", "--format",
                 "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto doc = nlohmann::json::parse(r.out);
    ASSERT_EQ(doc["points"].size(), 6u);
    EXPECT_EQ(doc["points"][0]["code"], "toric2d");
    EXPECT_EQ(doc["points"][0]["L"], 4);
    EXPECT_TRUE(doc["points"][0]["mean_ns"].is_null());
    EXPECT_EQ(doc["annotations"].size(), 1u);
}

TEST(Cli, BenchTimeAnnotatesSlope) {
    CliRun r = run({"bench-time", "--code", "toric2d", "--L", "8,16,32", "--p", "0.01", "--shots", "200"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("# p=0.01: log-log slope of mean decode time vs n = "), std::string::npos) << r.out;
    auto l = lines(r.out);
    ASSERT_GE(l.size(), 4u);
    EXPECT_EQ(l[1].find(",,"), std::string::npos);  // timing columns filled in
}

TEST(Cli, OutputFile) {
    auto path = std::filesystem::temp_directory_path() / "bfuf_cli_test.csv";
    CliRun r = run({"point", "--code", "toric2d", "--L", "4", "--p", "0.05", "--shots", "100", "--out", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, csv_header());
    std::filesystem::remove(path);
}

TEST(Cli, ConfigurationErrors) {
    EXPECT_EQ(run({"point", "--code", "toric2d", "--L", "8", "--bogus"}).code, 1);
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"point", "--code", "hexagonal", "--p", "0.1"}).code, 1);
    EXPECT_EQ(run({"point", "--code", "toric2d", "--p", "0.1"}).code, 1);                // missing --L
    EXPECT_EQ(run({"point", "--code", "bicycle:bb72", "--L", "4", "--p", "0.1"}).code, 1);  // --L on bicycle
    EXPECT_EQ(run({"point", "--code", "bicycle:bb72", "--alg", "improved"}).code, 1);
    EXPECT_EQ(run({"point", "--code", "bicycle:nope"}).code, 1);
    EXPECT_EQ(run({"point", "--code", "toric2d", "--L", "1"}).code, 1);
    EXPECT_EQ(run({"point", "--code", "toric2d", "--L", "4", "--p", "1.5"}).code, 1);
    EXPECT_EQ(run({"point", "--code", "toric2d", "--L", "4", "--p", "0.1,0.2"}).code, 1);
    EXPECT_EQ(run({"point", "--code", "toric2d", "--L", "4", "--alg", "mwpm"}).code, 1);
    EXPECT_EQ(run({"point", "--code", "css:/nonexistent"}).code, 1);
    CliRun r = run({"point", "--code", "toric2d", "--L", "8", "--bogus"});
    EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, NonConvergenceAboveTolerance) {
    // Physical shots always converge (the whole graph is a valid cluster), so
    // the exit-code rule is exercised on synthetic rows.
    std::vector<PointResult> rows(2);
    rows[0].shots = rows[1].shots = 100;
    rows[1].nonconverged = 3;
    std::ostringstream err;
    EXPECT_EQ(nonconvergence_status(rows, 0.0, err), 2);
    EXPECT_NE(err.str().find("3 of 200 decodes did not converge"), std::string::npos);
    EXPECT_EQ(nonconvergence_status(rows, 0.015, err), 0);
    EXPECT_EQ(nonconvergence_status(rows, 0.01, err), 2);
    // Far above threshold the decoder still converges and the tool exits 0.
    CliRun r = run({"point", "--code", "bicycle:bb72", "--p", "0.5", "--shots", "50"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find(",50,50,1,0,,,"), std::string::npos) << r.out;
}

TEST(Cli, Selftest) {
    CliRun r = run({"selftest", "--scale", "0.02"});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}

TEST(Cli, Help) {
    CliRun r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("bench-time"), std::string::npos);
}

}  // namespace
}  // namespace bfuf
