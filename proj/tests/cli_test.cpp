// Copyright 2026 The perplab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "runner.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <perplab/version.hpp>

#include "perplab/json_io.hpp"

namespace perplab::cli {
namespace {

namespace fs = std::filesystem;

const char* kI1 =
    R"({"branches":[{"m":1.0,"p":0.5,"q":{"kind":"constant","value":1}},)"
    R"({"m":0.5,"p":0.5,"q":{"kind":"constant","value":1}}]})";
const char* kI2 = R"({"branches":[{"m":0.5,"p":1,"q":{"kind":"exponential","rate":1}}]})";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("perplab_cli_" + std::string(::testing::UnitTest::GetInstance()
                                             ->current_test_info()
                                             ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run_config(const std::string& text, const std::string& out = "out",
                 RunOptions options = {}) {
    const fs::path config = dir_ / (out + ".json");
    std::ofstream(config) << text;
    options.config = config;
    options.out = dir_ / out;
    std::ostringstream err;
    const int code = run(options, err);
    last_error_ = err.str();
    return code;
  }

  Json result(const std::string& out = "out") {
    std::ifstream in(dir_ / out / "result.json");
    return Json::parse(in);
  }

  std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
  std::string last_error_;
};

TEST_F(CliTest, ExponentsOnI1) {
  ASSERT_EQ(run_config(std::string(R"({"name":"i1","mode":"exponents","payload":{"instance":)") +
                       kI1 + "}}"),
            kOk);
  const Json r = result();
  EXPECT_EQ(r["status"], "ok");
  EXPECT_NEAR(r["results"]["exponents"]["v_c"].get<double>(), std::log(2.0), 1e-12);
  EXPECT_NEAR(r["results"]["exponents"]["v_0"].get<double>(), std::log(4.0 / 3.0), 1e-12);
  EXPECT_EQ(r["results"]["exponents"]["v_q"], "+inf");
  const Json& prov = r["provenance"];
  EXPECT_EQ(prov["library_version"], perplab::kVersion);
  EXPECT_EQ(prov["config_fnv1a"].get<std::string>().size(), 16u);
  EXPECT_EQ(prov["operations"], Json::array({"exponents"}));
  EXPECT_TRUE(prov["wall_time_seconds"].is_number());
}

TEST_F(CliTest, PropagateStraddlingCriticalExponent) {
  ASSERT_EQ(run_config(std::string(R"({"mode":"propagate","payload":{"instance":)") + kI1 +
                       R"(,"v_grid":[0.5,0.8],"horizon":3}})"),
            kOk);
  const Json rows = result()["results"]["propagation"];
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0]["classification"], "BoundedCertified");
  EXPECT_EQ(rows[1]["classification"], "DivergentCertified");
  EXPECT_EQ(rows[0]["series"].size(), 4u);
  EXPECT_DOUBLE_EQ(rows[0]["series"][1].get<double>(), std::exp(0.5));
  const std::string csv = slurp(dir_ / "out" / "propagate.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "v,n,laplace,classification");
  EXPECT_NE(csv.find("0.8,3,"), std::string::npos);
}

TEST_F(CliTest, BadTransitionRowExitsTwoWithRowIndex) {
  const int code = run_config(R"({"mode":"markov","payload":{"spec":{
      "states":["a","b"],"transition":[[0.5,0.5],[0.3,0.3]],"initial":[1,0],
      "per_state":{"a":{"branches":[{"m":0.1,"p":1,"q":{"kind":"constant","value":1}}]},
                   "b":{"branches":[{"m":0.1,"p":1,"q":{"kind":"constant","value":1}}]}}}}})");
  EXPECT_EQ(code, kSchemaError);
  EXPECT_NE(last_error_.find("row 1"), std::string::npos) << last_error_;
  const Json r = result();
  EXPECT_EQ(r["status"], "error");
  EXPECT_EQ(r["error"]["kind"], "InvalidInput");
}

TEST_F(CliTest, SchemaViolations) {
  EXPECT_EQ(run_config(R"({"mode":"exponents","payload":{}})", "a"), kSchemaError);
  EXPECT_EQ(run_config(R"({"mode":"teleport"})", "b"), kSchemaError);
  EXPECT_EQ(run_config("{not json", "c"), kSchemaError);
  EXPECT_EQ(run_config(std::string(R"({"mode":"exponents","payload":{"instance":)") + kI1 +
                           R"(,"typo":1}})",
                       "d"),
            kSchemaError);
  EXPECT_NE(last_error_.find("typo"), std::string::npos);
}

TEST_F(CliTest, RegimeErrorsSurfaceVerbatim) {
  const char* signed_q =
      R"({"branches":[{"m":0.5,"p":1,"q":{"kind":"constant","value":-1}}]})";
  EXPECT_EQ(run_config(std::string(R"({"mode":"certify","payload":{"instance":)") + signed_q +
                       R"(,"v_grid":[0.1]}})"),
            kRegimeError);
  EXPECT_EQ(result()["error"]["kind"], "RegimeError");
  EXPECT_EQ(result()["error"]["message"].get<std::string>() + "\n",
            last_error_.substr(std::string("error: ").size()));
}

TEST_F(CliTest, ResourceBudgetExitsFour) {
  EXPECT_EQ(run_config(std::string(R"({"mode":"propagate","payload":{"instance":)") + kI1 +
                       R"(,"v_grid":[0.1],"horizon":1000000}})"),
            kResourceError);
}

TEST_F(CliTest, SimulateIsReproducibleAcrossThreads) {
  const std::string config = std::string(R"({"mode":"simulate","payload":{"instance":)") +
                             kI2 +
                             R"(,"horizon":20,"trajectories":3000,"seed":11,)"
                             R"("checkpoints":[5,20],"laplace_v":[0.25],)"
                             R"("survival_grid":[0,1,2],"compare_exact":true}})";
  RunOptions one;
  one.threads = 1;
  RunOptions many;
  many.threads = 5;
  ASSERT_EQ(run_config(config, "t1", one), kOk);
  ASSERT_EQ(run_config(config, "t5", many), kOk);
  for (const char* csv : {"quantiles.csv", "laplace.csv", "survival.csv"}) {
    const std::string a = slurp(dir_ / "t1" / csv);
    EXPECT_FALSE(a.empty()) << csv;
    EXPECT_EQ(a, slurp(dir_ / "t5" / csv)) << csv;
  }
  EXPECT_EQ(result("t1")["results"], result("t5")["results"]);

  RunOptions reseeded;
  reseeded.seed = 12;
  ASSERT_EQ(run_config(config, "s12", reseeded), kOk);
  EXPECT_EQ(result("s12")["results"]["seed"], 12);
  EXPECT_EQ(result("s12")["provenance"]["seed_override"], 12);
  EXPECT_NE(slurp(dir_ / "t1" / "quantiles.csv"), slurp(dir_ / "s12" / "quantiles.csv"));
}

TEST_F(CliTest, MetricAndMarkovModes) {
  ASSERT_EQ(run_config(std::string(R"({"mode":"metric","payload":{"rho":0.1,)"
                                   R"("mu":{"kind":"constant","value":0},)"
                                   R"("nu":{"kind":"constant","value":1},"instance":)") +
                           kI1 + "}}",
                       "metric"),
            kOk);
  const Json m = result("metric")["results"];
  EXPECT_NEAR(m["contraction"]["factor"].get<double>(), 0.8288781885567357, 1e-14);
  EXPECT_TRUE(m["contraction"]["holds"].get<bool>());

  ASSERT_EQ(run_config(R"({"mode":"markov","payload":{"spec":{
      "states":["a","b"],"transition":[[0.2,0.8],[0.6,0.4]],"initial":[1,0],
      "per_state":{"a":{"branches":[{"m":0.3,"p":1,"q":{"kind":"exponential","rate":2}}]},
                   "b":{"branches":[{"m":0.6,"p":1,"q":{"kind":"exponential","rate":1}}]}}},
      "v_grid":[0.5,1.2],
      "simulation":{"horizon":50,"trajectories":500,"seed":1,"checkpoints":[0,50]}}})",
                       "markov"),
            kOk);
  const Json k = result("markov")["results"];
  EXPECT_EQ(k["v_bar"], 1.0);
  EXPECT_EQ(k["classification"][1]["witness"]["state"], "b");
  EXPECT_EQ(k["simulation"]["envelope_violations"], 0);
  EXPECT_TRUE(k["envelope"].contains("unavailable"));
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

}  // namespace
}  // namespace perplab::cli
