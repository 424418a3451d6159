// Copyright 2026 The riskscene Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "riskscene/campaign_runner.hpp"
#include "riskscene/lexer.hpp"
#include "riskscene/metrics.hpp"
#include "riskscene/scene_model.hpp"

namespace fs = std::filesystem;
using namespace riskscene;

namespace {

const fs::path kConfig = RISKSCENE_CONFIG_DIR;
const fs::path kData = RISKSCENE_TEST_DATA_DIR;

// Fresh per-test scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            ("riskscene_" + std::string(info->test_suite_name()) + "_" + info->name() + "_" +
             std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

CampaignSpec demo_spec(SamplerKind kind, std::size_t iterations, std::uint64_t seed = 0) {
  CampaignSpec spec = parse_campaign_spec(read_text_file(kConfig / "demo.campaign"));
  spec.sampler.kind = kind;
  spec.iterations = iterations;
  spec.seed = seed;
  return spec;
}

CampaignResult run_demo(SamplerKind kind, std::size_t iterations, std::uint64_t seed = 0) {
  const auto spec = demo_spec(kind, iterations, seed);
  return run_campaign(spec, load_resources(spec, kConfig), {true});
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RISKSCENE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

StoredResult fake_result(const std::string& dir, double trs, std::size_t scenes) {
  StoredResult s;
  s.dir = dir;
  s.spec = demo_spec(SamplerKind::kRandom, scenes);
  s.sampler = "random";
  s.schema = "riskscene.results/1:iteration,RS,P,T,C,TD,F1,F2,rs,is,s_risk,high_risk,elapsed_ms";
  s.records.resize(scenes);
  s.aggregates.trs = trs;
  if (scenes >= 3) {
    s.aggregates.clusters = 2;
    s.aggregates.silhouette = 0.5;
    s.aggregates.diversity = 0.1;
  }
  return s;
}

}  // namespace

TEST(RunCampaign, SingleIteration) {
  const auto result = run_demo(SamplerKind::kRandom, 1);
  ASSERT_EQ(result.records.size(), 1u);
  EXPECT_TRUE(result.aggregates.trs == 0.0 || result.aggregates.trs == 100.0);
  EXPECT_FALSE(result.aggregates.clusters);
  EXPECT_FALSE(result.aggregates.silhouette);
  EXPECT_FALSE(result.aggregates.diversity);
  EXPECT_EQ(result.records[0].iteration, 1u);
}

TEST(RunCampaign, RecordsAreConsistent) {
  const auto result = run_demo(SamplerKind::kRns, 60, 3);
  const auto space = result.spec.space();
  ASSERT_EQ(result.records.size(), 60u);
  EXPECT_EQ(result.delta, 0.65);
  std::vector<double> risks;
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& r = result.records[i];
    EXPECT_EQ(r.iteration, i + 1);
    EXPECT_TRUE(validate_scene(Scene{r.iteration, r.values}, space).ok());
    EXPECT_DOUBLE_EQ(r.s_risk, result.spec.w1 * r.rs + result.spec.w2 * r.is);
    EXPECT_EQ(r.high_risk, r.s_risk > result.delta);
    EXPECT_EQ(r.elapsed_ms, 0.0);
    risks.push_back(r.s_risk);
  }
  EXPECT_EQ(result.aggregates.trs, total_risk_scenes(risks, result.delta));
  EXPECT_EQ(result.metrics_seed, metrics_seed(3));
  EXPECT_EQ(result.aggregates,
            compute_aggregates(result.records, space, result.delta, result.metrics_seed));
}

TEST(RunCampaign, RepeatedRunsAreByteIdentical) {
  for (SamplerKind kind : {SamplerKind::kRandom, SamplerKind::kHalton, SamplerKind::kRns, SamplerKind::kGbo}) {
    const auto a = run_demo(kind, 30, 11);
    const auto b = run_demo(kind, 30, 11);
    const auto space = a.spec.space();
    EXPECT_EQ(format_records_csv(a.records, space), format_records_csv(b.records, space)) << to_string(kind);
    EXPECT_EQ(format_summary(a), format_summary(b)) << to_string(kind);
  }
}

TEST(RunCampaign, SeedsChangeTheRun) {
  const auto a = run_demo(SamplerKind::kRandom, 10, 1);
  const auto b = run_demo(SamplerKind::kRandom, 10, 2);
  EXPECT_NE(a.records, b.records);
}

TEST(RunCampaign, WallClockTimeIsRecorded) {
  const auto spec = demo_spec(SamplerKind::kRandom, 5);
  const auto result = run_campaign(spec, load_resources(spec, kConfig));
  double sum = 0.0;
  for (const auto& r : result.records) {
    EXPECT_GE(r.elapsed_ms, 0.0);
    sum += r.elapsed_ms;
  }
  EXPECT_DOUBLE_EQ(result.aggregates.total_time_ms, sum);
}

TEST(RecordsCsv, RoundTripsExactly) {
  const auto result = run_demo(SamplerKind::kGbo, 20, 5);
  const auto space = result.spec.space();
  const auto text = format_records_csv(result.records, space);
  EXPECT_EQ(parse_records_csv(text, space), result.records);
  EXPECT_EQ(text.substr(0, text.find('\n')), "iteration,RS,P,T,C,TD,F1,F2,rs,is,s_risk,high_risk,elapsed_ms");
}

TEST(RecordsCsv, SeventeenDigitValuesSurvive) {
  auto result = run_demo(SamplerKind::kRandom, 3);
  result.records[0].s_risk = 0.1 + 0.2;
  result.records[1].rs = 1.0 / 3.0;
  result.records[2].is = 2.0 / 3.0;
  const auto space = result.spec.space();
  EXPECT_EQ(parse_records_csv(format_records_csv(result.records, space), space), result.records);
}

TEST(RecordsCsv, RejectsMismatchedHeader) {
  const auto space = demo_spec(SamplerKind::kRandom, 1).space();
  EXPECT_THROW(parse_records_csv("iteration,X,rs,is,s_risk,high_risk,elapsed_ms\n", space), ParseError);
  EXPECT_THROW(parse_records_csv("", space), ParseError);
}

TEST(Results, WriteAndReadBack) {
  TempDir tmp;
  const auto result = run_demo(SamplerKind::kHalton, 3, 4);
  write_results(result, tmp.path(), true);
  EXPECT_EQ(count_lines(read_text_file(tmp.path() / "records.csv")), 4u);
  for (const char* name : {"scene_0001.txt", "scene_0002.txt", "scene_0003.txt"}) {
    EXPECT_TRUE(fs::exists(tmp.path() / "scenes" / name)) << name;
  }
  EXPECT_EQ(read_text_file(tmp.path() / "scenes" / "scene_0002.txt"),
            emit_scene_artifact(Scene{2, result.records[1].values}, result.spec));

  const auto stored = read_results(tmp.path());
  EXPECT_EQ(stored.spec, result.spec);
  EXPECT_EQ(stored.records, result.records);
  EXPECT_EQ(stored.sampler, "halton");
  EXPECT_EQ(stored.delta, result.delta);
  EXPECT_EQ(stored.metrics_seed, result.metrics_seed);
  EXPECT_EQ(stored.schema, "riskscene.results/1:iteration,RS,P,T,C,TD,F1,F2,rs,is,s_risk,high_risk,elapsed_ms");
  EXPECT_EQ(stored.aggregates, result.aggregates);
}

TEST(Results, SummaryTrsMatchesRecords) {
  TempDir tmp;
  const auto result = run_demo(SamplerKind::kRandom, 40, 8);
  write_results(result, tmp.path());
  EXPECT_FALSE(fs::exists(tmp.path() / "scenes"));
  const auto stored = read_results(tmp.path());
  std::vector<double> risks;
  for (const auto& r : stored.records) risks.push_back(r.s_risk);
  EXPECT_EQ(stored.aggregates.trs, total_risk_scenes(risks, stored.delta));
  EXPECT_EQ(compute_aggregates(stored.records, stored.spec.space(), stored.delta, stored.metrics_seed),
            stored.aggregates);
}

TEST(Results, MissingDirectoryIsRuntimeError) {
  EXPECT_THROW(read_results("/nonexistent/riskscene/results"), RuntimeError);
}

TEST(Compare, RanksByTrs) {
  const auto rows = compare_results({fake_result("a", 66, 250), fake_result("b", 92, 250)});
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& row : rows) {
    EXPECT_EQ(row.rank, row.label == "b" ? 1u : 2u) << row.label;
  }
  const auto j = nlohmann::json::parse(format_comparison_json(rows));
  ASSERT_EQ(j.at("ranking").size(), 2u);
  EXPECT_EQ(j["ranking"][0], "b");
  EXPECT_EQ(j["ranking"][1], "a");
  EXPECT_NE(format_comparison_table(rows).find("b"), std::string::npos);
}

TEST(Compare, IsReflexive) {
  const auto rows = compare_results({fake_result("x", 40, 10), fake_result("x", 40, 10)});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].aggregates, rows[1].aggregates);
  EXPECT_EQ(rows[0].scenes, rows[1].scenes);
}

TEST(Compare, MissingMetricsAreNotApplicable) {
  const auto rows = compare_results({fake_result("a", 50, 2), fake_result("b", 0, 250)});
  const auto text = format_comparison_json(rows);
  EXPECT_NE(text.find("\"n/a\""), std::string::npos);
}

TEST(Compare, Errors) {
  EXPECT_THROW(compare_results({fake_result("a", 1, 5)}), std::invalid_argument);
  auto other = fake_result("b", 1, 5);
  other.schema = "P,T";
  EXPECT_THROW(compare_results({fake_result("a", 1, 5), other}), std::invalid_argument);
}

TEST(Resources, NeedsDeltaOrCalibration) {
  auto spec = demo_spec(SamplerKind::kRandom, 5);
  spec.delta.reset();
  EXPECT_THROW(load_resources(spec, kConfig), std::invalid_argument);
}

TEST(Resources, MissingFilesAreRuntimeErrors) {
  auto spec = demo_spec(SamplerKind::kRandom, 5);
  spec.evaluator_path = "does_not_exist.landscape";
  EXPECT_THROW(load_resources(spec, kConfig), RuntimeError);
}

TEST(Resources, RoadSegmentRangeMustFitTheModel) {
  auto spec = demo_spec(SamplerKind::kRandom, 5);
  spec.variables[0].upper = 12;
  spec.variables[4].dependency.reset();
  EXPECT_THROW(load_resources(spec, kConfig), std::invalid_argument);
}

TEST(Calibration, ThresholdFromFile) {
  TempDir tmp;
  std::string text = "# calibration risks\n";
  for (int i = 1; i <= 100; ++i) text += format_number(i / 100.0) + "\n";
  write_text_file(tmp.path() / "calib.txt", text);
  EXPECT_EQ(read_calibration_file(tmp.path() / "calib.txt").size(), 100u);

  auto spec = demo_spec(SamplerKind::kRandom, 5);
  spec.delta.reset();
  spec.calibrate_path = "calib.txt";
  spec.evaluator_path = (kConfig / "two_bump.landscape").string();
  spec.model_path = (kConfig / "roadway_obstruction.bowtie").string();
  EXPECT_EQ(load_resources(spec, tmp.path()).delta, 0.95);
}

TEST(Calibration, Errors) {
  TempDir tmp;
  write_text_file(tmp.path() / "bad.txt", "0.1\nabc\n");
  try {
    read_calibration_file(tmp.path() / "bad.txt");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.pos().line, 2u);
  }
  write_text_file(tmp.path() / "short.txt", "0.1\n0.2\n");
  auto spec = demo_spec(SamplerKind::kRandom, 5);
  spec.delta.reset();
  spec.calibrate_path = (tmp.path() / "short.txt").string();
  EXPECT_THROW(load_resources(spec, kConfig), std::invalid_argument);
}

TEST(WarmStart, LoadsPreviousRecords) {
  TempDir tmp;
  const auto prior = run_demo(SamplerKind::kRandom, 25, 6);
  write_results(prior, tmp.path() / "prior");

  auto spec = demo_spec(SamplerKind::kGbo, 5, 6);
  spec.sampler.gbo.warm_start_path = (tmp.path() / "prior" / "records.csv").string();
  const auto res = load_resources(spec, kConfig);
  ASSERT_EQ(res.warm_start.size(), 25u);
  for (std::size_t i = 0; i < 25; ++i) {
    EXPECT_EQ(res.warm_start[i].scene.values, prior.records[i].values);
    EXPECT_EQ(res.warm_start[i].risk, prior.records[i].s_risk);
  }
  const auto result = run_campaign(spec, res, {true});
  ASSERT_EQ(result.records.size(), 5u);
  // Warm-started GBO skips random initialisation and moves from the last warm scene.
  const auto space = spec.space();
  EXPECT_TRUE(within_step_constraints(Scene{25, prior.records.back().values}, Scene{1, result.records[0].values}, space));
}

TEST(Sweep, CoversEverySampler) {
  TempDir tmp;
  const auto spec = demo_spec(SamplerKind::kGbo, 15, 20);
  const auto entries = run_sweep(spec, load_resources(spec, kConfig), 2, {true}, tmp.path());
  ASSERT_EQ(entries.size(), 5u);
  for (const auto& e : entries) {
    EXPECT_EQ(e.seeds, (std::vector<std::uint64_t>{20, 21}));
    ASSERT_EQ(e.runs.size(), 2u);
    EXPECT_DOUBLE_EQ(e.mean_trs(), (e.runs[0].trs + e.runs[1].trs) / 2);
    EXPECT_DOUBLE_EQ(e.stddev_trs(), std::abs(e.runs[0].trs - e.runs[1].trs) / 2);
    EXPECT_TRUE(fs::exists(tmp.path() / std::string(to_string(e.sampler)) / "seed_21" / "records.csv"));
  }
  const auto j = nlohmann::json::parse(format_sweep_json(entries));
  EXPECT_EQ(j.at("samplers").size(), 5u);
  EXPECT_THROW(run_sweep(spec, load_resources(spec, kConfig), 0), std::invalid_argument);
}

TEST(Cli, ExitCodes) {
  TempDir tmp;
  const std::string demo = (kConfig / "demo.campaign").string();
  const std::string out = (tmp.path() / "run").string();
  EXPECT_EQ(run_cli("validate --spec " + demo), 0);
  EXPECT_EQ(run_cli("validate --spec " + (kData / "malformed" / "range_inverted.campaign").string()), 1);
  EXPECT_EQ(run_cli("validate"), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("run --spec " + demo + " --out " + out + " --iterations 12 --sampler rns --deterministic-time"), 0);
  EXPECT_EQ(run_cli("run --spec " + demo + " --out " + out + " --sampler montecarlo"), 1);
  EXPECT_EQ(run_cli("metrics --results " + out), 0);
  EXPECT_EQ(run_cli("metrics --results " + (tmp.path() / "missing").string()), 2);

  const std::string other = (tmp.path() / "other").string();
  EXPECT_EQ(run_cli("run --spec " + demo + " --out " + other + " --iterations 12 --sampler random --deterministic-time"),
            0);
  const auto cmp = tmp.path() / "cmp.json";
  EXPECT_EQ(run_cli("compare --results " + out + "," + other + " --out " + cmp.string()), 0);
  EXPECT_EQ(nlohmann::json::parse(read_text_file(cmp)).at("ranking").size(), 2u);
  EXPECT_EQ(run_cli("compare --results " + out + " --out " + cmp.string()), 1);

  // A spec pointing at a missing landscape file fails at runtime.
  write_text_file(tmp.path() / "broken.campaign",
                  "campaign broken {\n  delta = 0.5;\n  evaluator = \"nowhere.landscape\";\n"
                  "  var P : environmental range [0, 100];\n  sampler random;\n}\n");
  EXPECT_EQ(run_cli("run --spec " + (tmp.path() / "broken.campaign").string() + " --out " + other), 2);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  TempDir tmp;
  const std::string demo = (kConfig / "demo.campaign").string();
  for (const char* dir : {"a", "b"}) {
    ASSERT_EQ(run_cli("run --spec " + demo + " --out " + (tmp.path() / dir).string() +
                      " --iterations 20 --seed 9 --deterministic-time --artifacts"),
              0);
  }
  for (const char* file : {"records.csv", "summary.json", "campaign.spec", "scenes/scene_0020.txt"}) {
    EXPECT_EQ(read_text_file(tmp.path() / "a" / file), read_text_file(tmp.path() / "b" / file)) << file;
  }
}

TEST(Cli, MetricsDetectsTamperedSummary) {
  TempDir tmp;
  const auto result = run_demo(SamplerKind::kRandom, 10, 2);
  write_results(result, tmp.path());
  auto j = nlohmann::json::parse(read_text_file(tmp.path() / "summary.json"));
  j["aggregates"]["trs"] = result.aggregates.trs + 10.0;
  write_text_file(tmp.path() / "summary.json", j.dump(2));
  EXPECT_EQ(run_cli("metrics --results " + tmp.path().string()), 1);
}
