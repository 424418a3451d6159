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

// End-to-end campaigns: sampler loop, risk scoring, aggregates and the
// on-disk result format (records.csv, summary.json, campaign.spec).

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "riskscene/bowtie.hpp"
#include "riskscene/campaign_spec.hpp"
#include "riskscene/landscape.hpp"
#include "riskscene/samplers.hpp"

namespace riskscene {

/// Failure while running a campaign (I/O, evaluator, GP); maps to exit code 2.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IterationRecord {
  std::size_t iteration = 0;
  std::vector<double> values;
  double rs = 0.0;
  double is = 0.0;
  double s_risk = 0.0;
  bool high_risk = false;
  double elapsed_ms = 0.0;

  bool operator==(const IterationRecord&) const = default;
};

struct Aggregates {
  double trs = 0.0;
  // Cluster metrics need at least 3 scenes.
  std::optional<std::size_t> clusters;
  std::optional<double> silhouette;
  std::optional<double> diversity;
  double total_time_ms = 0.0;

  bool operator==(const Aggregates&) const = default;
};

struct CampaignResult {
  CampaignSpec spec;
  double delta = 0.0;
  std::uint64_t metrics_seed = 0;
  std::vector<IterationRecord> records;
  Aggregates aggregates;
};

/// Everything a campaign needs besides the spec itself.
struct CampaignResources {
  BowTieModel model;
  std::shared_ptr<const Evaluator> evaluator;
  double delta = 0.0;
  std::vector<Feedback> warm_start;
};

/// One calibration risk per line; blank lines and `#` comments are ignored.
/// Throws RuntimeError on I/O failure and ParseError on a bad line.
std::vector<double> read_calibration_file(const std::filesystem::path& path);

/// Loads the model, landscape, threshold and warm start named by the spec;
/// relative paths resolve against `base_dir`. Missing model/evaluator paths
/// fall back to the bundled defaults. Throws ParseError for malformed files,
/// std::invalid_argument for inconsistent ones and RuntimeError for I/O.
CampaignResources load_resources(const CampaignSpec& spec, const std::filesystem::path& base_dir);

struct RunOptions {
  bool deterministic_time = false;  // record 0 ms elapsed everywhere
};

/// Seed of the clustering restarts for a campaign seed.
std::uint64_t metrics_seed(std::uint64_t campaign_seed);

Aggregates compute_aggregates(const std::vector<IterationRecord>& records, const SceneSpace& space, double delta,
                              std::uint64_t metrics_seed);

/// Runs the sampler loop for spec.iterations scenes (fewer if the grid is
/// exhausted). Evaluator and scoring failures are rethrown as RuntimeError
/// naming the iteration.
CampaignResult run_campaign(const CampaignSpec& spec, const CampaignResources& resources, RunOptions options = {});

std::string format_records_csv(const std::vector<IterationRecord>& records, const SceneSpace& space);
/// Throws ParseError on a malformed file or a header that does not match.
std::vector<IterationRecord> parse_records_csv(std::string_view text, const SceneSpace& space);

/// summary.json content.
std::string format_summary(const CampaignResult& result);

/// Writes records.csv, summary.json and campaign.spec into `dir` (created if
/// needed); with `artifacts`, also scenes/scene_NNNN.txt. Throws RuntimeError
/// naming the path on failure.
void write_results(const CampaignResult& result, const std::filesystem::path& dir, bool artifacts = false);

/// Contents of a results directory, as needed by metrics and compare.
struct StoredResult {
  std::filesystem::path dir;
  CampaignSpec spec;
  std::vector<IterationRecord> records;
  std::string sampler;
  double delta = 0.0;
  std::uint64_t metrics_seed = 0;
  std::string schema;
  Aggregates aggregates;  // as stored in summary.json
};

StoredResult read_results(const std::filesystem::path& dir);

/// Warm-start points from a records.csv file over `space`.
std::vector<Feedback> read_warm_start(const std::filesystem::path& path, const SceneSpace& space);

struct ComparisonRow {
  std::string label;
  std::string sampler;
  std::size_t scenes = 0;
  Aggregates aggregates;
  std::size_t rank = 0;  // 1 = highest TRS
};

/// Rows in input order with ranks by TRS (descending, ties by input order).
/// Throws std::invalid_argument for fewer than two results or when their
/// schemas differ.
std::vector<ComparisonRow> compare_results(const std::vector<StoredResult>& results);

std::string format_comparison_json(const std::vector<ComparisonRow>& rows);
std::string format_comparison_table(const std::vector<ComparisonRow>& rows);

struct SweepEntry {
  SamplerKind sampler = SamplerKind::kRandom;
  std::vector<std::uint64_t> seeds;
  std::vector<Aggregates> runs;

  double mean_trs() const;
  double stddev_trs() const;  // population
  /// Mean over the runs that have a diversity value (0 when none has).
  double mean_diversity() const;
};

/// Runs every sampler kind for seeds spec.seed, spec.seed + 1, ... with the
/// spec's sampler parameters (defaults for kinds the spec does not select,
/// since only the active sampler's parameters are stored). When `out_dir` is set,
/// each run is written to out_dir/<sampler>/seed_<seed>.
std::vector<SweepEntry> run_sweep(const CampaignSpec& spec, const CampaignResources& resources, std::size_t seeds,
                                  RunOptions options = {},
                                  const std::optional<std::filesystem::path>& out_dir = std::nullopt);

std::string format_sweep_json(const std::vector<SweepEntry>& entries);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace riskscene
