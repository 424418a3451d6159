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

// riskscene: validate, run, re-check and compare scene-sampling campaigns.
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "riskscene/campaign_runner.hpp"
#include "riskscene/lexer.hpp"

namespace fs = std::filesystem;
using namespace riskscene;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

struct Loaded {
  CampaignSpec spec;
  fs::path base_dir;
};

Loaded load_spec(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return {parse_campaign_spec(text), fs::path(path).parent_path()};
  } catch (const ParseError& e) {
    throw std::invalid_argument(path + ":" + e.what());
  }
}

// Runs `body`, mapping exceptions onto exit codes with a one-line message.
template <typename Body>
int guarded(Body&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}

std::string describe_aggregates(const Aggregates& a) {
  std::ostringstream out;
  out << "trs=" << format_number(a.trs);
  out << " clusters=" << (a.clusters ? std::to_string(*a.clusters) : "n/a");
  out << " silhouette=" << (a.silhouette ? format_number(*a.silhouette) : "n/a");
  out << " diversity=" << (a.diversity ? format_number(*a.diversity) : "n/a");
  out << " total_time_ms=" << format_number(a.total_time_ms);
  return out.str();
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::size_t start = 0;
    for (;;) {
      const auto pos = item.find(',', start);
      const std::string part = item.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
      if (!part.empty()) out.push_back(part);
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-guided scene sampling campaigns"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> sampler;
  std::optional<std::size_t> iterations;
  bool deterministic_time = false;
  bool artifacts = false;
  std::vector<std::string> results;
  std::string out_file;
  std::size_t seeds = 10;

  auto* validate = app.add_subcommand("validate", "Parse and check a campaign spec");
  validate->add_option("--spec", spec_path, "Campaign spec file")->required();

  auto* run = app.add_subcommand("run", "Run one campaign");
  run->add_option("--spec", spec_path, "Campaign spec file")->required();
  run->add_option("--out", out_dir, "Results directory")->required();
  run->add_option("--seed", seed, "Override the campaign seed");
  run->add_option("--sampler", sampler, "Override the sampler (random, grid, halton, rns, gbo)");
  run->add_option("--iterations", iterations, "Override the iteration budget");
  run->add_flag("--deterministic-time", deterministic_time, "Record 0 ms elapsed time");
  run->add_flag("--artifacts", artifacts, "Also write one scene file per iteration");

  auto* metrics = app.add_subcommand("metrics", "Recompute aggregates from records.csv");
  metrics->add_option("--results", out_dir, "Results directory")->required();

  auto* compare = app.add_subcommand("compare", "Compare result directories");
  compare->add_option("--results", results, "Result directories (comma separated)")->required();
  compare->add_option("--out", out_file, "Comparison JSON file")->required();

  auto* sweep = app.add_subcommand("sweep", "Run every sampler over several seeds");
  sweep->add_option("--spec", spec_path, "Campaign spec file")->required();
  sweep->add_option("--seeds", seeds, "Number of seeds")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_flag("--deterministic-time", deterministic_time, "Record 0 ms elapsed time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  if (validate->parsed()) {
    return guarded([&] {
      const auto loaded = load_spec(spec_path);
      load_resources(loaded.spec, loaded.base_dir);
      std::cout << spec_path << ": ok (" << loaded.spec.variables.size() << " variables, sampler "
                << to_string(loaded.spec.sampler.kind) << ")\n";
      return kOk;
    });
  }

  if (run->parsed()) {
    return guarded([&] {
      auto loaded = load_spec(spec_path);
      auto& spec = loaded.spec;
      if (seed) spec.seed = *seed;
      if (iterations) spec.iterations = *iterations;
      if (sampler) {
        const auto kind = parse_sampler_kind(*sampler);
        if (!kind) throw std::invalid_argument("unknown sampler '" + *sampler + "'");
        spec.sampler.kind = *kind;
      }
      validate_campaign_spec(spec);
      const auto resources = load_resources(spec, loaded.base_dir);
      const auto result = run_campaign(spec, resources, {deterministic_time});
      write_results(result, out_dir, artifacts);
      std::cout << spec.name << " [" << to_string(spec.sampler.kind) << ", seed " << spec.seed << "] "
                << result.records.size() << " scenes: " << describe_aggregates(result.aggregates) << "\n";
      return kOk;
    });
  }

  if (metrics->parsed()) {
    return guarded([&] {
      const auto stored = read_results(out_dir);
      const auto fresh = compute_aggregates(stored.records, stored.spec.space(), stored.delta, stored.metrics_seed);
      std::cout << describe_aggregates(fresh) << "\n";
      if (!(fresh == stored.aggregates)) {
        std::cerr << "error: summary.json does not match the recomputed aggregates ("
                  << describe_aggregates(stored.aggregates) << ")\n";
        return kValidation;
      }
      return kOk;
    });
  }

  if (compare->parsed()) {
    return guarded([&] {
      std::vector<StoredResult> stored;
      for (const auto& dir : split_list(results)) stored.push_back(read_results(dir));
      const auto rows = compare_results(stored);
      std::cout << format_comparison_table(rows);
      write_text_file(out_file, format_comparison_json(rows));
      return kOk;
    });
  }

  if (sweep->parsed()) {
    return guarded([&] {
      const auto loaded = load_spec(spec_path);
      const auto resources = load_resources(loaded.spec, loaded.base_dir);
      const auto entries = run_sweep(loaded.spec, resources, seeds, {deterministic_time}, fs::path(out_dir));
      write_text_file(fs::path(out_dir) / "sweep.json", format_sweep_json(entries));
      std::printf("%-8s %10s %10s %14s\n", "sampler", "mean_trs", "std_trs", "mean_diversity");
      for (const auto& e : entries) {
        std::printf("%-8s %10.2f %10.2f %14.5f\n", std::string(to_string(e.sampler)).c_str(), e.mean_trs(),
                    e.stddev_trs(), e.mean_diversity());
      }
      return kOk;
    });
  }
  return kValidation;
}
