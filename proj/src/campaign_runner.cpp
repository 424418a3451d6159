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

#include "riskscene/campaign_runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "riskscene/lexer.hpp"
#include "riskscene/metrics.hpp"

namespace riskscene {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr std::string_view kSchemaVersion = "riskscene.results/1";
constexpr std::uint64_t kMetricsStream = 2;

fs::path resolve(const fs::path& base_dir, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> csv_header(const SceneSpace& space) {
  std::vector<std::string> h{"iteration"};
  for (const auto& v : space.variables()) h.push_back(v.name);
  for (const char* c : {"rs", "is", "s_risk", "high_risk", "elapsed_ms"}) h.emplace_back(c);
  return h;
}

std::string schema_of(const SceneSpace& space) {
  std::string s(kSchemaVersion);
  s += ':';
  const auto h = csv_header(space);
  for (std::size_t i = 0; i < h.size(); ++i) s += (i ? "," : "") + h[i];
  return s;
}

ordered_json optional_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json aggregates_json(const Aggregates& a) {
  ordered_json j;
  j["trs"] = a.trs;
  j["clusters"] = a.clusters ? ordered_json(*a.clusters) : ordered_json(nullptr);
  j["silhouette"] = optional_json(a.silhouette);
  j["diversity"] = optional_json(a.diversity);
  j["total_time_ms"] = a.total_time_ms;
  return j;
}

Aggregates aggregates_from_json(const nlohmann::json& j) {
  Aggregates a;
  a.trs = j.at("trs").get<double>();
  if (!j.at("clusters").is_null()) a.clusters = j.at("clusters").get<std::size_t>();
  if (!j.at("silhouette").is_null()) a.silhouette = j.at("silhouette").get<double>();
  if (!j.at("diversity").is_null()) a.diversity = j.at("diversity").get<double>();
  a.total_time_ms = j.at("total_time_ms").get<double>();
  return a;
}

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw RuntimeError("error while reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw RuntimeError("error while writing '" + path.string() + "'");
}

std::vector<double> read_calibration_file(const fs::path& path) {
  const std::string text = read_text_file(path);
  std::vector<double> risks;
  std::size_t line_no = 0;
  for (std::string_view line : lines_of(text)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    const auto value = parse_number(line.substr(first, last - first + 1));
    if (!value || !std::isfinite(*value)) {
      throw ParseError({line_no, first + 1}, "expected one calibration risk per line");
    }
    risks.push_back(*value);
  }
  return risks;
}

CampaignResources load_resources(const CampaignSpec& spec, const fs::path& base_dir) {
  validate_campaign_spec(spec);
  const SceneSpace space = spec.space();
  CampaignResources res;

  res.model = spec.model_path ? parse_bowtie_model(read_text_file(resolve(base_dir, *spec.model_path)))
                              : default_bowtie_model();
  const Landscape landscape = spec.evaluator_path
                                  ? parse_landscape(read_text_file(resolve(base_dir, *spec.evaluator_path)))
                                  : default_landscape();
  auto evaluator = std::make_shared<SyntheticEvaluator>(landscape, space);
  if (const auto& seg = landscape.road_segment_variable) {
    const auto& v = space[*space.index_of(*seg)];
    if (v.upper >= static_cast<double>(res.model.segment_count())) {
      throw std::invalid_argument("road segment variable '" + v.name + "' exceeds the " +
                                  std::to_string(res.model.segment_count()) + " segments of model '" +
                                  res.model.name + "'");
    }
  }
  res.evaluator = std::move(evaluator);

  if (spec.delta) {
    res.delta = *spec.delta;
  } else if (spec.calibrate_path) {
    res.delta = calibrate_threshold(read_calibration_file(resolve(base_dir, *spec.calibrate_path)));
  } else {
    throw std::invalid_argument("campaign sets neither 'delta' nor 'calibrate'");
  }

  if (spec.sampler.kind == SamplerKind::kGbo && spec.sampler.gbo.warm_start_path) {
    res.warm_start = read_warm_start(resolve(base_dir, *spec.sampler.gbo.warm_start_path), space);
  }
  return res;
}

std::uint64_t metrics_seed(std::uint64_t campaign_seed) { return derive_seed(campaign_seed, kMetricsStream); }

Aggregates compute_aggregates(const std::vector<IterationRecord>& records, const SceneSpace& space, double delta,
                              std::uint64_t seed) {
  Aggregates a;
  if (records.empty()) return a;
  std::vector<double> risks;
  std::vector<Point> points;
  for (const auto& r : records) {
    risks.push_back(r.s_risk);
    points.push_back(normalize(r.values, space));
    a.total_time_ms += r.elapsed_ms;
  }
  a.trs = total_risk_scenes(risks, delta);
  if (records.size() >= 3) {
    const auto clusters = select_clusters(points, seed);
    a.clusters = clusters.k;
    a.silhouette = clusters.silhouette;
    a.diversity = diversity(risks, clusters.labels);
  }
  return a;
}

CampaignResult run_campaign(const CampaignSpec& spec, const CampaignResources& resources, RunOptions options) {
  validate_campaign_spec(spec);
  if (!resources.evaluator) throw std::invalid_argument("campaign has no evaluator");
  const SceneSpace space = spec.space();
  const RiskWeights weights{spec.w1, spec.w2};

  CampaignResult result;
  result.spec = spec;
  result.delta = resources.delta;
  result.metrics_seed = metrics_seed(spec.seed);

  auto sampler = make_sampler(spec.sampler, space, spec.seed, resources.delta, resources.warm_start);
  std::optional<Feedback> last;
  using Clock = std::chrono::steady_clock;
  for (std::size_t i = 1; i <= spec.iterations; ++i) {
    const auto start = Clock::now();
    std::optional<Scene> scene;
    try {
      scene = sampler->next(last);
    } catch (const std::exception& e) {
      throw RuntimeError("iteration " + std::to_string(i) + ": sampler failed: " + e.what());
    }
    if (!scene) break;
    scene->iteration = i;

    RiskBreakdown risk;
    try {
      const auto outcome = resources.evaluator->evaluate(*scene, scene_seed(spec.seed, i));
      risk = score_scene(resources.model, outcome.trace, outcome.infractions, weights, resources.delta);
    } catch (const std::exception& e) {
      throw RuntimeError("iteration " + std::to_string(i) + ": evaluation failed: " + e.what());
    }
    const std::chrono::duration<double, std::milli> elapsed = Clock::now() - start;

    result.records.push_back(IterationRecord{i, scene->values, risk.rs, risk.is, risk.s_risk, risk.high_risk,
                                             options.deterministic_time ? 0.0 : elapsed.count()});
    last = Feedback{std::move(*scene), risk.s_risk};
  }
  result.aggregates = compute_aggregates(result.records, space, resources.delta, result.metrics_seed);
  return result;
}

std::string format_records_csv(const std::vector<IterationRecord>& records, const SceneSpace& space) {
  std::string out;
  const auto header = csv_header(space);
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.iteration);
    for (double v : r.values) out += "," + format_number(v);
    out += "," + format_number(r.rs) + "," + format_number(r.is) + "," + format_number(r.s_risk);
    out += r.high_risk ? ",1," : ",0,";
    out += format_number(r.elapsed_ms);
    out += '\n';
  }
  return out;
}

std::vector<IterationRecord> parse_records_csv(std::string_view text, const SceneSpace& space) {
  const auto lines = lines_of(text);
  const auto header = csv_header(space);
  if (lines.empty() || split(lines[0], ',') != header) {
    throw ParseError({1, 1}, "records header does not match the campaign variables");
  }
  std::vector<IterationRecord> records;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const SourcePos pos{ln + 1, 1};
    const auto fields = split(lines[ln], ',');
    if (fields.size() != header.size()) {
      throw ParseError(pos, "expected " + std::to_string(header.size()) + " fields, found " +
                                std::to_string(fields.size()));
    }
    std::vector<double> nums(fields.size());
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const auto v = parse_number(fields[f]);
      if (!v) throw ParseError(pos, "field '" + header[f] + "' is not a number: '" + fields[f] + "'");
      nums[f] = *v;
    }
    IterationRecord r;
    if (nums[0] < 1.0 || std::floor(nums[0]) != nums[0] || nums[0] > 1e12) {
      throw ParseError(pos, "iteration must be a positive integer");
    }
    r.iteration = static_cast<std::size_t>(nums[0]);
    const std::size_t d = space.size();
    r.values.assign(nums.begin() + 1, nums.begin() + 1 + static_cast<std::ptrdiff_t>(d));
    r.rs = nums[d + 1];
    r.is = nums[d + 2];
    r.s_risk = nums[d + 3];
    if (nums[d + 4] != 0.0 && nums[d + 4] != 1.0) throw ParseError(pos, "high_risk must be 0 or 1");
    r.high_risk = nums[d + 4] == 1.0;
    r.elapsed_ms = nums[d + 5];
    records.push_back(std::move(r));
  }
  return records;
}

std::string format_summary(const CampaignResult& result) {
  ordered_json j;
  j["schema"] = schema_of(result.spec.space());
  j["campaign"] = result.spec.name;
  j["sampler"] = std::string(to_string(result.spec.sampler.kind));
  j["seed"] = result.spec.seed;
  j["spec_hash"] = spec_hash(result.spec);
  j["delta"] = result.delta;
  j["scenes"] = result.records.size();
  j["metrics_seed"] = result.metrics_seed;
  j["aggregates"] = aggregates_json(result.aggregates);
  return j.dump(2) + "\n";
}

void write_results(const CampaignResult& result, const fs::path& dir, bool artifacts) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeError("cannot create directory '" + dir.string() + "': " + ec.message());
  write_text_file(dir / "records.csv", format_records_csv(result.records, result.spec.space()));
  write_text_file(dir / "summary.json", format_summary(result));
  write_text_file(dir / "campaign.spec", format_spec(result.spec));
  if (!artifacts) return;
  const fs::path scenes = dir / "scenes";
  fs::create_directories(scenes, ec);
  if (ec) throw RuntimeError("cannot create directory '" + scenes.string() + "': " + ec.message());
  for (const auto& r : result.records) {
    char name[32];
    std::snprintf(name, sizeof name, "scene_%04zu.txt", r.iteration);
    write_text_file(scenes / name, emit_scene_artifact(Scene{r.iteration, r.values}, result.spec));
  }
}

StoredResult read_results(const fs::path& dir) {
  StoredResult s;
  s.dir = dir;
  s.spec = parse_campaign_spec(read_text_file(dir / "campaign.spec"));
  const SceneSpace space = s.spec.space();
  s.records = parse_records_csv(read_text_file(dir / "records.csv"), space);
  const fs::path summary = dir / "summary.json";
  try {
    const auto j = nlohmann::json::parse(read_text_file(summary));
    s.schema = j.at("schema").get<std::string>();
    s.sampler = j.at("sampler").get<std::string>();
    s.delta = j.at("delta").get<double>();
    s.metrics_seed = j.at("metrics_seed").get<std::uint64_t>();
    s.aggregates = aggregates_from_json(j.at("aggregates"));
  } catch (const nlohmann::json::exception& e) {
    throw RuntimeError("malformed '" + summary.string() + "': " + e.what());
  }
  return s;
}

std::vector<Feedback> read_warm_start(const fs::path& path, const SceneSpace& space) {
  std::vector<Feedback> out;
  for (auto& r : parse_records_csv(read_text_file(path), space)) {
    Scene scene{r.iteration, std::move(r.values)};
    require_valid(scene, space);
    out.push_back({std::move(scene), r.s_risk});
  }
  return out;
}

std::vector<ComparisonRow> compare_results(const std::vector<StoredResult>& results) {
  if (results.size() < 2) throw std::invalid_argument("compare needs at least two result sets");
  for (const auto& r : results) {
    if (r.schema != results.front().schema) {
      throw std::invalid_argument("schema of '" + r.dir.string() + "' differs from '" +
                                  results.front().dir.string() + "'");
    }
  }
  std::vector<ComparisonRow> rows;
  for (const auto& r : results) {
    rows.push_back({r.dir.string(), r.sampler, r.records.size(), r.aggregates, 0});
  }
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rows[a].aggregates.trs > rows[b].aggregates.trs; });
  for (std::size_t i = 0; i < order.size(); ++i) rows[order[i]].rank = i + 1;
  return rows;
}

std::string format_comparison_json(const std::vector<ComparisonRow>& rows) {
  ordered_json j;
  j["rows"] = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json row;
    row["label"] = r.label;
    row["sampler"] = r.sampler;
    row["scenes"] = r.scenes;
    row["rank"] = r.rank;
    row["trs"] = r.aggregates.trs;
    row["clusters"] = r.aggregates.clusters ? ordered_json(*r.aggregates.clusters) : ordered_json("n/a");
    row["silhouette"] = r.aggregates.silhouette ? ordered_json(*r.aggregates.silhouette) : ordered_json("n/a");
    row["diversity"] = r.aggregates.diversity ? ordered_json(*r.aggregates.diversity) : ordered_json("n/a");
    row["total_time_ms"] = r.aggregates.total_time_ms;
    j["rows"].push_back(std::move(row));
  }
  std::vector<const ComparisonRow*> ranked;
  for (const auto& r : rows) ranked.push_back(&r);
  std::sort(ranked.begin(), ranked.end(), [](const auto* a, const auto* b) { return a->rank < b->rank; });
  j["ranking"] = ordered_json::array();
  for (const auto* r : ranked) j["ranking"].push_back(r->label);
  return j.dump(2) + "\n";
}

std::string format_comparison_table(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(5) << "rank" << std::setw(8) << "sampler" << std::setw(8) << "scenes"
      << std::setw(10) << "trs" << std::setw(10) << "clusters" << std::setw(12) << "silhouette" << std::setw(12)
      << "diversity" << std::setw(12) << "time_ms" << "results\n";
  std::vector<const ComparisonRow*> ranked;
  for (const auto& r : rows) ranked.push_back(&r);
  std::sort(ranked.begin(), ranked.end(), [](const auto* a, const auto* b) { return a->rank < b->rank; });
  auto fixed = [](std::optional<double> v, int prec) {
    if (!v) return std::string("n/a");
    std::ostringstream s;
    s << std::fixed << std::setprecision(prec) << *v;
    return s.str();
  };
  for (const auto* r : ranked) {
    const auto& a = r->aggregates;
    out << std::left << std::setw(5) << r->rank << std::setw(8) << r->sampler << std::setw(8) << r->scenes
        << std::setw(10) << fixed(a.trs, 2) << std::setw(10)
        << (a.clusters ? std::to_string(*a.clusters) : std::string("n/a")) << std::setw(12) << fixed(a.silhouette, 4)
        << std::setw(12) << fixed(a.diversity, 5) << std::setw(12) << fixed(a.total_time_ms, 1) << r->label
        << "\n";
  }
  return out.str();
}

double SweepEntry::mean_trs() const {
  if (runs.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : runs) s += r.trs;
  return s / static_cast<double>(runs.size());
}

double SweepEntry::stddev_trs() const {
  if (runs.empty()) return 0.0;
  const double m = mean_trs();
  double s = 0.0;
  for (const auto& r : runs) s += (r.trs - m) * (r.trs - m);
  return std::sqrt(s / static_cast<double>(runs.size()));
}

double SweepEntry::mean_diversity() const {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& r : runs) {
    if (r.diversity) {
      s += *r.diversity;
      ++n;
    }
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

std::vector<SweepEntry> run_sweep(const CampaignSpec& spec, const CampaignResources& resources, std::size_t seeds,
                                  RunOptions options, const std::optional<fs::path>& out_dir) {
  if (seeds == 0) throw std::invalid_argument("sweep needs at least one seed");
  std::vector<SweepEntry> entries;
  for (SamplerKind kind :
       {SamplerKind::kRandom, SamplerKind::kGrid, SamplerKind::kHalton, SamplerKind::kRns, SamplerKind::kGbo}) {
    SweepEntry entry;
    entry.sampler = kind;
    for (std::size_t i = 0; i < seeds; ++i) {
      CampaignSpec run_spec = spec;
      run_spec.sampler.kind = kind;
      run_spec.seed = spec.seed + i;
      const auto result = run_campaign(run_spec, resources, options);
      if (out_dir) {
        write_results(result, *out_dir / std::string(to_string(kind)) / ("seed_" + std::to_string(run_spec.seed)));
      }
      entry.seeds.push_back(run_spec.seed);
      entry.runs.push_back(result.aggregates);
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::string format_sweep_json(const std::vector<SweepEntry>& entries) {
  ordered_json j;
  j["samplers"] = ordered_json::array();
  for (const auto& e : entries) {
    ordered_json row;
    row["sampler"] = std::string(to_string(e.sampler));
    row["seeds"] = e.seeds;
    row["mean_trs"] = e.mean_trs();
    row["stddev_trs"] = e.stddev_trs();
    row["mean_diversity"] = e.mean_diversity();
    row["runs"] = ordered_json::array();
    for (const auto& a : e.runs) row["runs"].push_back(aggregates_json(a));
    j["samplers"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

}  // namespace riskscene
