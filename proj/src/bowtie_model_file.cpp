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

// Bow-tie model documents:
//
//   bowtie NAME {
//     top_event = "..."; consequence = "...";
//     segments { CLASS = [SEGMENT, ...]; ... }
//     threat ID "description"? { CLASS = RATE; ... }
//     preventive ID lec_sigmoid { slope = NUM; midpoint = NUM; normalizer = NUM;
//                                 sensor_failure_rate = NUM; FLAG = P; ... }
//     mitigation ID env_lut { edges = [...]; radar_ok = [...]; radar_failed = [...]; }
//     infraction_weights { stop_sign = NUM; red_light = NUM; route_deviation = NUM; }
//   }

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "riskscene/bowtie.hpp"
#include "riskscene/lexer.hpp"

namespace riskscene {

namespace {

struct PendingThreat {
  Threat threat;
  std::map<std::string, double> class_rates;
  SourcePos pos;
};

class ModelParser {
 public:
  explicit ModelParser(std::string_view text) : cur_(tokenize(text)) {}

  BowTieModel parse() {
    BowTieModel model;
    cur_.expect_keyword("bowtie");
    model.name = cur_.expect_ident("model name");
    const SourcePos model_pos = cur_.peek().pos;
    cur_.expect_punct('{');

    std::map<std::string, std::vector<int>> classes;
    std::vector<PendingThreat> threats;
    std::set<std::string> ids;

    while (!cur_.is_punct('}')) {
      const Token key = cur_.peek();
      const std::string word = cur_.expect_ident("model statement");
      if (word == "top_event" || word == "consequence") {
        cur_.expect_punct('=');
        (word == "top_event" ? model.top_event : model.consequence) = cur_.expect_string();
        cur_.expect_punct(';');
      } else if (word == "segments") {
        if (!classes.empty()) cur_.fail(key, "'segments' given twice");
        classes = parse_segments();
      } else if (word == "threat") {
        PendingThreat t;
        t.pos = key.pos;
        t.threat.id = cur_.expect_ident("threat id");
        if (!ids.insert(t.threat.id).second) cur_.fail(key, "duplicate id '" + t.threat.id + "'");
        if (cur_.peek().kind == TokenKind::kString) t.threat.description = cur_.next().text;
        cur_.expect_punct('{');
        while (!cur_.is_punct('}')) {
          const Token at = cur_.peek();
          const std::string cls = cur_.expect_ident("segment class");
          cur_.expect_punct('=');
          const double rate = cur_.expect_number("rate");
          cur_.expect_punct(';');
          if (rate < 0.0) cur_.fail(at, "threat rates must be non-negative");
          if (!t.class_rates.emplace(cls, rate).second) cur_.fail(at, "class '" + cls + "' given twice");
        }
        cur_.expect_punct('}');
        threats.push_back(std::move(t));
      } else if (word == "preventive" || word == "mitigation") {
        BarrierSpec b = parse_barrier(key);
        if (!ids.insert(b.id).second) cur_.fail(key, "duplicate id '" + b.id + "'");
        (word == "preventive" ? model.preventive : model.mitigation).push_back(std::move(b));
      } else if (word == "infraction_weights") {
        model.infraction_weights = parse_weights();
      } else {
        cur_.fail(key, "unknown keyword '" + word + "'");
      }
    }
    cur_.expect_punct('}');
    if (!cur_.at_end()) cur_.fail_here("unexpected " + describe(cur_.peek()) + " after the model block");

    model.threats = resolve_threats(classes, threats, model_pos);
    try {
      model.validate();
    } catch (const std::invalid_argument& e) {
      throw ParseError(model_pos, e.what());
    }
    return model;
  }

 private:
  std::map<std::string, std::vector<int>> parse_segments() {
    std::map<std::string, std::vector<int>> classes;
    cur_.expect_punct('{');
    while (!cur_.is_punct('}')) {
      const Token at = cur_.peek();
      const std::string cls = cur_.expect_ident("segment class");
      cur_.expect_punct('=');
      const Token list_at = cur_.peek();
      std::vector<int> segments;
      for (double s : cur_.expect_number_list()) {
        if (s < 0.0 || std::floor(s) != s || s > 1e6) cur_.fail(list_at, "segments must be non-negative integers");
        segments.push_back(static_cast<int>(s));
      }
      cur_.expect_punct(';');
      if (!classes.emplace(cls, std::move(segments)).second) cur_.fail(at, "class '" + cls + "' given twice");
    }
    cur_.expect_punct('}');
    if (classes.empty()) cur_.fail_here("'segments' declares no class");
    return classes;
  }

  std::vector<Threat> resolve_threats(const std::map<std::string, std::vector<int>>& classes,
                                      std::vector<PendingThreat>& pending, SourcePos model_pos) {
    if (classes.empty()) throw ParseError(model_pos, "missing 'segments' block");
    std::map<int, std::string> owner;
    for (const auto& [cls, segs] : classes) {
      for (int s : segs) {
        if (!owner.emplace(s, cls).second) {
          throw ParseError(model_pos, "segment " + std::to_string(s) + " belongs to more than one class");
        }
      }
    }
    const int count = owner.rbegin()->first + 1;
    for (int s = 0; s < count; ++s) {
      if (!owner.count(s)) throw ParseError(model_pos, "segment " + std::to_string(s) + " has no class");
    }

    std::vector<Threat> threats;
    for (auto& p : pending) {
      for (const auto& [cls, rate] : p.class_rates) {
        if (!classes.count(cls)) throw ParseError(p.pos, "threat '" + p.threat.id + "' uses unknown class '" + cls + "'");
      }
      p.threat.rate_by_segment.resize(static_cast<std::size_t>(count));
      for (int s = 0; s < count; ++s) {
        const auto it = p.class_rates.find(owner[s]);
        if (it == p.class_rates.end()) {
          throw ParseError(p.pos, "threat '" + p.threat.id + "' has no rate for class '" + owner[s] + "'");
        }
        p.threat.rate_by_segment[static_cast<std::size_t>(s)] = it->second;
      }
      threats.push_back(std::move(p.threat));
    }
    return threats;
  }

  BarrierSpec parse_barrier(const Token& key) {
    BarrierSpec b;
    b.id = cur_.expect_ident("barrier id");
    const Token form_tok = cur_.peek();
    const std::string form = cur_.expect_ident("barrier form");
    cur_.expect_punct('{');
    if (form == "lec_sigmoid") {
      LecSigmoidBarrier lec;
      while (!cur_.is_punct('}')) {
        const Token at = cur_.peek();
        const std::string name = cur_.expect_ident("barrier parameter");
        cur_.expect_punct('=');
        const double value = cur_.expect_number();
        cur_.expect_punct(';');
        if (name == "slope") {
          lec.slope = value;
        } else if (name == "midpoint") {
          lec.midpoint = value;
        } else if (name == "normalizer") {
          lec.normalizer = value;
        } else if (name == "sensor_failure_rate") {
          lec.sensor_failure_rate = value;
        } else if (const auto flag = parse_detector_flag(name)) {
          if (!lec.detector_probability.emplace(*flag, value).second) cur_.fail(at, "'" + name + "' given twice");
        } else {
          cur_.fail(at, "unknown lec_sigmoid parameter '" + name + "'");
        }
      }
      b.form = lec;
    } else if (form == "env_lut") {
      EnvLutBarrier env;
      while (!cur_.is_punct('}')) {
        const Token at = cur_.peek();
        const std::string name = cur_.expect_ident("barrier parameter");
        cur_.expect_punct('=');
        auto values = cur_.expect_number_list();
        cur_.expect_punct(';');
        if (name == "edges") {
          env.edges = std::move(values);
        } else if (name == "radar_ok") {
          env.radar_ok = std::move(values);
        } else if (name == "radar_failed") {
          env.radar_failed = std::move(values);
        } else {
          cur_.fail(at, "unknown env_lut parameter '" + name + "'");
        }
      }
      b.form = env;
    } else {
      cur_.fail(form_tok, "unknown barrier form '" + form + "'");
    }
    cur_.expect_punct('}');
    try {
      BowTieModel probe;  // reuse the model-level barrier checks
      probe.threats.push_back({"probe", "", {0.0}});
      probe.preventive.push_back(b);
      probe.mitigation.push_back(b);
      probe.validate();
    } catch (const std::invalid_argument& e) {
      throw ParseError(key.pos, e.what());
    }
    return b;
  }

  InfractionWeights parse_weights() {
    InfractionWeights w;
    cur_.expect_punct('{');
    while (!cur_.is_punct('}')) {
      const Token at = cur_.peek();
      const std::string name = cur_.expect_ident("infraction");
      cur_.expect_punct('=');
      const double value = cur_.expect_number("weight");
      cur_.expect_punct(';');
      if (value < 0.0) cur_.fail(at, "infraction weights must be non-negative");
      if (name == "stop_sign") {
        w.stop_sign = value;
      } else if (name == "red_light") {
        w.red_light = value;
      } else if (name == "route_deviation") {
        w.route_deviation = value;
      } else {
        cur_.fail(at, "unknown infraction '" + name + "'");
      }
    }
    cur_.expect_punct('}');
    return w;
  }

  TokenCursor cur_;
};

constexpr std::string_view kDefaultModel = R"(# Roadway-obstruction hazard for the camera/radar driving stack.
bowtie roadway_obstruction {
  top_event = "roadway obstruction";
  consequence = "collision";

  segments {
    intersection = [0, 1, 2];
    crossroad = [3, 4, 5];
    side_road = [6, 7, 8, 9];
  }

  threat T1 "stopped vehicle in lane" { intersection = 0.8; crossroad = 0.6; side_road = 0.4; }
  threat T2 "pedestrian crossing" { intersection = 0.6; crossroad = 0.4; side_road = 0.2; }

  # Camera-based LEC perception, degraded by blurred or occluded frames.
  preventive B1 lec_sigmoid {
    slope = 0.049; midpoint = 5.754; normalizer = 0.4; sensor_failure_rate = 1;
    blur_left = 0.32; blur_center = 0.32; blur_right = 0.32;
  }
  preventive B2 lec_sigmoid {
    slope = 0.049; midpoint = 5.754; normalizer = 0.4; sensor_failure_rate = 1;
    occlusion_left = 0.3; occlusion_center = 0.3; occlusion_right = 0.3;
  }

  # Radar emergency braking, weakened by rain and radar failure.
  mitigation B3 env_lut {
    edges = [0, 20, 40, 60, 80, 100];
    radar_ok = [0.9, 0.85, 0.8, 0.7, 0.6];
    radar_failed = [0.3, 0.25, 0.2, 0.15, 0.1];
  }

  infraction_weights { stop_sign = 0.7; red_light = 0.8; route_deviation = 1; }
}
)";

}  // namespace

BowTieModel parse_bowtie_model(std::string_view text) { return ModelParser(text).parse(); }

std::string_view default_bowtie_model_text() { return kDefaultModel; }

const BowTieModel& default_bowtie_model() {
  static const BowTieModel model = parse_bowtie_model(kDefaultModel);
  return model;
}

}  // namespace riskscene
