// Copyright 2026 The attnfuse Authors.
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

#include "src/common/json_convert.h"

#include "attnfuse/errors.h"

namespace attnfuse::internal {

using synthworld::CorruptionProfile;
using synthworld::FailureEffect;
using synthworld::FailureRule;
using synthworld::RegionSelector;
using synthworld::SceneSpec;

Json ToJson(const SceneSpec& spec) {
  return Json{{"resolution", spec.resolution},   {"num_classes", spec.num_classes},
              {"min_objects", spec.min_objects}, {"max_objects", spec.max_objects},
              {"depth_min", spec.depth_min},     {"depth_max", spec.depth_max},
              {"seed", spec.seed}};
}

SceneSpec SceneSpecFromJson(const Json& j) {
  SceneSpec spec;
  ReadOptional(j, "resolution", spec.resolution);
  ReadOptional(j, "num_classes", spec.num_classes);
  ReadOptional(j, "min_objects", spec.min_objects);
  ReadOptional(j, "max_objects", spec.max_objects);
  ReadOptional(j, "depth_min", spec.depth_min);
  ReadOptional(j, "depth_max", spec.depth_max);
  ReadOptional(j, "seed", spec.seed);
  spec.Validate();
  return spec;
}

Json ToJson(const CorruptionProfile& profile) {
  Json rules = Json::array();
  for (const FailureRule& rule : profile.rules) {
    Json effects = Json::array();
    for (const FailureEffect& e : rule.effects) {
      effects.push_back({{"task", synthworld::TaskName(e.task)},
                         {"confidence", synthworld::ConfidenceName(e.confidence)}});
    }
    const RegionSelector& r = rule.region;
    rules.push_back({{"name", rule.name},
                     {"region",
                      {{"kind", synthworld::RegionKindName(r.kind)},
                       {"class_id", r.class_id},
                       {"depth_low", r.depth_low},
                       {"depth_high", r.depth_high},
                       {"activation", r.activation},
                       {"tile", r.tile}}},
                     {"effects", effects}});
  }
  return Json{{"rules", rules},
              {"ensemble_size", profile.ensemble_size},
              {"ensemble_noise", profile.ensemble_noise},
              {"shift", synthworld::ShiftName(profile.shift)},
              {"instance_enabled", profile.instance_enabled}};
}

CorruptionProfile ProfileFromJson(const Json& j) {
  CorruptionProfile p;
  if (j.is_object() && j.contains("rules")) {
    const Json& rules = j.at("rules");
    if (!rules.is_array()) throw UsageError("field 'rules' must be an array");
    p.rules.clear();
    for (const Json& jr : rules) {
      FailureRule rule;
      rule.name = ReadRequired<std::string>(jr, "name");
      const Json region = ReadRequired<Json>(jr, "region");
      rule.region.kind = synthworld::ParseRegionKind(ReadRequired<std::string>(region, "kind"));
      ReadOptional(region, "class_id", rule.region.class_id);
      ReadOptional(region, "depth_low", rule.region.depth_low);
      ReadOptional(region, "depth_high", rule.region.depth_high);
      ReadOptional(region, "activation", rule.region.activation);
      ReadOptional(region, "tile", rule.region.tile);
      const Json effects = ReadRequired<Json>(jr, "effects");
      if (!effects.is_array()) throw UsageError("field 'effects' must be an array");
      for (const Json& je : effects) {
        rule.effects.push_back(
            {synthworld::ParseTask(ReadRequired<std::string>(je, "task")),
             synthworld::ParseConfidence(ReadRequired<std::string>(je, "confidence"))});
      }
      p.rules.push_back(std::move(rule));
    }
  }
  ReadOptional(j, "ensemble_size", p.ensemble_size);
  ReadOptional(j, "ensemble_noise", p.ensemble_noise);
  std::string shift = "none";
  ReadOptional(j, "shift", shift);
  p.shift = synthworld::ParseShift(shift);
  ReadOptional(j, "instance_enabled", p.instance_enabled);
  return p;
}

Json ToJson(const numgrid::Dims& d) {
  return Json::array({d.batch, d.channels, d.height, d.width});
}

numgrid::Dims DimsFromJson(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw UsageError("dims must be a 4-element array");
  numgrid::Dims d;
  try {
    d = {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
  } catch (const nlohmann::json::exception&) {
    throw UsageError("dims must be integers");
  }
  return d;
}

Json ToJson(const attnet::ModelConfig& c) {
  Json tasks = Json::array();
  for (synthworld::Task t : c.tasks) tasks.push_back(synthworld::TaskName(t));
  Json methods = Json::array();
  for (int i = 0; i < c.n_tasks(); ++i) methods.push_back(uncert::MethodName(c.method(i)));
  return Json{{"tasks", tasks},
              {"methods", methods},
              {"target", synthworld::TaskName(c.target)},
              {"num_classes", c.num_classes},
              {"patch", c.patch},
              {"map_resolution", c.map_resolution},
              {"image_channels", c.image_channels},
              {"pred_channels", c.pred_channels},
              {"hidden_channels", c.hidden_channels},
              {"weight_mode", attnet::WeightModeName(c.weight_mode)},
              {"loss", attnet::LossKindName(c.loss)}};
}

attnet::ModelConfig ModelConfigFromJson(const Json& j) {
  attnet::ModelConfig c;
  if (j.is_object() && j.contains("tasks")) {
    c.tasks.clear();
    for (const std::string& name : ReadRequired<std::vector<std::string>>(j, "tasks")) {
      c.tasks.push_back(synthworld::ParseTask(name));
    }
  }
  if (j.is_object() && j.contains("methods")) {
    for (const std::string& name : ReadRequired<std::vector<std::string>>(j, "methods")) {
      c.methods.push_back(uncert::ParseMethod(name));
    }
  }
  std::string text = std::string(synthworld::TaskName(c.target));
  ReadOptional(j, "target", text);
  c.target = synthworld::ParseTask(text);
  ReadOptional(j, "num_classes", c.num_classes);
  ReadOptional(j, "patch", c.patch);
  ReadOptional(j, "map_resolution", c.map_resolution);
  ReadOptional(j, "image_channels", c.image_channels);
  ReadOptional(j, "pred_channels", c.pred_channels);
  ReadOptional(j, "hidden_channels", c.hidden_channels);
  text = "linear";
  ReadOptional(j, "weight_mode", text);
  c.weight_mode = attnet::ParseWeightMode(text);
  text = "mse";
  ReadOptional(j, "loss", text);
  c.loss = attnet::ParseLossKind(text);
  c.Validate();
  return c;
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace attnfuse::internal
