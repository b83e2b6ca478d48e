// Copyright 2026 The peerlab Authors
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

#include "peerlab/config.h"

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "peerlab/assignment.h"

namespace peerlab {
namespace {

using nlohmann::json;

// Checked view of one JSON value; object keys read through it are recorded
// so that Finish() can reject the rest.
class Node {
 public:
  Node(const json& value, std::string path)
      : value_(&value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return *value_; }

  [[noreturn]] void Fail(const std::string& what) const {
    throw ConfigError(path_ + ": " + what);
  }

  std::optional<Node> Get(const std::string& key) {
    RequireObject();
    auto it = value_->find(key);
    if (it == value_->end()) return std::nullopt;
    used_.insert(key);
    return Node(*it, Child(key));
  }

  Node Require(const std::string& key) {
    auto n = Get(key);
    if (!n) {
      throw ConfigError(Child(key) + ": required field missing");
    }
    return *n;
  }

  void Finish() const {
    if (!value_->is_object()) return;
    for (auto it = value_->begin(); it != value_->end(); ++it) {
      if (!used_.count(it.key())) {
        throw ConfigError(Child(it.key()) + ": unknown key");
      }
    }
  }

  bool IsObject() const { return value_->is_object(); }
  bool IsArray() const { return value_->is_array(); }
  bool IsNumber() const { return value_->is_number(); }

  double Number() const {
    if (!value_->is_number()) Fail("expected a number");
    return value_->get<double>();
  }
  std::int64_t Int() const {
    if (!value_->is_number_integer()) Fail("expected an integer");
    return value_->get<std::int64_t>();
  }
  std::uint64_t UInt() const {
    if (!value_->is_number_unsigned() &&
        !(value_->is_number_integer() && value_->get<std::int64_t>() >= 0)) {
      Fail("expected a nonnegative integer");
    }
    return value_->get<std::uint64_t>();
  }
  std::string String() const {
    if (!value_->is_string()) Fail("expected a string");
    return value_->get<std::string>();
  }
  bool Bool() const {
    if (!value_->is_boolean()) Fail("expected true or false");
    return value_->get<bool>();
  }
  std::vector<Node> Items() const {
    if (!value_->is_array()) Fail("expected an array");
    std::vector<Node> out;
    for (std::size_t k = 0; k < value_->size(); ++k) {
      out.emplace_back((*value_)[k], path_ + "[" + std::to_string(k) + "]");
    }
    return out;
  }

 private:
  void RequireObject() const {
    if (!value_->is_object()) Fail("expected an object");
  }
  std::string Child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* value_;
  std::string path_;
  std::set<std::string> used_;
};

// Runs a parse step, converting domain and input errors into config errors
// that carry the field path.
template <typename F>
auto Guard(const Node& node, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(node.path() + ": " + e.what());
  }
}

int AsInt(const Node& n) {
  const std::int64_t v = n.Int();
  if (v < -2147483647 || v > 2147483647) n.Fail("integer out of range");
  return static_cast<int>(v);
}

std::vector<double> NumberOrList(const Node& n) {
  if (n.IsNumber()) return {n.Number()};
  std::vector<double> out;
  for (const auto& item : n.Items()) out.push_back(item.Number());
  return out;
}

SlotPlan ParsePlan(Node n) {
  return Guard(n, [&]() -> SlotPlan {
    if (!n.IsObject()) n.Fail("expected a plan object");
    if (auto delta = n.Get("delta")) {
      MixedStrategy m{delta->Number(), 0.5};
      if (auto r = n.Get("r")) m.r = r->Number();
      n.Finish();
      CheckSlotPlan(m);
      return m;
    }
    const std::int64_t effort = n.Require("effort").Int();
    if (effort != 0 && effort != 1) n.Fail("effort must be 0 or 1");
    const double x = n.Require("x").Number();
    const double y = n.Require("y").Number();
    n.Finish();
    return TaskStrategy{effort ? Effort::kFull : Effort::kZero,
                        ReportingMatrix(x, y)};
  });
}

void ParsePrior(Node n, ExperimentConfig& c) {
  Guard(n, [&] {
    if (n.IsNumber()) {
      c.prior = Prior(n.Number());
      return;
    }
    const double h = n.Require("p_h").Number();
    if (auto l = n.Get("p_l")) {
      c.prior = Prior(h, l->Number());
    } else {
      c.prior = Prior(h);
    }
    n.Finish();
  });
}

void ParseAssignment(Node n, ExperimentConfig& c) {
  AssignmentConfig& a = c.assignment;
  Guard(n, [&] {
    if (auto s = n.Get("scheme")) a.scheme = ParseScheme(s->String());
    if (auto s = n.Get("seed")) a.seed = s->UInt();
    if (auto s = n.Get("permute")) a.permute = s->Bool();
    if (auto s = n.Get("references")) {
      a.references = ParseReferenceMode(s->String());
    }
    auto m = n.Get("m");
    if (m) {
      BlockSpec spec;
      spec.m = AsInt(*m);
      spec.n = AsInt(n.Require("n"));
      spec.d_tasks = AsInt(n.Require("D"));
      spec.raters = AsInt(n.Require("T"));
      a.block = spec;
    } else {
      a.num_tasks = AsInt(n.Require("num_tasks"));
      for (const auto& row : n.Require("tasks_of").Items()) {
        std::vector<TaskId> tasks;
        for (const auto& t : row.Items()) tasks.push_back(TaskId{AsInt(t)});
        a.tasks_of.push_back(std::move(tasks));
      }
      for (const auto& row : n.Require("ref_rater").Items()) {
        std::vector<AgentId> refs;
        for (const auto& r : row.Items()) refs.push_back(AgentId{AsInt(r)});
        a.ref_rater.push_back(std::move(refs));
      }
      if (auto sets = n.Get("stat_sets")) {
        for (const auto& row : sets->Items()) {
          std::vector<StatisticSets> out;
          for (auto entry : row.Items()) {
            StatisticSets s;
            for (const auto& t : entry.Require("own").Items()) {
              s.own.push_back(TaskId{AsInt(t)});
            }
            for (const auto& t : entry.Require("ref").Items()) {
              s.ref.push_back(TaskId{AsInt(t)});
            }
            entry.Finish();
            out.push_back(std::move(s));
          }
          a.stat_sets.push_back(std::move(out));
        }
      }
      if ((a.scheme == StatScheme::kCustom) != !a.stat_sets.empty()) {
        n.Fail("stat_sets must be given exactly when scheme is custom");
      }
      if (a.references == ReferenceMode::kResampled) {
        n.Fail("resampled references need a block construction (m, n, D, T)");
      }
    }
    n.Finish();
  });
}

void ParseProfile(Node n, ExperimentConfig& c) {
  Guard(n, [&] {
    const std::string preset = n.Require("preset").String();
    c.profile_preset = preset;
    auto r_node = n.Get("r");
    const double r = r_node ? r_node->Number() : 0.5;
    if (preset == "all_truth") {
      c.preset_plan = TaskStrategy::Truthful();
    } else if (preset == "all_invert") {
      c.preset_plan = TaskStrategy::Inverted();
    } else if (preset == "blind_h") {
      c.preset_plan = TaskStrategy{Effort::kZero, ReportingMatrix::AlwaysH()};
    } else if (preset == "blind_l") {
      c.preset_plan = TaskStrategy{Effort::kZero, ReportingMatrix::AlwaysL()};
    } else if (preset == "coin") {
      if (!r_node) n.Fail("coin preset needs r");
      c.preset_plan = TaskStrategy::Coin(r);
    } else if (preset == "mixture") {
      c.preset_plan = MixedStrategy{n.Require("delta").Number(), r};
      CheckSlotPlan(c.preset_plan);
    } else if (preset == "table") {
      for (const auto& row : n.Require("table").Items()) {
        std::vector<SlotPlan> plans;
        for (const auto& p : row.Items()) plans.push_back(ParsePlan(p));
        c.profile_table.push_back(std::move(plans));
      }
    } else {
      n.Fail("unknown preset '" + preset +
             "' (expected all_truth, all_invert, blind_h, blind_l, coin, "
             "mixture or table)");
    }
    n.Finish();
  });
}

void ParseEquilibrium(Node n, ExperimentConfig& c) {
  Guard(n, [&] {
    if (auto v = n.Get("tolerance")) c.nash.tolerance = v->Number();
    if (auto v = n.Get("mc_sigmas")) c.nash.mc_sigmas = v->Number();
    if (auto v = n.Get("r_grid")) c.nash.r_grid = NumberOrList(*v);
    if (auto v = n.Get("whole_profile")) c.nash.whole_profile = v->Bool();
    if (auto v = n.Get("single_task")) c.nash.single_task = v->Bool();
    if (auto v = n.Get("agents")) {
      for (const auto& a : v->Items()) c.nash.agents.push_back(AsInt(a));
    }
    n.Finish();
  });
}

}  // namespace

ExperimentConfig ParseConfig(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("syntax error: ") + e.what());
  }
  ExperimentConfig c;
  Node root(doc, "");
  if (!root.IsObject()) throw ConfigError("top level must be an object");
  c.canonical = doc.dump();

  if (auto n = root.Get("prior")) ParsePrior(*n, c);
  if (auto n = root.Get("assignment")) ParseAssignment(*n, c);
  if (auto n = root.Get("agents")) {
    Guard(*n, [&] {
      if (auto p = n->Get("proficiency")) c.proficiency = NumberOrList(*p);
      if (auto k = n->Get("cost")) c.cost = NumberOrList(*k);
      n->Finish();
    });
  }
  if (auto n = root.Get("profile")) ParseProfile(*n, c);
  if (auto n = root.Get("trusted")) {
    Guard(*n, [&] {
      c.trusted.mass = n->Require("mass").Number();
      if (auto t = n->Get("proficiency")) c.trusted.proficiency = t->Number();
      n->Finish();
      CheckProbability(c.trusted.mass, "trusted mass");
      CheckProbability(c.trusted.proficiency, "trusted proficiency");
    });
  }
  if (auto n = root.Get("beta")) {
    c.beta = n->Number();
    if (c.beta < 0) n->Fail("beta must be nonnegative");
  }
  if (auto n = root.Get("shift")) {
    c.shift = Guard(*n, [&] { return ParseShift(n->String()); });
  }
  if (auto n = root.Get("estimator")) {
    c.estimator = Guard(*n, [&] { return ParseEstimator(n->String()); });
  }
  if (auto n = root.Get("trials")) {
    c.trials = n->Int();
    if (c.trials < 1) n->Fail("trials must be at least 1");
  }
  if (auto n = root.Get("seed")) c.seed = n->UInt();
  if (auto n = root.Get("enumeration_budget")) c.budget = n->UInt();
  if (auto n = root.Get("threads")) c.threads = AsInt(*n);
  if (auto n = root.Get("equilibrium")) ParseEquilibrium(*n, c);
  if (auto n = root.Get("grid_scan")) {
    Guard(*n, [&] {
      GridScanConfig g;
      if (auto p = n->Get("proficiency")) g.proficiency = p->Number();
      if (auto s = n->Get("step")) g.step = s->Number();
      n->Finish();
      c.grid_scan = g;
    });
  }
  if (auto n = root.Get("analytic")) {
    Guard(*n, [&] {
      if (auto v = n->Get("p")) c.analytic.p = v->Number();
      if (auto v = n->Get("q")) c.analytic.q = v->Number();
      if (auto v = n->Get("alpha")) c.analytic.alpha = v->Number();
      if (auto v = n->Get("D")) c.analytic.d_tasks = AsInt(*v);
      if (auto v = n->Get("r")) c.analytic.r = v->Number();
      n->Finish();
    });
  }
  if (auto n = root.Get("dump_trials")) c.dump_trials = n->Int();
  if (auto n = root.Get("output")) {
    Guard(*n, [&] {
      if (auto d = n->Get("dir")) c.output_dir = d->String();
      if (auto f = n->Get("format")) c.format = f->String();
      n->Finish();
    });
  }
  root.Finish();
  if (c.format != "csv" && c.format != "json") {
    throw ConfigError("output.format: expected csv or json");
  }
  return c;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str());
}

std::uint64_t ConfigHash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  mix(config.canonical);
  mix("|seed=" + std::to_string(config.seed));
  mix("|trials=" + std::to_string(config.trials));
  return h;
}

Assignment BuildAssignment(const ExperimentConfig& config) {
  const AssignmentConfig& a = config.assignment;
  if (a.block) {
    const std::uint64_t seed = a.seed.value_or(config.seed);
    return BuildMechanismAssignment(
        *a.block, a.scheme,
        a.permute ? std::optional<std::uint64_t>(seed) : std::nullopt);
  }
  if (a.tasks_of.empty()) {
    throw ConfigError("assignment: required field missing");
  }
  Assignment out = MakeAssignment(a.num_tasks, a.tasks_of);
  if (a.ref_rater.size() != out.tasks_of.size()) {
    throw ConfigError("assignment.ref_rater: one row per agent required");
  }
  for (std::size_t i = 0; i < a.ref_rater.size(); ++i) {
    if (a.ref_rater[i].size() != out.tasks_of[i].size()) {
      throw ConfigError("assignment.ref_rater[" + std::to_string(i) +
                        "]: one reference per task required");
    }
  }
  out.ref_rater = a.ref_rater;
  if (a.scheme == StatScheme::kCustom) {
    return SetCustomStatisticSets(std::move(out), a.stat_sets);
  }
  return BuildStatisticSets(std::move(out), a.scheme);
}

Scenario BuildScenario(const ExperimentConfig& config) {
  Scenario s;
  s.prior = config.prior;
  s.assignment = BuildAssignment(config);
  const std::size_t n = s.assignment.tasks_of.size();
  auto per_agent = [n](const std::vector<double>& v, double fallback,
                       const char* field) {
    if (v.empty()) return std::vector<double>(n, fallback);
    if (v.size() == 1) return std::vector<double>(n, v.front());
    if (v.size() != n) {
      throw ConfigError(std::string("agents.") + field + ": expected 1 or " +
                        std::to_string(n) + " values, got " +
                        std::to_string(v.size()));
    }
    return v;
  };
  const auto prof = per_agent(config.proficiency, 1.0, "proficiency");
  const auto cost = per_agent(config.cost, 0.0, "cost");
  for (std::size_t i = 0; i < n; ++i) {
    try {
      s.agents.emplace_back(AgentId{static_cast<int>(i)}, prof[i], cost[i]);
    } catch (const std::exception& e) {
      throw ConfigError("agents[" + std::to_string(i) + "]: " + e.what());
    }
  }
  if (config.profile_preset == "table") {
    if (config.profile_table.size() != n) {
      throw ConfigError("profile.table: expected one row per agent");
    }
    s.profile.plans = config.profile_table;
    for (std::size_t i = 0; i < n; ++i) {
      if (s.profile.plans[i].size() != s.assignment.tasks_of[i].size()) {
        throw ConfigError("profile.table[" + std::to_string(i) +
                          "]: expected one plan per task");
      }
    }
  } else {
    s.profile = StrategyProfile::Uniform(s.assignment, config.preset_plan);
  }
  s.trusted = config.trusted;
  s.beta = config.beta;
  s.seed = config.seed;
  s.references = config.assignment.references;
  if (config.assignment.block) s.block = config.assignment.block;
  s.scheme = config.assignment.scheme;
  if (s.references == ReferenceMode::kResampled && !config.assignment.permute) {
    throw ConfigError(
        "assignment.permute: resampled references need a random permutation");
  }
  ValidateScenario(s);
  return s;
}

}  // namespace peerlab
