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

#include "peerlab/cli.h"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "peerlab/analytic.h"
#include "peerlab/assignment.h"
#include "peerlab/config.h"
#include "peerlab/equilibrium.h"
#include "peerlab/errors.h"
#include "peerlab/simulation.h"
#include "peerlab/table.h"

namespace peerlab {
namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::string out_dir;
  std::string format;
};

// Where tables go: one file per table under --out, or the output stream.
class Sink {
 public:
  Sink(const ExperimentConfig& c, std::ostream& out)
      : config_(c), out_(out) {}

  void Write(const Table& table,
             std::vector<std::pair<std::string, std::string>> meta = {}) {
    char hash[17];
    std::snprintf(hash, sizeof(hash), "%016" PRIx64, ConfigHash(config_));
    meta.insert(meta.begin(), {"seed", std::to_string(config_.seed)});
    meta.insert(meta.begin(), {"config_hash", hash});
    std::ostringstream comment;
    for (std::size_t k = 0; k < meta.size(); ++k) {
      comment << (k ? " " : "") << meta[k].first << "=" << meta[k].second;
    }
    const bool json = config_.format == "json";
    if (config_.output_dir.empty()) {
      if (written_++) out_ << '\n';
      Emit(out_, table, comment.str(), meta, json);
      return;
    }
    std::filesystem::create_directories(config_.output_dir);
    const auto path = std::filesystem::path(config_.output_dir) /
                      (table.name + (json ? ".json" : ".csv"));
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    Emit(file, table, comment.str(), meta, json);
  }

 private:
  static void Emit(std::ostream& os, const Table& table,
                   const std::string& comment,
                   const std::vector<std::pair<std::string, std::string>>& meta,
                   bool json) {
    if (json) {
      WriteJson(os, table, meta);
    } else {
      WriteCsv(os, table, comment);
    }
  }

  const ExperimentConfig& config_;
  std::ostream& out_;
  int written_ = 0;
};

std::string JoinTasks(const std::vector<TaskId>& tasks) {
  std::string s;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    s += (k ? ";" : "") + std::to_string(ToInt(tasks[k]));
  }
  return s;
}

int CmdAssign(const ExperimentConfig& c, Sink& sink, std::ostream& err) {
  const Assignment a = BuildAssignment(c);
  Table table{"assignment",
              {"agent", "block", "task", "ref_rater", "s_own", "s_ref"},
              {}};
  for (std::size_t i = 0; i < a.tasks_of.size(); ++i) {
    const AgentId agent{static_cast<int>(i)};
    const std::int64_t block = a.layout ? a.layout->BlockOf(agent) : -1;
    for (std::size_t k = 0; k < a.tasks_of[i].size(); ++k) {
      table.AddRow({static_cast<std::int64_t>(i), block,
                    static_cast<std::int64_t>(ToInt(a.tasks_of[i][k])),
                    static_cast<std::int64_t>(ToInt(a.ref_rater[i][k])),
                    JoinTasks(a.stat_sets[i][k].own),
                    JoinTasks(a.stat_sets[i][k].ref)});
    }
  }
  sink.Write(table);
  const ValidationReport report = ValidateAssignment(a, a.scheme);
  Table issues{"validation", {"kind", "agent", "task", "message"}, {}};
  for (const auto& v : report.violations) {
    issues.AddRow({ViolationName(v.kind), static_cast<std::int64_t>(v.agent),
                   static_cast<std::int64_t>(v.task), v.message});
  }
  sink.Write(issues, {{"violations", std::to_string(report.violations.size())}});
  if (!report.ok()) {
    err << "assignment has " << report.violations.size()
        << " violation(s); first: " << report.violations.front().message
        << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

int CmdSimulate(const ExperimentConfig& c, Sink& sink) {
  const Scenario s = BuildScenario(c);
  std::vector<McEstimate> est;
  std::string estimator = "mc";
  if (c.estimator == Estimator::kAnalytic) {
    estimator = "analytic";
    for (double v : ExactExpectedRewards(s)) est.push_back({v, 0.0, 0});
  } else if (c.estimator == Estimator::kEnumerate) {
    estimator = "enumerate";
    for (double v : EnumerateExpectedRewards(s, c.budget)) {
      est.push_back({v, 0.0, 0});
    }
  } else {
    est = McExpectedRewards(s, c.trials, c.threads);
  }
  Table table{"rewards",
              {"agent", "trials", "mean_R", "stderr", "beta", "payment"},
              {}};
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double shift = c.shift == PaymentShift::kPlusOnePerTask
                             ? static_cast<double>(s.assignment.tasks_of[i].size())
                             : 0.0;
    table.AddRow({static_cast<std::int64_t>(i), est[i].trials, est[i].mean,
                  est[i].std_error, s.beta, s.beta * (est[i].mean + shift)});
  }
  sink.Write(table, {{"estimator", estimator}});
  if (c.dump_trials > 0) {
    Table dump{"trials",
               {"trial", "task", "truth", "agent", "observation", "report"},
               {}};
    for (const auto& r : DumpTrials(s, c.dump_trials)) {
      dump.AddRow({r.trial, static_cast<std::int64_t>(r.task),
                   static_cast<std::int64_t>(r.truth),
                   static_cast<std::int64_t>(r.agent),
                   static_cast<std::int64_t>(r.observation),
                   static_cast<std::int64_t>(r.report)});
    }
    sink.Write(dump);
  }
  return kExitOk;
}

int CmdEquilibrium(const ExperimentConfig& c, Sink& sink) {
  if (c.grid_scan) {
    const auto rows =
        SymmetricGridScan(c.prior, c.grid_scan->proficiency, c.grid_scan->step);
    Table table{"grid_scan", {"rank", "effort", "x", "y", "value"}, {}};
    for (std::size_t k = 0; k < rows.size(); ++k) {
      table.AddRow({static_cast<std::int64_t>(k + 1),
                    static_cast<std::int64_t>(rows[k].effort == Effort::kFull),
                    rows[k].x, rows[k].y, rows[k].value});
    }
    sink.Write(table);
    return kExitOk;
  }
  const Scenario s = BuildScenario(c);
  NashOptions options = c.nash;
  options.estimator = c.estimator;
  options.trials = c.trials;
  options.budget = c.budget;
  options.threads = c.threads;
  const EquilibriumVerdict v = VerifyNash(s, options);
  Table table{"deviations",
              {"agent", "scope", "slot", "task", "candidate", "estimator",
               "baseline", "value", "gain", "stderr", "significance",
               "status"},
              {}};
  for (const auto& d : v.deviations) {
    table.AddRow({static_cast<std::int64_t>(d.agent), d.Scope(),
                  static_cast<std::int64_t>(d.slot.value_or(-1)),
                  static_cast<std::int64_t>(d.task), Describe(d.deviation.plan),
                  EstimatorName(d.estimator), d.baseline_value,
                  d.candidate_value, d.gain, d.std_error, d.significance,
                  StatusName(d.status)});
  }
  const std::string verdict = v.is_nash ? "NASH" : "NOT-NASH";
  sink.Write(table, {{"verdict", verdict}});
  Table summary{"verdict",
                {"profile", "verdict", "worst_agent", "worst_scope",
                 "worst_candidate", "worst_gain", "tolerance", "candidates"},
                {}};
  summary.AddRow({v.profile, verdict, static_cast<std::int64_t>(v.worst.agent),
                  v.worst.Scope(), Describe(v.worst.deviation.plan),
                  v.worst.gain, v.tolerance, v.candidate_set});
  sink.Write(summary);
  return kExitOk;
}

int CmdAnalytic(const ExperimentConfig& c, Sink& sink) {
  const AnalyticConfig& a = c.analytic;
  double p = 0.0;
  if (a.p) {
    p = *a.p;
  } else if (!c.proficiency.empty()) {
    p = c.proficiency.front();
  } else {
    throw ConfigError("analytic.p: required when agents.proficiency is absent");
  }
  const double q = a.q.value_or(p);
  int d = 1;
  if (a.d_tasks) {
    d = *a.d_tasks;
  } else if (c.assignment.block) {
    d = c.assignment.block->d_tasks;
  }
  const HomogeneousScenario hs{d, p, c.prior};
  Table table{"analytic", {"quantity", "value"}, {}};
  table.AddRow({std::string("signal_prob_p"), SignalProb(p, c.prior)});
  table.AddRow({std::string("f_alpha"), FAlpha(p, q, a.alpha, c.prior)});
  table.AddRow({std::string("f1"), F1(p, q, c.prior)});
  table.AddRow({std::string("truth"),
                ExpectedRewardHomogeneous(hs, HomogeneousPlay::kTruth)});
  table.AddRow({std::string("invert"),
                ExpectedRewardHomogeneous(hs, HomogeneousPlay::kInvert)});
  table.AddRow({std::string("random"),
                ExpectedRewardHomogeneous(hs, HomogeneousPlay::kRandom, a.r)});
  table.AddRow({std::string("trusted_gain_per_task"),
                TrustedDeviationGain(c.trusted.mass, c.trusted.proficiency, p,
                                     c.prior)});
  sink.Write(table, {{"p", FormatDouble(p)},
                     {"q", FormatDouble(q)},
                     {"D", std::to_string(d)}});
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"peer-prediction mechanism laboratory", "peerlab"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&flags](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON experiment configuration")
        ->required();
    sub->add_option("--seed", flags.seed, "override the configured seed");
    sub->add_option("--trials", flags.trials, "override the trial count");
    sub->add_option("--out", flags.out_dir, "write tables into this directory");
    sub->add_option("--format", flags.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };
  CLI::App* assign = app.add_subcommand("assign", "build and validate an assignment");
  CLI::App* simulate = app.add_subcommand("simulate", "estimate expected rewards");
  CLI::App* equilibrium =
      app.add_subcommand("equilibrium", "check deviations or scan symmetric profiles");
  CLI::App* analytic = app.add_subcommand("analytic", "print closed-form values");
  for (CLI::App* sub : {assign, simulate, equilibrium, analytic}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    ExperimentConfig config = LoadConfig(flags.config);
    if (flags.seed) config.seed = *flags.seed;
    if (flags.trials) {
      if (*flags.trials < 1) throw ConfigError("--trials must be at least 1");
      config.trials = *flags.trials;
    }
    if (!flags.out_dir.empty()) config.output_dir = flags.out_dir;
    if (!flags.format.empty()) config.format = flags.format;
    Sink sink(config, out);
    if (assign->parsed()) return CmdAssign(config, sink, err);
    if (simulate->parsed()) return CmdSimulate(config, sink);
    if (equilibrium->parsed()) return CmdEquilibrium(config, sink);
    return CmdAnalytic(config, sink);
  } catch (const BudgetExceeded& e) {
    err << "refused: " << e.what() << '\n';
    return kExitBudget;
  } catch (const ConstructionError& e) {
    err << "invalid assignment: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InputError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace peerlab
