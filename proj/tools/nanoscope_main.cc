//
// Copyright 2026 The Nanoscope Authors
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
//

// Command-line front end: generate, ingest, stats, fit, subgroups, simulate,
// risk and serve.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/cord.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "nanoscope/api.h"
#include "nanoscope/audience_index.h"
#include "nanoscope/campaign.h"
#include "nanoscope/estimator.h"
#include "nanoscope/parallel.h"
#include "nanoscope/population.h"
#include "nanoscope/population_io.h"
#include "nanoscope/risk.h"
#include "nanoscope/selection.h"
#include "nanoscope/serialize.h"

namespace fs = std::filesystem;

namespace nanoscope {
namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3, kInternal = 4 };

constexpr char kUsagePayload[] = "nanoscope/usage";

// Marks a flag-value problem so it exits as a usage error.
absl::Status Usage(absl::Status status) {
  if (!status.ok()) status.SetPayload(kUsagePayload, absl::Cord("1"));
  return status;
}

int ExitCodeFor(const absl::Status& status) {
  if (status.GetPayload(kUsagePayload).has_value()) return kUsage;
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kDataLoss:
    case absl::StatusCode::kAlreadyExists:
    case absl::StatusCode::kPermissionDenied:
      return kData;
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kOutOfRange:
      return kNumerical;
    default:
      return kInternal;
  }
}

int Fail(const absl::Status& status) {
  std::cerr << "nanoscope: " << status.message() << "\n";
  return ExitCodeFor(status);
}

void Log(std::string_view message) { std::cerr << message << "\n"; }

template <typename T>
absl::StatusOr<std::vector<T>> ParseList(const std::string& text, std::string_view what) {
  std::vector<T> values;
  for (absl::string_view item : absl::StrSplit(text, ',', absl::SkipEmpty())) {
    T value{};
    bool ok = false;
    if constexpr (std::is_floating_point_v<T>) {
      ok = absl::SimpleAtod(item, &value);
    } else {
      ok = absl::SimpleAtoi(item, &value);
    }
    if (!ok) {
      return Usage(absl::InvalidArgumentError(
          absl::StrCat("bad ", std::string(what), " value '", std::string(item), "'")));
    }
    values.push_back(value);
  }
  if (values.empty()) {
    return Usage(absl::InvalidArgumentError(absl::StrCat("empty ", std::string(what), " list")));
  }
  return values;
}

absl::Status EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return absl::PermissionDeniedError(absl::StrCat("cannot create ", dir.string()));
  return absl::OkStatus();
}

absl::Status WriteOut(const fs::path& dir, const std::string& name, std::string_view contents) {
  if (absl::Status s = EnsureDir(dir); !s.ok()) return s;
  return WriteFile(dir / name, contents);
}

absl::StatusOr<std::vector<SelectionStrategy>> Strategies(const std::string& names,
                                                          uint64_t seed) {
  std::vector<SelectionStrategy> out;
  for (absl::string_view name : absl::StrSplit(names, ',', absl::SkipEmpty())) {
    auto kind = ParseSelectionKind(std::string(name));
    if (!kind.ok()) return Usage(kind.status());
    out.push_back(SelectionStrategy{*kind, seed, static_cast<int>(kMaxQueryInterests)});
  }
  if (out.empty()) return Usage(absl::InvalidArgumentError("no strategy given"));
  return out;
}

struct Loaded {
  Population population;
  InvertedIndex index;
};

absl::StatusOr<Loaded> Load(const std::string& dir) {
  auto population = LoadPopulation(dir);
  if (!population.ok()) return population.status();
  Log(absl::StrCat("loaded ", population->users().size(), " users, ",
                   population->catalog().size(), " interests from ", dir));
  InvertedIndex index = InvertedIndex::Build(*population);
  return Loaded{*std::move(population), std::move(index)};
}

// Flags shared by fit and subgroups.
struct FitFlags {
  std::string population;
  std::string strategy = "lp";
  uint64_t seed = 0;
  uint64_t floor = kUncensoredFloor;
  std::string quantiles = "50,80,90,95";
  int bootstrap = kDefaultResamples;
  uint64_t bootstrap_seed = 0;
  int workers = 0;
  std::string out;
};

void AddFitFlags(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--population", f.population, "Population directory")->required();
  cmd->add_option("--strategy", f.strategy, "lp, random, or lp,random");
  cmd->add_option("--seed", f.seed, "Random-selection seed");
  cmd->add_option("--floor", f.floor, "Reporting floor (1, 20, 100, 1000)");
  cmd->add_option("--quantiles", f.quantiles, "Comma-separated quantiles Q = 100 P");
  cmd->add_option("--bootstrap", f.bootstrap, "Bootstrap resamples");
  cmd->add_option("--bootstrap-seed", f.bootstrap_seed, "Bootstrap seed");
  cmd->add_option("--workers", f.workers, "Worker threads (0 = NANOSCOPE_THREADS or all cores)");
  cmd->add_option("--out", f.out, "Output directory")->required();
}

struct FitInputs {
  std::vector<SelectionStrategy> strategies;
  std::vector<double> probabilities;
  CensorPolicy policy;
  BootstrapOptions bootstrap;
};

absl::StatusOr<FitInputs> ResolveFit(const FitFlags& f) {
  FitInputs in;
  auto strategies = Strategies(f.strategy, f.seed);
  if (!strategies.ok()) return strategies.status();
  in.strategies = *strategies;
  auto qs = ParseList<double>(f.quantiles, "quantile");
  if (!qs.ok()) return qs.status();
  for (double q : *qs) {
    if (!(q > 0.0 && q < 100.0)) {
      return Usage(
          absl::InvalidArgumentError(absl::StrCat("quantile must be in (0, 100), got ", q)));
    }
    in.probabilities.push_back(q / 100.0);
  }
  auto policy = CensorPolicy::Create(f.floor);
  if (!policy.ok()) return Usage(policy.status());
  in.policy = *policy;
  if (f.bootstrap < 1) return Usage(absl::InvalidArgumentError("--bootstrap must be at least 1"));
  in.bootstrap.n_resamples = f.bootstrap;
  in.bootstrap.seed = f.bootstrap_seed;
  in.bootstrap.workers = f.workers;
  return in;
}

absl::Status RunGenerate(const std::string& config_path, bool calibrated, uint64_t users,
                         uint64_t seed, const std::string& out) {
  GeneratorConfig config;
  if (calibrated) {
    config = CalibratedConfig(users, seed);
  } else {
    auto text = ReadFile(config_path);
    if (!text.ok()) return text.status();
    auto parsed = GeneratorConfig::FromText(*text);
    if (!parsed.ok()) return parsed.status();
    config = *parsed;
  }
  auto population = GeneratePopulation(config);
  if (!population.ok()) return population.status();
  if (absl::Status s = SavePopulation(*population, out); !s.ok()) return s;
  if (absl::Status s = WriteFile(fs::path(out) / "config.txt", config.ToText()); !s.ok()) return s;
  Log(absl::StrCat("generated ", population->users().size(), " users into ", out));
  return absl::OkStatus();
}

absl::Status RunIngest(const std::string& users, const std::string& catalog,
                       const std::string& out) {
  auto population = Ingest(users, catalog);
  if (!population.ok()) return population.status();
  if (absl::Status s = SavePopulation(*population, out); !s.ok()) return s;
  Log(absl::StrCat("ingested ", population->users().size(), " users into ", out));
  return absl::OkStatus();
}

absl::Status RunStats(const std::string& dir, const std::string& out) {
  auto population = LoadPopulation(dir);
  if (!population.ok()) return population.status();
  auto stats = SummaryStats(*population);
  if (!stats.ok()) return stats.status();
  const std::string text = Dump(ToJson(*stats));
  if (out.empty()) {
    std::cout << text;
    return absl::OkStatus();
  }
  return WriteOut(out, "stats.json", text);
}

absl::Status RunFit(const FitFlags& f) {
  auto in = ResolveFit(f);
  if (!in.ok()) return in.status();
  auto loaded = Load(f.population);
  if (!loaded.ok()) return loaded.status();
  ReportOptions options;
  options.bootstrap = in->bootstrap;
  auto report = BuildUniquenessReport(loaded->population, loaded->index, in->strategies,
                                      in->probabilities, in->policy, options);
  if (!report.ok()) return report.status();
  for (const std::string& w : report->warnings) Log(absl::StrCat("warning: ", w));
  if (absl::Status s = WriteOut(f.out, "report.json", Dump(ToJson(*report))); !s.ok()) return s;
  std::vector<UniquenessReport> one{*report};
  if (absl::Status s = WriteOut(f.out, "report.csv", ReportCsv(one)); !s.ok()) return s;
  for (const SelectionStrategy& strategy : in->strategies) {
    auto matrix = BuildMatrix(loaded->population, loaded->index, strategy, in->policy);
    if (!matrix.ok()) return matrix.status();
    for (double p : in->probabilities) {
      auto vector = ComputeQuantileVector(*matrix, 100.0 * p);
      if (!vector.ok()) return vector.status();
      const std::string name =
          absl::StrCat("quantiles_", strategy.Name(), "_q", FormatReal(100.0 * p), ".csv");
      if (absl::Status s = WriteOut(f.out, name, QuantileVectorCsv(*vector)); !s.ok()) return s;
    }
  }
  for (const UniquenessRow& row : report->rows) {
    Log(absl::StrCat(row.strategy, " P=", FormatReal(row.p), " N_P=",
                     FormatReal(row.estimate.fit.cutpoint), " CI=[", FormatReal(row.bootstrap.ci_low),
                     ", ", FormatReal(row.bootstrap.ci_high), "]"));
  }
  return absl::OkStatus();
}

absl::Status RunSubgroups(const FitFlags& f, const std::string& group, std::size_t min_users) {
  auto grouping = ParseGrouping(group);
  if (!grouping.ok()) return Usage(grouping.status());
  auto in = ResolveFit(f);
  if (!in.ok()) return in.status();
  auto loaded = Load(f.population);
  if (!loaded.ok()) return loaded.status();
  auto reports = BuildSubgroupReports(loaded->population, loaded->index, *grouping, min_users,
                                      in->strategies, in->probabilities, in->policy,
                                      in->bootstrap);
  if (!reports.ok()) return reports.status();
  for (const auto& [label, reason] : reports->skipped) {
    Log(absl::StrCat("skipped ", label, ": ", reason));
  }
  if (absl::Status s = WriteOut(f.out, "subgroups.json", Dump(ToJson(*reports))); !s.ok()) {
    return s;
  }
  return WriteOut(f.out, "subgroups.csv", ReportCsv(reports->reports));
}

struct SimulateFlags {
  std::string population;
  std::string strategy = "random";
  uint64_t seed = 0;
  std::optional<uint64_t> target_seed;
  std::string interests = "5,7,9,12,18,20,22";
  std::size_t targets = 1000;
  uint64_t floor = kCurrentFloor;
  std::optional<int> gate_max_interests;
  std::optional<uint64_t> gate_min_audience;
  std::string batch;
  int workers = 0;
  std::string out;
};

absl::Status RunSimulate(const SimulateFlags& f) {
  auto policy = CensorPolicy::Create(f.floor);
  if (!policy.ok()) return Usage(policy.status());
  PolicyGate gate{f.gate_max_interests, f.gate_min_audience};
  auto loaded = Load(f.population);
  if (!loaded.ok()) return loaded.status();

  if (!f.batch.empty()) {
    std::ifstream in(f.batch);
    if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", f.batch));
    auto batch = ReadBatchJsonl(in, f.batch);
    if (!batch.ok()) return batch.status();
    auto outcomes = RunBatch(loaded->index, loaded->population, *batch, *policy, gate, f.workers);
    if (!outcomes.ok()) return outcomes.status();
    return WriteOut(f.out, "campaigns.csv", OutcomesCsv(*outcomes));
  }

  auto kind = ParseSelectionKind(f.strategy);
  if (!kind.ok()) return Usage(kind.status());
  auto ns = ParseList<int>(f.interests, "interest count");
  if (!ns.ok()) return ns.status();
  SweepOptions options;
  options.strategy = SelectionStrategy{*kind, f.seed, static_cast<int>(kMaxQueryInterests)};
  options.n_values = *ns;
  options.n_targets = f.targets;
  options.target_seed = f.target_seed.value_or(f.seed);
  options.policy = *policy;
  options.gate = gate;
  options.workers = f.workers;
  auto sweep = RunSweep(loaded->index, loaded->population, options);
  if (!sweep.ok()) return sweep.status();
  for (std::size_t i = 1; i < sweep->rows.size(); ++i) {
    const SweepRow& a = sweep->rows[i - 1];
    const SweepRow& b = sweep->rows[i];
    if (b.n_interests > a.n_interests && b.success_rate + 0.03 < a.success_rate) {
      Log(absl::StrCat("warning: success rate drops from N=", a.n_interests, " to N=",
                       b.n_interests));
    }
  }
  for (const SweepRow& r : sweep->rows) {
    Log(absl::StrCat("N=", r.n_interests, " success_rate=", FormatReal(r.success_rate),
                     " accepted=", r.n_accepted, "/", r.n_targets));
  }
  if (absl::Status s = WriteOut(f.out, "simulation.json", Dump(ToJson(*sweep, options)));
      !s.ok()) {
    return s;
  }
  if (absl::Status s = WriteOut(f.out, "simulation.csv", SweepCsv(*sweep)); !s.ok()) return s;
  return WriteOut(f.out, "campaigns.csv", OutcomesCsv(sweep->campaigns));
}

struct RiskFlags {
  std::string population;
  std::string audience_table;
  UserId user = 0;
  std::string interests;
  std::string remove;
  std::string strategy = "lp";
  uint64_t seed = 0;
  uint64_t floor = kLegacyFloor;
  std::string thresholds = "10000,100000,1000000";
  std::string out;
};

absl::Status RunRisk(const RiskFlags& f) {
  auto limits = ParseList<uint64_t>(f.thresholds, "threshold");
  if (!limits.ok()) return limits.status();
  if (limits->size() != 3) {
    return Usage(absl::InvalidArgumentError("--thresholds needs 3 values"));
  }
  auto thresholds = RiskThresholds::Create((*limits)[0], (*limits)[1], (*limits)[2]);
  if (!thresholds.ok()) return Usage(thresholds.status());
  std::vector<InterestId> removals;
  if (!f.remove.empty()) {
    auto parsed = ParseList<InterestId>(f.remove, "interest id");
    if (!parsed.ok()) return parsed.status();
    removals = *parsed;
  }

  if (!f.audience_table.empty()) {
    if (f.interests.empty()) {
      return Usage(absl::InvalidArgumentError("--audience-table needs --interests"));
    }
    std::ifstream in(f.audience_table);
    if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", f.audience_table));
    auto table = AudienceTable::ReadCsv(in, f.audience_table);
    if (!table.ok()) return table.status();
    auto interests = ParseList<InterestId>(f.interests, "interest id");
    if (!interests.ok()) return interests.status();
    ProfileSession session(f.user, *interests);
    for (InterestId id : removals) {
      if (absl::Status s = session.Remove(id); !s.ok()) return s;
    }
    auto entries = RiskList(session, *table, *thresholds);
    if (!entries.ok()) return entries.status();
    return WriteOut(f.out, "risks.json", Dump(ToJson(std::span<const RiskEntry>(*entries))));
  }

  auto loaded = Load(f.population);
  if (!loaded.ok()) return loaded.status();
  const UserProfile* profile = loaded->population.FindUser(f.user);
  if (profile == nullptr) return absl::NotFoundError(absl::StrCat("unknown user ", f.user));
  ProfileSession session(f.user, profile->interests);
  for (InterestId id : removals) {
    if (absl::Status s = session.Remove(id); !s.ok()) return s;
  }
  auto entries =
      RiskList(session, AudienceTable::FromCatalog(loaded->population.catalog()), *thresholds);
  if (!entries.ok()) return entries.status();
  auto kind = ParseSelectionKind(f.strategy);
  if (!kind.ok()) return Usage(kind.status());
  auto policy = CensorPolicy::Create(f.floor);
  if (!policy.ok()) return Usage(policy.status());
  auto whatif = WhatIfUniqueness(session, loaded->population, loaded->index,
                                 SelectionStrategy{*kind, f.seed, static_cast<int>(kMaxQueryInterests)},
                                 *policy);
  if (!whatif.ok()) return whatif.status();
  if (absl::Status s =
          WriteOut(f.out, "risks.json", Dump(ToJson(std::span<const RiskEntry>(*entries))));
      !s.ok()) {
    return s;
  }
  return WriteOut(f.out, "whatif.json", Dump(ToJson(*whatif)));
}

struct ServeFlags {
  std::string population;
  std::string listen = "127.0.0.1:8080";
  std::string static_dir;
  std::vector<std::string> cors;
  uint64_t seed = 0;
  uint64_t floor = kLegacyFloor;
  int report_resamples = kDefaultResamples;
};

absl::Status RunServe(const ServeFlags& f) {
  const auto colon = f.listen.rfind(':');
  int port = 0;
  if (colon == std::string::npos || !absl::SimpleAtoi(f.listen.substr(colon + 1), &port) ||
      port <= 0 || port > 65535) {
    return Usage(absl::InvalidArgumentError(absl::StrCat("bad --listen '", f.listen, "'")));
  }
  auto loaded = Load(f.population);
  if (!loaded.ok()) return loaded.status();
  ApiOptions options;
  options.cors_origins = f.cors;
  options.random_seed = f.seed;
  options.default_floor = f.floor;
  options.report_resamples = f.report_resamples;
  ApiService service(loaded->population, loaded->index, options);
  ServeOptions serve;
  serve.host = f.listen.substr(0, colon);
  serve.port = port;
  serve.static_dir = f.static_dir;
  Log(absl::StrCat("listening on ", f.listen));
  return Serve(service, serve);
}

int Main(int argc, char** argv) {
  CLI::App app{"Re-identification analytics over interest-based audiences"};
  app.require_subcommand(1);

  std::string config, out, users_file, catalog_file, population;
  bool calibrated = false;
  uint64_t n_users = 100000, seed = 0;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic population");
  auto* config_opt = generate->add_option("--config", config, "Generator config file");
  generate->add_flag("--calibrated", calibrated, "Use the built-in calibrated profile")
      ->excludes(config_opt);
  generate->add_option("--users", n_users, "User count for --calibrated");
  generate->add_option("--seed", seed, "Seed for --calibrated");
  generate->add_option("--out", out, "Output directory")->required();

  auto* ingest = app.add_subcommand("ingest", "Ingest users and catalog files");
  ingest->add_option("--users", users_file, "Users file (JSON lines)")->required();
  ingest->add_option("--catalog", catalog_file, "Catalog file (CSV)")->required();
  ingest->add_option("--out", out, "Output directory")->required();

  auto* stats = app.add_subcommand("stats", "Summary statistics of a population");
  stats->add_option("--population", population, "Population directory")->required();
  stats->add_option("--out", out, "Output directory (default: standard output)");

  FitFlags fit_flags;
  auto* fit = app.add_subcommand("fit", "Estimate N_P with bootstrap confidence intervals");
  AddFitFlags(fit, fit_flags);

  FitFlags sub_flags;
  sub_flags.quantiles = "90";
  std::string group = "gender";
  std::size_t min_users = kDefaultMinGroupUsers;
  auto* subgroups = app.add_subcommand("subgroups", "N_P per demographic group");
  AddFitFlags(subgroups, sub_flags);
  subgroups->add_option("--group", group, "gender, age or country")->required();
  subgroups->add_option("--min-users", min_users, "Minimum users per group");

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate nanotargeting campaigns");
  simulate->add_option("--population", sim.population, "Population directory")->required();
  simulate->add_option("--strategy", sim.strategy, "lp or random");
  simulate->add_option("--seed", sim.seed, "Selection seed");
  simulate->add_option("--target-seed", sim.target_seed, "Target sampling seed (default: --seed)");
  simulate->add_option("--interests", sim.interests, "Comma-separated interest counts");
  simulate->add_option("--targets", sim.targets, "Targets per interest count");
  simulate->add_option("--floor", sim.floor, "Reporting floor for the advertiser view");
  simulate->add_option("--gate-max-interests", sim.gate_max_interests, "Reject above N interests");
  simulate->add_option("--gate-min-audience", sim.gate_min_audience,
                       "Reject audiences below M active users");
  simulate->add_option("--batch", sim.batch, "Campaign batch file (JSON lines)");
  simulate->add_option("--workers", sim.workers, "Worker threads");
  simulate->add_option("--out", sim.out, "Output directory")->required();

  RiskFlags risk_flags;
  auto* risk = app.add_subcommand("risk", "Risk list and what-if uniqueness for one user");
  auto* risk_pop = risk->add_option("--population", risk_flags.population, "Population directory");
  auto* risk_table =
      risk->add_option("--audience-table", risk_flags.audience_table,
                       "CSV of interest_id,audience_size");
  risk_pop->excludes(risk_table);
  risk->add_option("--user", risk_flags.user, "User id")->required();
  risk->add_option("--interests", risk_flags.interests, "Interest ids (audience-table mode)");
  risk->add_option("--remove", risk_flags.remove, "Interest ids to mark inactive");
  risk->add_option("--strategy", risk_flags.strategy, "What-if strategy: lp or random");
  risk->add_option("--seed", risk_flags.seed, "What-if random seed");
  risk->add_option("--floor", risk_flags.floor, "What-if reporting floor");
  risk->add_option("--thresholds", risk_flags.thresholds, "red_max,orange_max,green_min");
  risk->add_option("--out", risk_flags.out, "Output directory")->required();

  ServeFlags serve_flags;
  auto* serve = app.add_subcommand("serve", "Serve the JSON API");
  serve->add_option("--population", serve_flags.population, "Population directory")->required();
  serve->add_option("--listen", serve_flags.listen, "host:port");
  serve->add_option("--static", serve_flags.static_dir, "Directory of static web files");
  serve->add_option("--cors-origin", serve_flags.cors, "Allowed CORS origin (repeatable)");
  serve->add_option("--seed", serve_flags.seed, "Default random-selection seed");
  serve->add_option("--floor", serve_flags.floor, "Default what-if floor");
  serve->add_option("--report-resamples", serve_flags.report_resamples,
                    "Bootstrap resamples for /api/report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  absl::Status status;
  try {
    if (*generate) {
      if (!calibrated && config.empty()) {
        std::cerr << "nanoscope generate: --config or --calibrated is required\n";
        return kUsage;
      }
      status = RunGenerate(config, calibrated, n_users, seed, out);
    } else if (*ingest) {
      status = RunIngest(users_file, catalog_file, out);
    } else if (*stats) {
      status = RunStats(population, out);
    } else if (*fit) {
      status = RunFit(fit_flags);
    } else if (*subgroups) {
      status = RunSubgroups(sub_flags, group, min_users);
    } else if (*simulate) {
      status = RunSimulate(sim);
    } else if (*risk) {
      if (risk_flags.population.empty() && risk_flags.audience_table.empty()) {
        std::cerr << "nanoscope risk: --population or --audience-table is required\n";
        return kUsage;
      }
      status = RunRisk(risk_flags);
    } else if (*serve) {
      status = RunServe(serve_flags);
    }
  } catch (const std::exception& e) {
    std::cerr << "nanoscope: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return status.ok() ? kOk : Fail(status);
}

}  // namespace
}  // namespace nanoscope

int main(int argc, char** argv) { return nanoscope::Main(argc, argv); }
