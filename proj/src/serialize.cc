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

#include "nanoscope/serialize.h"

#include <charconv>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace nanoscope {
namespace {

Json Percentiles(const PercentileSummary& s) {
  Json values = Json::object();
  for (const auto& [p, v] : s.values) values[absl::StrCat("p", p)] = v;
  return Json{{"count", s.count}, {"min", s.min}, {"max", s.max}, {"percentiles", values}};
}

Json Counts(const std::map<std::string, std::size_t>& counts) {
  Json j = Json::object();
  for (const auto& [k, v] : counts) j[k] = v;
  return j;
}

Json RowJson(const UniquenessRow& row) {
  const FitResult& fit = row.estimate.fit;
  return Json{{"strategy", row.strategy},
              {"p", row.p},
              {"q", row.q},
              {"a", fit.a},
              {"b", fit.b},
              {"r_squared", fit.r_squared},
              {"cutpoint", fit.cutpoint},
              {"ci_low", row.bootstrap.ci_low},
              {"ci_high", row.bootstrap.ci_high},
              {"n_points_used", fit.n_points_used},
              {"n_resamples", row.bootstrap.n_resamples},
              {"n_failed", row.bootstrap.n_failed},
              {"bootstrap_seed", row.bootstrap.seed},
              {"ci_brackets_point", row.bootstrap.brackets_point},
              {"observed", row.estimate.observed},
              {"actionable_interests", row.actionable_interests},
              {"actionable", row.actionable}};
}

}  // namespace

std::string FormatReal(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

Json ToJson(const StatsReport& stats) {
  return Json{{"n_users", stats.n_users},
              {"n_interests", stats.n_interests},
              {"n_held_interests", stats.n_held_interests},
              {"total_occurrences", stats.total_occurrences},
              {"interests_per_user", Percentiles(stats.interests_per_user)},
              {"interest_audience", Percentiles(stats.interest_audience)},
              {"gender", Counts(stats.gender)},
              {"age_band", Counts(stats.age_band)},
              {"country", Counts(stats.country)}};
}

Json ToJson(const UniquenessReport& report) {
  Json rows = Json::array();
  for (const UniquenessRow& row : report.rows) rows.push_back(RowJson(row));
  return Json{{"format", "nanoscope-report/1"},
              {"subgroup", report.subgroup},
              {"n_users", report.n_users},
              {"floor", report.policy.floor},
              {"rows", rows},
              {"warnings", report.warnings}};
}

Json ToJson(const SubgroupReports& reports) {
  Json groups = Json::array();
  for (const UniquenessReport& r : reports.reports) groups.push_back(ToJson(r));
  Json skipped = Json::array();
  for (const auto& [label, reason] : reports.skipped) {
    skipped.push_back(Json{{"subgroup", label}, {"reason", reason}});
  }
  return Json{{"format", "nanoscope-subgroups/1"}, {"reports", groups}, {"skipped", skipped}};
}

Json ToJson(const QuantileVector& vector) {
  return Json{{"q", vector.q}, {"values", vector.values}};
}

Json ToJson(const RiskEntry& e) {
  return Json{{"interest_id", e.interest_id},
              {"name", e.name},
              {"audience", e.audience},
              {"level", RiskLevelName(e.level)},
              {"status", e.active ? "active" : "inactive"}};
}

Json ToJson(std::span<const RiskEntry> entries) {
  Json j = Json::array();
  for (const RiskEntry& e : entries) j.push_back(ToJson(e));
  return j;
}

Json ToJson(const WhatIfReport& r) {
  return Json{{"user_id", r.user_id},
              {"version", r.version},
              {"strategy", r.strategy},
              {"floor", r.floor},
              {"active_count", r.active_count},
              {"ordered_interests", r.ordered_interests},
              {"prefix_sizes", r.prefix_sizes},
              {"unique_at", r.unique_at ? Json(*r.unique_at) : Json(nullptr)},
              {"censored_sizes", r.censored_sizes}};
}

Json SessionSummary(const ProfileSession& session) {
  std::vector<InterestId> removed(session.removed().begin(), session.removed().end());
  return Json{{"user_id", session.user_id()},
              {"version", session.version()},
              {"interest_count", session.original().size()},
              {"active_count", session.original().size() - removed.size()},
              {"removed", removed}};
}

Json ToJson(const SweepResult& sweep, const SweepOptions& options) {
  Json rows = Json::array();
  for (const SweepRow& r : sweep.rows) {
    rows.push_back(Json{{"n_interests", r.n_interests},
                        {"n_targets", r.n_targets},
                        {"n_accepted", r.n_accepted},
                        {"n_success", r.n_success},
                        {"n_shortened", r.n_shortened},
                        {"success_rate", r.success_rate}});
  }
  Json gate = Json::object();
  gate["max_interests"] = options.gate.max_interests ? Json(*options.gate.max_interests) : Json(nullptr);
  gate["min_active_audience"] =
      options.gate.min_active_audience ? Json(*options.gate.min_active_audience) : Json(nullptr);
  return Json{{"format", "nanoscope-simulation/1"},
              {"strategy", options.strategy.Name()},
              {"strategy_seed", options.strategy.seed},
              {"target_seed", options.target_seed},
              {"floor", options.policy.floor},
              {"gate", gate},
              {"rows", rows}};
}

std::string ReportCsv(std::span<const UniquenessReport> reports) {
  std::string csv =
      "subgroup,n_users,floor,strategy,p,q,a,b,r_squared,cutpoint,ci_low,ci_high,"
      "n_points_used,n_resamples,n_failed,observed,actionable_interests,actionable\n";
  for (const UniquenessReport& report : reports) {
    for (const UniquenessRow& row : report.rows) {
      const FitResult& fit = row.estimate.fit;
      absl::StrAppend(&csv, report.subgroup, ",", report.n_users, ",", report.policy.floor, ",",
                      row.strategy, ",", FormatReal(row.p), ",", FormatReal(row.q), ",",
                      FormatReal(fit.a), ",", FormatReal(fit.b), ",", FormatReal(fit.r_squared),
                      ",", FormatReal(fit.cutpoint), ",", FormatReal(row.bootstrap.ci_low), ",",
                      FormatReal(row.bootstrap.ci_high), ",", fit.n_points_used, ",",
                      row.bootstrap.n_resamples, ",", row.bootstrap.n_failed, ",",
                      row.estimate.observed ? "true" : "false", ",", row.actionable_interests,
                      ",", row.actionable ? "true" : "false", "\n");
    }
  }
  return csv;
}

std::string QuantileVectorCsv(const QuantileVector& vector) {
  std::string csv = "n,as\n";
  for (std::size_t i = 0; i < vector.values.size(); ++i) {
    absl::StrAppend(&csv, i + 1, ",", vector.values[i], "\n");
  }
  return csv;
}

std::string SweepCsv(const SweepResult& sweep) {
  std::string csv = "n_interests,n_targets,n_accepted,n_success,n_shortened,success_rate\n";
  for (const SweepRow& r : sweep.rows) {
    absl::StrAppend(&csv, r.n_interests, ",", r.n_targets, ",", r.n_accepted, ",", r.n_success,
                    ",", r.n_shortened, ",", FormatReal(r.success_rate), "\n");
  }
  return csv;
}

std::string Dump(const Json& json) { return json.dump(2) + "\n"; }

}  // namespace nanoscope
