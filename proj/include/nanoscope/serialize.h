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

#ifndef NANOSCOPE_SERIALIZE_H_
#define NANOSCOPE_SERIALIZE_H_

#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "nanoscope/campaign.h"
#include "nanoscope/estimator.h"
#include "nanoscope/population.h"
#include "nanoscope/risk.h"

namespace nanoscope {

using Json = nlohmann::ordered_json;

// Shortest round-trip text for a double; "nan" and "inf" spelled out.
std::string FormatReal(double value);

Json ToJson(const StatsReport& stats);
Json ToJson(const UniquenessReport& report);
Json ToJson(const SubgroupReports& reports);
Json ToJson(const QuantileVector& vector);
Json ToJson(const RiskEntry& entry);
Json ToJson(std::span<const RiskEntry> entries);
Json ToJson(const WhatIfReport& report);
Json SessionSummary(const ProfileSession& session);
Json ToJson(const SweepResult& sweep, const SweepOptions& options);

// One row per (strategy, P).
std::string ReportCsv(std::span<const UniquenessReport> reports);
std::string QuantileVectorCsv(const QuantileVector& vector);
std::string SweepCsv(const SweepResult& sweep);

// Pretty-printed with a trailing newline.
std::string Dump(const Json& json);

}  // namespace nanoscope

#endif  // NANOSCOPE_SERIALIZE_H_
