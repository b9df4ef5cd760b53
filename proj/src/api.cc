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

#include "nanoscope/api.h"

#include <algorithm>
#include <utility>

#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "nanoscope/estimator.h"
#include "nanoscope/selection.h"

namespace nanoscope {
namespace {

using Query = std::multimap<std::string, std::string>;

std::optional<std::string> Param(const Query& query, const std::string& key) {
  auto it = query.find(key);
  if (it == query.end()) return std::nullopt;
  return it->second;
}

absl::StatusOr<uint64_t> ParseId(std::string_view text, std::string_view what) {
  uint64_t value = 0;
  if (!absl::SimpleAtoi(absl::string_view(text.data(), text.size()), &value)) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad ", std::string(what), " '", std::string(text), "'"));
  }
  return value;
}

absl::StatusOr<CensorPolicy> FloorParam(const Query& query, uint64_t fallback) {
  auto text = Param(query, "floor");
  if (!text) return CensorPolicy::Create(fallback);
  auto floor = ParseId(*text, "floor");
  if (!floor.ok()) return floor.status();
  return CensorPolicy::Create(*floor);
}

absl::StatusOr<SelectionStrategy> StrategyParam(const std::string& name, const Query& query,
                                                uint64_t default_seed) {
  auto kind = ParseSelectionKind(name);
  if (!kind.ok()) return kind.status();
  uint64_t seed = default_seed;
  if (auto text = Param(query, "seed")) {
    auto parsed = ParseId(*text, "seed");
    if (!parsed.ok()) return parsed.status();
    seed = *parsed;
  }
  return SelectionStrategy::Create(*kind, seed);
}

}  // namespace

ApiResponse ErrorResponse(int http_status, std::string_view code, std::string_view message) {
  return ApiResponse{http_status,
                     Json{{"error", Json{{"status", http_status},
                                         {"code", std::string(code)},
                                         {"message", std::string(message)}}}}};
}

ApiResponse ErrorResponse(const absl::Status& status) {
  const std::string message(status.message());
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
      return ErrorResponse(400, "invalid_argument", message);
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kOutOfRange:
      return ErrorResponse(400, "failed_precondition", message);
    case absl::StatusCode::kNotFound:
      return ErrorResponse(404, "not_found", message);
    case absl::StatusCode::kAborted:
      return ErrorResponse(409, "stale_version", message);
    default:
      return ErrorResponse(500, "internal", message);
  }
}

ApiService::ApiService(const Population& population, const InvertedIndex& index,
                       ApiOptions options)
    : population_(population),
      index_(index),
      options_(std::move(options)),
      table_(AudienceTable::FromCatalog(population.catalog())),
      digest_(population.ContentDigest()) {}

bool ApiService::OriginAllowed(std::string_view origin) const {
  if (origin.empty()) return false;
  if (!options_.cors_origins.empty()) {
    return std::any_of(options_.cors_origins.begin(), options_.cors_origins.end(),
                       [&](const std::string& o) { return o == "*" || o == origin; });
  }
  for (std::string_view scheme : {"http://", "https://"}) {
    if (!origin.starts_with(scheme)) continue;
    std::string_view host = origin.substr(scheme.size());
    host = host.starts_with('[') ? host.substr(0, host.find(']') + 1)
                                 : host.substr(0, host.find(':'));
    return host == "localhost" || host == "127.0.0.1" || host == "[::1]";
  }
  return false;
}

absl::StatusOr<ApiService::Slot*> ApiService::SlotFor(UserId user) {
  std::lock_guard<std::mutex> lock(sessions_mu_);
  auto it = sessions_.find(user);
  if (it != sessions_.end()) return it->second.get();
  const UserProfile* profile = population_.FindUser(user);
  if (profile == nullptr) return absl::NotFoundError(absl::StrCat("unknown user ", user));
  auto slot = std::make_unique<Slot>(ProfileSession(user, profile->interests));
  Slot* raw = slot.get();
  sessions_.emplace(user, std::move(slot));
  return raw;
}

ApiResponse ApiService::Risks(UserId user) {
  auto slot = SlotFor(user);
  if (!slot.ok()) return ErrorResponse(slot.status());
  std::lock_guard<std::mutex> lock((*slot)->mu);
  auto entries = RiskList((*slot)->session, table_, options_.thresholds);
  if (!entries.ok()) return ErrorResponse(entries.status());
  return ApiResponse{200, ToJson(std::span<const RiskEntry>(*entries))};
}

ApiResponse ApiService::Session(UserId user) {
  auto slot = SlotFor(user);
  if (!slot.ok()) return ErrorResponse(slot.status());
  std::lock_guard<std::mutex> lock((*slot)->mu);
  return ApiResponse{200, SessionSummary((*slot)->session)};
}

ApiResponse ApiService::Mutate(UserId user, InterestId interest, bool remove,
                               std::string_view body) {
  Json request = Json::parse(body, nullptr, false);
  if (request.is_discarded() || !request.is_object() || !request.contains("version") ||
      !request["version"].is_number_unsigned()) {
    return ErrorResponse(400, "invalid_argument",
                         "request body must be a JSON object with a non-negative integer version");
  }
  const uint64_t version = request["version"].get<uint64_t>();
  auto slot = SlotFor(user);
  if (!slot.ok()) return ErrorResponse(slot.status());
  std::lock_guard<std::mutex> lock((*slot)->mu);
  ProfileSession& session = (*slot)->session;
  const auto& original = session.original();
  if (!std::binary_search(original.begin(), original.end(), interest)) {
    return ErrorResponse(404, "not_found",
                         absl::StrCat("interest ", interest, " does not belong to user ", user));
  }
  if (version != session.version()) {
    ApiResponse stale = ErrorResponse(
        409, "stale_version",
        absl::StrCat("session version is ", session.version(), ", request had ", version));
    stale.body["error"]["current_version"] = session.version();
    return stale;
  }
  absl::Status s = remove ? session.Remove(interest) : session.Restore(interest);
  if (!s.ok()) return ErrorResponse(s);
  return ApiResponse{200, SessionSummary(session)};
}

ApiResponse ApiService::WhatIf(UserId user, const Query& query) {
  auto strategy = StrategyParam(Param(query, "strategy").value_or("lp"), query,
                                options_.random_seed);
  if (!strategy.ok()) return ErrorResponse(strategy.status());
  auto policy = FloorParam(query, options_.default_floor);
  if (!policy.ok()) return ErrorResponse(policy.status());
  auto slot = SlotFor(user);
  if (!slot.ok()) return ErrorResponse(slot.status());
  std::lock_guard<std::mutex> lock((*slot)->mu);
  auto report = WhatIfUniqueness((*slot)->session, population_, index_, *strategy, *policy);
  if (!report.ok()) return ErrorResponse(report.status());
  return ApiResponse{200, ToJson(*report)};
}

ApiResponse ApiService::Report(const Query& query) {
  std::vector<SelectionStrategy> strategies;
  for (absl::string_view name :
       absl::StrSplit(Param(query, "strategy").value_or("lp,random"), ',', absl::SkipEmpty())) {
    auto strategy = StrategyParam(std::string(name), query, options_.random_seed);
    if (!strategy.ok()) return ErrorResponse(strategy.status());
    strategies.push_back(*strategy);
  }
  std::vector<double> probabilities;
  if (auto text = Param(query, "p")) {
    for (absl::string_view item : absl::StrSplit(*text, ',', absl::SkipEmpty())) {
      double p = 0;
      if (!absl::SimpleAtod(item, &p)) {
        return ErrorResponse(400, "invalid_argument",
                             absl::StrCat("bad probability '", std::string(item), "'"));
      }
      probabilities.push_back(p);
    }
  } else {
    probabilities.assign(std::begin(kDefaultProbabilities), std::end(kDefaultProbabilities));
  }
  if (strategies.empty() || probabilities.empty()) {
    return ErrorResponse(400, "invalid_argument", "strategy and p must not be empty");
  }
  auto policy = FloorParam(query, kUncensoredFloor);
  if (!policy.ok()) return ErrorResponse(policy.status());

  std::vector<std::string> key_parts;
  for (const auto& s : strategies) key_parts.push_back(absl::StrCat(s.Name(), ":", s.seed));
  for (double p : probabilities) key_parts.push_back(FormatReal(p));
  key_parts.push_back(absl::StrCat("floor:", policy->floor));
  const std::string key = absl::StrJoin(key_parts, "|");

  std::lock_guard<std::mutex> lock(report_mu_);
  if (auto it = report_cache_.find(key); it != report_cache_.end()) {
    return ApiResponse{200, it->second};
  }
  ReportOptions options;
  options.bootstrap.n_resamples = options_.report_resamples;
  options.bootstrap.seed = options_.report_seed;
  auto report =
      BuildUniquenessReport(population_, index_, strategies, probabilities, *policy, options);
  if (!report.ok()) return ErrorResponse(report.status());
  Json json = ToJson(*report);
  report_cache_.emplace(key, json);
  return ApiResponse{200, std::move(json)};
}

ApiResponse ApiService::Handle(std::string_view method, std::string_view path,
                               const Query& query, std::string_view body) {
  std::vector<std::string> parts =
      absl::StrSplit(absl::string_view(path.data(), path.size()), '/', absl::SkipEmpty());
  if (parts.empty() || parts[0] != "api") {
    return ErrorResponse(404, "not_found", absl::StrCat("no route for ", std::string(path)));
  }
  std::size_t i = 1;
  if (i < parts.size() && parts[i] == "v1") ++i;
  std::vector<std::string> rest(parts.begin() + static_cast<std::ptrdiff_t>(i), parts.end());
  const bool get = method == "GET";
  const bool post = method == "POST";

  if (rest.size() == 1 && rest[0] == "health" && get) {
    return ApiResponse{200, Json{{"status", "ok"},
                                 {"population_digest", digest_},
                                 {"n_users", population_.users().size()},
                                 {"n_interests", population_.catalog().size()}}};
  }
  if (rest.size() == 1 && rest[0] == "report" && get) return Report(query);
  if (rest.size() >= 3 && rest[0] == "users") {
    auto user = ParseId(rest[1], "user id");
    if (!user.ok()) return ErrorResponse(user.status());
    if (rest.size() == 3 && rest[2] == "risks" && get) return Risks(*user);
    if (rest.size() == 3 && rest[2] == "session" && get) return Session(*user);
    if (rest.size() == 3 && rest[2] == "whatif" && get) return WhatIf(*user, query);
    if (rest.size() == 5 && rest[2] == "interests" && post &&
        (rest[4] == "remove" || rest[4] == "restore")) {
      auto interest = ParseId(rest[3], "interest id");
      if (!interest.ok()) return ErrorResponse(interest.status());
      return Mutate(*user, *interest, rest[4] == "remove", body);
    }
  }
  return ErrorResponse(404, "not_found",
                       absl::StrCat("no route for ", std::string(method), " ", std::string(path)));
}

}  // namespace nanoscope
