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

#ifndef NANOSCOPE_ESTIMATOR_H_
#define NANOSCOPE_ESTIMATOR_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nanoscope/audience_index.h"
#include "nanoscope/population.h"
#include "nanoscope/selection.h"

namespace nanoscope {

// One censored prefix-audience row per user. Rows of users holding fewer
// than n_max interests are shorter.
struct AudienceMatrix {
  SelectionStrategy strategy;
  CensorPolicy policy;
  int n_max = 0;  // longest row, at most strategy.n_max
  std::vector<PrefixAudiences> rows;
};

// Rows for every user of `population` (a subgroup view is fine); audiences
// are always counted against the full universe behind `index`.
absl::StatusOr<AudienceMatrix> BuildMatrix(const Population& population,
                                           const InvertedIndex& index,
                                           const SelectionStrategy& strategy,
                                           CensorPolicy policy,
                                           const DemographicFilter* filter = nullptr,
                                           int workers = 0);

// values[N-1] = AS(Q, N): nearest-rank Q-th percentile of the audiences of
// rows with at least N entries.
struct QuantileVector {
  double q = 0.0;
  std::vector<uint64_t> values;
};

absl::StatusOr<QuantileVector> ComputeQuantileVector(const AudienceMatrix& matrix, double q);

struct FitPoint {
  int n = 0;  // number of interests
  double audience = 0.0;
};

// Keeps N = 1..n*, where n* is the first N whose value equals the floor.
// The first floor-valued point is kept; everything after it is censored.
absl::StatusOr<std::vector<FitPoint>> TruncateAtFloor(const QuantileVector& vector,
                                                      CensorPolicy policy);

// log10(AS) ~ -A * log10(N + 1) + B by ordinary least squares.
struct FitResult {
  double a = 0.0;
  double b = 0.0;
  double r_squared = 0.0;
  double cutpoint = 0.0;
  int n_points_used = 0;
};

absl::StatusOr<FitResult> FitLogLog(std::span<const FitPoint> points);

// N at which the fitted line reaches audience 1: 10^(B/A) - 1.
absl::StatusOr<double> Cutpoint(double a, double b);

// Cutpoint of one quantile vector. When the policy is uncensored and the
// vector is already 1 at N = 1, the crossing is observed rather than
// extrapolated; the result then has n_points_used = 1 and cutpoint = 1.
struct CutpointEstimate {
  FitResult fit;
  bool observed = false;
};

absl::StatusOr<CutpointEstimate> EstimateCutpoint(const QuantileVector& vector,
                                                  CensorPolicy policy);

inline constexpr int kDefaultResamples = 10000;

struct BootstrapOptions {
  int n_resamples = kDefaultResamples;
  uint64_t seed = 0;
  int workers = 0;  // 0: NANOSCOPE_THREADS / hardware
  double max_failed_fraction = 0.01;
};

struct BootstrapResult {
  double q = 0.0;
  double point_estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n_resamples = 0;
  int n_failed = 0;
  uint64_t seed = 0;
  bool brackets_point = false;  // ci_low <= point_estimate <= ci_high
};

// 95% percentile bootstrap of the cutpoint, resampling users with
// replacement. Resample r draws from a stream derived from (seed, r) only,
// so results do not depend on the worker count.
absl::StatusOr<BootstrapResult> BootstrapCi(const AudienceMatrix& matrix, double q,
                                            const BootstrapOptions& options);

// Same resamples shared across several quantiles; element i matches
// BootstrapCi(matrix, qs[i], options) exactly.
absl::StatusOr<std::vector<BootstrapResult>> BootstrapCiMulti(const AudienceMatrix& matrix,
                                                              std::span<const double> qs,
                                                              const BootstrapOptions& options);

inline constexpr double kDefaultProbabilities[] = {0.5, 0.8, 0.9, 0.95};

struct UniquenessRow {
  std::string strategy;
  double p = 0.0;
  double q = 0.0;
  CutpointEstimate estimate;
  BootstrapResult bootstrap;
  int actionable_interests = 0;  // ceil(cutpoint)
  bool actionable = false;       // cutpoint within the 25-interest cap
};

struct UniquenessReport {
  std::string subgroup;  // "all" for the full population
  std::size_t n_users = 0;
  CensorPolicy policy;
  std::vector<UniquenessRow> rows;
  std::vector<std::string> warnings;
};

struct ReportOptions {
  BootstrapOptions bootstrap;
  std::optional<DemographicFilter> subgroup;
};

absl::StatusOr<UniquenessReport> BuildUniquenessReport(
    const Population& population, const InvertedIndex& index,
    std::span<const SelectionStrategy> strategies, std::span<const double> probabilities,
    CensorPolicy policy, const ReportOptions& options);

enum class Grouping { kGender, kAgeBand, kCountry };

absl::StatusOr<Grouping> ParseGrouping(std::string_view name);

inline constexpr std::size_t kDefaultMinGroupUsers = 100;

struct SubgroupReports {
  std::vector<UniquenessReport> reports;
  std::vector<std::pair<std::string, std::string>> skipped;  // label, reason
};

absl::StatusOr<SubgroupReports> BuildSubgroupReports(
    const Population& population, const InvertedIndex& index, Grouping grouping,
    std::size_t min_users, std::span<const SelectionStrategy> strategies,
    std::span<const double> probabilities, CensorPolicy policy,
    const BootstrapOptions& bootstrap);

}  // namespace nanoscope

#endif  // NANOSCOPE_ESTIMATOR_H_
