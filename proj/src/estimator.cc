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

#include "nanoscope/estimator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "nanoscope/parallel.h"
#include "nanoscope/random.h"

namespace nanoscope {

absl::StatusOr<AudienceMatrix> BuildMatrix(const Population& population,
                                           const InvertedIndex& index,
                                           const SelectionStrategy& strategy,
                                           CensorPolicy policy,
                                           const DemographicFilter* filter, int workers) {
  std::vector<const UserProfile*> members;
  for (const UserProfile& user : population.users()) {
    if (filter == nullptr || filter->Matches(user.demographics)) members.push_back(&user);
  }
  if (members.size() < 2) {
    return absl::FailedPreconditionError(
        absl::StrCat("audience matrix needs at least 2 users, got ", members.size()));
  }
  AudienceMatrix matrix;
  matrix.strategy = strategy;
  matrix.policy = policy;
  matrix.rows.resize(members.size());
  std::vector<absl::Status> errors(members.size());
  ParallelFor(members.size(), workers, [&](std::size_t i) {
    const UserProfile& user = *members[i];
    auto row = ComputePrefixAudiences(index, user.user_id,
                                      SelectInterests(user, population.catalog(), strategy),
                                      policy);
    if (row.ok()) {
      matrix.rows[i] = *std::move(row);
    } else {
      errors[i] = row.status();
    }
  });
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!errors[i].ok()) return errors[i];
    matrix.n_max = std::max(matrix.n_max, static_cast<int>(matrix.rows[i].sizes.size()));
  }
  return matrix;
}

absl::StatusOr<QuantileVector> ComputeQuantileVector(const AudienceMatrix& matrix, double q) {
  if (!(q > 0.0 && q < 100.0)) {
    return absl::InvalidArgumentError(absl::StrCat("quantile must be in (0, 100), got ", q));
  }
  QuantileVector vector;
  vector.q = q;
  std::vector<uint64_t> column;
  for (int n = 1; n <= matrix.n_max; ++n) {
    column.clear();
    for (const PrefixAudiences& row : matrix.rows) {
      if (row.sizes.size() >= static_cast<std::size_t>(n)) column.push_back(row.sizes[n - 1]);
    }
    if (column.empty()) {
      return absl::FailedPreconditionError(absl::StrCat("no audience samples at N=", n));
    }
    std::sort(column.begin(), column.end());
    vector.values.push_back(NearestRank<uint64_t>(column, q));
  }
  return vector;
}

absl::StatusOr<std::vector<FitPoint>> TruncateAtFloor(const QuantileVector& vector,
                                                      CensorPolicy policy) {
  std::vector<FitPoint> points;
  for (std::size_t i = 0; i < vector.values.size(); ++i) {
    points.push_back({static_cast<int>(i + 1), static_cast<double>(vector.values[i])});
    if (vector.values[i] <= policy.floor) break;
  }
  if (points.size() < 2) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "Q=%g: only %d point(s) above the reporting floor %d (reached at N=%d); "
        "cannot fit",
        vector.q, points.size(), policy.floor, points.empty() ? 0 : points.back().n));
  }
  return points;
}

absl::StatusOr<double> Cutpoint(double a, double b) {
  if (!(a > 0.0)) {
    return absl::FailedPreconditionError(
        absl::StrCat("fitted slope A=", a, " is not positive; curve is not decreasing"));
  }
  return std::pow(10.0, b / a) - 1.0;
}

absl::StatusOr<FitResult> FitLogLog(std::span<const FitPoint> points) {
  if (points.size() < 2) {
    return absl::FailedPreconditionError("log-log fit needs at least 2 points");
  }
  const auto m = static_cast<double>(points.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const FitPoint& p : points) {
    if (!(p.audience > 0.0)) {
      return absl::InvalidArgumentError(absl::StrCat("audience at N=", p.n, " is not positive"));
    }
    mean_x += std::log10(p.n + 1.0);
    mean_y += std::log10(p.audience);
  }
  mean_x /= m;
  mean_y /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const FitPoint& p : points) {
    const double dx = std::log10(p.n + 1.0) - mean_x;
    const double dy = std::log10(p.audience) - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) return absl::FailedPreconditionError("log-log fit: all N are equal");

  const double slope = sxy / sxx;
  FitResult fit;
  fit.a = -slope;
  fit.b = mean_y - slope * mean_x;
  fit.n_points_used = static_cast<int>(points.size());
  if (syy <= 0.0) {
    fit.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (const FitPoint& p : points) {
      const double r = std::log10(p.audience) - (fit.b - fit.a * std::log10(p.n + 1.0));
      ss_res += r * r;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  auto cut = Cutpoint(fit.a, fit.b);
  if (!cut.ok()) return cut.status();
  fit.cutpoint = *cut;
  return fit;
}

absl::StatusOr<CutpointEstimate> EstimateCutpoint(const QuantileVector& vector,
                                                  CensorPolicy policy) {
  CutpointEstimate estimate;
  if (policy.floor == 1 && !vector.values.empty() && vector.values.front() == 1) {
    estimate.observed = true;
    estimate.fit.a = std::numeric_limits<double>::quiet_NaN();
    estimate.fit.b = std::numeric_limits<double>::quiet_NaN();
    estimate.fit.r_squared = std::numeric_limits<double>::quiet_NaN();
    estimate.fit.cutpoint = 1.0;
    estimate.fit.n_points_used = 1;
    return estimate;
  }
  auto points = TruncateAtFloor(vector, policy);
  if (!points.ok()) return points.status();
  auto fit = FitLogLog(*points);
  if (!fit.ok()) {
    return absl::Status(fit.status().code(),
                        absl::StrCat("Q=", vector.q, ": ", fit.status().message()));
  }
  estimate.fit = *fit;
  return estimate;
}

// ---------------------------------------------------------------------------
// Bootstrap

namespace {

// Column N of the matrix, rows sorted by (value, row index).
struct SortedColumn {
  std::vector<uint32_t> rows;
  std::vector<uint64_t> values;
};

std::vector<SortedColumn> SortColumns(const AudienceMatrix& matrix) {
  std::vector<SortedColumn> columns(matrix.n_max);
  for (int n = 1; n <= matrix.n_max; ++n) {
    std::vector<std::pair<uint64_t, uint32_t>> keyed;
    for (uint32_t r = 0; r < matrix.rows.size(); ++r) {
      const auto& sizes = matrix.rows[r].sizes;
      if (sizes.size() >= static_cast<std::size_t>(n)) keyed.emplace_back(sizes[n - 1], r);
    }
    std::sort(keyed.begin(), keyed.end());
    SortedColumn& column = columns[n - 1];
    column.rows.reserve(keyed.size());
    column.values.reserve(keyed.size());
    for (const auto& [value, row] : keyed) {
      column.rows.push_back(row);
      column.values.push_back(value);
    }
  }
  return columns;
}

std::size_t NearestRankIndex(double q, uint64_t total) {
  auto rank = static_cast<uint64_t>(std::ceil(q * static_cast<double>(total) / 100.0));
  rank = std::clamp<uint64_t>(rank, 1, total);
  return rank;
}

// For one resample (multiplicity per row), fills vectors[qi].values.
void ResampledQuantiles(const std::vector<SortedColumn>& columns,
                        std::span<const uint32_t> multiplicity,
                        std::span<const uint64_t> total_at_n, std::span<const double> qs,
                        std::vector<QuantileVector>& vectors) {
  const int n_max = static_cast<int>(columns.size());
  for (auto& v : vectors) v.values.assign(n_max, 0);
  std::vector<std::pair<uint64_t, std::size_t>> low;   // (rank, q index)
  std::vector<std::pair<uint64_t, std::size_t>> high;  // (rank from top, q index)
  for (int n = 1; n <= n_max; ++n) {
    const SortedColumn& column = columns[n - 1];
    const uint64_t total = total_at_n[n - 1];
    low.clear();
    high.clear();
    for (std::size_t qi = 0; qi < qs.size(); ++qi) {
      const uint64_t rank = NearestRankIndex(qs[qi], total);
      if (rank * 2 <= total) {
        low.emplace_back(rank, qi);
      } else {
        high.emplace_back(total - rank + 1, qi);
      }
    }
    std::sort(low.begin(), low.end());
    std::sort(high.begin(), high.end());
    // Walk from the bottom for low ranks and from the top for high ranks.
    uint64_t cumulative = 0;
    std::size_t next = 0;
    for (std::size_t j = 0; j < column.rows.size() && next < low.size(); ++j) {
      cumulative += multiplicity[column.rows[j]];
      while (next < low.size() && cumulative >= low[next].first) {
        vectors[low[next].second].values[n - 1] = column.values[j];
        ++next;
      }
    }
    cumulative = 0;
    next = 0;
    for (std::size_t j = column.rows.size(); j-- > 0 && next < high.size();) {
      cumulative += multiplicity[column.rows[j]];
      while (next < high.size() && cumulative >= high[next].first) {
        vectors[high[next].second].values[n - 1] = column.values[j];
        ++next;
      }
    }
  }
}

}  // namespace

absl::StatusOr<std::vector<BootstrapResult>> BootstrapCiMulti(const AudienceMatrix& matrix,
                                                              std::span<const double> qs,
                                                              const BootstrapOptions& options) {
  if (matrix.rows.size() < 2) {
    return absl::FailedPreconditionError("bootstrap needs at least 2 rows");
  }
  if (options.n_resamples < 1) {
    return absl::InvalidArgumentError("bootstrap needs at least one resample");
  }
  std::vector<CutpointEstimate> points;
  for (double q : qs) {
    auto vector = ComputeQuantileVector(matrix, q);
    if (!vector.ok()) return vector.status();
    auto estimate = EstimateCutpoint(*vector, matrix.policy);
    if (!estimate.ok()) return estimate.status();
    points.push_back(*estimate);
  }

  const std::vector<SortedColumn> columns = SortColumns(matrix);
  const std::size_t n_rows = matrix.rows.size();
  std::vector<uint32_t> row_length(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    row_length[r] = static_cast<uint32_t>(matrix.rows[r].sizes.size());
  }

  const auto n_resamples = static_cast<std::size_t>(options.n_resamples);
  // cutpoints[r * qs.size() + qi], NaN for a failed fit.
  std::vector<double> cutpoints(n_resamples * qs.size(),
                                std::numeric_limits<double>::quiet_NaN());
  constexpr std::size_t kChunk = 16;
  const std::size_t n_chunks = (n_resamples + kChunk - 1) / kChunk;
  ParallelFor(n_chunks, options.workers, [&](std::size_t chunk) {
    std::vector<uint32_t> multiplicity(n_rows);
    std::vector<uint64_t> total_at_n(matrix.n_max);
    std::vector<QuantileVector> vectors(qs.size());
    for (std::size_t qi = 0; qi < qs.size(); ++qi) vectors[qi].q = qs[qi];
    const std::size_t end = std::min(n_resamples, (chunk + 1) * kChunk);
    for (std::size_t r = chunk * kChunk; r < end; ++r) {
      Rng rng(DeriveSeed(options.seed, r));
      std::fill(multiplicity.begin(), multiplicity.end(), 0);
      std::fill(total_at_n.begin(), total_at_n.end(), 0);
      for (std::size_t draw = 0; draw < n_rows; ++draw) {
        const auto row = static_cast<std::size_t>(rng.Below(n_rows));
        ++multiplicity[row];
        ++total_at_n[row_length[row] - 1];
      }
      // Suffix sums: rows of length >= N contribute at N.
      for (int n = matrix.n_max - 1; n > 0; --n) total_at_n[n - 1] += total_at_n[n];
      bool empty_column = false;
      for (uint64_t total : total_at_n) empty_column |= (total == 0);
      if (empty_column) continue;
      ResampledQuantiles(columns, multiplicity, total_at_n, qs, vectors);
      for (std::size_t qi = 0; qi < qs.size(); ++qi) {
        auto estimate = EstimateCutpoint(vectors[qi], matrix.policy);
        if (estimate.ok()) cutpoints[r * qs.size() + qi] = estimate->fit.cutpoint;
      }
    }
  });

  std::vector<BootstrapResult> results;
  std::vector<double> successful;
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    successful.clear();
    for (std::size_t r = 0; r < n_resamples; ++r) {
      const double value = cutpoints[r * qs.size() + qi];
      if (!std::isnan(value)) successful.push_back(value);
    }
    BootstrapResult result;
    result.q = qs[qi];
    result.point_estimate = points[qi].fit.cutpoint;
    result.n_resamples = options.n_resamples;
    result.n_failed = static_cast<int>(n_resamples - successful.size());
    result.seed = options.seed;
    if (static_cast<double>(result.n_failed) >
            options.max_failed_fraction * static_cast<double>(n_resamples) ||
        successful.empty()) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "Q=%g: %d of %d bootstrap resamples could not be fitted", qs[qi], result.n_failed,
          options.n_resamples));
    }
    std::sort(successful.begin(), successful.end());
    result.ci_low = NearestRank<double>(successful, 2.5);
    result.ci_high = NearestRank<double>(successful, 97.5);
    result.brackets_point =
        result.ci_low <= result.point_estimate && result.point_estimate <= result.ci_high;
    results.push_back(result);
  }
  return results;
}

absl::StatusOr<BootstrapResult> BootstrapCi(const AudienceMatrix& matrix, double q,
                                            const BootstrapOptions& options) {
  const double qs[] = {q};
  auto results = BootstrapCiMulti(matrix, qs, options);
  if (!results.ok()) return results.status();
  return results->front();
}

// ---------------------------------------------------------------------------
// Reports

absl::StatusOr<UniquenessReport> BuildUniquenessReport(
    const Population& population, const InvertedIndex& index,
    std::span<const SelectionStrategy> strategies, std::span<const double> probabilities,
    CensorPolicy policy, const ReportOptions& options) {
  std::vector<double> qs;
  for (double p : probabilities) {
    if (!(p > 0.0 && p < 1.0)) {
      return absl::InvalidArgumentError(absl::StrCat("probability must be in (0, 1), got ", p));
    }
    qs.push_back(100.0 * p);
  }
  const DemographicFilter* filter = options.subgroup ? &*options.subgroup : nullptr;
  UniquenessReport report;
  report.subgroup = filter != nullptr ? filter->Describe() : "all";
  report.policy = policy;
  for (const SelectionStrategy& strategy : strategies) {
    auto matrix =
        BuildMatrix(population, index, strategy, policy, filter, options.bootstrap.workers);
    if (!matrix.ok()) return matrix.status();
    report.n_users = matrix->rows.size();
    auto bootstrap = BootstrapCiMulti(*matrix, qs, options.bootstrap);
    if (!bootstrap.ok()) return bootstrap.status();
    std::vector<UniquenessRow> rows;
    for (std::size_t i = 0; i < qs.size(); ++i) {
      auto vector = ComputeQuantileVector(*matrix, qs[i]);
      if (!vector.ok()) return vector.status();
      auto estimate = EstimateCutpoint(*vector, policy);
      if (!estimate.ok()) return estimate.status();
      UniquenessRow row;
      row.strategy = strategy.Name();
      row.p = probabilities[i];
      row.q = qs[i];
      row.estimate = *estimate;
      row.bootstrap = (*bootstrap)[i];
      row.actionable_interests = static_cast<int>(std::ceil(estimate->fit.cutpoint));
      row.actionable = estimate->fit.cutpoint <= static_cast<double>(kMaxQueryInterests);
      if (!row.bootstrap.brackets_point) {
        report.warnings.push_back(absl::StrFormat(
            "%s P=%g: bootstrap CI [%g, %g] does not bracket the point estimate %g",
            row.strategy, row.p, row.bootstrap.ci_low, row.bootstrap.ci_high,
            row.estimate.fit.cutpoint));
      }
      if (!row.actionable) {
        report.warnings.push_back(absl::StrFormat(
            "%s P=%g: cutpoint %g exceeds the %d-interest targeting cap", row.strategy, row.p,
            row.estimate.fit.cutpoint, kMaxQueryInterests));
      }
      rows.push_back(std::move(row));
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].p >= rows[i - 1].p &&
          rows[i].estimate.fit.cutpoint < rows[i - 1].estimate.fit.cutpoint) {
        report.warnings.push_back(absl::StrFormat(
            "%s: N_P decreases from P=%g (%g) to P=%g (%g)", rows[i].strategy, rows[i - 1].p,
            rows[i - 1].estimate.fit.cutpoint, rows[i].p, rows[i].estimate.fit.cutpoint));
      }
    }
    for (auto& row : rows) report.rows.push_back(std::move(row));
  }
  return report;
}

absl::StatusOr<Grouping> ParseGrouping(std::string_view name) {
  if (name == "gender") return Grouping::kGender;
  if (name == "age" || name == "age_band") return Grouping::kAgeBand;
  if (name == "country") return Grouping::kCountry;
  return absl::InvalidArgumentError(absl::StrCat("unknown grouping '", std::string(name), "'"));
}

absl::StatusOr<SubgroupReports> BuildSubgroupReports(
    const Population& population, const InvertedIndex& index, Grouping grouping,
    std::size_t min_users, std::span<const SelectionStrategy> strategies,
    std::span<const double> probabilities, CensorPolicy policy,
    const BootstrapOptions& bootstrap) {
  std::vector<std::pair<std::string, DemographicFilter>> groups;
  switch (grouping) {
    case Grouping::kGender:
      for (Gender g : {Gender::kMale, Gender::kFemale, Gender::kUndisclosed}) {
        DemographicFilter filter;
        filter.gender = g;
        groups.emplace_back(GenderName(g), filter);
      }
      break;
    case Grouping::kAgeBand:
      for (AgeBand band : kAllAgeBands) {
        DemographicFilter filter;
        filter.age_band = band;
        groups.emplace_back(AgeBandName(band), filter);
      }
      break;
    case Grouping::kCountry: {
      std::set<std::string> countries;
      for (const UserProfile& user : population.users()) {
        if (user.demographics.country) countries.insert(*user.demographics.country);
      }
      for (const std::string& country : countries) {
        DemographicFilter filter;
        filter.countries = std::set<std::string>{country};
        groups.emplace_back(country, filter);
      }
      break;
    }
  }

  SubgroupReports out;
  for (const auto& [label, filter] : groups) {
    std::size_t count = 0;
    for (const UserProfile& user : population.users()) count += filter.Matches(user.demographics);
    if (count < std::max<std::size_t>(min_users, 2)) {
      out.skipped.emplace_back(
          label, absl::StrCat(count, " users, below the minimum of ", min_users));
      continue;
    }
    ReportOptions options;
    options.bootstrap = bootstrap;
    options.subgroup = filter;
    auto report =
        BuildUniquenessReport(population, index, strategies, probabilities, policy, options);
    if (!report.ok()) {
      out.skipped.emplace_back(label, std::string(report.status().message()));
      continue;
    }
    report->subgroup = label;
    out.reports.push_back(*std::move(report));
  }
  if (out.reports.empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat("no demographic group qualifies (minimum ", min_users, " users)"));
  }
  return out;
}

}  // namespace nanoscope
