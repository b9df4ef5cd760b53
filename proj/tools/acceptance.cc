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

// Acceptance run: prints one PASS/FAIL line per primary criterion and exits
// non-zero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_format.h"
#include "nanoscope/audience_index.h"
#include "nanoscope/campaign.h"
#include "nanoscope/estimator.h"
#include "nanoscope/population.h"
#include "nanoscope/random.h"
#include "nanoscope/risk.h"

namespace nanoscope {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

class Verdicts {
 public:
  void Report(int criterion, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failed_;
  }
  void Note(const std::string& text) {
    std::printf("  note: %s\n", text.c_str());
    std::fflush(stdout);
  }
  int failed() const { return failed_; }

 private:
  int failed_ = 0;
};

#define OR_FAIL(v, n, expr)                                              \
  auto v##_or = (expr);                                                  \
  if (!v##_or.ok()) {                                                    \
    v.Report(n, false, std::string(v##_or.status().message()));          \
    return;                                                              \
  }

constexpr double kQs[] = {50, 80, 90, 95};

// Criterion 1.
void OracleEquivalence(Verdicts& v) {
  const auto start = Clock::now();
  GeneratorConfig c;
  c.n_users = 500;
  c.n_interests = 200;
  c.interests_mu = std::log(20.0);
  c.interests_sigma = 0.8;
  c.interests_max = 120;
  c.seed = 2026;
  OR_FAIL(v, 1, GeneratePopulation(c));
  const Population& pop = *v_or;
  InvertedIndex index = InvertedIndex::Build(pop);
  Rng rng(99);
  int mismatches = 0;
  uint64_t nonzero = 0;
  for (int q = 0; q < 1000; ++q) {
    // Half the queries come from one user's interests so that non-empty
    // intersections are exercised; the rest are uniform over the catalog.
    const std::size_t k = 1 + rng.Below(25);
    std::vector<InterestId> ids;
    if (q % 2 == 0) {
      const UserProfile& u = pop.users()[rng.Below(pop.users().size())];
      std::vector<InterestId> pool = u.interests;
      for (std::size_t i = 0; i < std::min(k, pool.size()); ++i) {
        std::swap(pool[i], pool[i + rng.Below(pool.size() - i)]);
        ids.push_back(pool[i]);
      }
    } else {
      std::set<InterestId> chosen;
      while (chosen.size() < k) chosen.insert(pop.catalog().at(rng.Below(200)).interest_id);
      ids.assign(chosen.begin(), chosen.end());
    }
    auto count = index.AudienceSize(AudienceQuery{ids, std::nullopt});
    uint64_t brute = 0;
    for (const UserProfile& u : pop.users()) {
      if (std::all_of(ids.begin(), ids.end(), [&](InterestId id) {
            return std::binary_search(u.interests.begin(), u.interests.end(), id);
          })) {
        ++brute;
      }
    }
    if (!count.ok() || *count != brute) ++mismatches;
    if (brute > 0) ++nonzero;
  }
  const double elapsed = Seconds(start);
  v.Report(1, mismatches == 0 && elapsed < 5.0,
           absl::StrFormat("1000 queries, %d mismatches, %d non-empty, %.2fs", mismatches,
                           nonzero, elapsed));
}

// Criteria 2 and 3.
void FitAndTruncation(Verdicts& v) {
  std::vector<FitPoint> points;
  for (int n = 1; n <= 9; ++n) points.push_back({n, std::pow(10.0, 3 - 3 * std::log10(n + 1.0))});
  OR_FAIL(v, 2, FitLogLog(points));
  const FitResult& f = *v_or;
  const bool fit_ok = std::abs(f.a - 3) <= 1e-9 && std::abs(f.b - 3) <= 1e-9 &&
                      std::abs(f.r_squared - 1) <= 1e-12 && std::abs(f.cutpoint - 9) <= 1e-6;
  v.Report(2, fit_ok,
           absl::StrFormat("A=%.12f B=%.12f R2=%.15f cutpoint=%.9f", f.a, f.b, f.r_squared,
                           f.cutpoint));

  auto truncated = TruncateAtFloor(QuantileVector{50, {100, 50, 20, 20, 20}}, CensorPolicy{20});
  const std::size_t used = truncated.ok() ? truncated->size() : 0;
  v.Report(3, used == 3, absl::StrFormat("%d points fitted", used));
}

struct PopulationRun {
  uint64_t seed = 0;
  int monotone_violations = 0;
  std::map<std::pair<std::string, uint64_t>, double> cut90;  // (strategy, floor)
  double cut50_r = 0;
  bool brackets = true;
  std::string bracket_detail;
};

int CountViolations(const AudienceMatrix& m) {
  int violations = 0;
  std::vector<uint64_t> previous;
  for (double q : kQs) {
    auto v = ComputeQuantileVector(m, q);
    if (!v.ok()) return violations + 1;
    for (std::size_t n = 1; n < v->values.size(); ++n) {
      if (v->values[n] > v->values[n - 1]) ++violations;
    }
    for (std::size_t n = 0; n < std::min(previous.size(), v->values.size()); ++n) {
      if (v->values[n] < previous[n]) ++violations;
    }
    previous = v->values;
  }
  return violations;
}

absl::StatusOr<double> Cut(const AudienceMatrix& m, double q) {
  auto v = ComputeQuantileVector(m, q);
  if (!v.ok()) return v.status();
  auto e = EstimateCutpoint(*v, m.policy);
  if (!e.ok()) return e.status();
  return e->fit.cutpoint;
}

// Criteria 4, 6, 7 and the bracketing half of 8 on one population. The
// first population also runs criteria 5, the determinism half of 8 and 10.
absl::StatusOr<PopulationRun> RunPopulation(uint64_t seed, bool first, Verdicts& v,
                                            int resamples) {
  PopulationRun run;
  run.seed = seed;
  const auto start = Clock::now();
  auto pop = GeneratePopulation(CalibratedConfig(100000, seed));
  if (!pop.ok()) return pop.status();
  InvertedIndex index = InvertedIndex::Build(*pop);
  const SelectionStrategy strategies[] = {SelectionStrategy::LeastPopular(),
                                          SelectionStrategy::Random(seed)};
  for (const SelectionStrategy& s : strategies) {
    for (uint64_t floor : {kUncensoredFloor, kLegacyFloor}) {
      auto m = BuildMatrix(*pop, index, s, CensorPolicy{floor});
      if (!m.ok()) return m.status();
      run.monotone_violations += CountViolations(*m);
      auto c90 = Cut(*m, 90);
      if (!c90.ok()) return c90.status();
      run.cut90[{s.Name(), floor}] = *c90;
      if (floor != kUncensoredFloor) continue;
      if (s.kind == SelectionKind::kRandom) {
        auto c50 = Cut(*m, 50);
        if (!c50.ok()) return c50.status();
        run.cut50_r = *c50;
      }
      BootstrapOptions options;
      options.n_resamples = resamples;
      options.seed = seed;
      auto ci = BootstrapCiMulti(*m, kQs, options);
      if (!ci.ok()) return ci.status();
      for (const BootstrapResult& r : *ci) {
        if (!r.brackets_point) {
          run.brackets = false;
          run.bracket_detail += absl::StrFormat(" %s/Q%g [%g, %g] vs %g", s.Name(), r.q,
                                                r.ci_low, r.ci_high, r.point_estimate);
        }
      }

      if (first && s.kind == SelectionKind::kRandom) {
        // Criterion 8, determinism across runs and worker counts.
        std::vector<std::pair<double, double>> cis;
        for (int workers : {1, 1, 4, 8}) {
          BootstrapOptions o;
          o.seed = 12345;
          o.workers = workers;
          auto r = BootstrapCi(*m, 90, o);
          if (!r.ok()) return r.status();
          cis.emplace_back(r->ci_low, r->ci_high);
        }
        const bool identical =
            std::all_of(cis.begin(), cis.end(), [&](const auto& ci) { return ci == cis[0]; });
        v.Note(absl::StrFormat(
            "bootstrap R/Q90 with %d resamples: CI [%.17g, %.17g] for workers 1,1,4,8 %s",
            BootstrapOptions{}.n_resamples, cis[0].first, cis[0].second,
            identical ? "identical" : "DIFFER"));
        if (!identical || BootstrapOptions{}.n_resamples != 10000) run.brackets = false;
        if (!identical) run.bracket_detail += " non-deterministic CI";
      }
    }
  }

  if (first) {
    // Criterion 5.
    auto rate50 = SuccessRate(index, *pop, strategies[1],
                              static_cast<int>(std::lround(run.cut50_r)), 1000, seed);
    const double cut90_r = run.cut90[{"random", kUncensoredFloor}];
    auto rate90 = SuccessRate(index, *pop, strategies[1],
                              static_cast<int>(std::lround(cut90_r)), 1000, seed);
    if (!rate50.ok()) return rate50.status();
    if (!rate90.ok()) return rate90.status();
    const bool pass = *rate50 >= 0.35 && *rate50 <= 0.65 && *rate90 >= 0.80 && *rate90 <= 0.97;
    v.Report(5, pass,
             absl::StrFormat("Q50: N*=%d rate=%.3f; Q90: N*=%d rate=%.3f; %.0fs including "
                             "population and estimates",
                             std::lround(run.cut50_r), *rate50, std::lround(cut90_r), *rate90,
                             Seconds(start)));

    // Criterion 10.
    Rng rng(DeriveSeed(seed, 10));
    std::vector<BatchRecord> batch;
    for (int i = 0; i < 10000; ++i) {
      BatchRecord r;
      r.target = pop->users()[rng.Below(pop->users().size())].user_id;
      r.strategy = rng.Below(2) == 0 ? SelectionKind::kLeastPopular : SelectionKind::kRandom;
      r.seed = rng.Bits();
      r.n_interests = 1 + static_cast<int>(rng.Below(25));
      batch.push_back(r);
    }
    PolicyGate min_gate;
    min_gate.min_active_audience = 1000;
    auto gated = RunBatch(index, *pop, batch, CensorPolicy{kCurrentFloor}, min_gate);
    PolicyGate max_gate;
    max_gate.max_interests = 9;
    auto capped = RunBatch(index, *pop, batch, CensorPolicy{kCurrentFloor}, max_gate);
    if (!gated.ok()) return gated.status();
    if (!capped.ok()) return capped.status();
    std::size_t accepted = 0, unsound = 0, over_cap = 0, over_cap_accepted = 0, small = 0;
    for (const auto& [outcome, decision] : *gated) {
      if (outcome.reached_count < 1000) ++small;
      if (!decision.accepted) continue;
      ++accepted;
      if (outcome.reached_count < 1000) ++unsound;
    }
    for (const auto& [outcome, decision] : *capped) {
      if (outcome.n_interests <= 9) continue;
      ++over_cap;
      if (decision.accepted) ++over_cap_accepted;
    }
    v.Report(10, unsound == 0 && over_cap_accepted == 0 && over_cap > 0,
             absl::StrFormat("min_active_audience=1000: %d accepted, %d below 1000 (of %d "
                             "small audiences); max_interests=9: %d of %d specs above 9 accepted",
                             accepted, unsound, small, over_cap_accepted, over_cap));
  }
  v.Note(absl::StrFormat(
      "seed %d: Q90 cutpoints LP %.3f/%.3f, R %.3f/%.3f (floor 1/20), %d monotonicity "
      "violations, %.0fs",
      seed, run.cut90[{"lp", 1}], run.cut90[{"lp", 20}], run.cut90[{"random", 1}],
      run.cut90[{"random", 20}], run.monotone_violations, Seconds(start)));
  return run;
}

void CalibratedSuite(Verdicts& v, int n_populations, int resamples) {
  std::vector<PopulationRun> runs;
  for (int i = 0; i < n_populations; ++i) {
    auto run = RunPopulation(static_cast<uint64_t>(i + 1), i == 0, v, resamples);
    if (!run.ok()) {
      v.Report(4, false, absl::StrFormat("seed %d: %s", i + 1, run.status().message()));
      return;
    }
    runs.push_back(*run);
  }
  int violations = 0, ordered = 0, robust_r = 0, robust_lp = 0, brackets = 0;
  double worst_r = 0, worst_lp = 0;
  std::string bracket_detail;
  for (const PopulationRun& r : runs) {
    violations += r.monotone_violations;
    if (r.cut90.at({"lp", 1}) <= r.cut90.at({"random", 1})) ++ordered;
    const double dr = std::abs(r.cut90.at({"random", 20}) - r.cut90.at({"random", 1})) /
                      r.cut90.at({"random", 1});
    const double dl = std::abs(r.cut90.at({"lp", 20}) - r.cut90.at({"lp", 1})) /
                      r.cut90.at({"lp", 1});
    worst_r = std::max(worst_r, dr);
    worst_lp = std::max(worst_lp, dl);
    if (dr <= 0.20) ++robust_r;
    if (dl <= 0.20) ++robust_lp;
    if (r.brackets) ++brackets;
    bracket_detail += r.bracket_detail;
  }
  const int n = static_cast<int>(runs.size());
  v.Report(4, violations == 0,
           absl::StrFormat("%d populations x 2 strategies x 2 floors, Q in {50,80,90,95}: "
                           "%d violations",
                           n, violations));
  v.Report(6, ordered == n, absl::StrFormat("LP <= R at Q90 in %d of %d", ordered, n));
  v.Report(7, robust_r == n,
           absl::StrFormat("strategy R: within 20%% in %d of %d, worst %.1f%%", robust_r, n,
                           100 * worst_r));
  v.Note(absl::StrFormat("strategy LP (informational): within 20%% in %d of %d, worst %.1f%%",
                         robust_lp, n, 100 * worst_lp));
  v.Report(8, brackets == n,
           absl::StrFormat("%d resamples; CI brackets point for every Q and strategy in %d of "
                           "%d populations; determinism as noted above%s",
                           resamples, brackets, n, bracket_detail));
}

// Criterion 9.
void Thresholds(Verdicts& v) {
  const uint64_t inputs[] = {0, 10000, 10001, 100000, 100001, 999999, 1000000};
  const RiskLevel expected[] = {RiskLevel::kRed,    RiskLevel::kRed,    RiskLevel::kOrange,
                                RiskLevel::kOrange, RiskLevel::kYellow, RiskLevel::kYellow,
                                RiskLevel::kGreen};
  std::string got;
  bool pass = true;
  for (std::size_t i = 0; i < 7; ++i) {
    const RiskLevel level = Classify(inputs[i]);
    pass = pass && level == expected[i];
    got += absl::StrCat(i == 0 ? "" : ",", RiskLevelName(level));
  }
  v.Report(9, pass, got);
}

// Criterion 11.
void Performance(Verdicts& v, uint64_t n_users) {
  const auto start = Clock::now();
  GeneratorConfig c;
  c.n_users = n_users;
  c.n_interests = 50000;
  c.popularity_exponent = 1.0;
  c.interests_mu = std::log(50.0);
  c.interests_sigma = 0.9;
  c.interests_min = 1;
  c.interests_max = 3000;
  c.seed = 11;
  OR_FAIL(v, 11, GeneratePopulation(c));
  const Population& pop = *v_or;
  InvertedIndex index = InvertedIndex::Build(pop);
  const double setup = Seconds(start);

  // Queries are 25 interests held by one sampled user, so every query has a
  // non-empty answer.
  Rng rng(5);
  auto make_query = [&] {
    const UserProfile* u = nullptr;
    do {
      u = &pop.users()[rng.Below(pop.users().size())];
    } while (u->interests.size() < kMaxQueryInterests);
    std::vector<InterestId> pool = u->interests;
    for (std::size_t i = 0; i < kMaxQueryInterests; ++i) {
      std::swap(pool[i], pool[i + rng.Below(pool.size() - i)]);
    }
    pool.resize(kMaxQueryInterests);
    return AudienceQuery{pool, std::nullopt};
  };
  for (int i = 0; i < 1000; ++i) (void)index.AudienceSize(make_query());
  std::vector<double> ms;
  ms.reserve(10000);
  for (int i = 0; i < 10000; ++i) {
    AudienceQuery q = make_query();
    const auto t = Clock::now();
    auto count = index.AudienceSize(q);
    ms.push_back(Seconds(t) * 1e3);
    if (!count.ok() || *count == 0) {
      v.Report(11, false, "query failed or missed its source user");
      return;
    }
  }
  std::sort(ms.begin(), ms.end());
  const double median = ms[ms.size() / 2];
  const double p99 = ms[static_cast<std::size_t>(std::ceil(0.99 * ms.size())) - 1];
  const bool postings_ok = index.total_postings() == pop.total_occurrences();
  v.Report(11, n_users >= 1000000 && median < 5 && p99 < 50 && postings_ok,
           absl::StrFormat("%d users, 50000 interests, %d postings (%s occurrences): median "
                           "%.3f ms, p99 %.3f ms (setup %.0fs)",
                           n_users, index.total_postings(), postings_ok ? "equals" : "DIFFERS from",
                           median, p99, setup));
}

}  // namespace
}  // namespace nanoscope

int main(int argc, char** argv) {
  CLI::App app{"Acceptance run for the primary criteria"};
  int populations = 10;
  int resamples = nanoscope::kDefaultResamples;
  uint64_t perf_users = 1000000;
  std::vector<int> only;
  app.add_option("--populations", populations, "Calibrated populations for criteria 4-8");
  app.add_option("--resamples", resamples, "Bootstrap resamples for bracketing");
  app.add_option("--perf-users", perf_users, "Users in the performance population");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  auto wanted = [&](std::initializer_list<int> ids) {
    if (only.empty()) return true;
    return std::any_of(ids.begin(), ids.end(), [&](int id) {
      return std::find(only.begin(), only.end(), id) != only.end();
    });
  };

  nanoscope::Verdicts v;
  const auto start = nanoscope::Clock::now();
  if (wanted({1})) nanoscope::OracleEquivalence(v);
  if (wanted({2, 3})) nanoscope::FitAndTruncation(v);
  if (wanted({9})) nanoscope::Thresholds(v);
  if (wanted({11})) nanoscope::Performance(v, perf_users);
  if (wanted({4, 5, 6, 7, 8, 10})) nanoscope::CalibratedSuite(v, populations, resamples);
  std::printf("%d criteria failed, %.0fs total\n", v.failed(), nanoscope::Seconds(start));
  return v.failed() == 0 ? 0 : 1;
}
