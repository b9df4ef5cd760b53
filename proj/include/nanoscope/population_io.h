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

#ifndef NANOSCOPE_POPULATION_IO_H_
#define NANOSCOPE_POPULATION_IO_H_

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nanoscope/population.h"

namespace nanoscope {

// On-disk population directory layout.
inline constexpr char kCatalogFile[] = "catalog.csv";
inline constexpr char kUsersFile[] = "users.jsonl";
inline constexpr char kManifestFile[] = "manifest.txt";
inline constexpr char kPopulationFormat[] = "nanoscope-population/1";

// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
absl::StatusOr<std::vector<std::string>> SplitCsvLine(std::string_view line);
std::string CsvEscape(std::string_view field);

// Catalog rows from `interest_id,name[,...]`; extra columns are ignored and
// global_audience is left at zero.
absl::StatusOr<std::vector<InterestRecord>> ReadCatalogCsv(std::istream& in,
                                                           std::string_view source);

// One JSON object per line: user_id, gender ("m"|"f"|"u"), age (int|null),
// country (alpha-2|null), interests (array of ints). Errors name the line.
absl::StatusOr<std::vector<UserProfile>> ReadUsersJsonl(std::istream& in,
                                                        std::string_view source,
                                                        const Catalog& catalog);

absl::StatusOr<Population> Ingest(const std::filesystem::path& users_file,
                                  const std::filesystem::path& catalog_file);

// Writes catalog.csv, users.jsonl and manifest.txt under `dir`.
absl::Status SavePopulation(const Population& population, const std::filesystem::path& dir);
absl::StatusOr<Population> LoadPopulation(const std::filesystem::path& dir);

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path);
absl::Status WriteFile(const std::filesystem::path& path, std::string_view contents);

}  // namespace nanoscope

#endif  // NANOSCOPE_POPULATION_IO_H_
