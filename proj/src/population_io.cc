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

#include "nanoscope/population_io.h"

#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "nanoscope/digest.h"
#include <nlohmann/json.hpp>

namespace nanoscope {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

std::string At(std::string_view source, std::size_t line) {
  return absl::StrCat(std::string(source), ":", line, ": ");
}

}  // namespace

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFile(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path.string()));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path.string()));
  return absl::OkStatus();
}

absl::StatusOr<std::vector<std::string>> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      if (!field.empty() || was_quoted) return absl::InvalidArgumentError("stray quote");
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      if (was_quoted) return absl::InvalidArgumentError("text after closing quote");
      field.push_back(c);
    }
  }
  if (quoted) return absl::InvalidArgumentError("unterminated quote");
  fields.push_back(std::move(field));
  return fields;
}

std::string CsvEscape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

absl::StatusOr<std::vector<InterestRecord>> ReadCatalogCsv(std::istream& in,
                                                           std::string_view source) {
  std::vector<InterestRecord> records;
  std::unordered_set<InterestId> seen;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_number == 1) {
      auto header = SplitCsvLine(line);
      if (!header.ok() || header->size() < 2 || (*header)[0] != "interest_id" ||
          (*header)[1] != "name") {
        return absl::InvalidArgumentError(
            absl::StrCat(At(source, 1), "expected header 'interest_id,name'"));
      }
      continue;
    }
    if (line.empty()) continue;
    auto fields = SplitCsvLine(line);
    if (!fields.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(At(source, line_number), fields.status().message()));
    }
    if (fields->size() < 2) {
      return absl::InvalidArgumentError(
          absl::StrCat(At(source, line_number), "expected at least 2 fields"));
    }
    InterestRecord record;
    const std::string& id_text = (*fields)[0];
    char* end = nullptr;
    errno = 0;
    record.interest_id = std::strtoull(id_text.c_str(), &end, 10);
    if (id_text.empty() || *end != '\0' || errno != 0 || id_text.front() == '-') {
      return absl::InvalidArgumentError(
          absl::StrCat(At(source, line_number), "bad interest_id '", id_text, "'"));
    }
    if (!seen.insert(record.interest_id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat(At(source, line_number), "duplicate interest_id ", record.interest_id));
    }
    record.name = (*fields)[1];
    records.push_back(std::move(record));
  }
  if (line_number == 0) {
    return absl::InvalidArgumentError(absl::StrCat(std::string(source), ": empty catalog file"));
  }
  return records;
}

absl::StatusOr<std::vector<UserProfile>> ReadUsersJsonl(std::istream& in,
                                                        std::string_view source,
                                                        const Catalog& catalog) {
  std::vector<UserProfile> users;
  std::unordered_set<UserId> seen;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = At(source, line_number);
    Json record = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded() || !record.is_object()) {
      return absl::InvalidArgumentError(absl::StrCat(where, "not a JSON object"));
    }
    UserProfile user;
    const auto& id = record["user_id"];
    if (!id.is_number_unsigned()) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, "user_id must be a non-negative integer"));
    }
    user.user_id = id.get<UserId>();
    if (!seen.insert(user.user_id).second) {
      return absl::InvalidArgumentError(absl::StrCat(where, "duplicate user_id ", user.user_id));
    }

    const auto& gender = record["gender"];
    std::optional<Gender> parsed_gender;
    if (gender.is_string()) parsed_gender = ParseGenderCode(gender.get<std::string>());
    if (!parsed_gender || gender.get<std::string>().size() != 1) {
      return absl::InvalidArgumentError(absl::StrCat(where, "gender must be \"m\", \"f\" or \"u\""));
    }
    user.demographics.gender = *parsed_gender;

    const auto& age = record["age"];
    if (age.is_number_integer()) {
      const auto years = age.get<int64_t>();
      if (years < kMinimumAge || years > 150) {
        return absl::InvalidArgumentError(absl::StrCat(where, "age ", years, " out of range"));
      }
      user.demographics.age_years = static_cast<int>(years);
    } else if (!age.is_null()) {
      return absl::InvalidArgumentError(absl::StrCat(where, "age must be an integer or null"));
    }

    const auto& country = record["country"];
    if (country.is_string()) {
      const auto code = country.get<std::string>();
      if (code.size() != 2 || !std::isupper(static_cast<unsigned char>(code[0])) ||
          !std::isupper(static_cast<unsigned char>(code[1]))) {
        return absl::InvalidArgumentError(
            absl::StrCat(where, "country must be an ISO-3166 alpha-2 code, got '", code, "'"));
      }
      user.demographics.country = code;
    } else if (!country.is_null()) {
      return absl::InvalidArgumentError(absl::StrCat(where, "country must be a string or null"));
    }

    const auto& interests = record["interests"];
    if (!interests.is_array() || interests.empty()) {
      return absl::InvalidArgumentError(absl::StrCat(where, "interests must be a non-empty array"));
    }
    for (const auto& item : interests) {
      if (!item.is_number_unsigned()) {
        return absl::InvalidArgumentError(
            absl::StrCat(where, "interest ids must be non-negative integers"));
      }
      const auto interest = item.get<InterestId>();
      if (!catalog.PositionOf(interest)) {
        return absl::InvalidArgumentError(
            absl::StrCat(where, "unknown interest ", interest, " (not in catalog)"));
      }
      user.interests.push_back(interest);
    }
    std::sort(user.interests.begin(), user.interests.end());
    if (std::adjacent_find(user.interests.begin(), user.interests.end()) !=
        user.interests.end()) {
      return absl::InvalidArgumentError(absl::StrCat(where, "interest listed twice"));
    }
    users.push_back(std::move(user));
  }
  return users;
}

namespace {

absl::StatusOr<Population> ReadPopulationFiles(const std::filesystem::path& users_file,
                                               const std::filesystem::path& catalog_file,
                                               Provenance provenance,
                                               std::string* input_digest) {
  auto catalog_text = ReadFile(catalog_file);
  if (!catalog_text.ok()) return catalog_text.status();
  auto users_text = ReadFile(users_file);
  if (!users_text.ok()) return users_text.status();

  std::istringstream catalog_stream(*catalog_text);
  auto records = ReadCatalogCsv(catalog_stream, catalog_file.filename().string());
  if (!records.ok()) return records.status();
  const Catalog lookup(*records);
  std::istringstream users_stream(*users_text);
  auto users = ReadUsersJsonl(users_stream, users_file.filename().string(), lookup);
  if (!users.ok()) return users.status();
  if (input_digest != nullptr) {
    Fnv1a64 hash;
    hash.Update(*catalog_text);
    hash.Update(*users_text);
    *input_digest = hash.Hex();
  }
  return Population::Create(*std::move(records), *std::move(users), std::move(provenance));
}

}  // namespace

absl::StatusOr<Population> Ingest(const std::filesystem::path& users_file,
                                  const std::filesystem::path& catalog_file) {
  std::string digest;
  Provenance provenance;
  provenance.kind = Provenance::Kind::kIngested;
  auto population = ReadPopulationFiles(users_file, catalog_file, provenance, &digest);
  if (!population.ok()) return population.status();
  // Provenance needs the digest, which is only known after reading.
  std::vector<InterestRecord> catalog = population->catalog().records();
  std::vector<UserProfile> users = population->users();
  provenance.digest = digest;
  return Population::Create(std::move(catalog), std::move(users), std::move(provenance));
}

absl::Status SavePopulation(const Population& population, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return absl::PermissionDeniedError(absl::StrCat("cannot create ", dir.string()));

  std::string catalog = "interest_id,name\n";
  for (const InterestRecord& record : population.catalog().records()) {
    absl::StrAppend(&catalog, record.interest_id, ",", CsvEscape(record.name), "\n");
  }
  std::string users;
  for (const UserProfile& user : population.users()) {
    OrderedJson row;
    row["user_id"] = user.user_id;
    row["gender"] = GenderCode(user.demographics.gender);
    row["age"] = user.demographics.age_years ? OrderedJson(*user.demographics.age_years)
                                             : OrderedJson(nullptr);
    row["country"] = user.demographics.country ? OrderedJson(*user.demographics.country)
                                               : OrderedJson(nullptr);
    row["interests"] = user.interests;
    absl::StrAppend(&users, row.dump(), "\n");
  }
  const Provenance& provenance = population.provenance();
  std::string manifest = absl::StrCat(
      "format = ", kPopulationFormat, "\n",
      "provenance = ",
      provenance.kind == Provenance::Kind::kGenerated ? "generated" : "ingested", "\n",
      "seed = ", provenance.seed, "\n",
      "digest = ", provenance.digest, "\n",
      "content_digest = ", population.ContentDigest(), "\n",
      "n_users = ", population.users().size(), "\n",
      "n_interests = ", population.catalog().size(), "\n",
      "total_occurrences = ", population.total_occurrences(), "\n");

  if (auto s = WriteFile(dir / kCatalogFile, catalog); !s.ok()) return s;
  if (auto s = WriteFile(dir / kUsersFile, users); !s.ok()) return s;
  return WriteFile(dir / kManifestFile, manifest);
}

absl::StatusOr<Population> LoadPopulation(const std::filesystem::path& dir) {
  auto manifest_text = ReadFile(dir / kManifestFile);
  if (!manifest_text.ok()) return manifest_text.status();
  std::map<std::string, std::string> manifest;
  std::istringstream stream(*manifest_text);
  std::string line;
  while (std::getline(stream, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    manifest[line.substr(0, eq)] = line.substr(eq + 3);
  }
  if (manifest["format"] != kPopulationFormat) {
    return absl::InvalidArgumentError(
        absl::StrCat((dir / kManifestFile).string(), ": unsupported format '",
                     manifest["format"], "'"));
  }
  Provenance provenance;
  provenance.kind = manifest["provenance"] == "ingested" ? Provenance::Kind::kIngested
                                                         : Provenance::Kind::kGenerated;
  provenance.seed = std::strtoull(manifest["seed"].c_str(), nullptr, 10);
  provenance.digest = manifest["digest"];
  auto population =
      ReadPopulationFiles(dir / kUsersFile, dir / kCatalogFile, provenance, nullptr);
  if (!population.ok()) return population.status();
  if (const auto& expected = manifest["content_digest"];
      !expected.empty() && expected != population->ContentDigest()) {
    return absl::DataLossError(absl::StrCat(
        dir.string(), ": content digest mismatch (manifest ", expected, ", files ",
        population->ContentDigest(), ")"));
  }
  return population;
}

}  // namespace nanoscope
