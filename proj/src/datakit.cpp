/**
 * Copyright 2026 The rashdx Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "rashdx/datakit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "rashdx/error.hpp"
#include "rashdx/util.hpp"

namespace rashdx::datakit {

namespace fs = std::filesystem;

DatasetManifest::DatasetManifest(std::string name, fs::path base_dir, std::vector<ImageRecord> records)
    : name_(std::move(name)), base_dir_(std::move(base_dir)), records_(std::move(records)) {
  std::unordered_set<std::string> seen;
  for (const auto &r : records_) {
    if (r.path.empty()) throw ValidationError("record with empty path");
    if ((r.grade || r.stage) && r.label != ClassLabel::kMpox) {
      throw ValidationError("grade/stage given for non-Mpox record: " + r.path);
    }
    if (!seen.insert(r.path).second) throw ValidationError("duplicate path: " + r.path);
    if (!r.label) labeled_ = false;
  }
}

namespace {

// Splits one CSV line; double quotes delimit fields containing commas and
// a doubled quote inside a quoted field is a literal quote.
std::vector<std::string> split_csv(const std::string &line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  fields.push_back(std::move(cur));
  return fields;
}

fs::path relative_to(const fs::path &p, const fs::path &dir) {
  fs::path abs_p = fs::absolute(p).lexically_normal();
  fs::path abs_dir = fs::absolute(dir.empty() ? fs::path(".") : dir).lexically_normal();
  return abs_p.lexically_proximate(abs_dir);
}

std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

}  // namespace

DatasetManifest parse_manifest(const std::string &text, const std::string &name, const fs::path &base_dir,
                               bool check_files) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<ImageRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!header_seen) {
      if (trim(line) != kManifestHeader) {
        throw ParseError(std::string("expected header '") + kManifestHeader + "'", line_no);
      }
      header_seen = true;
      continue;
    }
    auto fields = split_csv(line, line_no);
    if (fields.size() > 5) throw ParseError("too many columns (" + std::to_string(fields.size()) + ")", line_no);
    fields.resize(5);
    ImageRecord rec;
    rec.path = trim(fields[0]);
    if (rec.path.empty()) throw ParseError("empty path", line_no);
    if (auto label = trim(fields[1]); !label.empty()) {
      rec.label = parse_class(label);
      if (!rec.label) throw ValidationError("line " + std::to_string(line_no) + ": unknown class '" + label + "'");
    }
    if (auto g = trim(fields[2]); !g.empty()) {
      rec.grade = parse_grade(g);
      if (!rec.grade) throw ParseError("unknown grade '" + g + "'", line_no);
    }
    if (auto s = trim(fields[3]); !s.empty()) {
      rec.stage = parse_stage(s);
      if (!rec.stage) throw ParseError("unknown stage '" + s + "'", line_no);
    }
    rec.source = fields[4];
    if ((rec.grade || rec.stage) && rec.label != ClassLabel::kMpox) {
      throw ValidationError("line " + std::to_string(line_no) + ": grade/stage only allowed on Mpox records");
    }
    if (check_files && !fs::exists(base_dir / rec.path)) {
      throw IngestionError("line " + std::to_string(line_no) + ": referenced file missing: " +
                           (base_dir / rec.path).string());
    }
    records.push_back(std::move(rec));
  }
  return DatasetManifest(name, base_dir, std::move(records));
}

DatasetManifest load_manifest(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open manifest: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  fs::path base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_manifest(buf.str(), path.stem().string(), base, true);
}

std::string format_manifest(const DatasetManifest &manifest, const fs::path &manifest_dir) {
  std::ostringstream out;
  out << kManifestHeader << '\n';
  for (const auto &r : manifest.records()) {
    fs::path rel = relative_to(manifest.resolve(r), manifest_dir);
    out << csv_field(rel.generic_string()) << ',' << (r.label ? std::string(name_of(*r.label)) : "") << ','
        << (r.grade ? std::string(name_of(*r.grade)) : "") << ',' << (r.stage ? std::string(name_of(*r.stage)) : "")
        << ',' << csv_field(r.source) << '\n';
  }
  return out.str();
}

void save_manifest(const DatasetManifest &manifest, const fs::path &path) {
  fs::path dir = path.parent_path();
  std::error_code ec;
  if (!dir.empty()) fs::create_directories(dir, ec);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  out << format_manifest(manifest, dir.empty() ? fs::path(".") : dir);
  if (!out) throw IoError("short write: " + path.string());
}

ClassCounts class_distribution(const DatasetManifest &manifest) {
  require(manifest.labeled(), "class_distribution requires a labeled manifest");
  ClassCounts counts{};
  for (const auto &r : manifest.records()) ++counts[static_cast<std::size_t>(index_of(*r.label))];
  return counts;
}

SplitResult stratified_split(const DatasetManifest &manifest, double train_fraction, std::uint64_t seed) {
  require(train_fraction > 0.0 && train_fraction < 1.0, "train_fraction must lie in (0, 1)");
  require(manifest.labeled(), "stratified_split requires a labeled manifest");
  require(!manifest.empty(), "stratified_split requires a non-empty manifest");

  std::array<std::vector<std::size_t>, kNumClasses> members;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    members[static_cast<std::size_t>(index_of(*manifest.records()[i].label))].push_back(i);
  }

  // Largest-remainder apportionment of round(f * total) train seats.
  std::array<std::size_t, kNumClasses> quota{};
  std::array<double, kNumClasses> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    double exact = train_fraction * static_cast<double>(members[c].size());
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  auto target = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(manifest.size())));
  std::array<std::size_t, kNumClasses> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < target && k < kNumClasses; ++k) {
    std::size_t c = order[k];
    if (remainder[c] > 0.0) {
      ++quota[c];
      ++assigned;
    }
  }

  std::vector<bool> to_train(manifest.size(), false);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto idx = members[c];
    std::mt19937_64 rng(mix_seed(seed, c));
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < quota[c]; ++k) to_train[idx[k]] = true;
  }

  std::vector<ImageRecord> train, test;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    (to_train[i] ? train : test).push_back(manifest.records()[i]);
  }
  return {DatasetManifest(manifest.name() + "_train", manifest.base_dir(), std::move(train)),
          DatasetManifest(manifest.name() + "_test", manifest.base_dir(), std::move(test))};
}

namespace {

bool is_image_file(const fs::path &p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

DatasetManifest scan_image_folder(const fs::path &root, bool labeled, const std::string &name) {
  if (!fs::is_directory(root)) throw IngestionError("not a directory: " + root.string());
  std::vector<ImageRecord> records;
  if (labeled) {
    for (ClassLabel c : kAllClasses) {
      fs::path dir = root / std::string(name_of(c));
      if (!fs::is_directory(dir)) continue;
      std::vector<std::string> files;
      for (const auto &entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) {
          files.push_back(entry.path().lexically_relative(root).generic_string());
        }
      }
      std::sort(files.begin(), files.end());
      for (auto &f : files) records.push_back({f, c, std::nullopt, std::nullopt, name});
    }
  } else {
    std::vector<std::string> files;
    for (const auto &entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file() && is_image_file(entry.path())) {
        files.push_back(entry.path().lexically_relative(root).generic_string());
      }
    }
    std::sort(files.begin(), files.end());
    for (auto &f : files) records.push_back({f, std::nullopt, std::nullopt, std::nullopt, name});
  }
  return DatasetManifest(name, root, std::move(records));
}

std::uint64_t fingerprint(const DatasetManifest &manifest) {
  std::uint64_t h = kFnvOffset;
  for (const auto &r : manifest.records()) {
    h = fnv1a(r.path, h);
    h = fnv1a(r.label ? name_of(*r.label) : std::string_view("-"), h);
    h = fnv1a("\n", h);
  }
  return h;
}

}  // namespace rashdx::datakit
