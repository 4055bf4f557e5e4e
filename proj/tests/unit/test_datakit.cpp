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
#include <cmath>
#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "rashdx/datakit.hpp"
#include "rashdx/error.hpp"

using namespace rashdx;
using namespace rashdx::datakit;

namespace {

std::string csv(const std::string &body) { return std::string(kManifestHeader) + "\n" + body; }

std::set<std::string> paths_of(const DatasetManifest &m) {
  std::set<std::string> out;
  for (const auto &r : m.records()) out.insert(r.path);
  return out;
}

}  // namespace

TEST(Manifest, ParsesAllFields) {
  auto m = parse_manifest(csv("a.png,Mpox,II,earlier,site1\nb.png,Eczema,,,\n\"c,d.png\",Normal,,,\"x \"\"q\"\"\"\n"),
                          "t", ".", false);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m.records()[0].grade, Grade::kII);
  EXPECT_EQ(m.records()[0].stage, Stage::kEarlier);
  EXPECT_EQ(m.records()[0].source, "site1");
  EXPECT_EQ(m.records()[1].label, ClassLabel::kEczema);
  EXPECT_FALSE(m.records()[1].grade.has_value());
  EXPECT_EQ(m.records()[2].path, "c,d.png");
  EXPECT_EQ(m.records()[2].source, "x \"q\"");
  EXPECT_TRUE(m.labeled());
}

TEST(Manifest, UnlabeledRows) {
  auto m = parse_manifest(csv("a.png,,,,\nb.png,Mpox,,,\n"), "t", ".", false);
  EXPECT_FALSE(m.labeled());
  EXPECT_THROW(stratified_split(m, 0.8, 1), ContractError);
}

TEST(Manifest, Rejections) {
  EXPECT_THROW(parse_manifest("a.png,Mpox\n", "t", ".", false), ParseError);
  EXPECT_THROW(parse_manifest(csv("a.png,Psoriasis,,,\n"), "t", ".", false), ValidationError);
  EXPECT_THROW(parse_manifest(csv("a.png,Eczema,II,,\n"), "t", ".", false), ValidationError);
  EXPECT_THROW(parse_manifest(csv("a.png,Mpox,V,,\n"), "t", ".", false), ParseError);
  EXPECT_THROW(parse_manifest(csv("a.png,Mpox,,,\na.png,Mpox,,,\n"), "t", ".", false), ValidationError);
  EXPECT_THROW(parse_manifest(csv("\"a.png,Mpox,,,\n"), "t", ".", false), ParseError);
  EXPECT_THROW(parse_manifest(csv("missing.png,Mpox,,,\n"), "t", "/nonexistent", true), IngestionError);
}

TEST(Manifest, SaveLoadRoundTrip) {
  fixtures::TempDir dir("manifest");
  std::filesystem::create_directories(dir / "img");
  for (const char *f : {"img/a.png", "img/b.png"}) write_png(ImageTensor(2, 2, 0.5f), dir / f);
  auto m = parse_manifest(csv("img/a.png,Mpox,Others,later,s\nimg/b.png,Vasculitis,,,\n"), "round", dir.path(), false);
  save_manifest(m, dir / "round.csv");
  auto back = load_manifest(dir / "round.csv");
  EXPECT_EQ(back.name(), "round");
  EXPECT_EQ(back.records(), m.records());
  EXPECT_EQ(fingerprint(back), fingerprint(m));
}

TEST(Manifest, Distribution) {
  ClassCounts counts{3, 0, 5, 1, 0, 2, 7, 4};
  EXPECT_EQ(class_distribution(fixtures::manifest_with_counts(counts)), counts);
}

TEST(Split, RandomManifestsSatisfyInvariants) {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  for (int trial = 0; trial < 200; ++trial) {
    auto counts = fixtures::random_counts(rng, 40);
    auto m = fixtures::manifest_with_counts(counts);
    const double f = frac(rng);
    const std::uint64_t seed = rng();
    auto s = stratified_split(m, f, seed);

    auto tr = paths_of(s.train), te = paths_of(s.test);
    for (const auto &p : tr) EXPECT_EQ(te.count(p), 0u);
    EXPECT_EQ(tr.size() + te.size(), m.size());
    EXPECT_EQ(s.train.size() + s.test.size(), m.size());

    auto ctr = class_distribution(s.train);
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      EXPECT_LE(std::abs(static_cast<double>(ctr[c]) - f * counts[c]), 1.0) << "class " << c;
    }
    EXPECT_EQ(s.train.size(), static_cast<std::size_t>(std::llround(f * m.size())));

    auto again = stratified_split(m, f, seed);
    EXPECT_EQ(again.train.records(), s.train.records());
    EXPECT_EQ(again.test.records(), s.test.records());
  }
}

TEST(Split, FullDatasetTotals) {
  // A 4831-image corpus with an uneven class profile.
  ClassCounts counts{790, 400, 1220, 336, 541, 420, 430, 694};
  auto m = fixtures::manifest_with_counts(counts);
  ASSERT_EQ(m.size(), 4831u);
  auto s = stratified_split(m, 0.8, 7);
  EXPECT_NEAR(static_cast<double>(s.train.size()), 3866.0, 8.0);
  EXPECT_NEAR(static_cast<double>(s.test.size()), 965.0, 8.0);
  EXPECT_EQ(s.train.name(), "m_train");
  EXPECT_EQ(s.test.name(), "m_test");
}

TEST(Split, DifferentSeedsDiffer) {
  auto m = fixtures::manifest_with_counts({50, 50, 50, 50, 50, 50, 50, 50});
  EXPECT_NE(stratified_split(m, 0.5, 1).train.records(), stratified_split(m, 0.5, 2).train.records());
}

TEST(Split, RejectsBadFraction) {
  auto m = fixtures::manifest_with_counts({1, 1, 1, 1, 1, 1, 1, 1});
  EXPECT_THROW(stratified_split(m, 0.0, 1), ContractError);
  EXPECT_THROW(stratified_split(m, 1.0, 1), ContractError);
  EXPECT_THROW(stratified_split(DatasetManifest(), 0.5, 1), ContractError);
}

TEST(Scan, LabeledFolders) {
  fixtures::TempDir dir("scan");
  auto img = quantize8(fixtures::random_image(4, 4, 1));
  std::filesystem::create_directories(dir / "Mpox/sub");
  std::filesystem::create_directories(dir / "Normal");
  write_png(img, dir / "Mpox/b.png");
  write_png(img, dir / "Mpox/sub/a.png");
  write_png(img, dir / "Normal/c.png");
  {
    std::ofstream(dir / "Normal/readme.txt") << "not an image";
  }
  auto m = scan_image_folder(dir.path(), true, "scan");
  ASSERT_EQ(m.size(), 3u);
  auto counts = class_distribution(m);
  EXPECT_EQ(counts[index_of(ClassLabel::kMpox)], 2u);
  EXPECT_EQ(counts[index_of(ClassLabel::kNormal)], 1u);

  auto u = scan_image_folder(dir.path(), false, "u");
  EXPECT_EQ(u.size(), 3u);
  EXPECT_FALSE(u.labeled());
}
