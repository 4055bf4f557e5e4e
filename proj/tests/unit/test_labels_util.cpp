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
#include <gtest/gtest.h>

#include "rashdx/error.hpp"
#include "rashdx/labels.hpp"
#include "rashdx/util.hpp"

using namespace rashdx;

TEST(Labels, RosterIsAlphabeticalAndRoundTrips) {
  ASSERT_EQ(kNumClasses, 8u);
  for (std::size_t i = 1; i < kNumClasses; ++i) EXPECT_LT(kClassNames[i - 1], kClassNames[i]);
  for (ClassLabel c : kAllClasses) {
    EXPECT_EQ(parse_class(name_of(c)), c);
    EXPECT_EQ(class_from_index(index_of(c)), c);
  }
  EXPECT_EQ(index_of(ClassLabel::kMpox), 4);
}

TEST(Labels, UnknownNamesAndIndices) {
  EXPECT_FALSE(parse_class("Psoriasis").has_value());
  EXPECT_FALSE(parse_class("").has_value());
  EXPECT_THROW(class_from_index(8), ContractError);
  EXPECT_THROW(class_from_index(-1), ContractError);
}

TEST(Labels, GradeFourIsOthers) {
  EXPECT_EQ(parse_grade("IV"), Grade::kOthers);
  EXPECT_EQ(parse_grade("Others"), Grade::kOthers);
  EXPECT_EQ(parse_grade("II"), Grade::kII);
  EXPECT_FALSE(parse_grade("V").has_value());
  EXPECT_EQ(parse_stage("earlier"), Stage::kEarlier);
  EXPECT_EQ(parse_stage("later"), Stage::kLater);
  EXPECT_FALSE(parse_stage("middle").has_value());
  EXPECT_EQ(name_of(Grade::kOthers), "Others");
}

TEST(Util, MixSeedSeparatesStreams) {
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  EXPECT_NE(mix_seed(0, 1), mix_seed(1, 0));
  EXPECT_EQ(mix_seed(7, 3, 9), mix_seed(mix_seed(7, 3), 9));
}

TEST(Util, Fnv1aKnownVector) {
  // Published FNV-1a 64-bit test vectors.
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Util, KeyValueConfig) {
  auto cfg = KeyValueConfig::parse("# comment\n train.lr = 0.05 \n\nflag = yes\ntrain.lr=0.1\nname = a b # trailing\n");
  EXPECT_DOUBLE_EQ(cfg.get_double("train.lr", 0.0), 0.1);
  EXPECT_TRUE(cfg.get_bool("flag", false));
  EXPECT_EQ(cfg.get_string("name", ""), "a b");
  EXPECT_EQ(cfg.get_int("missing", 42), 42);
  EXPECT_THROW(KeyValueConfig::parse("no equals sign here\n"), ParseError);
  auto bad = KeyValueConfig::parse("x = abc\n");
  EXPECT_THROW(bad.get_double("x", 0.0), ParseError);
}

TEST(Util, Trim) {
  EXPECT_EQ(trim("  a b \t\n"), "a b");
  EXPECT_EQ(trim(""), "");
}
