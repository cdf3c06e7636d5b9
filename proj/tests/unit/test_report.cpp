// Copyright 2026 The purlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "purlab/metrics/report.hpp"

namespace purlab {
namespace {

MetricReport sample_report() {
  MetricReport r;
  r.name = "style";
  r.provenance = {7, "abc123", {{"autoencoder.purlab", "00ff"}}};
  r.config_json = R"({"seed":7})";
  r.add("img_000", "clean", "victim_hit", 1.0);
  r.add("img_001", "clean", "victim_hit", 0.0);
  r.add("img_000", "protected", "victim_hit", 0.0);
  r.add("img_000", "clean", "ssim", 0.1 + 0.2);
  r.add("img_001", "clean", "ssim", 1.0 / 3.0);
  return r;
}

TEST(Report, AggregatesUsePopulationStd) {
  const MetricReport r = sample_report();
  const auto agg = r.aggregates();
  ASSERT_EQ(agg.size(), 3u);
  EXPECT_EQ(agg[0].condition, "clean");
  EXPECT_EQ(agg[0].metric, "victim_hit");
  EXPECT_DOUBLE_EQ(agg[0].mean, 0.5);
  EXPECT_DOUBLE_EQ(agg[0].std, 0.5);
  EXPECT_EQ(agg[0].count, 2u);
  EXPECT_DOUBLE_EQ(r.mean("protected", "victim_hit"), 0.0);
  EXPECT_THROW(r.mean("impress", "victim_hit"), std::out_of_range);
  EXPECT_EQ(r.values("clean", "ssim").size(), 2u);
}

TEST(Report, JsonRoundTripIsExact) {
  const MetricReport r = sample_report();
  const std::string text = to_json(r);
  const MetricReport back = report_from_json(text);
  EXPECT_EQ(back, r);
  EXPECT_EQ(to_json(back), text);
  EXPECT_THROW(report_from_json("{not json"), std::exception);
}

TEST(Report, CsvRoundTripKeepsDoublesBitExact) {
  const MetricReport r = sample_report();
  const std::string csv = to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "image_id,condition,metric,value");
  EXPECT_EQ(records_from_csv(csv), r.records);
}

TEST(Report, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

}  // namespace
}  // namespace purlab
