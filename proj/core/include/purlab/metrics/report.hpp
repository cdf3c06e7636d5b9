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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace purlab {

struct MetricRecord {
  std::string image_id;
  std::string condition;
  std::string metric;
  double value = 0.0;

  bool operator==(const MetricRecord&) const = default;
};

struct MetricAggregate {
  std::string condition;
  std::string metric;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::size_t count = 0;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::map<std::string, std::string> model_hashes;

  bool operator==(const Provenance&) const = default;
};

/// Per-image values plus run provenance. Aggregates are derived on demand
/// so they always agree with the records.
struct MetricReport {
  std::string name;
  std::vector<MetricRecord> records;
  Provenance provenance;
  /// Canonical JSON text of the configuration that produced the report.
  std::string config_json = "{}";

  void add(std::string image_id, std::string condition, std::string metric, double value);
  /// Aggregates in first-appearance order of (condition, metric).
  std::vector<MetricAggregate> aggregates() const;
  /// Mean over records matching condition and metric; throws if none.
  double mean(const std::string& condition, const std::string& metric) const;
  std::vector<double> values(const std::string& condition, const std::string& metric) const;

  bool operator==(const MetricReport&) const = default;
};

std::string to_json(const MetricReport& report);
MetricReport report_from_json(const std::string& text);
/// Header: image_id,condition,metric,value. Values use 17 significant digits.
std::string to_csv(const MetricReport& report);
std::vector<MetricRecord> records_from_csv(const std::string& text);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);
std::string file_hash(const std::filesystem::path& path);

}  // namespace purlab
