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

#include "purlab/metrics/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace purlab {

void MetricReport::add(std::string image_id, std::string condition, std::string metric, double value) {
  records.push_back({std::move(image_id), std::move(condition), std::move(metric), value});
}

std::vector<MetricAggregate> MetricReport::aggregates() const {
  std::vector<MetricAggregate> out;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::vector<std::vector<double>> values;
  for (const auto& r : records) {
    auto [it, inserted] = index.try_emplace({r.condition, r.metric}, out.size());
    if (inserted) {
      out.push_back({r.condition, r.metric, 0.0, 0.0, 0});
      values.emplace_back();
    }
    values[it->second].push_back(r.value);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& v = values[i];
    double s = 0.0;
    for (double x : v) s += x;
    const double mean = s / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    out[i].mean = mean;
    out[i].std = std::sqrt(ss / static_cast<double>(v.size()));
    out[i].count = v.size();
  }
  return out;
}

std::vector<double> MetricReport::values(const std::string& condition, const std::string& metric) const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.condition == condition && r.metric == metric) out.push_back(r.value);
  }
  return out;
}

double MetricReport::mean(const std::string& condition, const std::string& metric) const {
  const auto v = values(condition, metric);
  if (v.empty()) throw std::out_of_range("report has no '" + metric + "' values for '" + condition + "'");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["name"] = report.name;
  j["provenance"] = {{"seed", report.provenance.seed},
                     {"config_hash", report.provenance.config_hash},
                     {"model_hashes", report.provenance.model_hashes}};
  j["config"] = nlohmann::ordered_json::parse(report.config_json);
  auto& agg = j["aggregates"] = nlohmann::ordered_json::array();
  for (const auto& a : report.aggregates()) {
    agg.push_back({{"condition", a.condition}, {"metric", a.metric}, {"mean", a.mean}, {"std", a.std},
                   {"count", a.count}});
  }
  auto& recs = j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : report.records) {
    recs.push_back({{"image_id", r.image_id}, {"condition", r.condition}, {"metric", r.metric},
                    {"value", r.value}});
  }
  return j.dump(2) + "\n";
}

MetricReport report_from_json(const std::string& text) {
  const auto j = nlohmann::ordered_json::parse(text);
  MetricReport r;
  r.name = j.at("name").get<std::string>();
  const auto& p = j.at("provenance");
  r.provenance.seed = p.at("seed").get<std::uint64_t>();
  r.provenance.config_hash = p.at("config_hash").get<std::string>();
  r.provenance.model_hashes = p.at("model_hashes").get<std::map<std::string, std::string>>();
  r.config_json = j.at("config").dump();
  for (const auto& rec : j.at("records")) {
    r.add(rec.at("image_id").get<std::string>(), rec.at("condition").get<std::string>(),
          rec.at("metric").get<std::string>(), rec.at("value").get<double>());
  }
  return r;
}

std::string to_csv(const MetricReport& report) {
  std::string out = "image_id,condition,metric,value\n";
  char buf[64];
  for (const auto& r : report.records) {
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    out += r.image_id + ',' + r.condition + ',' + r.metric + ',' + buf + '\n';
  }
  return out;
}

std::vector<MetricRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "image_id,condition,metric,value") {
    throw std::invalid_argument("metric CSV has an unexpected header");
  }
  std::vector<MetricRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (fields.size() != 4) throw std::invalid_argument("malformed metric CSV row: " + line);
    out.push_back({fields[0], fields[1], fields[2], std::stod(fields[3])});
  }
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash '" + path.string() + "'");
  return fnv1a_hex(std::string(std::istreambuf_iterator<char>(in), {}));
}

}  // namespace purlab
