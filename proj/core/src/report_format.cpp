// Copyright 2026 The vacos Authors
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

#include <cstdio>
#include <string>

#include "json.hpp"
#include "vacos/eval.hpp"

namespace vacos
{

namespace
{

constexpr int kRowWidth = 12;  // strlen("weighted avg")

std::string printf_string(const char * fmt, auto... args)
{
  char buf[256];
  const int n = std::snprintf(buf, sizeof(buf), fmt, args...);
  return std::string(buf, static_cast<std::size_t>(n > 0 ? n : 0));
}

std::string metric_row(const std::string & name, const ClassMetrics & m)
{
  return printf_string(
    "%*s  %9.3f %9.3f %9.3f %9zu\n", kRowWidth, name.c_str(), m.precision, m.recall, m.f1, m.support);
}

std::string full(double v) { return printf_string("%.17g", v); }

nlohmann::ordered_json metrics_json(const ClassMetrics & m)
{
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1_score", m.f1}, {"support", m.support}};
}

}  // namespace

std::string format_table(const EvaluationReport & r)
{
  std::string out;
  out += printf_string("%*s  %9s %9s %9s %9s\n\n", kRowWidth, "", "precision", "recall", "f1-score", "support");
  out += metric_row("0", r.classes[0]);
  out += metric_row("1", r.classes[1]);
  out += "\n";
  out += printf_string("%*s  %9s %9s %9.3f %9zu\n", kRowWidth, "accuracy", "", "", r.accuracy, r.total());
  out += metric_row("macro avg", r.macro);
  out += metric_row("weighted avg", r.weighted);
  return out;
}

std::string format_confusion(const EvaluationReport & r, const ClassNames & names)
{
  std::string out = "confusion matrix (rows = true, columns = predicted)\n";
  out += printf_string("%*s  %9s %9s\n", kRowWidth, "", "0", "1");
  for (int t = 0; t < 2; ++t) {
    out += printf_string(
      "%*s  %9zu %9zu\n", kRowWidth, (std::to_string(t) + " (" + names[t] + ")").c_str(),
      r.confusion[t][0], r.confusion[t][1]);
  }
  return out;
}

std::string format_csv(const EvaluationReport & r)
{
  std::string out = "row,precision,recall,f1_score,support\n";
  const auto row = [&out](const std::string & name, const ClassMetrics & m) {
    out += name + "," + full(m.precision) + "," + full(m.recall) + "," + full(m.f1) + "," +
           std::to_string(m.support) + "\n";
  };
  row("0", r.classes[0]);
  row("1", r.classes[1]);
  out += "accuracy,,," + full(r.accuracy) + "," + std::to_string(r.total()) + "\n";
  row("macro avg", r.macro);
  row("weighted avg", r.weighted);
  return out;
}

std::string to_json(const EvaluationReport & r, const ClassNames & names, int indent)
{
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["case"] = r.case_id ? nlohmann::ordered_json(static_cast<int>(*r.case_id)) : nlohmann::ordered_json();
  j["k"] = r.k;
  j["seed"] = r.seed ? nlohmann::ordered_json(*r.seed) : nlohmann::ordered_json();

  auto classes = nlohmann::ordered_json::array();
  for (int c = 0; c < 2; ++c) {
    auto entry = nlohmann::ordered_json{
      {"row", c}, {"name", names[c]}, {"label", to_string(static_cast<Label>(c))}};
    entry.update(metrics_json(r.classes[c]));
    classes.push_back(std::move(entry));
  }
  j["classes"] = std::move(classes);
  j["accuracy"] = r.accuracy;
  j["support_total"] = r.total();
  j["macro_avg"] = metrics_json(r.macro);
  j["weighted_avg"] = metrics_json(r.weighted);
  j["confusion_matrix"] = {
    {"rows", "true"},
    {"columns", "predicted"},
    {"counts", {{r.confusion[0][0], r.confusion[0][1]}, {r.confusion[1][0], r.confusion[1][1]}}}};
  j["zero_division"] = r.zero_division;
  return j.dump(indent);
}

}  // namespace vacos
