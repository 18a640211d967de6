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

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vacos/data.hpp"
#include "vacos/error.hpp"
#include "vacos/eval.hpp"
#include "vacos/knn.hpp"

namespace vacos::cli
{

namespace
{

using json = nlohmann::ordered_json;

constexpr const char * kVersion = VACOS_VERSION;
constexpr std::uint64_t kDefaultSeed = 42;

struct DatasetArgs
{
  std::string path;
  std::string layout = "wdbc";
  std::string label_column = "diagnosis";
  std::string positive = "M";
  std::string id_column;
};

struct CommonArgs
{
  DatasetArgs data;
  int case_number = 1;
  std::size_t k = kDefaultK;
  std::uint64_t seed = kDefaultSeed;
  double train_fraction = 0.8;
  bool no_stratify = false;
  bool jitter = false;
  bool case2_training_only = false;
  unsigned jobs = 1;
  bool timestamp = false;
  std::string format = "table";
};

void add_dataset_options(CLI::App & cmd, DatasetArgs & d)
{
  cmd.add_option("dataset", d.path, "Dataset file")->required();
  cmd.add_option("--layout", d.layout, "Input layout: wdbc (id,diagnosis,30 features) or csv (headed)")
    ->check(CLI::IsMember({"wdbc", "csv"}))
    ->capture_default_str();
  cmd.add_option("--label-column", d.label_column, "Label column for --layout csv")->capture_default_str();
  cmd.add_option("--positive", d.positive, "Label value treated as the positive class for --layout csv")
    ->capture_default_str();
  cmd.add_option("--id-column", d.id_column, "Record id column for --layout csv (default: row number)");
}

void add_case_options(CLI::App & cmd, CommonArgs & a)
{
  cmd.add_option("--case", a.case_number, "1 = raw cosine, 2 = per-class population whitening (label oracle), "
                                          "3 = expected sample-covariance whitening")
    ->check(CLI::IsMember({1, 2, 3}))
    ->capture_default_str();
  cmd.add_flag("--jitter", a.jitter, "Add 1e-10 * trace / p to class covariance diagonals before factorizing");
  cmd.add_flag("--case2-training-only", a.case2_training_only,
               "Case 2: estimate class covariances from the training split only");
  cmd.add_option("--jobs", a.jobs, "Worker threads (output is identical for any value)")
    ->check(CLI::Range(1u, 256u))
    ->capture_default_str();
  cmd.add_flag("--timestamp", a.timestamp, "Record the wall-clock time in the manifest");
}

void add_split_options(CLI::App & cmd, CommonArgs & a)
{
  cmd.add_option("--seed", a.seed, "Split / fold seed")->capture_default_str();
  cmd.add_option("--split", a.train_fraction, "Training fraction")
    ->check(CLI::Range(0.0, 1.0))
    ->capture_default_str();
  cmd.add_flag("--no-stratify", a.no_stratify, "Plain random split instead of stratified");
}

Dataset load(const DatasetArgs & d)
{
  if (d.layout == "csv") {
    return load_generic_csv(d.path, GenericCsvOptions{d.label_column, d.positive, d.id_column});
  }
  return load_wdbc(d.path);
}

CaseOptions case_options(const CommonArgs & a)
{
  return CaseOptions{a.jitter, a.case2_training_only, a.jobs};
}

SplitSpec split_spec(const CommonArgs & a)
{
  return SplitSpec{a.train_fraction, a.seed, !a.no_stratify};
}

std::string now_utc()
{
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json manifest(const std::string & command, const CommonArgs & a, const Dataset & data, bool with_split)
{
  json m;
  m["command"] = command;
  m["tool_version"] = kVersion;
  m["dataset"] = {
    {"path", data.provenance},
    {"layout", a.data.layout},
    {"points", data.size()},
    {"features", data.dim()},
    {"positive", data.positive_name},
    {"negative", data.negative_name}};
  m["case"] = a.case_number;
  m["case_name"] = to_string(static_cast<CaseId>(a.case_number));
  m["k"] = a.k;
  m["seed"] = a.seed;
  if (with_split) {
    m["split"] = {{"train_fraction", a.train_fraction}, {"stratified", !a.no_stratify}};
  }
  m["options"] = {{"jitter", a.jitter}, {"case2_training_only", a.case2_training_only}};
  m["timestamp"] = a.timestamp ? json(now_utc()) : json();
  return m;
}

void print_manifest_comments(std::ostream & out, const json & m)
{
  out << "# vacos " << m["tool_version"].get<std::string>() << " " << m["command"].get<std::string>() << "\n";
  out << "# manifest: " << m.dump() << "\n";
}

void print_warnings(std::ostream & err, const Dataset & data)
{
  for (const auto & w : data.warnings) {
    err << "warning: " << data.provenance << ": " << w << "\n";
  }
}

std::string fixed(double v, int digits)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

int cmd_report(const CommonArgs & a, std::ostream & out, std::ostream & err)
{
  const Dataset data = load(a.data);
  print_warnings(err, data);
  const auto id = static_cast<CaseId>(a.case_number);
  const EvaluationReport report = run_case(data, id, split_spec(a), a.k, case_options(a));
  const json m = manifest("report", a, data, true);
  const ClassNames names = class_names_of(data);

  if (a.format == "json") {
    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["manifest"] = m;
    doc["report"] = json::parse(to_json(report, names));
    out << doc.dump(2) << "\n";
  } else if (a.format == "csv") {
    print_manifest_comments(out, m);
    out << format_csv(report);
  } else {
    print_manifest_comments(out, m);
    out << "# rows: 0 = " << names[0] << " (negative), 1 = " << names[1] << " (positive)\n\n";
    out << format_table(report) << "\n" << format_confusion(report, names);
  }
  return kOk;
}

struct CvArgs
{
  CommonArgs common;
  std::string method = "loocv";
  std::size_t folds = 5;
};

int cmd_cv(const CvArgs & c, std::ostream & out, std::ostream & err)
{
  const CommonArgs & a = c.common;
  const Dataset data = load(a.data);
  print_warnings(err, data);
  const auto id = static_cast<CaseId>(a.case_number);
  const CvResult result = c.method == "kfold" ? kfold_cv(data, id, a.k, c.folds, a.seed, case_options(a))
                                              : loocv(data, id, a.k, case_options(a));

  json m = manifest("cv", a, data, false);
  m["method"] = c.method;
  if (c.method == "kfold") {
    m["folds"] = c.folds;
  } else {
    m.erase("seed");
  }

  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto & f : result.folds) {
    correct += f.correct;
    total += f.size;
  }

  if (a.format == "json") {
    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["manifest"] = m;
    auto folds = json::array();
    for (const auto & f : result.folds) {
      folds.push_back({{"fold", f.fold}, {"size", f.size}, {"correct", f.correct}, {"accuracy", f.accuracy}});
    }
    doc["folds"] = std::move(folds);
    doc["held_out_total"] = total;
    doc["correct_total"] = correct;
    doc["mean_accuracy"] = result.mean_accuracy;
    out << doc.dump(2) << "\n";
    return kOk;
  }

  print_manifest_comments(out, m);
  if (c.method == "kfold") {
    out << "fold,size,correct,accuracy\n";
    for (const auto & f : result.folds) {
      out << f.fold << "," << f.size << "," << f.correct << "," << fixed(f.accuracy, 4) << "\n";
    }
  } else {
    out << "held-out points: " << total << ", correct: " << correct << "\n";
    std::string missed;
    for (const auto & f : result.folds) {
      if (f.correct == 0) {
        missed += (missed.empty() ? "" : " ") + std::to_string(data.points[f.fold].id);
      }
    }
    out << "misclassified ids: " << (missed.empty() ? "(none)" : missed) << "\n";
  }
  out << "mean accuracy: " << fixed(result.mean_accuracy, 4) << "\n";
  return kOk;
}

struct SweepArgs
{
  CommonArgs common;
  std::size_t k_min = 1;
  std::size_t k_max = 31;
};

int cmd_sweep(const SweepArgs & s, std::ostream & out, std::ostream & err)
{
  const CommonArgs & a = s.common;
  if (s.k_min == 0 || s.k_min > s.k_max) {
    throw InputError("sweep-k: need 1 <= k-min <= k-max");
  }
  const Dataset data = load(a.data);
  print_warnings(err, data);
  std::vector<std::size_t> ks(s.k_max - s.k_min + 1);
  std::iota(ks.begin(), ks.end(), s.k_min);
  const SweepResult result =
    sweep_case(data, static_cast<CaseId>(a.case_number), split_spec(a), ks, case_options(a));

  json m = manifest("sweep-k", a, data, true);
  m.erase("k");
  m["k_min"] = s.k_min;
  m["k_max"] = s.k_max;

  out << "k,misclassification_rate\n";
  char buf[64];
  for (const auto & p : result.curve) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.misclassification_rate);
    out << p.k << "," << buf << "\n";
  }
  std::snprintf(buf, sizeof(buf), "%.17g", result.min_rate);
  out << "# argmin_k=" << result.argmin_k << " misclassification_rate=" << buf << "\n";
  out << "# manifest: " << m.dump() << "\n";
  return kOk;
}

struct DemoArgs
{
  std::uint64_t seed = kDefaultSeed;
  bool isotropic = false;
  double correlation = 0.9;
  double variance_x = 1.0;
  double variance_y = 1.0;
  std::string format = "text";
};

std::string point(const FeatureVector & v)
{
  char buf[96];
  std::snprintf(buf, sizeof(buf), "(%.6f, %.6f)", v[0], v[1]);
  return buf;
}

int cmd_demo(const DemoArgs & d, std::ostream & out)
{
  Fig1Options options;
  options.correlation = d.isotropic ? 0.0 : d.correlation;
  options.variance_x = d.variance_x;
  options.variance_y = d.isotropic ? d.variance_x : d.variance_y;
  const Fig1Counterexample ex = fig1_counterexample(d.seed, options);

  if (d.format == "json") {
    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["seed"] = d.seed;
    doc["covariance"] = {{ex.covariance(0, 0), ex.covariance(0, 1)}, {ex.covariance(1, 0), ex.covariance(1, 1)}};
    doc["applicable"] = ex.applicable;
    if (ex.applicable) {
      doc["points"] = {{"A", ex.a}, {"B", ex.b}, {"C", ex.c}};
      doc["mahalanobis_sq"] = {{"A", ex.mahalanobis_sq_a}, {"B", ex.mahalanobis_sq_b}, {"C", ex.mahalanobis_sq_c}};
      doc["plain_cosine"] = {{"AB", ex.plain_ab}, {"BC", ex.plain_bc}};
      doc["adjusted_cosine"] = {{"AB", ex.adjusted_ab}, {"BC", ex.adjusted_bc}};
      doc["flipped"] = ex.flipped();
      doc["attempts"] = ex.attempts;
    }
    out << doc.dump(2) << "\n";
    return kOk;
  }

  out << "# vacos " << kVersion << " demo-fig1 (seed " << d.seed << ")\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "covariance [[%g, %g], [%g, %g]], mean (0, 0)\n", ex.covariance(0, 0),
                ex.covariance(0, 1), ex.covariance(1, 0), ex.covariance(1, 1));
  out << buf;
  if (!ex.applicable) {
    out << "no flip possible: the covariance is isotropic, so whitening only rescales and every cosine is unchanged\n";
    return kOk;
  }
  std::snprintf(buf, sizeof(buf), "A = %s  mahalanobis^2 = %.4f  (outlier)\n", point(ex.a).c_str(), ex.mahalanobis_sq_a);
  out << buf;
  std::snprintf(buf, sizeof(buf), "B = %s  mahalanobis^2 = %.4f\n", point(ex.b).c_str(), ex.mahalanobis_sq_b);
  out << buf;
  std::snprintf(buf, sizeof(buf), "C = %s  mahalanobis^2 = %.4f\n", point(ex.c).c_str(), ex.mahalanobis_sq_c);
  out << buf;
  std::snprintf(buf, sizeof(buf), "plain cosine:    cos(A,B) = %.6f  cos(B,C) = %.6f\n", ex.plain_ab, ex.plain_bc);
  out << buf;
  std::snprintf(buf, sizeof(buf), "adjusted cosine: cos(A,B) = %.6f  cos(B,C) = %.6f\n", ex.adjusted_ab, ex.adjusted_bc);
  out << buf;
  const char * plain = ex.plain_ab > ex.plain_bc ? "A>C" : "C>A";
  const char * adjusted = ex.adjusted_bc > ex.adjusted_ab ? "C>A" : "A>C";
  out << "nearest to B -- plain cosine: " << plain << "; adjusted: " << adjusted
      << (ex.flipped() ? "  (ranking flips)" : "  (no flip)") << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Variance-adjusted cosine KNN experiments", "vacos"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonArgs report_args;
  auto * report = app.add_subcommand("report", "Classification report for one case on a train/validation split");
  add_dataset_options(*report, report_args.data);
  add_case_options(*report, report_args);
  add_split_options(*report, report_args);
  report->add_option("--k", report_args.k, "Neighbors")->check(CLI::PositiveNumber)->capture_default_str();
  report->add_option("--format", report_args.format, "table, json or csv")
    ->check(CLI::IsMember({"table", "json", "csv"}))
    ->capture_default_str();

  CvArgs cv_args;
  auto * cv = app.add_subcommand("cv", "Leave-one-out or k-fold cross-validated mean accuracy");
  add_dataset_options(*cv, cv_args.common.data);
  add_case_options(*cv, cv_args.common);
  cv->add_option("--k", cv_args.common.k, "Neighbors")->check(CLI::PositiveNumber)->capture_default_str();
  cv->add_option("--method", cv_args.method, "loocv or kfold")
    ->check(CLI::IsMember({"loocv", "kfold"}))
    ->capture_default_str();
  cv->add_option("--folds", cv_args.folds, "Folds for --method kfold")->check(CLI::Range(2ul, 1ul << 30))->capture_default_str();
  cv->add_option("--seed", cv_args.common.seed, "Fold assignment seed")->capture_default_str();
  cv->add_option("--format", cv_args.common.format, "text or json")
    ->check(CLI::IsMember({"text", "json"}))
    ->default_val("text");

  SweepArgs sweep_args;
  auto * sweep = app.add_subcommand("sweep-k", "Validation misclassification rate for each k (CSV)");
  add_dataset_options(*sweep, sweep_args.common.data);
  add_case_options(*sweep, sweep_args.common);
  add_split_options(*sweep, sweep_args.common);
  sweep->add_option("--k-min", sweep_args.k_min, "Smallest k")->capture_default_str();
  sweep->add_option("--k-max", sweep_args.k_max, "Largest k")->capture_default_str();

  DemoArgs demo_args;
  auto * demo = app.add_subcommand("demo-fig1", "Three-point example where whitening flips the cosine ranking");
  demo->add_option("--seed", demo_args.seed, "Search seed")->capture_default_str();
  demo->add_option("--correlation", demo_args.correlation, "Correlation of the 2-d Gaussian")
    ->check(CLI::Range(-0.999, 0.999))
    ->capture_default_str();
  demo->add_option("--variance-x", demo_args.variance_x, "Variance of x")->check(CLI::PositiveNumber)->capture_default_str();
  demo->add_option("--variance-y", demo_args.variance_y, "Variance of y")->check(CLI::PositiveNumber)->capture_default_str();
  demo->add_flag("--isotropic", demo_args.isotropic, "Use an isotropic covariance (no flip can exist)");
  demo->add_option("--format", demo_args.format, "text or json")
    ->check(CLI::IsMember({"text", "json"}))
    ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError & e) {
    // Help and version requests surface here too and exit cleanly.
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (report->parsed()) {
      return cmd_report(report_args, out, err);
    }
    if (cv->parsed()) {
      return cmd_cv(cv_args, out, err);
    }
    if (sweep->parsed()) {
      return cmd_sweep(sweep_args, out, err);
    }
    if (demo->parsed()) {
      return cmd_demo(demo_args, out);
    }
  } catch (const NumericalError & e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const InputError & e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception & e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace vacos::cli
