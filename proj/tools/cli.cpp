/*
 * Copyright 2026 The adrsignal Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "adrsig/cohort.hpp"
#include "adrsig/csv.hpp"
#include "adrsig/feature_matrix.hpp"
#include "adrsig/readcode.hpp"
#include "adrsig/report.hpp"
#include "adrsig/stats.hpp"
#include "adrsig/synth.hpp"

namespace adrsig::cli {

namespace {

// Errors in input data or files; exit code 2.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Errors in flags or the spec; exit code 1.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct DetectOptions {
  std::string prescriptions;
  std::string events;
  std::string dictionary;
  std::string drug;
  int window_days = Cohort::kDefaultWindowDays;
  std::size_t group_size = 100;
  std::string remainder_policy = "merge";
  bool level3 = false;
  std::string test = "student_pooled";
  double alpha = 0.05;
  std::string rank_by = "pvalue_asc";
  std::string top_k = "30";
  std::string chapter_filter;
  std::vector<std::string> extra_codes;
  std::string out = "-";
  std::string format = "csv";
  std::string dump_matrix;
};

struct SynthOptions {
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

struct RollupOptions {
  std::string events;
  std::string out = "-";
};

std::ifstream open_input(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw DataError(fmt::format("cannot read '{}': no such file", path));
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path));
  return in;
}

// Writes through `write` to stdout or to `path`.
template <typename WriteFn>
void with_output(const std::string& path, std::ostream& out, WriteFn&& write) {
  if (path == "-") {
    write(out);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError(fmt::format("cannot open '{}' for writing", path));
  try {
    write(f);
  } catch (const std::ios_base::failure&) {
    throw DataError(fmt::format("failed writing '{}'", path));
  }
}

std::optional<std::size_t> parse_top_k(const std::string& s) {
  if (s == "all") return std::nullopt;
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || v < 1) {
    throw UsageError(fmt::format("--top-k must be a positive integer or 'all', got '{}'", s));
  }
  return static_cast<std::size_t>(v);
}

std::optional<ChapterFilter> make_filter(const DetectOptions& o) {
  if (o.chapter_filter.empty() && o.extra_codes.empty()) return std::nullopt;
  ChapterFilter f;
  for (char c : o.chapter_filter) {
    if (c != ',' && c != ' ') f.chapters.insert(c);
  }
  for (const auto& raw : o.extra_codes) {
    try {
      f.extra_codes.insert(ReadCode::parse(raw).str());
    } catch (const MalformedCode& e) {
      throw UsageError(fmt::format("--extra-codes: {}", e.what()));
    }
  }
  return f;
}

int run_detect(const DetectOptions& o, std::ostream& out, std::ostream& err) {
  if (!(o.alpha > 0.0 && o.alpha <= 1.0)) throw UsageError("--alpha must be in (0, 1]");
  if (o.window_days < 1) throw UsageError("--window-days must be at least 1");
  if (o.group_size < 1) throw UsageError("--group-size must be at least 1");

  ReportSpec report;
  report.rank_by = parse_rank_by(o.rank_by);
  report.alpha = o.alpha;
  report.top_k = parse_top_k(o.top_k);
  report.chapter_filter = make_filter(o);
  report.level3 = o.level3;

  TestConfig config;
  config.kind = parse_test_kind(o.test);
  if (o.alpha < 1.0) config.alpha = o.alpha;

  const RemainderPolicy policy =
      o.remainder_policy == "drop" ? RemainderPolicy::drop : RemainderPolicy::merge;

  Dictionary dict;
  if (!o.dictionary.empty()) {
    auto in = open_input(o.dictionary);
    dict = Dictionary::load(in);
  }

  auto presc = open_input(o.prescriptions);
  auto events = open_input(o.events);
  const Cohort cohort = ingest(presc, events, o.drug, o.window_days);

  const EventIndex index = build_event_index(cohort, o.level3);
  const PatientMatrices pm = build_patient_matrices(cohort, index, o.level3);
  const FeatureMatrix x = group(pm.before, o.group_size, policy);
  const FeatureMatrix y = group(pm.after, o.group_size, policy);
  if (!o.dump_matrix.empty()) {
    with_output(o.dump_matrix, out, [&](std::ostream& s) { dump_matrix(x, index, s); });
    with_output(o.dump_matrix + ".after", out,
                [&](std::ostream& s) { dump_matrix(y, index, s); });
  }

  std::vector<EventStats> stats;
  if (!index.empty()) stats = test_all_events(x, y, index, cohort.size(), config, dict);
  const std::vector<SignalRow> rows = make_report(stats, report);

  with_output(o.out, out, [&](std::ostream& s) {
    if (o.format == "json") {
      render_json(rows, s);
    } else {
      render_csv(rows, s);
    }
  });

  const double bonferroni = index.empty() ? o.alpha : o.alpha / static_cast<double>(index.size());
  err << fmt::format("N={} G={} E={} signals={} test={} alpha={} bonferroni_alpha={:.3g}\n",
                     cohort.size(), x.groups(), index.size(), rows.size(), to_string(config.kind),
                     o.alpha, bonferroni);
  return kExitOk;
}

int run_synth(const SynthOptions& o, std::ostream& err) {
  CohortSpec spec;
  {
    if (!std::filesystem::is_regular_file(o.spec)) {
      throw UsageError(fmt::format("cannot read spec '{}': no such file", o.spec));
    }
    std::ifstream in(o.spec, std::ios::binary);
    spec = parse_cohort_spec(in);
  }
  if (o.seed) spec.seed = *o.seed;
  validate(spec);
  try {
    generate_to_directory(spec, o.out, o.threads);
  } catch (const std::ios_base::failure& e) {
    throw DataError(e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    throw DataError(e.what());
  }
  err << fmt::format("wrote {} patients, {} codes, {} planted effects to {}\n", spec.n_patients,
                     spec.n_codes, spec.planted.size(), o.out);
  return kExitOk;
}

int run_rollup(const RollupOptions& o, std::ostream& out) {
  auto in = open_input(o.events);
  csv::Reader reader(in);
  std::vector<std::string_view> fields;
  std::string buf;
  if (!reader.next(fields) || fields.size() != 3 || fields[0] != "patient_id" ||
      fields[1] != "readcode" || fields[2] != "date") {
    throw DataError(fmt::format("{} line 1: expected header 'patient_id,readcode,date'", o.events));
  }
  buf = "patient_id,readcode,date\n";
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 3) {
      throw DataError(fmt::format("{} line {}: expected 3 fields, got {}", o.events,
                                  reader.line(), fields.size()));
    }
    ReadCode code = [&] {
      try {
        return ReadCode::parse(fields[1]);
      } catch (const MalformedCode& e) {
        throw DataError(fmt::format("{} line {}: {}", o.events, reader.line(), e.what()));
      }
    }();
    csv::append_field(buf, fields[0]);
    buf.push_back(',');
    buf.append(code.rollup3().text());
    buf.push_back(',');
    csv::append_field(buf, fields[2]);
    buf.push_back('\n');
  }
  with_output(o.out, out, [&](std::ostream& s) {
    s << buf;
    s.flush();
    if (!s) throw std::ios_base::failure("write failed");
  });
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Before/after drug-exposure signal detection over coded event streams", "adrsig"};
  app.require_subcommand(1);

  DetectOptions d;
  auto* detect = app.add_subcommand("detect", "Run signal detection and write a ranked report");
  detect->add_option("--prescriptions", d.prescriptions, "Prescriptions CSV")->required();
  detect->add_option("--events", d.events, "Events CSV")->required();
  detect->add_option("--drug", d.drug, "Target drug code")->required();
  detect->add_option("--dictionary", d.dictionary, "Readcode dictionary CSV");
  detect->add_option("--window-days", d.window_days, "Observation window in days")
      ->capture_default_str();
  detect->add_option("--group-size", d.group_size, "Patients per group")->capture_default_str();
  detect->add_option("--remainder-policy", d.remainder_policy, "merge or drop")
      ->check(CLI::IsMember({"merge", "drop"}))
      ->capture_default_str();
  detect->add_flag("--level3", d.level3, "Roll codes up to level 3 before counting");
  detect->add_option("--test", d.test, "student_pooled, welch or paired")
      ->check(CLI::IsMember({"student_pooled", "welch", "paired"}))
      ->capture_default_str();
  detect->add_option("--alpha", d.alpha, "Significance threshold")->capture_default_str();
  detect->add_option("--rank-by", d.rank_by, "pvalue_asc or r1_desc")
      ->check(CLI::IsMember({"pvalue_asc", "r1_desc"}))
      ->capture_default_str();
  detect->add_option("--top-k", d.top_k, "Rows to keep, or 'all'")->capture_default_str();
  detect->add_option("--chapter-filter", d.chapter_filter, "Chapter characters to keep, e.g. B");
  detect->add_option("--extra-codes", d.extra_codes, "Codes kept regardless of chapter")
      ->delimiter(',');
  detect->add_option("--out", d.out, "Report path, '-' for stdout")->capture_default_str();
  detect->add_option("--format", d.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  detect->add_option("--dump-matrix", d.dump_matrix,
                     "Write grouped before counts to PATH and after counts to PATH.after");

  SynthOptions s;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort");
  synth->add_option("--spec", s.spec, "Cohort spec JSON")->required();
  synth->add_option("--out", s.out, "Output directory")->required();
  synth->add_option("--seed", s.seed, "Override the spec seed");
  synth->add_option("--threads", s.threads, "Worker threads")->capture_default_str();

  RollupOptions r;
  auto* rollup = app.add_subcommand("rollup", "Rewrite an events file with level-3 codes");
  rollup->add_option("--events", r.events, "Events CSV")->required();
  rollup->add_option("--out", r.out, "Output path, '-' for stdout")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (*detect) return run_detect(d, out, err);
    if (*synth) return run_synth(s, err);
    return run_rollup(r, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SpecInvalid& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    // InsufficientGroups and friends come from the data, not the flags.
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace adrsig::cli
