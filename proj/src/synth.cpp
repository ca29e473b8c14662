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

#include "adrsig/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "adrsig/csv.hpp"
#include "adrsig/date.hpp"

namespace adrsig {

namespace {

using nlohmann::json;

constexpr std::string_view kAlnum =
    "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
constexpr std::size_t kFamilySize = 8;
// Hierarchy tails appended to a three-character parent, with term suffix.
constexpr std::array<std::string_view, kFamilySize> kFamilyTails = {
    "..00", "0.00", "1.00", "2.00", "3.00", "0.11", "0100", "1100"};

constexpr std::uint64_t kRateStream = 0x5241544553ULL;
constexpr int kIndexSpanDays = 3 * 365;
const Date kIndexOrigin = Date{std::chrono::year{2010} / 1 / 1};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t key) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ key);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

// Probability p as a threshold on a uniform 64-bit draw.
std::uint64_t threshold(double p) {
  if (p >= 1.0) return UINT64_MAX;
  if (p <= 0.0) return 0;
  const double scaled = std::ldexp(p, 64);
  if (scaled >= 18446744073709551615.0) return UINT64_MAX;
  return static_cast<std::uint64_t>(scaled);
}

std::string term_for(const ReadCode& code) {
  const auto t = code.text();
  if (t.substr(5) != "00") {
    return fmt::format("Synonym of {}.00, \"{}\"", t.substr(0, 4), t.substr(5));
  }
  return fmt::format("Synthetic level {} event {}", code.level(), t.substr(0, code.level()));
}

CohortSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw SpecInvalid("cohort spec must be a JSON object");
  static const std::set<std::string> known = {"n_patients", "n_codes",  "code_chapters",
                                              "baseline_rate", "planted", "window_days",
                                              "seed",          "drug_code"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw SpecInvalid(fmt::format("unknown field '{}'", key));
  }

  CohortSpec spec;
  spec.n_patients = j.value("n_patients", spec.n_patients);
  spec.n_codes = j.value("n_codes", spec.n_codes);
  spec.window_days = j.value("window_days", spec.window_days);
  spec.seed = j.value("seed", spec.seed);
  spec.drug_code = j.value("drug_code", spec.drug_code);

  if (j.contains("code_chapters")) {
    const auto& c = j.at("code_chapters");
    spec.code_chapters.clear();
    if (c.is_string()) {
      for (char ch : c.get<std::string>()) spec.code_chapters.push_back(ch);
    } else {
      for (const auto& s : c) {
        const auto str = s.get<std::string>();
        if (str.size() != 1) throw SpecInvalid(fmt::format("chapter '{}' is not one character", str));
        spec.code_chapters.push_back(str[0]);
      }
    }
  }

  if (j.contains("baseline_rate")) {
    const auto& r = j.at("baseline_rate");
    if (r.is_number()) {
      spec.baseline_rate_lo = spec.baseline_rate_hi = r.get<double>();
    } else if (r.is_array() && r.size() == 2) {
      spec.baseline_rate_lo = r[0].get<double>();
      spec.baseline_rate_hi = r[1].get<double>();
    } else {
      throw SpecInvalid("baseline_rate must be a number or a [lo, hi] pair");
    }
  }

  if (j.contains("planted")) {
    for (const auto& p : j.at("planted")) {
      std::string code;
      double rr = 1.0;
      std::optional<double> rate;
      if (p.is_array()) {
        if (p.size() != 2) throw SpecInvalid("planted pair must be [readcode, risk_ratio]");
        code = p[0].get<std::string>();
        rr = p[1].get<double>();
      } else {
        code = p.at("readcode").get<std::string>();
        rr = p.at("risk_ratio").get<double>();
        if (p.contains("baseline_rate")) rate = p.at("baseline_rate").get<double>();
      }
      try {
        spec.planted.push_back(PlantedEffect{ReadCode::parse(code), rr, rate});
      } catch (const MalformedCode& e) {
        throw SpecInvalid(e.what());
      }
    }
  }
  return spec;
}

}  // namespace

CohortSpec parse_cohort_spec(std::istream& in) {
  try {
    return spec_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw SpecInvalid(fmt::format("invalid cohort spec: {}", e.what()));
  }
}

void validate(const CohortSpec& spec) {
  if (spec.n_patients == 0) throw SpecInvalid("n_patients must be positive");
  if (spec.n_codes == 0) throw SpecInvalid("n_codes must be positive");
  if (spec.window_days < 1) throw SpecInvalid("window_days must be at least 1");
  if (spec.drug_code.empty() || spec.drug_code.find_first_of(",\"\r\n") != std::string::npos) {
    throw SpecInvalid("drug_code must be non-empty and free of CSV metacharacters");
  }
  if (spec.code_chapters.empty()) throw SpecInvalid("code_chapters must not be empty");
  std::set<char> seen;
  for (char c : spec.code_chapters) {
    if (c == '.' || kAlnum.find(c) == std::string_view::npos) {
      throw SpecInvalid(fmt::format("invalid chapter character '{}'", c));
    }
    if (!seen.insert(c).second) throw SpecInvalid(fmt::format("duplicate chapter '{}'", c));
  }
  const std::uint64_t capacity = spec.code_chapters.size() * kAlnum.size() * kAlnum.size() *
                                 kFamilySize;
  if (spec.n_codes > capacity) {
    throw SpecInvalid(fmt::format("n_codes {} exceeds the {} codes available for {} chapters",
                                  spec.n_codes, capacity, spec.code_chapters.size()));
  }
  if (!(spec.baseline_rate_lo > 0.0 && spec.baseline_rate_lo <= spec.baseline_rate_hi &&
        spec.baseline_rate_hi < 1.0)) {
    throw SpecInvalid("baseline_rate must satisfy 0 < lo <= hi < 1");
  }

  const auto universe = code_universe(spec);
  const std::set<ReadCode> in_universe(universe.begin(), universe.end());
  std::set<ReadCode> planted;
  for (const auto& p : spec.planted) {
    if (!in_universe.contains(p.code)) {
      throw SpecInvalid(fmt::format("planted code '{}' is not in the code universe", p.code.text()));
    }
    if (!planted.insert(p.code).second) {
      throw SpecInvalid(fmt::format("code '{}' planted twice", p.code.text()));
    }
    if (!(p.risk_ratio >= 1.0) || !std::isfinite(p.risk_ratio)) {
      throw SpecInvalid(fmt::format("risk_ratio for '{}' must be >= 1", p.code.text()));
    }
    if (p.baseline_rate && !(*p.baseline_rate > 0.0 && *p.baseline_rate < 1.0)) {
      throw SpecInvalid(fmt::format("baseline_rate for '{}' must be in (0, 1)", p.code.text()));
    }
  }
}

std::vector<ReadCode> code_universe(const CohortSpec& spec) {
  std::vector<ReadCode> codes;
  codes.reserve(spec.n_codes);
  const std::size_t n_chapters = spec.code_chapters.size();
  std::string text(ReadCode::kLength, '.');
  for (std::uint64_t family = 0; codes.size() < spec.n_codes; ++family) {
    const std::uint64_t k = family / n_chapters;
    text[0] = spec.code_chapters[family % n_chapters];
    text[1] = kAlnum[(k / kAlnum.size()) % kAlnum.size()];
    text[2] = kAlnum[k % kAlnum.size()];
    for (std::size_t m = 0; m < kFamilySize && codes.size() < spec.n_codes; ++m) {
      std::copy(kFamilyTails[m].begin(), kFamilyTails[m].end(), text.begin() + 3);
      codes.push_back(ReadCode::parse(text));
    }
  }
  return codes;
}

std::vector<double> baseline_rates(const CohortSpec& spec) {
  auto rng = substream(spec.seed, kRateStream);
  std::uniform_real_distribution<double> dist(spec.baseline_rate_lo, spec.baseline_rate_hi);
  std::vector<double> rates(spec.n_codes);
  for (auto& r : rates) {
    r = spec.baseline_rate_lo == spec.baseline_rate_hi ? spec.baseline_rate_lo : dist(rng);
  }

  const auto universe = code_universe(spec);
  for (const auto& p : spec.planted) {
    if (!p.baseline_rate) continue;
    const auto it = std::find(universe.begin(), universe.end(), p.code);
    if (it != universe.end()) rates[it - universe.begin()] = *p.baseline_rate;
  }
  return rates;
}

std::string synthetic_patient_id(std::uint64_t ordinal) {
  return fmt::format("P{:07d}", ordinal + 1);
}

namespace {

struct PatientRows {
  std::string prescriptions;
  std::string events;
};

void generate_patient(const CohortSpec& spec, std::uint64_t ordinal,
                      const std::vector<ReadCode>& universe,
                      const std::vector<std::uint64_t>& before_thresh,
                      const std::vector<std::uint64_t>& after_thresh, PatientRows& out) {
  using std::chrono::days;
  auto rng = substream(spec.seed, ordinal);
  std::uniform_int_distribution<int> index_offset(0, kIndexSpanDays - 1);
  std::uniform_int_distribution<int> day_in_window(1, spec.window_days);

  const std::string id = synthetic_patient_id(ordinal);
  const Date index = kIndexOrigin + days{index_offset(rng)};

  out.prescriptions += id;
  out.prescriptions += ',';
  out.prescriptions += spec.drug_code;
  out.prescriptions += ',';
  append_iso_date(out.prescriptions, index);
  out.prescriptions += '\n';

  auto emit = [&](const ReadCode& code, Date date) {
    out.events += id;
    out.events += ',';
    out.events += code.text();
    out.events += ',';
    append_iso_date(out.events, date);
    out.events += '\n';
  };
  for (std::size_t c = 0; c < universe.size(); ++c) {
    const bool before = rng() < before_thresh[c];
    const bool after = rng() < after_thresh[c];
    if (before) emit(universe[c], index - days{day_in_window(rng)});
    if (after) emit(universe[c], index + days{day_in_window(rng)});
  }
}

}  // namespace

void generate(const CohortSpec& spec, const SynthSinks& out, unsigned threads) {
  validate(spec);
  threads = std::max(1u, threads);

  const auto universe = code_universe(spec);
  const auto rates = baseline_rates(spec);
  std::unordered_map<ReadCode, double> rr;
  for (const auto& p : spec.planted) rr.emplace(p.code, p.risk_ratio);

  std::vector<std::uint64_t> before_thresh(universe.size());
  std::vector<std::uint64_t> after_thresh(universe.size());
  for (std::size_t c = 0; c < universe.size(); ++c) {
    const auto it = rr.find(universe[c]);
    const double ratio = it == rr.end() ? 1.0 : it->second;
    before_thresh[c] = threshold(rates[c]);
    after_thresh[c] = threshold(std::min(1.0, rates[c] * ratio));
  }

  std::string dict = "readcode,term\n";
  for (const auto& code : universe) {
    dict += code.text();
    dict += ',';
    csv::append_field(dict, term_for(code));
    dict += '\n';
  }
  out.dictionary << dict;

  std::string truth = "readcode,risk_ratio\n";
  for (const auto& p : spec.planted) {
    fmt::format_to(std::back_inserter(truth), "{},{}\n", p.code.text(), p.risk_ratio);
  }
  out.truth << truth;

  out.prescriptions << "patient_id,drug_code,date\n";
  out.events << "patient_id,readcode,date\n";

  // Patients are produced in blocks; each thread fills a contiguous slice of
  // the block and slices are written back in ordinal order.
  constexpr std::uint64_t kPerThread = 256;
  const std::uint64_t block = kPerThread * threads;
  std::vector<PatientRows> slices(threads);
  for (std::uint64_t start = 0; start < spec.n_patients; start += block) {
    const std::uint64_t end = std::min(spec.n_patients, start + block);
    auto work = [&](unsigned t) {
      slices[t].prescriptions.clear();
      slices[t].events.clear();
      const std::uint64_t lo = start + t * kPerThread;
      const std::uint64_t hi = std::min(end, lo + kPerThread);
      for (std::uint64_t i = lo; i < hi; ++i) {
        generate_patient(spec, i, universe, before_thresh, after_thresh, slices[t]);
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }
    for (const auto& s : slices) {
      out.prescriptions << s.prescriptions;
      out.events << s.events;
    }
  }

  for (std::ostream* s : {&out.prescriptions, &out.events, &out.dictionary, &out.truth}) {
    s->flush();
    if (!*s) throw std::ios_base::failure("failed to write synthetic cohort");
  }
}

void generate_to_directory(const CohortSpec& spec, const std::filesystem::path& dir,
                           unsigned threads) {
  validate(spec);
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::ios_base::failure(fmt::format("cannot open {}", (dir / name).string()));
    return f;
  };
  std::ofstream presc = open(kPrescriptionsFile);
  std::ofstream events = open(kEventsFile);
  std::ofstream dict = open(kDictionaryFile);
  std::ofstream truth = open(kTruthFile);
  generate(spec, SynthSinks{presc, events, dict, truth}, threads);
}

}  // namespace adrsig
