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

#ifndef ADRSIG_SYNTH_HPP_
#define ADRSIG_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "adrsig/readcode.hpp"

namespace adrsig {

class SpecInvalid : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct PlantedEffect {
  ReadCode code;
  double risk_ratio;
  /// Overrides the drawn baseline rate for this code.
  std::optional<double> baseline_rate;
};

/// Parameters of a synthetic cohort. Every patient has exactly one
/// prescription of `drug_code`; event presence in each window is Bernoulli
/// per (patient, code).
struct CohortSpec {
  std::uint64_t n_patients = 1000;
  std::uint64_t n_codes = 500;
  std::vector<char> code_chapters = {'A', 'B', 'C', 'F', 'H', 'J', 'K', 'M', 'N'};
  /// Per-code window probability is drawn uniformly from [lo, hi].
  double baseline_rate_lo = 0.001;
  double baseline_rate_hi = 0.05;
  std::vector<PlantedEffect> planted;
  int window_days = 60;
  std::uint64_t seed = 0;
  std::string drug_code = "TARGET";
};

/// Reads a JSON object with keys named like the CohortSpec fields.
/// `baseline_rate` is a `[lo, hi]` pair or a single number; `planted` is a
/// list of `{"readcode", "risk_ratio"[, "baseline_rate"]}` objects or
/// `[code, risk_ratio]` pairs. Throws SpecInvalid.
CohortSpec parse_cohort_spec(std::istream& json);

/// Throws SpecInvalid describing the first violated constraint.
void validate(const CohortSpec& spec);

/// The deterministic code universe: families of a level-3 parent plus
/// level-4/5 children and a synonym, cycling through the chapters. Depends
/// only on n_codes and code_chapters.
std::vector<ReadCode> code_universe(const CohortSpec& spec);

/// Per-code before-window probability, aligned with code_universe().
std::vector<double> baseline_rates(const CohortSpec& spec);

std::string synthetic_patient_id(std::uint64_t ordinal);

struct SynthSinks {
  std::ostream& prescriptions;
  std::ostream& events;
  std::ostream& dictionary;
  std::ostream& truth;
};

/// Writes the four files. Output bytes depend only on `spec`, never on
/// `threads`. Throws SpecInvalid.
void generate(const CohortSpec& spec, const SynthSinks& out, unsigned threads = 1);

inline constexpr const char* kPrescriptionsFile = "prescriptions.csv";
inline constexpr const char* kEventsFile = "events.csv";
inline constexpr const char* kDictionaryFile = "dictionary.csv";
inline constexpr const char* kTruthFile = "truth.csv";

/// generate() into `dir` (created if needed) using the k*File names.
void generate_to_directory(const CohortSpec& spec, const std::filesystem::path& dir,
                           unsigned threads = 1);

}  // namespace adrsig

#endif  // ADRSIG_SYNTH_HPP_
