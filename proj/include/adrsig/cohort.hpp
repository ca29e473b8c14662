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

#ifndef ADRSIG_COHORT_HPP_
#define ADRSIG_COHORT_HPP_

#include <cstddef>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "adrsig/date.hpp"
#include "adrsig/readcode.hpp"

namespace adrsig {

/// A row-level parse failure in one of the input CSV files.
class MalformedRow : public std::runtime_error {
public:
  MalformedRow(std::string file, std::size_t line, const std::string& what);
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

private:
  std::string file_;
  std::size_t line_;
};

class EmptyCohort : public std::runtime_error {
public:
  explicit EmptyCohort(const std::string& drug_code);
};

struct PrescriptionRecord {
  std::string patient_id;
  std::string drug_code;
  Date date;
};

struct EventRecord {
  std::string patient_id;
  ReadCode code;
  Date date;
};

struct DatedCode {
  ReadCode code;
  Date date;

  friend bool operator==(const DatedCode&, const DatedCode&) = default;
};

struct PatientTimeline {
  std::string patient_id;
  Date index_date;
  /// Sorted by date, then code text.
  std::vector<DatedCode> events;

  friend bool operator==(const PatientTimeline&, const PatientTimeline&) = default;
};

struct Cohort {
  static constexpr int kDefaultWindowDays = 60;

  std::string drug_code;
  int window_days = kDefaultWindowDays;
  /// In order of first appearance in the prescriptions file.
  std::vector<PatientTimeline> patients;

  std::size_t size() const { return patients.size(); }

  friend bool operator==(const Cohort&, const Cohort&) = default;
};

/// Distinct codes seen in the two observation windows around the index
/// date. Both vectors are sorted and deduplicated.
struct WindowCodes {
  std::vector<ReadCode> before;
  std::vector<ReadCode> after;
};

/// Builds the cohort of patients with at least one prescription of
/// `drug_code`, anchored on each patient's earliest such prescription.
/// Every row of both files is validated. Throws MalformedRow, EmptyCohort.
Cohort ingest(std::istream& prescriptions, std::istream& events, const std::string& drug_code,
              int window_days = Cohort::kDefaultWindowDays);

/// before: [index - W, index - 1], after: [index + 1, index + W]. Events on
/// the index date fall in neither window.
WindowCodes window_events(const PatientTimeline& patient, int window_days);

/// Writes one prescription row per patient (at its index date) and all
/// timeline events, in the ingest file formats.
void write_cohort(const Cohort& cohort, std::ostream& prescriptions, std::ostream& events);

}  // namespace adrsig

#endif  // ADRSIG_COHORT_HPP_
