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

#include "adrsig/cohort.hpp"

#include <algorithm>
#include <unordered_map>

#include <fmt/format.h>

#include "adrsig/csv.hpp"

namespace adrsig {

MalformedRow::MalformedRow(std::string file, std::size_t line, const std::string& what)
    : std::runtime_error(fmt::format("{} line {}: {}", file, line, what)),
      file_(std::move(file)),
      line_(line) {}

EmptyCohort::EmptyCohort(const std::string& drug_code)
    : std::runtime_error(fmt::format("no patient has a prescription of drug '{}'", drug_code)) {}

namespace {

constexpr const char* kPrescriptions = "prescriptions";
constexpr const char* kEvents = "events";

// Reads a three-column file, checking the header, and calls `row` with the
// fields of each data record.
template <typename RowFn>
void for_each_row(std::istream& in, const char* file, const char* c0, const char* c1,
                  const char* c2, RowFn&& row) {
  csv::Reader reader(in);
  std::vector<std::string_view> fields;
  try {
    if (!reader.next(fields) || fields.size() != 3 || fields[0] != c0 || fields[1] != c1 ||
        fields[2] != c2) {
      throw MalformedRow(file, std::max<std::size_t>(reader.line(), 1),
                         fmt::format("expected header '{},{},{}'", c0, c1, c2));
    }
    while (reader.next(fields)) {
      if (fields.size() == 1 && fields[0].empty()) continue;
      if (fields.size() != 3) {
        throw MalformedRow(file, reader.line(),
                           fmt::format("expected 3 fields, got {}", fields.size()));
      }
      row(fields, reader.line());
    }
  } catch (const MalformedRow&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw MalformedRow(file, reader.line(), e.what());
  }
}

Date parse_date_field(std::string_view text, const char* file, std::size_t line) {
  auto date = parse_iso_date(text);
  if (!date) throw MalformedRow(file, line, fmt::format("invalid date '{}'", text));
  return *date;
}

}  // namespace

Cohort ingest(std::istream& prescriptions, std::istream& events, const std::string& drug_code,
              int window_days) {
  Cohort cohort;
  cohort.drug_code = drug_code;
  cohort.window_days = window_days;

  std::unordered_map<std::string, std::size_t> slot;
  for_each_row(prescriptions, kPrescriptions, "patient_id", "drug_code", "date",
               [&](const std::vector<std::string_view>& f, std::size_t line) {
                 if (f[0].empty()) throw MalformedRow(kPrescriptions, line, "empty patient_id");
                 if (f[1].empty()) throw MalformedRow(kPrescriptions, line, "empty drug_code");
                 const Date date = parse_date_field(f[2], kPrescriptions, line);
                 if (f[1] != drug_code) return;
                 auto [it, inserted] = slot.try_emplace(std::string(f[0]), cohort.patients.size());
                 if (inserted) {
                   cohort.patients.push_back(PatientTimeline{std::string(f[0]), date, {}});
                 } else {
                   auto& p = cohort.patients[it->second];
                   p.index_date = std::min(p.index_date, date);
                 }
               });
  if (cohort.patients.empty()) throw EmptyCohort(drug_code);

  std::string id;
  for_each_row(events, kEvents, "patient_id", "readcode", "date",
               [&](const std::vector<std::string_view>& f, std::size_t line) {
                 if (f[0].empty()) throw MalformedRow(kEvents, line, "empty patient_id");
                 ReadCode code = [&] {
                   try {
                     return ReadCode::parse(f[1]);
                   } catch (const MalformedCode& e) {
                     throw MalformedRow(kEvents, line, e.what());
                   }
                 }();
                 const Date date = parse_date_field(f[2], kEvents, line);
                 id.assign(f[0]);
                 auto it = slot.find(id);
                 if (it == slot.end()) return;
                 cohort.patients[it->second].events.push_back(DatedCode{code, date});
               });

  for (auto& p : cohort.patients) {
    std::sort(p.events.begin(), p.events.end(), [](const DatedCode& a, const DatedCode& b) {
      return a.date != b.date ? a.date < b.date : a.code < b.code;
    });
  }
  return cohort;
}

WindowCodes window_events(const PatientTimeline& patient, int window_days) {
  using std::chrono::days;
  WindowCodes out;
  const Date before_lo = patient.index_date - days{window_days};
  const Date after_hi = patient.index_date + days{window_days};
  auto lo = std::lower_bound(patient.events.begin(), patient.events.end(), before_lo,
                             [](const DatedCode& e, Date d) { return e.date < d; });
  for (auto it = lo; it != patient.events.end() && it->date <= after_hi; ++it) {
    if (it->date < patient.index_date) {
      out.before.push_back(it->code);
    } else if (it->date > patient.index_date) {
      out.after.push_back(it->code);
    }
  }
  for (auto* v : {&out.before, &out.after}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  return out;
}

void write_cohort(const Cohort& cohort, std::ostream& prescriptions, std::ostream& events) {
  std::string buf = "patient_id,drug_code,date\n";
  for (const auto& p : cohort.patients) {
    csv::append_field(buf, p.patient_id);
    buf.push_back(',');
    csv::append_field(buf, cohort.drug_code);
    buf.push_back(',');
    append_iso_date(buf, p.index_date);
    buf.push_back('\n');
  }
  prescriptions << buf;

  buf = "patient_id,readcode,date\n";
  for (const auto& p : cohort.patients) {
    for (const auto& e : p.events) {
      csv::append_field(buf, p.patient_id);
      buf.push_back(',');
      buf.append(e.code.text());
      buf.push_back(',');
      append_iso_date(buf, e.date);
      buf.push_back('\n');
    }
  }
  events << buf;
}

}  // namespace adrsig
