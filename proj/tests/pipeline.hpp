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

#ifndef ADRSIG_TESTS_PIPELINE_HPP_
#define ADRSIG_TESTS_PIPELINE_HPP_

#include <sstream>
#include <string>
#include <vector>

#include "adrsig/cohort.hpp"
#include "adrsig/feature_matrix.hpp"
#include "adrsig/readcode.hpp"
#include "adrsig/stats.hpp"
#include "adrsig/synth.hpp"

namespace testing {

struct SynthFiles {
  std::string prescriptions;
  std::string events;
  std::string dictionary;
  std::string truth;
};

inline SynthFiles synthesize(const adrsig::CohortSpec& spec, unsigned threads = 1) {
  std::ostringstream p, e, d, t;
  adrsig::generate(spec, adrsig::SynthSinks{p, e, d, t}, threads);
  return {p.str(), e.str(), d.str(), t.str()};
}

struct Detection {
  adrsig::Cohort cohort;
  adrsig::EventIndex index;
  adrsig::FeatureMatrix before;
  adrsig::FeatureMatrix after;
  std::vector<adrsig::EventStats> stats;
};

inline Detection detect(const SynthFiles& files, const std::string& drug, bool level3,
                        std::size_t group_size = 100,
                        adrsig::TestConfig config = adrsig::TestConfig{}) {
  using namespace adrsig;
  std::istringstream p(files.prescriptions), e(files.events), d(files.dictionary);
  Cohort cohort = ingest(p, e, drug);
  const Dictionary dict = Dictionary::load(d);
  EventIndex index = build_event_index(cohort, level3);
  const PatientMatrices pm = build_patient_matrices(cohort, index, level3);
  FeatureMatrix x = group(pm.before, group_size);
  FeatureMatrix y = group(pm.after, group_size);
  auto stats = test_all_events(x, y, index, cohort.size(), config, dict);
  return {std::move(cohort), std::move(index), std::move(x), std::move(y), std::move(stats)};
}

}  // namespace testing

#endif  // ADRSIG_TESTS_PIPELINE_HPP_
