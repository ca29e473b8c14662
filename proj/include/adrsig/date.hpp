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

#ifndef ADRSIG_DATE_HPP_
#define ADRSIG_DATE_HPP_

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace adrsig {

using Date = std::chrono::sys_days;

/// Strict `YYYY-MM-DD`; nullopt for anything else, including Feb 30.
std::optional<Date> parse_iso_date(std::string_view text);

void append_iso_date(std::string& out, Date date);
std::string format_iso_date(Date date);

}  // namespace adrsig

#endif  // ADRSIG_DATE_HPP_
