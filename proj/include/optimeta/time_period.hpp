// Copyright 2026 The optimeta-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

#include "optimeta/error.hpp"
#include "optimeta/text.hpp"

namespace optimeta {

enum class DatePrecision { year, day };

/// A CE calendar date known to year or day precision.
struct Endpoint {
  DatePrecision precision = DatePrecision::day;
  int year = 1;
  unsigned month = 1;  // 1 when precision is year
  unsigned day = 1;    // 1 when precision is year

  static Endpoint of_year(int y) { return Endpoint{DatePrecision::year, y, 1, 1}; }
  static Endpoint of_day(int y, unsigned m, unsigned d) {
    return Endpoint{DatePrecision::day, y, m, d};
  }

  std::chrono::sys_days as_start() const {
    using namespace std::chrono;
    return sys_days{::std::chrono::year{year} / month / day};
  }
  /// Year-precision endpoints close on 31 December.
  std::chrono::sys_days as_end() const {
    using namespace std::chrono;
    if (precision == DatePrecision::year) return sys_days{::std::chrono::year{year} / December / 31};
    return as_start();
  }

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

/// A single start/end period with the text it was parsed from.
struct TimePeriod {
  Endpoint start;
  Endpoint end;
  std::string raw;

  DatePrecision precision() const noexcept { return start.precision; }

  /// Equality ignores `raw`.
  bool same_period(const TimePeriod& other) const {
    return start == other.start && end == other.end;
  }
};

namespace detail {

class PeriodScanner {
 public:
  explicit PeriodScanner(std::string_view s) : s_(s) {}

  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0';
  }
  void skip_space() {
    while (!done() && text::is_space(peek())) ++pos_;
  }
  std::string_view digits() {
    auto start = pos_;
    while (!done() && text::is_digit(peek())) ++pos_;
    return s_.substr(start, pos_ - start);
  }
  void advance() { ++pos_; }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(Errc::ParseError, "time period '" + std::string(s_) + "': " + why);
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

// YYYY-MM-DD, or a bare year of one to four digits.
inline Endpoint parse_endpoint(PeriodScanner& sc) {
  auto year_digits = sc.digits();
  if (year_digits.empty()) sc.fail("expected a year");
  bool day_form = sc.peek() == '-' && text::is_digit(sc.peek(1)) && text::is_digit(sc.peek(2)) &&
                  sc.peek(3) == '-' && text::is_digit(sc.peek(4)) && text::is_digit(sc.peek(5));
  if (year_digits.size() > 4) sc.fail("years have at most four digits");
  auto year = static_cast<int>(*text::parse_int(year_digits));
  if (year < 1) sc.fail("only years of the Common Era (>= 1) are supported");
  if (!day_form) return Endpoint::of_year(year);
  if (year_digits.size() != 4) sc.fail("day-precision dates need a four-digit year");
  sc.advance();
  auto month = static_cast<unsigned>(*text::parse_int(sc.digits()));
  sc.advance();
  auto day_digits = sc.digits();
  if (day_digits.size() != 2) sc.fail("day must have two digits");
  auto day = static_cast<unsigned>(*text::parse_int(day_digits));
  std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                  std::chrono::day{day}};
  if (!ymd.ok()) sc.fail("not a calendar date");
  return Endpoint::of_day(year, month, day);
}

}  // namespace detail

/// Parses `<endpoint> - <endpoint>` (also the `start/end` interval form),
/// each endpoint either YYYY-MM-DD or a one-to-four digit year. Throws
/// ParseError, MixedPrecision or ReversedInterval.
inline TimePeriod parse_time_period(std::string_view raw) {
  auto input = text::trim(raw);
  detail::PeriodScanner sc(input);
  TimePeriod period;
  period.raw = std::string(raw);
  period.start = detail::parse_endpoint(sc);
  sc.skip_space();
  if (sc.peek() != '-' && sc.peek() != '/') sc.fail("expected ' - ' between start and end");
  sc.advance();
  sc.skip_space();
  period.end = detail::parse_endpoint(sc);
  sc.skip_space();
  if (!sc.done()) sc.fail("unexpected trailing text");
  if (period.start.precision != period.end.precision)
    throw Error(Errc::MixedPrecision,
                "time period '" + std::string(input) + "' mixes year and day precision");
  if (period.start.as_start() > period.end.as_end())
    throw Error(Errc::ReversedInterval,
                "time period '" + std::string(input) + "' ends before it starts");
  return period;
}

inline std::string format_endpoint(const Endpoint& e) {
  if (e.precision == DatePrecision::year) return text::zero_pad(e.year, 4);
  return text::zero_pad(e.year, 4) + "-" + text::zero_pad(e.month, 2) + "-" +
         text::zero_pad(e.day, 2);
}

/// ISO 8601 `start/end`, years zero-padded to four digits.
inline std::string format_iso8601_interval(const TimePeriod& period) {
  return format_endpoint(period.start) + "/" + format_endpoint(period.end);
}

}  // namespace optimeta
