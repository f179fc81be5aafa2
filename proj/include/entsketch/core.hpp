// Copyright 2026 The entsketch Authors
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

#ifndef ENTSKETCH_CORE_HPP_
#define ENTSKETCH_CORE_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace entsketch {

// Error taxonomy shared by the whole library. The C API maps each code to
// an integer status; the CLI maps a subset of them to exit codes.
enum class ErrorCode : int {
  parameter = 1,
  parse = 2,
  configuration = 3,
  undefined_input = 4,
  io = 5,
  internal = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorCode::parameter, what) {}
};

class ConfigurationError : public Error {
 public:
  explicit ConfigurationError(const std::string& what) : Error(ErrorCode::configuration, what) {}
};

class UndefinedInputError : public Error {
 public:
  explicit UndefinedInputError(const std::string& what) : Error(ErrorCode::undefined_input, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

// Parse failures carry the 1-based line and column where parsing stopped.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// One turnstile update: A[index] += delta. Indices are 1-based.
struct UpdateEvent {
  std::uint64_t index = 0;
  std::int64_t delta = 0;

  friend bool operator==(const UpdateEvent&, const UpdateEvent&) = default;
};

enum class StreamModel { strict_turnstile, general_update };

std::string_view to_string(StreamModel model);
StreamModel parse_stream_model(std::string_view text);

struct StreamConfig {
  std::uint64_t universe_size = 1;  // n
  std::uint64_t stream_bound = 1;   // m, an upper bound on ||A||_1
  StreamModel model = StreamModel::strict_turnstile;
  double epsilon = 0.1;
  double delta_fail = 0.25;
  std::uint64_t seed = 0;

  // Throws ParameterError when any field is out of range.
  void validate() const;
};

enum class QuantityKind { shannon, renyi, tsallis, moment, residual_moment };

struct Quantity {
  QuantityKind kind = QuantityKind::shannon;
  double alpha = 1.0;  // ignored for Shannon

  static Quantity shannon() { return {QuantityKind::shannon, 1.0}; }
  static Quantity renyi(double a) { return {QuantityKind::renyi, a}; }
  static Quantity tsallis(double a) { return {QuantityKind::tsallis, a}; }
  static Quantity moment(double a) { return {QuantityKind::moment, a}; }
  static Quantity residual_moment(double a) { return {QuantityKind::residual_moment, a}; }
};

std::string_view to_string(QuantityKind kind);
QuantityKind parse_quantity_kind(std::string_view text);

enum class GuaranteeKind { additive, multiplicative };

struct Guarantee {
  GuaranteeKind kind = GuaranteeKind::additive;
  double epsilon = 0.1;

  // True when `estimate` is within the guarantee of `truth`.
  bool accepts(double estimate, double truth) const;
};

std::string_view to_string(GuaranteeKind kind);
GuaranteeKind parse_guarantee_kind(std::string_view text);

enum class Outcome {
  value,            // the report carries an estimate
  no_heavy_hitter,  // a residual estimate was requested but no heavy element exists
};

enum class LogBase { natural, two };

struct EstimateReport {
  double value = 0.0;
  Quantity quantity;
  Guarantee guarantee;
  double success_prob = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t space_words_used = 0;
  Outcome outcome = Outcome::value;
  bool degenerate = false;  // single distinct element; value short-circuited to 0
  bool ambiguous = false;   // heavy-hitter certification failed after one retry
  bool heavy_path = false;  // the heavy-element branch produced the value
  LogBase display_base = LogBase::natural;

  // Value converted to the display base. Only entropies are rescaled.
  double display_value() const;
};

// Flat "key=value" lines: quantity, alpha, guarantee, epsilon, value, seed,
// success_prob, space_words_used, then outcome flags.
std::string format_report(const EstimateReport& report);
EstimateReport parse_report(std::string_view text);

// Parses "<index> <delta>". `universe_size` bounds the index; `line_no` is
// only used for error positions.
UpdateEvent parse_update_line(std::string_view line, std::uint64_t universe_size,
                              std::size_t line_no = 1);

// True iff the accumulated vector is componentwise nonnegative.
bool validate_strict_turnstile(std::span<const UpdateEvent> events, std::uint64_t universe_size);

// In-memory form of the stream file format:
//
//   # comment
//   n=<int> model=<strict|general>
//   <index> <delta>
//   ...
struct Stream {
  std::uint64_t universe_size = 1;
  StreamModel model = StreamModel::strict_turnstile;
  std::vector<UpdateEvent> events;

  // Sum of |delta| over all events; an upper bound on ||A||_1.
  std::uint64_t total_movement() const;
};

Stream read_stream(std::istream& in);
Stream read_stream_file(const std::string& path);
void write_stream(std::ostream& out, const Stream& stream);
void write_stream_file(const std::string& path, const Stream& stream);

}  // namespace entsketch

#endif  // ENTSKETCH_CORE_HPP_
