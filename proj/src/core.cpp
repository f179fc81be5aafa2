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

#include "entsketch/core.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace entsketch {

namespace {

std::string position_message(const std::string& what, std::size_t line, std::size_t column) {
  std::ostringstream os;
  os << "line " << line << ", column " << column << ": " << what;
  return os.str();
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool parse_double(std::string_view text, double& out) {
  // from_chars for double is not available in every libstdc++ we target.
  std::string buf(text);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return !buf.empty() && end == buf.c_str() + buf.size();
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : Error(ErrorCode::parse, position_message(what, line, column)), line_(line), column_(column) {}

std::string_view to_string(StreamModel model) {
  return model == StreamModel::strict_turnstile ? "strict" : "general";
}

StreamModel parse_stream_model(std::string_view text) {
  if (text == "strict") return StreamModel::strict_turnstile;
  if (text == "general") return StreamModel::general_update;
  throw ParameterError("unknown stream model '" + std::string(text) + "' (expected strict|general)");
}

void StreamConfig::validate() const {
  if (universe_size == 0) throw ParameterError("universe size n must be positive");
  if (stream_bound < universe_size) throw ParameterError("stream bound m must satisfy m >= n");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0,1)");
  if (!(delta_fail > 0.0 && delta_fail < 1.0)) throw ParameterError("delta must lie in (0,1)");
}

std::string_view to_string(QuantityKind kind) {
  switch (kind) {
    case QuantityKind::shannon: return "shannon";
    case QuantityKind::renyi: return "renyi";
    case QuantityKind::tsallis: return "tsallis";
    case QuantityKind::moment: return "moment";
    case QuantityKind::residual_moment: return "residual_moment";
  }
  return "?";
}

QuantityKind parse_quantity_kind(std::string_view text) {
  if (text == "shannon") return QuantityKind::shannon;
  if (text == "renyi") return QuantityKind::renyi;
  if (text == "tsallis") return QuantityKind::tsallis;
  if (text == "moment") return QuantityKind::moment;
  if (text == "residual_moment" || text == "residual") return QuantityKind::residual_moment;
  throw ParameterError("unknown quantity '" + std::string(text) + "'");
}

std::string_view to_string(GuaranteeKind kind) {
  return kind == GuaranteeKind::additive ? "additive" : "multiplicative";
}

GuaranteeKind parse_guarantee_kind(std::string_view text) {
  if (text == "additive") return GuaranteeKind::additive;
  if (text == "multiplicative") return GuaranteeKind::multiplicative;
  throw ParameterError("unknown guarantee '" + std::string(text) + "'");
}

bool Guarantee::accepts(double estimate, double truth) const {
  const double err = std::abs(estimate - truth);
  if (kind == GuaranteeKind::additive) return err <= epsilon;
  return err <= epsilon * std::abs(truth);
}

double EstimateReport::display_value() const {
  const bool entropy = quantity.kind == QuantityKind::shannon ||
                       quantity.kind == QuantityKind::renyi;
  if (entropy && display_base == LogBase::two) return value / std::log(2.0);
  return value;
}

std::string format_report(const EstimateReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "quantity=" << to_string(r.quantity.kind) << '\n'
     << "alpha=" << r.quantity.alpha << '\n'
     << "guarantee=" << to_string(r.guarantee.kind) << '\n'
     << "epsilon=" << r.guarantee.epsilon << '\n'
     << "value=" << r.display_value() << '\n'
     << "seed=" << r.seed << '\n'
     << "success_prob=" << r.success_prob << '\n'
     << "space_words_used=" << r.space_words_used << '\n'
     << "outcome=" << (r.outcome == Outcome::value ? "value" : "no_heavy_hitter") << '\n'
     << "degenerate=" << (r.degenerate ? 1 : 0) << '\n'
     << "ambiguous=" << (r.ambiguous ? 1 : 0) << '\n'
     << "heavy_path=" << (r.heavy_path ? 1 : 0) << '\n'
     << "base=" << (r.display_base == LogBase::natural ? "e" : "2") << '\n';
  return os.str();
}

EstimateReport parse_report(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", line_no, 1);
    kv.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  }
  auto get = [&](std::string_view key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError("missing key '" + std::string(key) + "'", line_no, 1);
    return it->second;
  };
  auto num = [&](std::string_view key) {
    double v = 0;
    if (!parse_double(get(key), v)) throw ParseError("bad number for '" + std::string(key) + "'", line_no, 1);
    return v;
  };
  auto u64 = [&](std::string_view key) {
    std::uint64_t v = 0;
    if (!parse_number(get(key), v)) throw ParseError("bad integer for '" + std::string(key) + "'", line_no, 1);
    return v;
  };
  EstimateReport r;
  r.quantity.kind = parse_quantity_kind(get("quantity"));
  r.quantity.alpha = num("alpha");
  r.guarantee.kind = parse_guarantee_kind(get("guarantee"));
  r.guarantee.epsilon = num("epsilon");
  r.seed = u64("seed");
  r.success_prob = num("success_prob");
  r.space_words_used = u64("space_words_used");
  if (kv.count("outcome")) r.outcome = get("outcome") == "value" ? Outcome::value : Outcome::no_heavy_hitter;
  if (kv.count("degenerate")) r.degenerate = get("degenerate") == "1";
  if (kv.count("ambiguous")) r.ambiguous = get("ambiguous") == "1";
  if (kv.count("heavy_path")) r.heavy_path = get("heavy_path") == "1";
  if (kv.count("base")) r.display_base = get("base") == "2" ? LogBase::two : LogBase::natural;
  r.value = num("value");
  if (r.display_base == LogBase::two &&
      (r.quantity.kind == QuantityKind::shannon || r.quantity.kind == QuantityKind::renyi)) {
    r.value *= std::log(2.0);
  }
  return r;
}

UpdateEvent parse_update_line(std::string_view line, std::uint64_t universe_size, std::size_t line_no) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < line.size() && is_space(line[pos])) ++pos;
  };
  auto token = [&](std::size_t& start) {
    skip_ws();
    start = pos;
    while (pos < line.size() && !is_space(line[pos])) ++pos;
    return line.substr(start, pos - start);
  };

  std::size_t index_col = 0, delta_col = 0, extra_col = 0;
  const std::string_view index_text = token(index_col);
  const std::string_view delta_text = token(delta_col);
  const std::string_view extra = token(extra_col);

  if (index_text.empty()) throw ParseError("expected '<index> <delta>'", line_no, index_col + 1);
  std::int64_t index = 0;
  if (!parse_number(index_text, index)) throw ParseError("malformed index", line_no, index_col + 1);
  if (delta_text.empty()) throw ParseError("missing delta", line_no, delta_col + 1);
  std::int64_t delta = 0;
  if (!parse_number(delta_text, delta)) throw ParseError("malformed delta", line_no, delta_col + 1);
  if (!extra.empty()) throw ParseError("trailing text", line_no, extra_col + 1);
  if (index < 1) throw ParseError("index below 1", line_no, index_col + 1);
  if (static_cast<std::uint64_t>(index) > universe_size)
    throw ParseError("index exceeds universe size " + std::to_string(universe_size), line_no, index_col + 1);
  if (delta == 0) throw ParseError("zero delta", line_no, delta_col + 1);
  return UpdateEvent{static_cast<std::uint64_t>(index), delta};
}

bool validate_strict_turnstile(std::span<const UpdateEvent> events, std::uint64_t universe_size) {
  std::vector<std::int64_t> acc(universe_size, 0);
  for (const auto& e : events) {
    if (e.index < 1 || e.index > universe_size) throw ParameterError("event index outside universe");
    acc[e.index - 1] += e.delta;
  }
  for (auto v : acc) {
    if (v < 0) return false;
  }
  return true;
}

std::uint64_t Stream::total_movement() const {
  std::uint64_t total = 0;
  for (const auto& e : events) total += static_cast<std::uint64_t>(e.delta < 0 ? -e.delta : e.delta);
  return total;
}

Stream read_stream(std::istream& in) {
  Stream stream;
  bool have_header = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!have_header) {
      // n=<int> model=<strict|general>
      bool saw_n = false;
      std::size_t pos = 0;
      while (pos < line.size()) {
        while (pos < line.size() && is_space(line[pos])) ++pos;
        const std::size_t start = pos;
        while (pos < line.size() && !is_space(line[pos])) ++pos;
        const std::string_view field = line.substr(start, pos - start);
        if (field.empty()) break;
        const auto eq = field.find('=');
        if (eq == std::string_view::npos) throw ParseError("header field without '='", line_no, start + 1);
        const auto key = field.substr(0, eq);
        const auto value = field.substr(eq + 1);
        if (key == "n") {
          if (!parse_number(value, stream.universe_size) || stream.universe_size == 0)
            throw ParseError("bad universe size", line_no, start + eq + 2);
          saw_n = true;
        } else if (key == "model") {
          if (value == "strict") {
            stream.model = StreamModel::strict_turnstile;
          } else if (value == "general") {
            stream.model = StreamModel::general_update;
          } else {
            throw ParseError("unknown model", line_no, start + eq + 2);
          }
        } else {
          throw ParseError("unknown header key", line_no, start + 1);
        }
      }
      if (!saw_n) throw ParseError("header must declare n=<int>", line_no, 1);
      have_header = true;
      continue;
    }
    stream.events.push_back(parse_update_line(line, stream.universe_size, line_no));
  }
  if (!have_header) throw ParseError("missing header line 'n=<int> model=<strict|general>'", line_no + 1, 1);
  return stream;
}

Stream read_stream_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stream file '" + path + "'");
  return read_stream(in);
}

void write_stream(std::ostream& out, const Stream& stream) {
  out << "n=" << stream.universe_size << " model=" << to_string(stream.model) << '\n';
  for (const auto& e : stream.events) out << e.index << ' ' << e.delta << '\n';
}

void write_stream_file(const std::string& path, const Stream& stream) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write stream file '" + path + "'");
  write_stream(out, stream);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace entsketch
