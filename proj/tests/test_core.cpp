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

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "entsketch/core.hpp"

using namespace entsketch;

TEST_CASE("update lines parse with positions on failure") {
  CHECK(parse_update_line("3 -2", 10) == UpdateEvent{3, -2});
  CHECK(parse_update_line("  7\t+4 ", 10) == UpdateEvent{7, 4});
  CHECK_THROWS_AS(parse_update_line("0 1", 10), ParseError);
  CHECK_THROWS_AS(parse_update_line("11 1", 10), ParseError);
  CHECK_THROWS_AS(parse_update_line("3", 10), ParseError);
  CHECK_THROWS_AS(parse_update_line("3 x", 10), ParseError);
  try {
    parse_update_line("abc 1", 10, 17);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 17);
    CHECK(e.code() == ErrorCode::parse);
  }
}

TEST_CASE("stream files round trip and skip comments") {
  std::istringstream in("# generated\nn=5 model=general\n1 3\n# mid comment\n5 -2\n\n2 1\n");
  const Stream s = read_stream(in);
  CHECK(s.universe_size == 5);
  CHECK(s.model == StreamModel::general_update);
  REQUIRE(s.events.size() == 3);
  CHECK(s.events[1] == UpdateEvent{5, -2});
  CHECK(s.total_movement() == 6);

  std::ostringstream out;
  write_stream(out, s);
  std::istringstream back(out.str());
  const Stream t = read_stream(back);
  CHECK(t.universe_size == s.universe_size);
  CHECK(t.model == s.model);
  CHECK(t.events == s.events);
}

TEST_CASE("stream header is required") {
  std::istringstream missing("1 3\n");
  CHECK_THROWS_AS(read_stream(missing), ParseError);
  std::istringstream bad_model("n=3 model=loose\n");
  CHECK_THROWS(read_stream(bad_model));
}

TEST_CASE("strict turnstile validation looks at the final vector") {
  const std::vector<UpdateEvent> dips{{1, -1}, {1, 2}};
  CHECK(validate_strict_turnstile(dips, 2));
  const std::vector<UpdateEvent> negative{{1, 1}, {2, -1}};
  CHECK_FALSE(validate_strict_turnstile(negative, 2));
}

TEST_CASE("reports round trip through key=value text") {
  EstimateReport r;
  r.value = 1.2345678901234567;
  r.quantity = Quantity::renyi(0.5);
  r.guarantee = Guarantee{GuaranteeKind::multiplicative, 0.05};
  r.success_prob = 0.95;
  r.seed = 42;
  r.space_words_used = 1234;
  r.heavy_path = true;
  r.ambiguous = true;
  r.display_base = LogBase::two;
  const EstimateReport back = parse_report(format_report(r));
  CHECK(back.value == r.value);
  CHECK(back.quantity.kind == QuantityKind::renyi);
  CHECK(back.quantity.alpha == 0.5);
  CHECK(back.guarantee.kind == GuaranteeKind::multiplicative);
  CHECK(back.guarantee.epsilon == 0.05);
  CHECK(back.success_prob == 0.95);
  CHECK(back.seed == 42);
  CHECK(back.space_words_used == 1234);
  CHECK(back.heavy_path);
  CHECK(back.ambiguous);
  CHECK_FALSE(back.degenerate);
  CHECK(back.display_base == LogBase::two);
}

TEST_CASE("display base rescales entropies only") {
  EstimateReport r;
  r.value = std::log(8.0);
  r.display_base = LogBase::two;
  CHECK(r.display_value() == doctest::Approx(3.0).epsilon(1e-12));
  r.quantity = Quantity::moment(2.0);
  CHECK(r.display_value() == r.value);
}

TEST_CASE("guarantees") {
  const Guarantee add{GuaranteeKind::additive, 0.1};
  CHECK(add.accepts(1.05, 1.0));
  CHECK_FALSE(add.accepts(1.2, 1.0));
  const Guarantee mul{GuaranteeKind::multiplicative, 0.1};
  CHECK(mul.accepts(10.9, 10.0));
  CHECK_FALSE(mul.accepts(11.2, 10.0));
}

TEST_CASE("enum names parse back") {
  for (auto k : {QuantityKind::shannon, QuantityKind::renyi, QuantityKind::tsallis, QuantityKind::moment,
                 QuantityKind::residual_moment})
    CHECK(parse_quantity_kind(to_string(k)) == k);
  CHECK(parse_guarantee_kind("additive") == GuaranteeKind::additive);
  CHECK(parse_stream_model("general") == StreamModel::general_update);
  CHECK_THROWS_AS(parse_quantity_kind("entropy"), ParameterError);
}

TEST_CASE("stream config validation") {
  StreamConfig c;
  c.universe_size = 10;
  c.stream_bound = 100;
  CHECK_NOTHROW(c.validate());
  c.stream_bound = 5;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c.stream_bound = 100;
  c.epsilon = 1.0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
}
