#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "tim/coding.hpp"

using namespace tim;
using gf::Element;
using gf::Field;
using gf::Rng;

namespace {

std::vector<Element> seq(Field f, std::size_t n, std::int64_t start = 1) {
  std::vector<Element> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(f(start + static_cast<std::int64_t>(k)));
  return out;
}

std::vector<Element> random_messages(Field f, std::size_t n, Rng& rng) {
  std::vector<Element> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(gf::rand_element(f, rng));
  return out;
}

std::vector<BlockSkeleton> all_block_types() {
  using enum StateId;
  std::vector<BlockSkeleton> out{
      {BlockKind::Quadruple1, {B1, C1, D1, H1}}, {BlockKind::Quadruple2, {B2, C2, D2, H2}},
      {BlockKind::Full, {A}},                    {BlockKind::HRepetition, {H1, H1}},
      {BlockKind::HRepetition, {H2, H2}},        {BlockKind::HSingle, {H1}},
      {BlockKind::HSingle, {H2}},                {BlockKind::NaiveH, {H1}},
      {BlockKind::NaiveH, {H2}},
  };
  for (const auto& e : all_states())
    if (e.id != A && e.id != H1 && e.id != H2) out.push_back({BlockKind::Silencing, {e.id}});
  return out;
}

std::string label(const BlockSkeleton& sk) {
  std::string s(to_string(sk.kind));
  for (auto st : sk.states) s += " " + std::string(name(st));
  return s;
}

// Transmit and decode; every recovered symbol must match what was sent.
DecodeResult round_trip(const SchemeBlock& b, const ChannelDraw& ch) {
  const auto res = decode_block(b, transmit(b, ch), ch);
  for (User rx = 0; rx < kUsers; ++rx) {
    REQUIRE(res.decoded[rx].size() == b.messages[rx].size());
    for (std::size_t k = 0; k < b.messages[rx].size(); ++k)
      if (res.decoded[rx][k]) REQUIRE(*res.decoded[rx][k] == b.messages[rx][k]);
  }
  return res;
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("quadruple variant 1 transmit rules") {
  const Field f(257);
  const auto msgs = seq(f, 9);  // b1=1 b2=2 b3=3 c1=4 ... d3=9
  const auto b = plan_quadruple(1, msgs);
  CHECK(b.kind == BlockKind::Quadruple1);
  CHECK(b.states() == std::vector<StateId>{StateId::B1, StateId::C1, StateId::D1, StateId::H1});
  CHECK(b.symbol_count() == 9);
  CHECK(b.labels[0] == std::vector<std::string>{"b1", "c1", "d1"});
  CHECK(b.labels[1] == std::vector<std::string>{"b2", "c2", "d2"});
  CHECK(b.labels[2] == std::vector<std::string>{"b3", "c3", "d3"});
  // H1 row: Tx1 d1, Tx2 b2, Tx3 c3.
  const auto& h = b.uses[3].sends;
  CHECK(b.labels[0][*h[0]] == "d1");
  CHECK(b.labels[1][*h[1]] == "b2");
  CHECK(b.labels[2][*h[2]] == "c3");
  CHECK(b.messages[0][*h[0]] == f(7));
  CHECK(b.messages[1][*h[1]] == f(2));
  CHECK(b.messages[2][*h[2]] == f(6));

  const auto ls = as_linear_scheme(b);
  CHECK(ls.precoders[0] == gf::Matrix(f, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 1}}));
}

TEST_CASE("quadruple variant 2 mirrors the role symmetry") {
  const Field f(257);
  const auto b = plan_quadruple(2, seq(f, 9));
  CHECK(b.states() == std::vector<StateId>{StateId::B2, StateId::C2, StateId::D2, StateId::H2});
  const auto& h = b.uses[3].sends;
  // H2: Tx1 resends its B2 symbol, Tx2 its C2 symbol, Tx3 its D2 symbol.
  CHECK(b.labels[0][*h[0]] == "b1");
  CHECK(b.labels[1][*h[1]] == "c2");
  CHECK(b.labels[2][*h[2]] == "d3");
  // And each of those is the state where that Tx was the interferer.
  CHECK(lookup(StateId::B2).interferer[1] == 0u);
  CHECK(lookup(StateId::C2).interferer[2] == 1u);
  CHECK(lookup(StateId::D2).interferer[0] == 2u);

  Rng rng(17);
  const auto ls = as_linear_scheme(b);
  for (int k = 0; k < 1000; ++k) {
    const auto v = verify_decodable(ls, draw_channel(ls.states, f, rng));
    REQUIRE((v[0] && v[1] && v[2]));
  }
  CHECK_THROWS_AS(plan_quadruple(3, seq(f, 9)), std::invalid_argument);
  CHECK_THROWS_AS(plan_quadruple(1, seq(f, 8)), gf::DimensionMismatch);
}

TEST_CASE("quadruple decode plans peel one unknown per step") {
  const Field f(257);
  for (int variant : {1, 2}) {
    const auto b = plan_quadruple(variant, seq(f, 9));
    for (User rx = 0; rx < kUsers; ++rx) {
      CAPTURE(rx);
      CHECK(b.decode_plan[rx].size() == 4);  // 3 desired + 1 interferer symbol
      for (const auto& step : b.decode_plan[rx]) {
        CHECK(step.uses.size() == 1);
        CHECK(step.unknowns.size() == 1);
      }
    }
  }
}

TEST_CASE("quadruple recovers 9 symbols in 4 uses") {
  const Field f(257);
  Rng rng(3);
  for (int variant : {1, 2}) {
    const auto b = plan_quadruple(variant, random_messages(f, 9, rng));
    const auto res = round_trip(b, draw_channel(b.states(), f, rng));
    CHECK(res.all_success());
    CHECK(res.delivered() == 9);
    CHECK(b.uses.size() == 4);
  }
}

TEST_CASE("separate blocks") {
  const Field f(257);
  SUBCASE("A sends three fresh symbols") {
    const auto b = plan_separate(StateId::A, seq(f, 3));
    CHECK(b.kind == BlockKind::Full);
    CHECK(b.uses.size() == 1);
    CHECK(b.symbol_count() == 3);
    const auto ls = as_linear_scheme(b);
    for (User tx = 0; tx < kUsers; ++tx) CHECK(ls.precoders[tx] == gf::Matrix::identity(f, 1));
    for (User rx = 0; rx < kUsers; ++rx) CHECK(b.decode_plan[rx].size() == 1);
  }
  SUBCASE("I1 silences Tx1") {
    const auto b = plan_separate(StateId::I1, seq(f, 2));
    CHECK(b.kind == BlockKind::Silencing);
    CHECK_FALSE(b.uses[0].sends[0].has_value());
    CHECK(b.message_count(0) == 0);
    CHECK(b.message_count(1) == 1);
    CHECK(b.message_count(2) == 1);
    const auto ls = as_linear_scheme(b);
    CHECK(ls.precoders[0].rows() == 1);
    CHECK(ls.precoders[0].cols() == 0);
    Rng rng(8);
    CHECK(round_trip(b, draw_channel(b.states(), f, rng)).delivered() == 2);
  }
  SUBCASE("B3 silences the lowest-index candidate") {
    const auto b = plan_separate(StateId::B3, seq(f, 2));
    CHECK_FALSE(b.uses[0].sends[0].has_value());
    CHECK(b.uses[0].sends[1].has_value());
  }
  SUBCASE("H1 repeats over two uses") {
    const auto b = plan_separate(StateId::H1, seq(f, 3));
    CHECK(b.kind == BlockKind::HRepetition);
    CHECK(b.uses.size() == 2);
    CHECK(b.symbol_count() == 3);
    const auto ls = as_linear_scheme(b);
    for (User tx = 0; tx < kUsers; ++tx) CHECK(ls.precoders[tx] == gf::Matrix(f, {{1}, {1}}));
  }
  SUBCASE("lone H occurrence") {
    const auto b = plan_h_single(StateId::H2, f(5));
    CHECK(b.kind == BlockKind::HSingle);
    CHECK(b.symbol_count() == 1);
    Rng rng(9);
    CHECK(round_trip(b, draw_channel(b.states(), f, rng)).delivered() == 1);
    CHECK_THROWS_AS(plan_h_single(StateId::A, f(5)), std::invalid_argument);
  }
  SUBCASE("wrong message counts") {
    CHECK_THROWS_AS(plan_separate(StateId::A, seq(f, 2)), gf::DimensionMismatch);
    CHECK_THROWS_AS(plan_separate(StateId::B1, seq(f, 3)), gf::DimensionMismatch);
  }
}

TEST_CASE("silent transmitters get all-zero precoding rows") {
  const Field f(257);
  Rng rng(4);
  for (const auto& sk : all_block_types()) {
    CAPTURE(label(sk));
    const auto b = instantiate(sk, random_messages(f, sk.symbol_count(), rng));
    CHECK(b.states() == sk.states);
    const auto ls = as_linear_scheme(b);
    for (std::size_t u = 0; u < b.uses.size(); ++u)
      for (User tx = 0; tx < kUsers; ++tx)
        if (!b.uses[u].sends[tx])
          for (std::size_t c = 0; c < ls.precoders[tx].cols(); ++c) CHECK(ls.precoders[tx].at(u, c).is_zero());
  }
}

TEST_CASE("precoders reproduce the transmit rules and never mix transmitters") {
  const Field f(257);
  Rng rng(12);
  for (const auto& sk : all_block_types()) {
    CAPTURE(label(sk));
    const auto b = instantiate(sk, random_messages(f, sk.symbol_count(), rng));
    const auto ls = as_linear_scheme(b);
    for (User tx = 0; tx < kUsers; ++tx) {
      // Columns are exactly this Tx's own symbols, each sent at least once.
      REQUIRE(ls.precoders[tx].cols() == b.message_count(tx));
      REQUIRE(ls.precoders[tx].rows() == b.uses.size());
      for (std::size_t c = 0; c < ls.precoders[tx].cols(); ++c) {
        bool used = false;
        for (std::size_t u = 0; u < b.uses.size(); ++u) used |= !ls.precoders[tx].at(u, c).is_zero();
        CHECK(used);
      }
      const auto x = ls.precoders[tx] * std::span<const Element>(b.messages[tx]);
      for (std::size_t u = 0; u < b.uses.size(); ++u) {
        const auto& sent = b.uses[u].sends[tx];
        CHECK(x[u] == (sent ? b.messages[tx][*sent] : f.zero()));
      }
    }
  }
}

TEST_CASE("singular repetition draw fails for Rx1 only") {
  const Field f(257);
  const auto b = plan_separate(StateId::H1, seq(f, 3, 10));
  // Per use: h11 h12 | h22 h23 | h31 h33. Rx1 sees the same row twice.
  const auto ch = channel_from_coefficients(
      b.states(), std::vector<Element>{f(1), f(1), f(1), f(2), f(1), f(2), f(1), f(1), f(1), f(3), f(1), f(3)});
  const auto res = round_trip(b, ch);
  CHECK_FALSE(res.success(0));
  CHECK(res.success(1));
  CHECK(res.success(2));
  CHECK(res.failures() == 1);
  CHECK(res.delivered() == 2);
  const auto v = verify_decodable(as_linear_scheme(b), ch);
  CHECK(v == std::array<bool, 3>{false, true, true});
  CHECK(format_trace(b, res).find("rx=1 use=1,2 state=H1") != std::string::npos);
  CHECK(format_trace(b, res).find("FAIL (underdetermined)") != std::string::npos);
}

TEST_CASE("channel construction") {
  const Field f(7);
  const std::vector<StateId> states{StateId::A, StateId::H1};
  CHECK(link_count(states) == 3 + 6);
  CHECK_THROWS_AS(channel_from_coefficients(states, seq(f, 8)), gf::DimensionMismatch);
  auto coeffs = seq(f, 9);
  coeffs[6] = f(0);
  CHECK_THROWS_AS(channel_from_coefficients(states, coeffs), std::invalid_argument);

  Rng rng(1);
  for (int k = 0; k < 200; ++k) {
    const auto ch = draw_channel(states, f, rng);
    for (std::size_t u = 0; u < states.size(); ++u)
      for (User rx = 0; rx < kUsers; ++rx)
        for (User tx = 0; tx < kUsers; ++tx) {
          const auto& h = ch.uses[u][rx][tx];
          REQUIRE(h.has_value() == lookup(states[u]).hears(rx, tx));
          if (h) REQUIRE_FALSE(h->is_zero());
        }
  }
}

TEST_CASE("decode_block rejects mismatched inputs") {
  const Field f(257);
  Rng rng(2);
  const auto b = plan_quadruple(1, seq(f, 9));
  const auto ch = draw_channel(b.states(), f, rng);
  auto obs = transmit(b, ch);
  obs[1].pop_back();
  CHECK_THROWS_AS(decode_block(b, obs, ch), gf::DimensionMismatch);
  const auto short_ch = draw_channel(std::vector<StateId>{StateId::B1}, f, rng);
  CHECK_THROWS_AS(decode_block(b, transmit(b, ch), short_ch), gf::DimensionMismatch);
  CHECK_THROWS_AS(transmit(b, short_ch), gf::DimensionMismatch);
}

TEST_CASE("structured decoding agrees with the rank oracle") {
  const Field f(257);
  Rng rng(2025);
  for (const auto& sk : all_block_types()) {
    CAPTURE(label(sk));
    int agree = 0;
    for (int k = 0; k < 1000; ++k) {
      const auto b = instantiate(sk, random_messages(f, sk.symbol_count(), rng));
      const auto ch = draw_channel(b.states(), f, rng);
      const auto res = round_trip(b, ch);
      const auto v = verify_decodable(as_linear_scheme(b), ch);
      bool same = true;
      for (User rx = 0; rx < kUsers; ++rx) same &= v[rx] == res.success(rx);
      agree += same;
    }
    CHECK(agree == 1000);
  }
}

TEST_CASE("repetition blocks agree with the oracle at a small field where failures are common") {
  const Field f(3);
  Rng rng(77);
  int failures = 0;
  for (int k = 0; k < 2000; ++k) {
    const auto b = plan_separate(k % 2 ? StateId::H1 : StateId::H2, random_messages(f, 3, rng));
    const auto ch = draw_channel(b.states(), f, rng);
    const auto res = round_trip(b, ch);
    const auto v = verify_decodable(as_linear_scheme(b), ch);
    for (User rx = 0; rx < kUsers; ++rx) REQUIRE(v[rx] == res.success(rx));
    failures += !res.all_success();
  }
  CHECK(failures > 0);
}

TEST_CASE("quadruple blocks never fail, exhaustively over GF(2) and GF(3)") {
  for (std::uint32_t q : {2u, 3u}) {
    const Field f(q);
    Rng rng(q);
    for (int variant : {1, 2}) {
      CAPTURE(q);
      CAPTURE(variant);
      const auto b = plan_quadruple(variant, random_messages(f, 9, rng));
      const auto states = b.states();
      const std::size_t links = link_count(states);
      REQUIRE(links == 18);
      std::uint64_t total = 1;
      for (std::size_t k = 0; k < links; ++k) total *= q - 1;
      std::uint64_t ok = 0;
      std::vector<Element> coeffs(links, f.one());
      for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t c = code;
        for (std::size_t k = 0; k < links; ++k) {
          coeffs[k] = f(static_cast<std::int64_t>(1 + c % (q - 1)));
          c /= q - 1;
        }
        const auto res = round_trip(b, channel_from_coefficients(states, coeffs));
        ok += res.all_success() && res.delivered() == 9;
      }
      CHECK(ok == total);
    }
  }
}

TEST_CASE("repetition failure rate at q=101") {
  const Field f(101);
  Rng rng(101);
  const int n = 100000;
  int failed = 0;
  const auto ls = builtin_scheme("h-repetition", f);
  for (int k = 0; k < n; ++k) {
    const auto v = verify_decodable(ls, draw_channel(ls.states, f, rng));
    failed += !(v[0] && v[1] && v[2]);
  }
  const double rate = static_cast<double>(failed) / n;
  CHECK(rate <= 6.0 / 100);
  CHECK(rate >= 1.0 / 200);
  // Each receiver's 2x2 system with nonzero entries is singular with probability 1/(q-1).
  const double p = 1 - std::pow(1 - 1.0 / 100, 3);
  CHECK(std::abs(rate - p) <= 5 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("naive H scheme is undecodable somewhere on every draw") {
  const Field f(257);
  Rng rng(6);
  for (auto s : {StateId::H1, StateId::H2}) {
    const auto b = plan_naive_h(s, seq(f, 3));
    for (int k = 0; k < 1000; ++k) {
      const auto ch = draw_channel(b.states(), f, rng);
      const auto v = verify_decodable(as_linear_scheme(b), ch);
      REQUIRE_FALSE((v[0] && v[1] && v[2]));
      REQUIRE_FALSE(round_trip(b, ch).all_success());
    }
  }
}

TEST_CASE("all-zero precoding is vacuously decodable") {
  const Field f(257);
  Rng rng(10);
  LinearScheme ls{f, {StateId::H1, StateId::A},
                  {gf::Matrix(f, 2, 0), gf::Matrix(f, 2, 0), gf::Matrix(f, 2, 0)}};
  CHECK(verify_decodable(ls, draw_channel(ls.states, f, rng)) == std::array<bool, 3>{true, true, true});
  const auto file = linear_scheme_from_json(slurp(TIM_DATA_DIR "/schemes/zero.json"), f);
  CHECK(verify_decodable(file, draw_channel(file.states, f, rng)) == std::array<bool, 3>{true, true, true});

  ls.precoders[0] = gf::Matrix(f, 2, 1);  // a symbol that is never sent
  CHECK_FALSE(verify_decodable(ls, draw_channel(ls.states, f, rng))[0]);
  ls.precoders[0] = gf::Matrix(f, 3, 1);
  CHECK_THROWS_AS(verify_decodable(ls, draw_channel(ls.states, f, rng)), gf::DimensionMismatch);
}

TEST_CASE("scheme JSON") {
  const Field f(257);
  for (const char* n : {"quadruple1", "quadruple2", "h-repetition", "naive-h"}) {
    CAPTURE(n);
    const auto ls = builtin_scheme(n, f);
    const auto text = linear_scheme_to_json(ls, n);
    const auto back = linear_scheme_from_json(text, f);
    CHECK(back.states == ls.states);
    CHECK(back.precoders == ls.precoders);
    CHECK(linear_scheme_to_json(back, n) == text);
  }
  for (const char* n : {"quadruple1", "naive-h", "zero"}) {
    CAPTURE(n);
    const auto text = slurp(std::string(TIM_DATA_DIR "/schemes/") + n + ".json");
    CHECK(linear_scheme_to_json(linear_scheme_from_json(text, f), n) == text);
  }
  CHECK(linear_scheme_from_json(slurp(TIM_DATA_DIR "/schemes/quadruple1.json"), f).precoders ==
        builtin_scheme("quadruple1", f).precoders);
  CHECK_THROWS_AS(builtin_scheme("nope", f), BadScheme);

  CHECK_THROWS_AS(linear_scheme_from_json("{", f), BadScheme);
  CHECK_THROWS_AS(linear_scheme_from_json(R"({"uses": ["A"]})", f), BadScheme);
  CHECK_THROWS_AS(linear_scheme_from_json(R"({"uses": ["Z9"], "precoders": [[[1]],[[1]],[[1]]]})", f), BadScheme);
  CHECK_THROWS_AS(linear_scheme_from_json(R"({"uses": ["A"], "precoders": [[[1]],[[1]]]})", f), BadScheme);
  CHECK_THROWS_AS(linear_scheme_from_json(R"({"uses": ["A"], "precoders": [[[1]],[[1]],[[1],[1]]]})", f),
                  BadScheme);
  CHECK_THROWS_AS(linear_scheme_from_json(R"({"uses": ["A"], "precoders": [[[257]],[[1]],[[1]]]})", f),
                  BadScheme);
  CHECK_THROWS_AS(linear_scheme_from_json(R"({"uses": ["A"], "precoders": [[[-1]],[[1]],[[1]]]})", f),
                  BadScheme);
  CHECK_THROWS_AS(
      linear_scheme_from_json(R"({"uses": ["A","A"], "precoders": [[[1,0],[1]],[[1],[1]],[[1],[1]]]})", f),
      BadScheme);
}

TEST_CASE("decoder trace format") {
  const Field f(257);
  const auto b = plan_quadruple(1, seq(f, 9));
  const auto ch = channel_from_coefficients(b.states(), std::vector<Element>(18, f.one()));
  const auto res = round_trip(b, ch);
  REQUIRE(res.all_success());
  const auto trace = format_trace(b, res);
  // Rx1: c1 and d1 arrive clean, H1 then yields b2, which clears B1.
  CHECK(trace.find("rx=1 use=2 state=C1 eq: y1[2] = h11*c1 -> c1 = 4\n") != std::string::npos);
  CHECK(trace.find("rx=1 use=3 state=D1 eq: y1[3] = h11*d1 -> d1 = 7\n") != std::string::npos);
  CHECK(trace.find("rx=1 use=4 state=H1 eq: y1[4] = h11*d1 + h12*b2 -> b2 = 2\n") != std::string::npos);
  CHECK(trace.find("rx=1 use=1 state=B1 eq: y1[1] = h11*b1 + h12*b2 -> b1 = 1\n") != std::string::npos);
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 12);
}
