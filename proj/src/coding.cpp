#include "tim/coding.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace tim {

namespace {

constexpr std::array<std::string_view, 7> kKindNames = {
    "quadruple1", "quadruple2", "full", "silencing", "h-repetition", "h-single", "naive-h",
};

gf::Field field_of(std::span<const gf::Element> msgs) {
  if (msgs.empty()) throw gf::DimensionMismatch("block needs at least one message symbol");
  const auto q = msgs.front().modulus();
  for (auto m : msgs)
    if (m.modulus() != q) throw gf::FieldMismatch(m.modulus(), q);
  return msgs.front().field();
}

void expect_count(std::span<const gf::Element> msgs, std::size_t n, std::string_view what) {
  if (msgs.size() != n)
    throw gf::DimensionMismatch(std::string(what) + " expects " + std::to_string(n) +
                                " message symbols, got " + std::to_string(msgs.size()));
}

bool is_h_state(StateId s) { return s == StateId::H1 || s == StateId::H2; }

// Appends cancellation steps for receiver `rx` until every symbol of Tx rx is
// resolved. Each step picks the first use (in block order) where exactly one
// heard symbol is still unknown. Stops early if no use qualifies.
void plan_peeling(SchemeBlock& b, User rx) {
  std::array<std::vector<bool>, kUsers> known;
  for (User t = 0; t < kUsers; ++t) known[t].assign(b.messages[t].size(), false);
  auto desired_done = [&] {
    return std::all_of(known[rx].begin(), known[rx].end(), [](bool k) { return k; });
  };
  while (!desired_done()) {
    bool progressed = false;
    for (std::size_t u = 0; u < b.uses.size() && !progressed; ++u) {
      const auto& pattern = lookup(b.uses[u].state);
      std::vector<SymbolRef> unknown;
      for (User tx = 0; tx < kUsers; ++tx) {
        const auto& sent = b.uses[u].sends[tx];
        if (sent && pattern.hears(rx, tx) && !known[tx][*sent]) unknown.push_back({tx, *sent});
      }
      if (unknown.size() != 1) continue;
      b.decode_plan[rx].push_back({{u}, unknown});
      known[unknown[0].tx][unknown[0].index] = true;
      progressed = true;
    }
    if (!progressed) break;
  }
}

std::string symbol_label(const SchemeBlock& b, SymbolRef s) { return b.labels[s.tx][s.index]; }

}  // namespace

std::string_view to_string(BlockKind k) noexcept { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<BlockKind> block_kind_from_string(std::string_view s) noexcept {
  auto it = std::find(kKindNames.begin(), kKindNames.end(), s);
  if (it == kKindNames.end()) return std::nullopt;
  return static_cast<BlockKind>(it - kKindNames.begin());
}

std::vector<StateId> SchemeBlock::states() const {
  std::vector<StateId> out;
  out.reserve(uses.size());
  for (const auto& u : uses) out.push_back(u.state);
  return out;
}

std::size_t SchemeBlock::symbol_count() const {
  return messages[0].size() + messages[1].size() + messages[2].size();
}

SchemeBlock plan_quadruple(int variant, std::span<const gf::Element> msgs) {
  if (variant != 1 && variant != 2) throw std::invalid_argument("quadruple variant must be 1 or 2");
  expect_count(msgs, 9, "quadruple block");
  using enum StateId;
  const std::array<StateId, 3> corrupted =
      variant == 1 ? std::array{B1, C1, D1} : std::array{B2, C2, D2};
  const StateId h = variant == 1 ? H1 : H2;
  constexpr std::array<char, 3> letters = {'b', 'c', 'd'};

  SchemeBlock b{variant == 1 ? BlockKind::Quadruple1 : BlockKind::Quadruple2,
                field_of(msgs), {}, {}, {}, {}};
  for (User tx = 0; tx < kUsers; ++tx)
    for (std::size_t k = 0; k < 3; ++k) {
      b.messages[tx].push_back(msgs[k * 3 + tx]);
      b.labels[tx].push_back(std::string(1, letters[k]) + std::to_string(tx + 1));
    }
  for (std::size_t k = 0; k < 3; ++k) b.uses.push_back({corrupted[k], {k, k, k}});

  // In the H state every Tx resends the symbol it sent where it was the lone
  // interferer, so each receiver can strip that interference afterwards.
  Use h_use{h, {}};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& p = lookup(corrupted[k]);
    for (User rx = 0; rx < kUsers; ++rx)
      if (p.interferer[rx]) h_use.sends[*p.interferer[rx]] = k;
  }
  b.uses.push_back(h_use);

  for (User rx = 0; rx < kUsers; ++rx) plan_peeling(b, rx);
  return b;
}

SchemeBlock plan_separate(StateId s, std::span<const gf::Element> msgs) {
  if (s == StateId::A) {
    expect_count(msgs, 3, "full block");
    SchemeBlock b{BlockKind::Full, field_of(msgs), {{s, {0, 0, 0}}}, {}, {}, {}};
    for (User tx = 0; tx < kUsers; ++tx) {
      b.messages[tx] = {msgs[tx]};
      b.labels[tx] = {"x" + std::to_string(tx + 1)};
    }
    for (User rx = 0; rx < kUsers; ++rx) plan_peeling(b, rx);
    return b;
  }

  if (is_h_state(s)) {
    expect_count(msgs, 3, "h-repetition block");
    SchemeBlock b{BlockKind::HRepetition, field_of(msgs), {{s, {0, 0, 0}}, {s, {0, 0, 0}}},
                  {}, {}, {}};
    const auto& p = lookup(s);
    for (User tx = 0; tx < kUsers; ++tx) {
      b.messages[tx] = {msgs[tx]};
      b.labels[tx] = {"x" + std::to_string(tx + 1)};
    }
    for (User rx = 0; rx < kUsers; ++rx)
      b.decode_plan[rx].push_back({{0, 1}, {{rx, 0}, {*p.interferer[rx], 0}}});
    return b;
  }

  const auto silent = silent_candidates(s);
  if (silent.empty()) throw std::logic_error("state without silencing option: " + std::string(name(s)));
  expect_count(msgs, 2, "silencing block");
  SchemeBlock b{BlockKind::Silencing, field_of(msgs), {{s, {}}}, {}, {}, {}};
  std::size_t next = 0;
  for (User tx = 0; tx < kUsers; ++tx) {
    if (tx == silent.front()) continue;
    b.uses[0].sends[tx] = 0;
    b.messages[tx] = {msgs[next++]};
    b.labels[tx] = {"x" + std::to_string(tx + 1)};
  }
  for (User rx = 0; rx < kUsers; ++rx) plan_peeling(b, rx);
  return b;
}

SchemeBlock plan_h_single(StateId s, gf::Element msg) {
  if (!is_h_state(s)) throw std::invalid_argument("h-single block needs state H1 or H2");
  SchemeBlock b{BlockKind::HSingle, msg.field(), {{s, {0, std::nullopt, std::nullopt}}}, {}, {}, {}};
  b.messages[0] = {msg};
  b.labels[0] = {"x1"};
  plan_peeling(b, 0);
  return b;
}

SchemeBlock plan_naive_h(StateId s, std::span<const gf::Element> msgs) {
  if (!is_h_state(s)) throw std::invalid_argument("naive-h block needs state H1 or H2");
  expect_count(msgs, 3, "naive-h block");
  SchemeBlock b{BlockKind::NaiveH, field_of(msgs), {{s, {0, 0, 0}}}, {}, {}, {}};
  const auto& p = lookup(s);
  for (User tx = 0; tx < kUsers; ++tx) {
    b.messages[tx] = {msgs[tx]};
    b.labels[tx] = {"x" + std::to_string(tx + 1)};
  }
  for (User rx = 0; rx < kUsers; ++rx)
    b.decode_plan[rx].push_back({{0}, {{rx, 0}, {*p.interferer[rx], 0}}});
  return b;
}

std::size_t BlockSkeleton::symbol_count() const {
  switch (kind) {
    case BlockKind::Quadruple1:
    case BlockKind::Quadruple2: return 9;
    case BlockKind::Full:
    case BlockKind::HRepetition:
    case BlockKind::NaiveH: return 3;
    case BlockKind::Silencing: return 2;
    case BlockKind::HSingle: return 1;
  }
  return 0;
}

SchemeBlock instantiate(const BlockSkeleton& sk, std::span<const gf::Element> msgs) {
  if (sk.states.empty()) throw std::invalid_argument("skeleton without states");
  switch (sk.kind) {
    case BlockKind::Quadruple1: return plan_quadruple(1, msgs);
    case BlockKind::Quadruple2: return plan_quadruple(2, msgs);
    case BlockKind::Full:
    case BlockKind::Silencing:
    case BlockKind::HRepetition: return plan_separate(sk.states.front(), msgs);
    case BlockKind::HSingle:
      expect_count(msgs, 1, "h-single block");
      return plan_h_single(sk.states.front(), msgs.front());
    case BlockKind::NaiveH: return plan_naive_h(sk.states.front(), msgs);
  }
  throw std::logic_error("unhandled block kind");
}

// ---------------------------------------------------------------------------

std::size_t link_count(std::span<const StateId> states) {
  std::size_t n = 0;
  for (auto s : states) n += kUsers + lookup(s).interference_count();
  return n;
}

ChannelDraw draw_channel(std::span<const StateId> states, gf::Field field, gf::Rng& rng) {
  ChannelDraw ch;
  ch.uses.reserve(states.size());
  for (auto s : states) {
    const auto& p = lookup(s);
    ChannelDraw::Gains g{};
    for (User rx = 0; rx < kUsers; ++rx)
      for (User tx = 0; tx < kUsers; ++tx)
        if (p.hears(rx, tx)) g[rx][tx] = gf::rand_nonzero(field, rng);
    ch.uses.push_back(g);
  }
  return ch;
}

ChannelDraw channel_from_coefficients(std::span<const StateId> states,
                                      std::span<const gf::Element> coefficients) {
  if (coefficients.size() != link_count(states))
    throw gf::DimensionMismatch("coefficient count does not match the links of the states");
  ChannelDraw ch;
  std::size_t next = 0;
  for (auto s : states) {
    const auto& p = lookup(s);
    ChannelDraw::Gains g{};
    for (User rx = 0; rx < kUsers; ++rx)
      for (User tx = 0; tx < kUsers; ++tx)
        if (p.hears(rx, tx)) {
          if (coefficients[next].is_zero())
            throw std::invalid_argument("present links need nonzero coefficients");
          g[rx][tx] = coefficients[next++];
        }
    ch.uses.push_back(g);
  }
  return ch;
}

Observations transmit(const SchemeBlock& b, const ChannelDraw& ch) {
  if (ch.uses.size() != b.uses.size()) throw gf::DimensionMismatch("channel/block use count mismatch");
  Observations y;
  for (User rx = 0; rx < kUsers; ++rx) {
    y[rx].reserve(b.uses.size());
    for (std::size_t u = 0; u < b.uses.size(); ++u) {
      gf::Element acc = b.field.zero();
      for (User tx = 0; tx < kUsers; ++tx) {
        const auto& h = ch.uses[u][rx][tx];
        const auto& sent = b.uses[u].sends[tx];
        if (h && sent) acc += *h * b.messages[tx][*sent];
      }
      y[rx].push_back(acc);
    }
  }
  return y;
}

bool DecodeResult::success(User rx) const {
  return std::all_of(decoded[rx].begin(), decoded[rx].end(), [](const auto& v) { return v.has_value(); });
}

bool DecodeResult::all_success() const {
  for (User rx = 0; rx < kUsers; ++rx)
    if (!success(rx)) return false;
  return true;
}

std::size_t DecodeResult::delivered() const {
  std::size_t n = 0;
  for (const auto& per_rx : decoded)
    n += static_cast<std::size_t>(std::count_if(per_rx.begin(), per_rx.end(),
                                                [](const auto& v) { return v.has_value(); }));
  return n;
}

std::size_t DecodeResult::failures() const {
  std::size_t n = 0;
  for (const auto& per_rx : decoded) n += per_rx.size();
  return n - delivered();
}

DecodeResult decode_block(const SchemeBlock& b, const Observations& obs, const ChannelDraw& ch) {
  if (ch.uses.size() != b.uses.size()) throw gf::DimensionMismatch("channel/block use count mismatch");
  for (const auto& per_rx : obs)
    if (per_rx.size() != b.uses.size()) throw gf::DimensionMismatch("observation/block use count mismatch");

  DecodeResult result;
  for (User rx = 0; rx < kUsers; ++rx) {
    std::array<std::vector<std::optional<gf::Element>>, kUsers> known;
    for (User t = 0; t < kUsers; ++t) known[t].assign(b.messages[t].size(), std::nullopt);

    for (const auto& step : b.decode_plan[rx]) {
      gf::Matrix system(b.field, step.uses.size(), step.unknowns.size());
      std::vector<gf::Element> rhs;
      std::ostringstream eq;
      bool blocked = false;
      for (std::size_t row = 0; row < step.uses.size(); ++row) {
        const std::size_t u = step.uses[row];
        if (u >= b.uses.size()) throw gf::DimensionMismatch("decode step references a missing use");
        gf::Element y = obs[rx][u];
        if (row) eq << "; ";
        eq << "y" << rx + 1 << "[" << u + 1 << "] =";
        bool first = true;
        for (User tx = 0; tx < kUsers; ++tx) {
          const auto& h = ch.uses[u][rx][tx];
          const auto& sent = b.uses[u].sends[tx];
          if (!h || !sent) continue;
          const SymbolRef sym{tx, *sent};
          eq << (first ? " " : " + ") << "h" << rx + 1 << tx + 1 << "*" << symbol_label(b, sym);
          first = false;
          if (known[tx][*sent]) {
            y -= *h * *known[tx][*sent];
            continue;
          }
          auto it = std::find(step.unknowns.begin(), step.unknowns.end(), sym);
          if (it == step.unknowns.end()) {
            blocked = true;
            continue;
          }
          system.set(row, static_cast<std::size_t>(it - step.unknowns.begin()), *h);
        }
        if (first) eq << " 0";
        rhs.push_back(y);
      }

      std::string outcome;
      if (blocked) {
        outcome = "FAIL (depends on an unresolved symbol)";
      } else {
        const auto sol = gf::solve(system, rhs);
        if (!sol.ok()) {
          outcome = "FAIL (" + gf::to_string(sol.status) + ")";
        } else {
          for (std::size_t k = 0; k < step.unknowns.size(); ++k) {
            const auto& sym = step.unknowns[k];
            known[sym.tx][sym.index] = sol.values[k];
            if (k) outcome += ", ";
            outcome += symbol_label(b, sym) + " = " + std::to_string(sol.values[k].value());
          }
        }
      }
      result.trace.push_back({rx, step.uses, eq.str(), outcome});
    }
    result.decoded[rx] = known[rx];
  }
  return result;
}

std::string format_trace(const SchemeBlock& b, const DecodeResult& r) {
  std::ostringstream os;
  for (const auto& line : r.trace) {
    os << "rx=" << line.rx + 1 << " use=";
    for (std::size_t k = 0; k < line.uses.size(); ++k) os << (k ? "," : "") << line.uses[k] + 1;
    os << " state=" << name(b.uses[line.uses.front()].state) << " eq: " << line.equation << " -> "
       << line.outcome << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

LinearScheme as_linear_scheme(const SchemeBlock& b) {
  LinearScheme ls{b.field, b.states(),
                  {gf::Matrix(b.field, b.uses.size(), b.messages[0].size()),
                   gf::Matrix(b.field, b.uses.size(), b.messages[1].size()),
                   gf::Matrix(b.field, b.uses.size(), b.messages[2].size())}};
  for (std::size_t u = 0; u < b.uses.size(); ++u)
    for (User tx = 0; tx < kUsers; ++tx)
      if (const auto& sent = b.uses[u].sends[tx]) ls.precoders[tx].set(u, *sent, b.field.one());
  return ls;
}

std::array<bool, kUsers> verify_decodable(const LinearScheme& ls, const ChannelDraw& ch) {
  const std::size_t n = ls.states.size();
  if (ch.uses.size() != n) throw gf::DimensionMismatch("channel/scheme use count mismatch");
  for (const auto& v : ls.precoders)
    if (v.rows() != n) throw gf::DimensionMismatch("precoder rows must equal the number of uses");

  std::array<bool, kUsers> out{};
  for (User rx = 0; rx < kUsers; ++rx) {
    // Effective per-Tx contribution at this receiver: diag(h_rx,tx) * V_tx.
    std::array<gf::Matrix, kUsers> seen = ls.precoders;
    for (User tx = 0; tx < kUsers; ++tx)
      for (std::size_t u = 0; u < n; ++u) {
        const auto& h = ch.uses[u][rx][tx];
        for (std::size_t c = 0; c < seen[tx].cols(); ++c)
          seen[tx].set(u, c, h ? *h * seen[tx].at(u, c) : ls.field.zero());
      }
    const User o1 = (rx + 1) % kUsers;
    const User o2 = (rx + 2) % kUsers;
    const gf::Matrix interference = gf::Matrix::hcat(seen[o1], seen[o2]);
    const gf::Matrix full = gf::Matrix::hcat(seen[rx], interference);
    out[rx] = gf::rank(full) - gf::rank(interference) == seen[rx].cols();
  }
  return out;
}

LinearScheme linear_scheme_from_json(std::string_view text, gf::Field field) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw BadScheme(std::string("scheme is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("uses") || !j.contains("precoders"))
    throw BadScheme("scheme needs \"uses\" and \"precoders\"");
  if (!j["uses"].is_array()) throw BadScheme("\"uses\" must be an array of state names");
  LinearScheme ls{field, {}, {gf::Matrix(field, 0, 0), gf::Matrix(field, 0, 0), gf::Matrix(field, 0, 0)}};
  for (const auto& s : j["uses"]) {
    if (!s.is_string()) throw BadScheme("\"uses\" must be an array of state names");
    const auto id = state_from_name(s.get<std::string>());
    if (!id) throw BadScheme("unknown state in scheme: " + s.get<std::string>());
    ls.states.push_back(*id);
  }
  const auto& pre = j["precoders"];
  if (!pre.is_array() || pre.size() != kUsers) throw BadScheme("\"precoders\" must hold 3 matrices");
  for (User tx = 0; tx < kUsers; ++tx) {
    const auto& m = pre[tx];
    if (!m.is_array() || m.size() != ls.states.size())
      throw BadScheme("precoder " + std::to_string(tx + 1) + " must have one row per use");
    const std::size_t cols = m.empty() ? 0 : m[0].size();
    gf::Matrix v(field, ls.states.size(), cols);
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (!m[r].is_array() || m[r].size() != cols)
        throw BadScheme("precoder " + std::to_string(tx + 1) + " is ragged");
      for (std::size_t c = 0; c < cols; ++c) {
        if (!m[r][c].is_number_unsigned() || m[r][c].get<std::uint64_t>() >= field.q())
          throw BadScheme("precoder entries must be integers in [0, q)");
        v.set(r, c, field(static_cast<std::int64_t>(m[r][c].get<std::uint64_t>())));
      }
    }
    ls.precoders[tx] = v;
  }
  return ls;
}

std::string linear_scheme_to_json(const LinearScheme& ls, std::string_view scheme_name) {
  nlohmann::ordered_json j;
  if (!scheme_name.empty()) j["name"] = scheme_name;
  j["uses"] = nlohmann::ordered_json::array();
  for (auto s : ls.states) j["uses"].push_back(std::string(name(s)));
  j["precoders"] = nlohmann::ordered_json::array();
  for (const auto& v : ls.precoders) {
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < v.rows(); ++r) {
      auto row = nlohmann::ordered_json::array();
      for (std::size_t c = 0; c < v.cols(); ++c) row.push_back(v.at(r, c).value());
      rows.push_back(row);
    }
    j["precoders"].push_back(rows);
  }
  return j.dump() + "\n";
}

LinearScheme builtin_scheme(std::string_view scheme_name, gf::Field field) {
  const std::vector<gf::Element> zeros(9, field.zero());
  const std::span<const gf::Element> z(zeros);
  if (scheme_name == "quadruple1") return as_linear_scheme(plan_quadruple(1, z));
  if (scheme_name == "quadruple2") return as_linear_scheme(plan_quadruple(2, z));
  if (scheme_name == "h-repetition") return as_linear_scheme(plan_separate(StateId::H1, z.first(3)));
  if (scheme_name == "naive-h") return as_linear_scheme(plan_naive_h(StateId::H1, z.first(3)));
  throw BadScheme("unknown built-in scheme: " + std::string(scheme_name));
}

}  // namespace tim
