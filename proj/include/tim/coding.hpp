#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tim/galois.hpp"
#include "tim/topology.hpp"

namespace tim {

/// A message symbol: the `index`-th symbol owned by transmitter `tx`.
struct SymbolRef {
  User tx;
  std::size_t index;
  friend bool operator==(const SymbolRef&, const SymbolRef&) = default;
};

/// One channel use inside a block: its state and what each Tx puts on the air.
/// An empty slot means the transmitter is silent.
struct Use {
  StateId state;
  std::array<std::optional<std::size_t>, kUsers> sends;
};

/// Receiver-side recipe step. The receiver takes its observations in `uses`,
/// subtracts every contribution from symbols it already knows, and solves for
/// `unknowns`. A single use with a single unknown is a plain cancellation.
struct DecodeStep {
  std::vector<std::size_t> uses;
  std::vector<SymbolRef> unknowns;
};

enum class BlockKind {
  Quadruple1,   ///< B1, C1, D1, H1 joint block, 9 symbols in 4 uses
  Quadruple2,   ///< B2, C2, D2, H2 joint block, 9 symbols in 4 uses
  Full,         ///< state A, all three send
  Silencing,    ///< one Tx silent, 2 symbols in 1 use
  HRepetition,  ///< H1 or H2 twice, each Tx repeats one symbol, 3 symbols in 2 uses
  HSingle,      ///< a lone H occurrence, only Tx1 sends
  NaiveH,       ///< H state, all three send fresh symbols in 1 use (never decodable)
};

std::string_view to_string(BlockKind k) noexcept;
std::optional<BlockKind> block_kind_from_string(std::string_view s) noexcept;

/// Per-Tx message values, indexed like SymbolRef.
using Messages = std::array<std::vector<gf::Element>, kUsers>;

struct SchemeBlock {
  BlockKind kind;
  gf::Field field;
  std::vector<Use> uses;
  Messages messages;
  std::array<std::vector<std::string>, kUsers> labels;
  std::array<std::vector<DecodeStep>, kUsers> decode_plan;

  std::vector<StateId> states() const;
  std::size_t symbol_count() const;
  std::size_t message_count(User tx) const { return messages[tx].size(); }
};

/// Variant 1 runs over (B1, C1, D1, H1), variant 2 over (B2, C2, D2, H2).
/// `msgs` is (b1, b2, b3, c1, c2, c3, d1, d2, d3): b_i is what Tx i sends in
/// the B state, and so on.
SchemeBlock plan_quadruple(int variant, std::span<const gf::Element> msgs);

/// Separate (per-state) coding. A: 3 symbols. H1/H2: 2-use repetition block
/// with 3 symbols. Any other state: lowest-index silent candidate is muted
/// and the two others each send 1 symbol, in Tx order.
SchemeBlock plan_separate(StateId s, std::span<const gf::Element> msgs);

/// A lone H occurrence: Tx1 sends one symbol, Tx2 and Tx3 stay silent.
SchemeBlock plan_h_single(StateId s, gf::Element msg);

/// Negative control: all three send fresh symbols in one H use.
SchemeBlock plan_naive_h(StateId s, std::span<const gf::Element> msgs);

/// States and symbol count a block of this kind needs, without building it.
struct BlockSkeleton {
  BlockKind kind;
  std::vector<StateId> states;

  std::size_t symbol_count() const;
  friend bool operator==(const BlockSkeleton&, const BlockSkeleton&) = default;
};

/// Builds the block for a skeleton from a flat message list of
/// skeleton.symbol_count() elements.
SchemeBlock instantiate(const BlockSkeleton& sk, std::span<const gf::Element> msgs);

// ---------------------------------------------------------------------------

/// Coefficient h[rx][tx] for each use; present exactly for links that exist in
/// that use's state, and always nonzero.
struct ChannelDraw {
  using Gains = std::array<std::array<std::optional<gf::Element>, kUsers>, kUsers>;
  std::vector<Gains> uses;
};

/// Number of links (desired and interfering) across these states.
std::size_t link_count(std::span<const StateId> states);

/// Fresh i.i.d. uniform nonzero coefficient for every present link. Draw order:
/// use, then rx, then tx.
ChannelDraw draw_channel(std::span<const StateId> states, gf::Field field, gf::Rng& rng);

/// Channel from explicit coefficients, in the same order draw_channel uses.
/// Throws gf::DimensionMismatch on a length mismatch and std::invalid_argument
/// on a zero coefficient.
ChannelDraw channel_from_coefficients(std::span<const StateId> states,
                                      std::span<const gf::Element> coefficients);

/// observations[rx][use]
using Observations = std::array<std::vector<gf::Element>, kUsers>;

/// Received symbols per Y_j(k) = sum_i h_ji(k) X_i(k).
Observations transmit(const SchemeBlock& b, const ChannelDraw& ch);

struct TraceLine {
  User rx;
  std::vector<std::size_t> uses;
  std::string equation;
  std::string outcome;
};

struct DecodeResult {
  /// decoded[rx][k] is Rx's estimate of its own k-th symbol, or nullopt on
  /// decoding failure.
  std::array<std::vector<std::optional<gf::Element>>, kUsers> decoded;
  std::vector<TraceLine> trace;

  bool success(User rx) const;
  bool all_success() const;
  std::size_t delivered() const;
  std::size_t failures() const;
};

/// Runs each receiver's decode plan. Uses only the block structure, the
/// observations and the receiver's own coefficients; never the message values.
DecodeResult decode_block(const SchemeBlock& b, const Observations& obs, const ChannelDraw& ch);

/// One line per step: "rx=<j> use=<k,...> state=<S> eq: <equation> -> <outcome>".
std::string format_trace(const SchemeBlock& b, const DecodeResult& r);

// ---------------------------------------------------------------------------

/// Precoding form of a block: X_i = V_i m_i, rows = uses, cols = Tx i's symbols.
struct LinearScheme {
  gf::Field field;
  std::vector<StateId> states;
  std::array<gf::Matrix, kUsers> precoders;
};

LinearScheme as_linear_scheme(const SchemeBlock& b);

/// Per receiver: desired symbols are uniquely resolvable, i.e.
/// rank([desired | interference]) - rank(interference) == #desired.
std::array<bool, kUsers> verify_decodable(const LinearScheme& ls, const ChannelDraw& ch);

struct BadScheme : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// {"name": "...", "uses": ["B1", ...], "precoders": [V1, V2, V3]} with each
/// V_i a nested array of integers in [0, q). Throws BadScheme.
LinearScheme linear_scheme_from_json(std::string_view text, gf::Field field);
std::string linear_scheme_to_json(const LinearScheme& ls, std::string_view name = {});

/// Named built-ins: quadruple1, quadruple2, h-repetition, naive-h. Throws BadScheme.
LinearScheme builtin_scheme(std::string_view name, gf::Field field);

}  // namespace tim
