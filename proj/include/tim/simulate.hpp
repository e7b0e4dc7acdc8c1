#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tim/coding.hpp"
#include "tim/rational.hpp"
#include "tim/topology.hpp"

namespace tim {

enum class Mode { Joint, Separate };

std::string_view to_string(Mode m) noexcept;
std::optional<Mode> mode_from_string(std::string_view s) noexcept;

struct ConfigInvalid : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SimulationConfig {
  std::uint64_t q = 257;
  StateDistribution distribution = StateDistribution::uniform();
  /// Exactly one of these must be set. A round realizes the distribution
  /// exactly at its common denominator (uniform: 27 uses, one per state).
  std::optional<std::uint64_t> rounds;
  std::optional<std::uint64_t> n_uses;
  Mode mode = Mode::Joint;
  std::uint64_t seed = 0;
  /// Worker threads for block processing. Output does not depend on it.
  unsigned threads = 1;
  bool collect_trace = false;
};

/// Occurrence count of every state; the order of occurrences never matters.
using Occurrences = std::array<std::uint64_t, kStateCount>;

Occurrences count_occurrences(std::span<const StateId> sequence);

/// Groups occurrences into blocks. Joint mode first matches (B1, C1, D1, H1)
/// and (B2, C2, D2, H2) into quadruples; everything left is coded separately.
/// H leftovers pair into repetition blocks and an odd one becomes an h-single
/// block. Output order: quadruple1, quadruple2, then catalog order.
std::vector<BlockSkeleton> schedule(const Occurrences& occ, Mode mode);

/// Expected delivered symbols per use of the scheduler's plan under `d`.
Rational accounting(const StateDistribution& d, Mode mode);

/// Per-state rate when coded separately: A 3, H1/H2 3/2, others 2.
Rational separate_rate(StateId s);

struct KindTally {
  std::uint64_t blocks = 0;
  std::uint64_t uses = 0;
  std::uint64_t symbols_sent = 0;
  std::uint64_t symbols_delivered = 0;
  std::uint64_t failures = 0;
};

struct BlockResult {
  BlockSkeleton skeleton;
  std::uint64_t symbols_sent = 0;
  std::uint64_t symbols_delivered = 0;
  std::uint64_t failures = 0;
  std::string trace;
};

struct SimulationReport {
  Mode mode = Mode::Joint;
  std::uint64_t q = 0;
  std::uint64_t seed = 0;
  std::uint64_t uses = 0;
  std::uint64_t symbols_delivered = 0;
  /// Symbols that a receiver could not decode.
  std::uint64_t failures = 0;
  std::uint64_t failed_blocks = 0;
  Rational exact_dof;
  Rational empirical_dof;
  /// True when the joint plan for this distribution goes beyond the uniform
  /// case and is only a heuristic achievable point.
  bool heuristic = false;
  std::array<std::uint64_t, kStateCount> per_state_uses{};
  std::map<BlockKind, KindTally> per_kind;
  std::vector<BlockResult> blocks;
};

/// Seed for block `index`, derived by a fixed mixing function so results do
/// not depend on processing order.
std::uint64_t block_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Occurrences the config calls for (exact counts or i.i.d. samples).
Occurrences generate_occurrences(const SimulationConfig& cfg);

/// Runs given occurrences through schedule, channel, decoding and tallying.
SimulationReport run_occurrences(const SimulationConfig& cfg, const Occurrences& occ);

/// Throws ConfigInvalid.
SimulationReport run(const SimulationConfig& cfg);

/// Fields: uses, symbols_delivered, failures, failed_blocks, exact_dof,
/// empirical_dof as "p/q" strings, per_state, per_kind.
std::string report_to_json(const SimulationReport& r, bool with_float = false);
/// One row per block: block,kind,states,uses,symbols_sent,symbols_delivered,failures
std::string report_to_csv(const SimulationReport& r);
std::string report_to_text(const SimulationReport& r);
/// Concatenated decoder traces, each block prefixed by a "# block" header.
std::string report_trace(const SimulationReport& r);

}  // namespace tim
