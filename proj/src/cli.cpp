#include "tim/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tim/bounds.hpp"
#include "tim/coding.hpp"
#include "tim/simulate.hpp"
#include "tim/topology.hpp"

namespace tim::cli {

namespace {

struct DistributionArgs {
  bool uniform = false;
  std::string path;
};

struct Options {
  DistributionArgs dist;
  std::string format = "text";
  std::string name;
  std::string mode = "joint";
  std::string output;
  std::string trace;
  std::string scheme;
  std::string builtin;
  std::uint64_t seed = 0;
  std::uint64_t q = 257;
  std::uint64_t rounds = 0;
  std::uint64_t n_uses = 0;
  std::uint64_t draws = 1000;
  unsigned threads = 1;
  bool with_float = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigInvalid("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigInvalid("cannot write " + path);
  f << text;
}

StateDistribution load_distribution(const DistributionArgs& a) {
  if (a.path.empty()) return StateDistribution::uniform();
  return distribution_from_json(read_file(a.path));
}

void add_distribution_flags(CLI::App* cmd, Options& o) {
  auto* u = cmd->add_flag("--uniform", o.dist.uniform, "Equiprobable states (default)");
  auto* d = cmd->add_option("--dist", o.dist.path, "Distribution JSON file")->check(CLI::ExistingFile);
  u->excludes(d);
}

int cmd_states(const Options& o, std::ostream& out) {
  std::vector<StateId> ids;
  if (o.name.empty())
    for (const auto& e : all_states()) ids.push_back(e.id);
  else
    ids.push_back(parse_state(o.name));

  if (o.format == "dot") {
    for (auto s : ids) out << to_dot(s);
  } else if (o.format == "json") {
    auto arr = nlohmann::ordered_json::array();
    for (auto s : ids) {
      nlohmann::ordered_json row;
      row["name"] = name(s);
      auto interferers = nlohmann::ordered_json::array();
      for (const auto& i : lookup(s).interferer)
        interferers.push_back(i ? nlohmann::ordered_json(*i + 1) : nlohmann::ordered_json());
      row["interferer"] = interferers;
      arr.push_back(row);
    }
    out << arr.dump(2) << "\n";
  } else {
    for (auto s : ids) out << name(s) << (name(s).size() < 2 ? "   " : "  ") << describe_links(s) << "\n";
  }
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  SimulationConfig cfg;
  cfg.q = o.q;
  cfg.distribution = load_distribution(o.dist);
  if (o.rounds && o.n_uses) throw ConfigInvalid("--rounds and --n-uses are mutually exclusive");
  if (o.n_uses)
    cfg.n_uses = o.n_uses;
  else
    cfg.rounds = o.rounds ? o.rounds : 1;
  cfg.mode = *mode_from_string(o.mode);
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.collect_trace = !o.trace.empty();

  const SimulationReport r = run(cfg);
  std::string text;
  if (o.format == "json")
    text = report_to_json(r, o.with_float);
  else if (o.format == "csv")
    text = report_to_csv(r);
  else
    text = report_to_text(r);
  write_output(o.output, text, out);
  if (!o.trace.empty()) write_output(o.trace, report_trace(r), out);
  return r.failures ? kExitDecodeFailures : kExitOk;
}

int cmd_bound(const Options& o, std::ostream& out) {
  const auto d = load_distribution(o.dist);
  if (o.format == "json")
    out << upper_bound_to_json(d, o.with_float);
  else
    out << "upper bound " << to_string(upper_bound(d)) << "\n";
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  const auto r = gap_report(load_distribution(o.dist));
  out << (o.format == "json" ? bound_report_to_json(r, o.with_float) : bound_report_to_text(r));
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  if (o.scheme.empty() == o.builtin.empty()) throw ConfigInvalid("give exactly one of --scheme and --builtin");
  std::optional<gf::Field> field;
  try {
    field.emplace(o.q);
  } catch (const gf::NotPrime& e) {
    throw ConfigInvalid(e.what());
  }
  const LinearScheme ls = o.builtin.empty() ? linear_scheme_from_json(read_file(o.scheme), *field)
                                            : builtin_scheme(o.builtin, *field);
  const std::string label = o.builtin.empty() ? o.scheme : o.builtin;

  gf::Rng rng(block_seed(o.seed, 0));
  std::array<std::uint64_t, kUsers> ok{};
  for (std::uint64_t k = 0; k < o.draws; ++k) {
    const auto verdict = verify_decodable(ls, draw_channel(ls.states, *field, rng));
    for (User rx = 0; rx < kUsers; ++rx) ok[rx] += verdict[rx];
  }
  const bool clean = std::all_of(ok.begin(), ok.end(), [&](auto n) { return n == o.draws; });

  if (o.format == "json") {
    nlohmann::ordered_json j;
    j["scheme"] = label;
    j["q"] = o.q;
    j["seed"] = o.seed;
    j["draws"] = o.draws;
    j["desired_symbols"] = {ls.precoders[0].cols(), ls.precoders[1].cols(), ls.precoders[2].cols()};
    j["decodable"] = ok;
    out << j.dump(2) << "\n";
  } else {
    out << "scheme " << label << ", " << o.draws << " draws over GF(" << o.q << ")\n";
    for (User rx = 0; rx < kUsers; ++rx)
      out << "Rx" << rx + 1 << " " << ok[rx] << "/" << o.draws << " (desired: " << ls.precoders[rx].cols()
          << ")\n";
  }
  return clean ? kExitOk : kExitDecodeFailures;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  if (const char* env = std::getenv(kSeedEnv)) {
    try {
      o.seed = std::stoull(env);
    } catch (const std::exception&) {
      err << "error: " << kSeedEnv << " must be an unsigned integer\n";
      return kExitConfig;
    }
  }

  CLI::App app{"Alternating-connectivity 3-user interference channel: DoF simulator and bounds"};
  app.require_subcommand(1);

  auto* states = app.add_subcommand("states", "List the 27 connectivity states");
  states->add_option("--name", o.name, "Show one state");
  states->add_option("--format", o.format)->check(CLI::IsMember({"text", "json", "dot"}));

  auto* sim = app.add_subcommand("simulate", "Encode, transmit and decode over GF(q)");
  add_distribution_flags(sim, o);
  sim->add_option("--rounds", o.rounds, "Exact realizations of the distribution")->check(CLI::PositiveNumber);
  sim->add_option("--n-uses", o.n_uses, "I.i.d. sampled channel uses")->check(CLI::PositiveNumber);
  sim->add_option("--mode", o.mode)->check(CLI::IsMember({"joint", "separate"}));
  sim->add_option("--seed", o.seed);
  sim->add_option("--q", o.q, "Field size (prime)");
  sim->add_option("--threads", o.threads)->check(CLI::PositiveNumber);
  sim->add_option("--format", o.format)->check(CLI::IsMember({"text", "json", "csv"}));
  sim->add_option("--output", o.output, "Write the report here instead of stdout");
  sim->add_option("--trace", o.trace, "Write decoder traces to this file");
  sim->add_flag("--float", o.with_float, "Add decimal columns next to rationals");

  auto* bound = app.add_subcommand("bound", "Genie-aided DoF upper bound");
  add_distribution_flags(bound, o);
  bound->add_option("--format", o.format)->check(CLI::IsMember({"text", "json"}));
  bound->add_flag("--float", o.with_float);

  auto* report = app.add_subcommand("report", "Upper bound vs. joint and separate achievable DoF");
  add_distribution_flags(report, o);
  report->add_option("--format", o.format)->check(CLI::IsMember({"text", "json"}));
  report->add_flag("--float", o.with_float);

  auto* verify = app.add_subcommand("verify", "Rank-check a linear scheme over random channel draws");
  verify->add_option("--scheme", o.scheme, "LinearScheme JSON file")->check(CLI::ExistingFile);
  verify->add_option("--builtin", o.builtin)
      ->check(CLI::IsMember({"quadruple1", "quadruple2", "h-repetition", "naive-h"}));
  verify->add_option("--draws", o.draws)->check(CLI::PositiveNumber);
  verify->add_option("--q", o.q, "Field size (prime)");
  verify->add_option("--seed", o.seed);
  verify->add_option("--format", o.format)->check(CLI::IsMember({"text", "json"}));

  std::vector<const char*> argv{"timsim"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (states->parsed()) return cmd_states(o, out);
    if (sim->parsed()) return cmd_simulate(o, out);
    if (bound->parsed()) return cmd_bound(o, out);
    if (report->parsed()) return cmd_report(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
  } catch (const std::invalid_argument& e) {
    // ConfigInvalid, BadDistribution, BadScheme, UnknownState, NotPrime.
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace tim::cli
