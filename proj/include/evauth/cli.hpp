#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evauth/config.hpp"
#include "evauth/errors.hpp"
#include "evauth/event.hpp"
#include "evauth/harness.hpp"
#include "evauth/profile.hpp"

namespace evauth::cli {

namespace detail {

// Outputs are rendered fully in memory and written in one step, so a failed
// run never leaves a partial file behind.
inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open output file: " + path.string());
  out << content;
  if (!out) throw ConfigError("failed writing output file: " + path.string());
}

struct GenOptions {
  std::string profile_path;
  std::int64_t from = 0;
  std::int64_t to = 0;
  std::optional<std::uint64_t> seed;
  std::string out_path;
};

struct AttackOptions {
  std::string log_path;
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
};

struct ReplayOptions {
  std::string log_path;
  std::string contacts_path;
  std::optional<std::string> config_path;
  std::optional<std::int64_t> attack_start;
  std::string out_path;
  std::optional<std::string> metrics_path;
};

struct SweepOptions {
  std::string log_path;
  std::string contacts_path;
  std::optional<std::string> config_path;
  std::string grid_path;
  std::string out_path;
};

inline int run_gen(const GenOptions& opt) {
  ProfileSpec profile = profile_from_json(read_json_file(opt.profile_path));
  if (opt.seed) profile.rng_seed = *opt.seed;
  const EventLog log = generate_legitimate(profile, opt.from, opt.to);
  std::ostringstream out;
  write_event_log(out, log);
  write_file(opt.out_path, out.str());
  return 0;
}

inline int run_attack(const AttackOptions& opt) {
  const EventLog log = read_event_log_file(opt.log_path);
  AttackSpec spec = attack_spec_from_json(read_json_file(opt.spec_path));
  if (opt.seed) spec.rng_seed = *opt.seed;
  const EventLog injected = inject_attack(log, spec);
  std::ostringstream out;
  write_event_log(out, injected);
  write_file(opt.out_path, out.str());
  return 0;
}

inline int run_replay(const ReplayOptions& opt) {
  const EventLog log = read_event_log_file(opt.log_path);
  const ContactList contacts = read_contacts_file(opt.contacts_path);
  RunConfig cfg;
  if (opt.config_path) cfg = load_run_config_file(*opt.config_path);
  if (opt.attack_start) cfg.attack_start = *opt.attack_start;

  const ReplayResult result = replay(log, contacts, cfg);

  std::ostringstream decisions_out;
  write_decision_csv(decisions_out, result.decisions);
  const std::string metrics_out = metrics_to_json(result.metrics).dump(2) + "\n";

  write_file(opt.out_path, decisions_out.str());
  if (opt.metrics_path) {
    write_file(*opt.metrics_path, metrics_out);
  } else {
    std::cout << metrics_out;
  }
  return 0;
}

inline int run_sweep(const SweepOptions& opt) {
  const EventLog log = read_event_log_file(opt.log_path);
  const ContactList contacts = read_contacts_file(opt.contacts_path);
  RunConfig cfg;
  if (opt.config_path) cfg = load_run_config_file(*opt.config_path);
  const SweepGrid grid = sweep_grid_from_json(read_json_file(opt.grid_path));

  const std::vector<SweepRow> rows = sweep(log, contacts, cfg, grid);
  std::ostringstream out;
  write_sweep_csv(out, rows);
  write_file(opt.out_path, out.str());
  return 0;
}

}  // namespace detail

// Exit codes: 0 success, 1 usage error, 2 data/validation/config error.
inline int run(int argc, const char* const* argv) {
  CLI::App app{"Event-driven behavioral scoring and adaptive-threshold decision engine"};
  app.require_subcommand(1);

  detail::GenOptions gen_opt;
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic legitimate event log");
  gen->add_option("--profile", gen_opt.profile_path, "Profile spec JSON")->required();
  gen->add_option("--from", gen_opt.from, "Span start (epoch seconds)")->required();
  gen->add_option("--to", gen_opt.to, "Span end (epoch seconds, exclusive)")->required();
  gen->add_option("--seed", gen_opt.seed, "Override the profile's rng_seed");
  gen->add_option("--out", gen_opt.out_path, "Output event log (JSONL)")->required();

  detail::AttackOptions attack_opt;
  CLI::App* attack = app.add_subcommand("attack", "Inject an adversary segment into a log");
  attack->add_option("--log", attack_opt.log_path, "Input event log (JSONL)")->required();
  attack->add_option("--spec", attack_opt.spec_path, "Attack spec JSON")->required();
  attack->add_option("--seed", attack_opt.seed, "Override the spec's rng_seed");
  attack->add_option("--out", attack_opt.out_path, "Output event log (JSONL)")->required();

  detail::ReplayOptions replay_opt;
  CLI::App* replay = app.add_subcommand("replay", "Score a log and emit decisions + metrics");
  replay->add_option("--log", replay_opt.log_path, "Input event log (JSONL)")->required();
  replay->add_option("--contacts", replay_opt.contacts_path, "Contacts file")->required();
  replay->add_option("--config", replay_opt.config_path,
                     "Engine config JSON (defaults apply when omitted)");
  replay->add_option("--attack-start", replay_opt.attack_start,
                     "Attack start for metrics (epoch seconds)");
  replay->add_option("--out", replay_opt.out_path, "Output decision CSV")->required();
  replay->add_option("--metrics", replay_opt.metrics_path,
                     "Metrics JSON path (stdout when omitted)");

  detail::SweepOptions sweep_opt;
  CLI::App* sweep = app.add_subcommand("sweep", "Replay once per grid point");
  sweep->add_option("--log", sweep_opt.log_path, "Input event log (JSONL)")->required();
  sweep->add_option("--contacts", sweep_opt.contacts_path, "Contacts file")->required();
  sweep->add_option("--config", sweep_opt.config_path,
                    "Engine config JSON (defaults apply when omitted)");
  sweep->add_option("--grid", sweep_opt.grid_path, "Grid JSON: parameter -> values")->required();
  sweep->add_option("--out", sweep_opt.out_path, "Output sweep CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) return detail::run_gen(gen_opt);
    if (attack->parsed()) return detail::run_attack(attack_opt);
    if (replay->parsed()) return detail::run_replay(replay_opt);
    if (sweep->parsed()) return detail::run_sweep(sweep_opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

// Convenience overload for tests: args exclude the program name.
inline int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("evauth");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace evauth::cli
