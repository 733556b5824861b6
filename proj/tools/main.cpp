// Copyright 2026 The bdsw Authors
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

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "bdsw/hashing.hpp"
#include "bdsw/oracle.hpp"
#include "bdsw/rates.hpp"
#include "bdsw/session.hpp"

using namespace bdsw;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Fixed CSV column order.
const std::vector<std::string> kCsvColumns = {
    "seed", "mode", "n", "delta_b", "delta_p", "tag_fraction", "test_fraction", "sampling",
    "ec_slack", "pa_slack", "n_post_test", "ec_rounds", "pa_rounds", "key_length",
    "realized_rate", "formula_rate", "agreed", "abort_reason", "wall_time_ms", "key_hex"};

struct RunFlags {
  std::size_t n = 4096;
  double delta_b = 0.0;
  double delta_p = 0.0;
  double tag_fraction = 0.0;
  double test_fraction = 0.5;
  std::string mode = "ent";
  std::string sampling = "exact";
  std::size_t ec_slack = 10;
  std::size_t pa_slack = 10;
  std::uint64_t seed = 0;
  std::size_t runs = 1;
  std::string format = "jsonl";
  std::string out;
  std::string transcript;
  std::optional<std::uint64_t> paired_seed;
};

void add_session_flags(CLI::App* cmd, RunFlags& f) {
  auto rate = CLI::Range(0.0, 0.5 - 1e-12);
  cmd->add_option("--n", f.n, "pairs (sifted bits in pm mode)")->check(CLI::PositiveNumber);
  cmd->add_option("--delta-b", f.delta_b, "bit-flip rate")->check(rate);
  cmd->add_option("--delta-p", f.delta_p, "phase-flip rate")->check(rate);
  cmd->add_option("--tag-fraction", f.tag_fraction)->check(CLI::Range(0.0, 1.0 - 1e-12));
  cmd->add_option("--test-fraction", f.test_fraction)->check(CLI::Range(1e-9, 1.0 - 1e-9));
  cmd->add_option("--mode", f.mode)->check(CLI::IsMember({"ent", "pm"}));
  cmd->add_option("--sampling", f.sampling)->check(CLI::IsMember({"exact", "bernoulli"}));
  cmd->add_option("--ec-slack", f.ec_slack);
  cmd->add_option("--pa-slack", f.pa_slack);
  cmd->add_option("--seed", f.seed, "master seed (falls back to BDSW_SEED)");
  cmd->add_option("--runs", f.runs, "consecutive seeds, run concurrently")->check(CLI::PositiveNumber);
  cmd->add_option("--format", f.format)->check(CLI::IsMember({"jsonl", "csv"}));
  cmd->add_option("--out", f.out, "output file (default stdout)");
}

SessionConfig make_config(const RunFlags& f, std::uint64_t seed) {
  SessionConfig c;
  c.n_raw = f.n;
  c.channel.delta_b = f.delta_b;
  c.channel.delta_p = f.delta_p;
  c.channel.tag_fraction = f.tag_fraction;
  c.channel.sampling = f.sampling == "exact" ? Sampling::ExactCount : Sampling::Bernoulli;
  c.mode = f.mode == "pm" ? Mode::PrepareMeasure : Mode::Entanglement;
  c.test_fraction = f.test_fraction;
  c.ec_slack = f.ec_slack;
  c.pa_slack = f.pa_slack;
  c.seed = seed;
  return c;
}

std::optional<double> formula_rate(const SessionConfig& c) {
  const RateInputs in{c.channel.delta_b, c.channel.delta_p, c.channel.tag_fraction, std::nullopt};
  try {
    return in.delta > 0.0 ? tagged_key_rate(in).rf : key_rate(in);
  } catch (const AbortNoKey&) {
    return std::nullopt;
  }
}

struct Record {
  SessionConfig config;
  SessionResult result;
  double wall_ms = 0.0;
  std::optional<bool> paired_match;
};

Record execute(const SessionConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Record r{c, run_session(c), 0.0, std::nullopt};
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

json to_json(const Record& r) {
  const auto& c = r.config;
  const auto& s = r.result;
  const auto formula = formula_rate(c);
  json j;
  j["seed"] = c.seed;
  j["mode"] = std::string(to_string(c.mode));
  j["n"] = c.n_raw;
  j["delta_b"] = c.channel.delta_b;
  j["delta_p"] = c.channel.delta_p;
  j["tag_fraction"] = c.channel.tag_fraction;
  j["test_fraction"] = c.test_fraction;
  j["sampling"] = c.channel.sampling == Sampling::ExactCount ? "exact" : "bernoulli";
  j["ec_slack"] = c.ec_slack;
  j["pa_slack"] = c.pa_slack;
  j["n_post_test"] = s.n_post_test;
  j["ec_rounds"] = s.ec_rounds;
  j["pa_rounds"] = s.pa_rounds;
  j["key_length"] = s.key_alice.size();
  j["realized_rate"] = s.realized_rate;
  j["formula_rate"] = formula ? json(*formula) : json(nullptr);
  j["agreed"] = s.agreed;
  j["abort_reason"] = std::string(to_string(s.abort_reason));
  j["wall_time_ms"] = r.wall_ms;
  j["key_hex"] = bits_to_hex(s.key_alice);
  j["estimates"] = {{"delta_b", s.estimates.delta_b}, {"delta_p", s.estimates.delta_p}};
  if (r.paired_match) j["paired_match"] = *r.paired_match;
  return j;
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

class Emitter {
 public:
  Emitter(const std::string& path, std::string format) : format_(std::move(format)) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open " + path);
    }
    if (format_ == "csv") {
      std::string header;
      for (std::size_t i = 0; i < kCsvColumns.size(); ++i) header += (i ? "," : "") + kCsvColumns[i];
      line(header);
    }
  }
  void emit(const json& j) {
    if (format_ == "jsonl") {
      line(j.dump());
      return;
    }
    std::string row;
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) row += (i ? "," : "") + csv_cell(j[kCsvColumns[i]]);
    line(row);
  }

 private:
  void line(const std::string& s) {
    std::ostream& os = file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout;
    os << s << '\n';
    os.flush();
  }
  std::string format_;
  std::ofstream file_;
};

std::vector<Record> run_many(const std::vector<SessionConfig>& configs) {
  std::vector<Record> out(configs.size());
  std::atomic<std::size_t> next{0};
  const std::size_t workers =
      std::min<std::size_t>(configs.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < configs.size();) out[i] = execute(configs[i]);
    });
  for (auto& t : pool) t.join();
  return out;
}

bool all_agreed(const std::vector<Record>& records) {
  return std::all_of(records.begin(), records.end(), [](const Record& r) {
    return r.result.agreed && r.paired_match.value_or(true);
  });
}

int cmd_run(const RunFlags& f) {
  std::vector<SessionConfig> configs;
  const std::uint64_t base = f.paired_seed.value_or(f.seed);
  for (std::size_t k = 0; k < f.runs; ++k) {
    configs.push_back(make_config(f, base + k));
    configs.back().validate();
  }
  auto records = run_many(configs);
  if (f.paired_seed) {
    auto partners = configs;
    for (auto& c : partners) c.mode = c.mode == Mode::Entanglement ? Mode::PrepareMeasure : Mode::Entanglement;
    const auto other = run_many(partners);
    for (std::size_t i = 0; i < records.size(); ++i)
      records[i].paired_match = records[i].result.key_alice == other[i].result.key_alice &&
                                records[i].result.key_bob == other[i].result.key_bob;
  }
  if (!f.transcript.empty()) {
    std::ofstream t(f.transcript, std::ios::binary);
    if (!t) throw std::runtime_error("cannot open " + f.transcript);
    t << records.front().result.transcript.serialize();
  }
  Emitter em(f.out, f.format);
  for (const auto& r : records) em.emit(to_json(r));
  return all_agreed(records) ? kExitOk : kExitFailure;
}

std::vector<double> parse_grid(const std::optional<std::string>& text, double fallback) {
  if (!text) return {fallback};
  std::vector<double> out;
  std::stringstream ss(*text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw CLI::ValidationError("grid", "bad value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int cmd_sweep(const RunFlags& f, const std::optional<std::string>& gb, const std::optional<std::string>& gp,
              const std::optional<std::string>& gt) {
  const auto bs = parse_grid(gb, f.delta_b), ps = parse_grid(gp, f.delta_p), ts = parse_grid(gt, f.tag_fraction);
  if (bs.empty() || ps.empty() || ts.empty()) throw CLI::ValidationError("grid", "empty grid");
  std::vector<SessionConfig> configs;
  for (double b : bs)
    for (double p : ps)
      for (double t : ts)
        for (std::size_t k = 0; k < f.runs; ++k) {
          RunFlags g = f;
          g.delta_b = b;
          g.delta_p = p;
          g.tag_fraction = t;
          auto c = make_config(g, f.seed + k);
          c.validate();
          configs.push_back(c);
        }
  const auto records = run_many(configs);
  Emitter em(f.out, f.format);
  for (const auto& r : records) em.emit(to_json(r));

  std::cerr << "delta_b  delta_p  tag      formula    realized   aborts\n";
  for (std::size_t i = 0; i < records.size(); i += f.runs) {
    const auto& c = records[i].config;
    double sum = 0.0;
    std::size_t kept = 0, aborts = 0;
    for (std::size_t k = i; k < i + f.runs; ++k) {
      if (records[k].result.abort_reason != AbortReason::None) {
        ++aborts;
        continue;
      }
      sum += records[k].result.realized_rate;
      ++kept;
    }
    const auto formula = formula_rate(c);
    char row[160];
    std::snprintf(row, sizeof row, "%-8.4f %-8.4f %-8.4f %-10s %-10s %zu\n", c.channel.delta_b,
                  c.channel.delta_p, c.channel.tag_fraction,
                  formula ? std::to_string(*formula).substr(0, 8).c_str() : "abort",
                  kept ? std::to_string(sum / static_cast<double>(kept)).substr(0, 8).c_str() : "-",
                  aborts);
    std::cerr << row;
  }
  return all_agreed(records) ? kExitOk : kExitFailure;
}

std::pair<PairState, PairState> faulty_bicnot(PairState c, PairState t) {
  auto out = bicnot(c, t);
  if (c.a && t.b) out.first.b ^= 1;
  return out;
}

int cmd_verify(std::size_t max_pairs, std::size_t trials, const std::string& fault, std::uint64_t seed) {
  bool ok = true;
  const auto bad = oracle::check_bicnot(fault == "bicnot" ? oracle::BicnotFn(faulty_bicnot)
                                                          : oracle::BicnotFn(bicnot));
  for (const auto& b : bad) std::cout << "FAIL bicnot " << b << '\n';
  std::cout << (bad.empty() ? "PASS" : "FAIL") << " bicnot truth table (16 entries)\n";
  ok &= bad.empty();

  Rng rng = make_stream(seed, "verify");
  std::size_t cases = 0, failures = 0;
  for (std::size_t n = 1; n <= max_pairs; ++n)
    for (int s = 0; s < 20; ++s) {
      const auto script = oracle::random_script(n, n - 1, rng);
      const auto rep = oracle::exhaustive_protocol_check(n, script);
      cases += rep.cases;
      failures += rep.cases - rep.agreements;
      for (const auto& m : rep.failures) std::cout << "FAIL protocol n=" << n << ' ' << m << '\n';
    }
  std::cout << (failures == 0 ? "PASS" : "FAIL") << " exhaustive protocol check (" << cases
            << " cases, up to " << max_pairs << " pairs)\n";
  ok &= failures == 0;

  std::size_t worst_channel = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < 20; ++k) {
    std::array<double, 4> w{};
    double sum = 0.0;
    for (auto& x : w) sum += x = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (auto& x : w) x /= sum;
    const auto r = oracle::tagged_phase_independence(oracle::Channel::pauli_mixture(w), trials, rng);
    const double z = std::abs(r.fraction - 0.5) / std::sqrt(0.25 / static_cast<double>(trials));
    if (z > worst) {
      worst = z;
      worst_channel = k;
    }
  }
  const bool phase_ok = worst <= 5.0;
  std::cout << (phase_ok ? "PASS" : "FAIL") << " tagged phase independence (20 channels, worst "
            << worst << " sigma on channel " << worst_channel << ")\n";
  ok &= phase_ok;
  return ok ? kExitOk : kExitFailure;
}

std::uint64_t env_seed() {
  const char* s = std::getenv("BDSW_SEED");
  if (!s || !*s) return 0;
  char* end = nullptr;
  const auto v = std::strtoull(s, &end, 10);
  if (*end) throw CLI::ValidationError("BDSW_SEED", "not an unsigned integer");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modified BDSW key distillation simulator"};
  app.require_subcommand(1);

  RunFlags run_flags, sweep_flags;
  auto* run = app.add_subcommand("run", "run sessions and emit one record per run");
  add_session_flags(run, run_flags);
  run->add_option("--paired-seed", run_flags.paired_seed,
                  "run the other mode with this seed too and report whether the keys match");
  run->add_option("--transcript", run_flags.transcript, "write the first run's transcript here");

  std::optional<std::string> grid_b, grid_p, grid_t;
  auto* sweep = app.add_subcommand("sweep", "cartesian grid of sessions with a rate summary");
  add_session_flags(sweep, sweep_flags);
  sweep->add_option("--delta-b-grid", grid_b, "comma-separated values");
  sweep->add_option("--delta-p-grid", grid_p, "comma-separated values");
  sweep->add_option("--tag-grid", grid_t, "comma-separated values");

  std::size_t max_pairs = 3, trials = 100000;
  std::string fault;
  std::uint64_t verify_seed = 0;
  auto* verify = app.add_subcommand("verify", "run the oracle checks");
  verify->add_option("--max-pairs", max_pairs)->check(CLI::Range(1, 6));
  verify->add_option("--trials", trials, "samples per channel")->check(CLI::PositiveNumber);
  verify->add_option("--inject-fault", fault)->check(CLI::IsMember({"bicnot"}));
  verify->add_option("--seed", verify_seed);

  try {
    app.parse(argc, argv);
    for (auto* cmd : {run, sweep})
      if (cmd->parsed() && cmd->count("--seed") == 0)
        (cmd == run ? run_flags : sweep_flags).seed = env_seed();
    if (run->parsed()) return cmd_run(run_flags);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, grid_b, grid_p, grid_t);
    return cmd_verify(max_pairs, trials, fault, verify_seed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
