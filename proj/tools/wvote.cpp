/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wvote/config.hpp"
#include "wvote/csv.hpp"
#include "wvote/mwu.hpp"
#include "wvote/rules.hpp"
#include "wvote/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wvote;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::size_t begin = 0;
  while (begin <= s.size()) {
    const auto comma = s.find(',', begin);
    const std::string tok = s.substr(begin, comma - begin);
    if (!tok.empty()) out.push_back(parse_double(tok));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  if (out.empty()) throw ConfigError("empty number list: \"" + s + "\"");
  return out;
}

DecisionProfile parse_votes(const std::string& s) {
  DecisionProfile out;
  if (s.find(',') == std::string::npos && s.find('1') == std::string::npos) {
    for (char c : s) {
      if (c == '+') {
        out.push_back(Vote::approve);
      } else if (c == '-') {
        out.push_back(Vote::reject);
      } else {
        throw ConfigError(std::string("votes: unexpected character '") + c + "'");
      }
    }
  } else {
    std::size_t begin = 0;
    while (begin <= s.size()) {
      const auto comma = s.find(',', begin);
      const std::string tok = s.substr(begin, comma - begin);
      if (tok == "1" || tok == "+1") {
        out.push_back(Vote::approve);
      } else if (tok == "-1") {
        out.push_back(Vote::reject);
      } else if (!tok.empty()) {
        throw ConfigError("votes: expected +1 or -1, got \"" + tok + "\"");
      }
      if (comma == std::string::npos) break;
      begin = comma + 1;
    }
  }
  if (out.empty()) throw ConfigError("votes: empty vote string");
  return out;
}

struct NamedCommittee {
  std::string name;
  std::vector<double> profiles;
};

// Committee input shared by weights/quota/prob/decide: positional profiles or
// a JSON file with "profiles" (one committee) or "committees" (several). A
// "welfare" object in the file provides defaults for alpha/l_r/l_a.
struct CommitteeInput {
  std::vector<double> positional;
  std::string file;
  std::vector<NamedCommittee> committees;
  std::optional<WelfareParams> file_welfare;

  void load() {
    if (!positional.empty() && !file.empty()) {
      throw ConfigError("give profiles either as arguments or with --file, not both");
    }
    if (!positional.empty()) {
      committees.push_back({"committee", positional});
      return;
    }
    if (file.empty()) throw ConfigError("no profiles given (arguments or --file)");
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open " + file);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(file + ": " + e.what());
    }
    if (doc.contains("welfare")) {
      WelfareParams w;
      const json& wj = doc.at("welfare");
      w.alpha = wj.value("alpha", w.alpha);
      w.loss_reject_valid = wj.value("loss_reject_valid", w.loss_reject_valid);
      w.loss_accept_invalid = wj.value("loss_accept_invalid", w.loss_accept_invalid);
      file_welfare = w;
    }
    if (doc.contains("profiles")) {
      committees.push_back({"committee", doc.at("profiles").get<std::vector<double>>()});
    } else if (doc.contains("committees")) {
      for (const auto& c : doc.at("committees")) {
        NamedCommittee nc;
        nc.name = c.value("name", "committee " + std::to_string(committees.size() + 1));
        nc.profiles = c.at("profiles").get<std::vector<double>>();
        committees.push_back(std::move(nc));
      }
    } else {
      throw ConfigError(file + ": expected a \"profiles\" or \"committees\" entry");
    }
    if (committees.empty()) throw ConfigError(file + ": no committees found");
  }
};

struct WelfareFlags {
  double alpha = 0.5;
  double lr = 1e-2;
  double la = 12.0;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* lr_opt = nullptr;
  CLI::Option* la_opt = nullptr;

  void add_to(CLI::App* cmd) {
    alpha_opt = cmd->add_option("--alpha", alpha, "Prior probability of an invalid block");
    lr_opt = cmd->add_option("--lr", lr, "Loss from rejecting a valid block");
    la_opt = cmd->add_option("--la", la, "Loss from accepting an invalid block");
  }

  // Explicit flags beat file-provided values beat defaults.
  WelfareParams resolve(const std::optional<WelfareParams>& from_file) const {
    WelfareParams w = from_file.value_or(WelfareParams{alpha, lr, la});
    if (alpha_opt->count() > 0) w.alpha = alpha;
    if (lr_opt->count() > 0) w.loss_reject_valid = lr;
    if (la_opt->count() > 0) w.loss_accept_invalid = la;
    w.validate();
    if (const auto warn = w.warning()) std::cerr << "warning: " << *warn << "\n";
    return w;
  }
};

void check_open_unit(const std::vector<double>& profiles) {
  for (double p : profiles) {
    if (!(p > 0.0) || !(p < 1.0)) {
      throw ConfigError("profile out of open unit interval: " + format_double(p));
    }
  }
}

void cmd_weights(const CommitteeInput& input) {
  for (const auto& c : input.committees) {
    check_open_unit(c.profiles);
    const auto raw = optimal_weights(c.profiles);
    const auto normalized = normalize_weights(raw);
    if (input.committees.size() > 1) std::cout << c.name << "\n";
    std::cout << "profile,weight,normalized\n";
    for (std::size_t i = 0; i < raw.size(); ++i) {
      std::cout << format_double(c.profiles[i]) << "," << format_double(raw[i]) << ","
                << format_double(normalized[i]) << "\n";
    }
  }
}

void cmd_quota(const CommitteeInput& input, const WelfareFlags& flags) {
  const WelfareParams welfare = flags.resolve(input.file_welfare);
  for (const auto& c : input.committees) {
    check_open_unit(c.profiles);
    const auto weights = optimal_weights(c.profiles);
    const QuotaResult q = optimal_quota(weights, welfare);
    double total = 0.0;
    for (double w : weights) total += w;
    if (input.committees.size() > 1) std::cout << c.name << ": ";
    std::cout << "quota=" << format_double(q.clamped)
              << " unclamped=" << format_double(q.unclamped)
              << " total_weight=" << format_double(total) << "\n";
  }
}

// Binomial tail sum_{k>=k_min} C(n,k) p^k (1-p)^(n-k), for the Condorcet
// cross-check report.
double binomial_tail(int n, int k_min, double p) {
  double sum = 0.0;
  for (int k = std::max(k_min, 0); k <= n; ++k) {
    double coeff = 1.0;
    for (int j = 0; j < k; ++j) {
      coeff = coeff * static_cast<double>(n - j) / static_cast<double>(j + 1);
    }
    sum += coeff * std::pow(p, k) * std::pow(1.0 - p, n - k);
  }
  return sum;
}

struct ProbOptions {
  std::string rule = "unweighted";
  double quota = 2.0 / 3.0;
  std::string weights_csv;
  std::string validity = "valid";
  std::string method = "exact";
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 0;
  bool condorcet_check = false;
};

void cmd_prob(const CommitteeInput& input, const WelfareFlags& flags, const ProbOptions& opt) {
  const auto& profiles = input.committees.front().profiles;
  check_open_unit(profiles);

  DecisionRule rule;
  if (opt.rule == "unweighted") {
    rule = DecisionRule::make_unweighted(opt.quota);
  } else if (opt.rule == "weighted") {
    if (opt.weights_csv.empty()) throw ConfigError("--rule weighted needs --weights");
    rule = DecisionRule::make_weighted(parse_list(opt.weights_csv), opt.quota);
  } else if (opt.rule == "optimal") {
    rule = theorem_rule(profiles, flags.resolve(input.file_welfare));
  } else {
    throw ConfigError("--rule must be unweighted, weighted or optimal");
  }

  BlockValidity validity;
  if (opt.validity == "valid") {
    validity = BlockValidity::valid;
  } else if (opt.validity == "invalid") {
    validity = BlockValidity::invalid;
  } else {
    throw ConfigError("--validity must be valid or invalid");
  }

  if (opt.method == "exact") {
    const double p = consensus_probability_exact(profiles, rule, validity);
    std::cout << "probability=" << format_double(p) << " method=exact\n";
    if (opt.condorcet_check) {
      if (profiles.size() % 2 == 0) throw ConfigError("--condorcet-check needs odd n");
      for (double q : profiles) {
        if (q != profiles.front()) {
          throw ConfigError("--condorcet-check needs identical profiles");
        }
      }
      const int n = static_cast<int>(profiles.size());
      int k_min = n;
      for (int k = 0; k <= n; ++k) {
        DecisionProfile votes(profiles.size(), Vote::reject);
        for (int i = 0; i < k; ++i) votes[static_cast<std::size_t>(i)] = Vote::approve;
        if (rule.apply(votes) == ConsensusOutcome::approve) {
          k_min = k;
          break;
        }
      }
      const double tail = binomial_tail(n, k_min, profiles.front());
      std::cout << "condorcet_binomial_tail=" << format_double(tail)
                << " abs_diff=" << format_double(std::abs(tail - p)) << "\n";
    }
  } else if (opt.method == "mc") {
    const McEstimate est =
        consensus_probability_mc(profiles, rule, validity, opt.trials, opt.seed);
    std::cout << "probability=" << format_double(est.estimate)
              << " half_width_95=" << format_double(est.half_width_95)
              << " trials=" << format_u64(est.trials) << " method=mc\n";
  } else {
    throw ConfigError("--method must be exact or mc");
  }
}

struct DecideOptions {
  std::string profiles_csv;
  std::string weights_csv;
  std::string votes;
  double quota = 0.5;
  bool quota_given = false;
};

void cmd_decide(const DecideOptions& opt, const WelfareFlags& flags) {
  if (opt.votes.empty()) throw ConfigError("--votes is required");
  const DecisionProfile votes = parse_votes(opt.votes);

  std::vector<double> weights;
  double quota = opt.quota;
  if (!opt.profiles_csv.empty()) {
    const auto profiles = parse_list(opt.profiles_csv);
    check_open_unit(profiles);
    weights = optimal_weights(profiles);
    if (!opt.quota_given) {
      const QuotaResult q = optimal_quota(weights, flags.resolve(std::nullopt));
      quota = q.clamped;
      std::cout << "quota=" << format_double(q.clamped)
                << " unclamped=" << format_double(q.unclamped) << "\n";
    }
  } else if (!opt.weights_csv.empty()) {
    weights = parse_list(opt.weights_csv);
    if (!opt.quota_given) throw ConfigError("--weights needs an explicit --quota");
  } else {
    throw ConfigError("give --profiles or --weights");
  }

  const ConsensusOutcome outcome = weighted_decision(votes, weights, quota);
  const double margin = decision_margin(votes, weights, quota);
  const auto normalized = normalize_weights(weights);
  double share = 0.0;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    if (votes[i] == Vote::approve) share += normalized[i];
  }
  std::cout << "outcome=" << (outcome == ConsensusOutcome::approve ? "approve" : "reject")
            << " margin=" << format_double(margin)
            << " approval_share=" << format_double(share) << "\n";
}

struct ToleranceOptions {
  double delta = 1e-3;
  double q = 0.0;
  double q1 = 0.0;
  bool q_given = false;
};

void cmd_tolerance(const ToleranceOptions& opt, const WelfareFlags& flags) {
  UpdateParams params;
  params.delta = opt.delta;
  params.loss_reject_valid = flags.lr;
  params.loss_accept_invalid = flags.la;
  const ToleranceConstants c = tolerance_constants(params);
  std::cout << "c1=" << format_double(c.c1) << " c2=" << format_double(c.c2)
            << " min_correct_fraction=" << format_double(minimum_correct_fraction(params))
            << "\n";
  if (opt.q_given) {
    const BehaviorMix mix{opt.q, opt.q1};
    const bool ok = sustains_profile(mix, params);
    std::cout << "q=" << format_double(opt.q) << " q1=" << format_double(opt.q1)
              << " verdict=" << (ok ? "sustains" : "degrades") << "\n";
  }
}

struct SimulateOptions {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool gnuplot = false;
};

std::string default_out_dir(const std::string& config_path) {
  const std::string stem = fs::path(config_path).stem().string();
  if (const char* env = std::getenv("WVOTE_OUT_DIR")) {
    return (fs::path(env) / stem).string();
  }
  return (fs::path("wvote-out") / stem).string();
}

const char* classification_name(VoteClassification c) {
  switch (c) {
    case VoteClassification::correct:
      return "correct";
    case VoteClassification::abstained_or_rejected_valid:
      return "abstained";
    case VoteClassification::approved_invalid:
      return "approved_invalid";
  }
  return "?";
}

void write_json_file(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << "\n";
}

// Runs one config end to end and writes CSVs, summary.json and manifest.json
// into out_dir. Returns a one-line human summary.
std::string run_simulation(const SimulateOptions& opt) {
  std::ifstream in(opt.config_path);
  if (!in) throw ConfigError("config: cannot open " + opt.config_path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + opt.config_path + ": " + e.what());
  }
  apply_overrides(doc, opt.overrides);
  const RunConfig cfg = parse_run_config(doc);

  const std::string out_dir =
      opt.out_dir.empty() ? default_out_dir(opt.config_path) : opt.out_dir;
  fs::create_directories(out_dir);

  RunManifest manifest;
  manifest.config = cfg.resolved;
  manifest.started_utc = utc_timestamp();

  json summary;
  summary["manifest"] = "manifest.json";
  summary["config"] = cfg.resolved;
  std::string status;

  if (cfg.kind == RunKind::consensus) {
    manifest.seed = cfg.scenario.seed;
    const auto records = run_scenario(cfg.scenario);

    CsvWriter slots((fs::path(out_dir) / "slots.csv").string());
    slots.row({"slot", "weighted_approval_fraction", "outcome", "committed_count"});
    std::uint64_t committed = 0;
    for (const auto& r : records) {
      if (r.outcome == ConsensusOutcome::approve) ++committed;
      slots.row({format_u64(r.slot), format_double(r.weighted_approval_fraction),
                 r.outcome == ConsensusOutcome::approve ? "1" : "-1",
                 format_u64(committed)});
    }

    CsvWriter profiles((fs::path(out_dir) / "profiles.csv").string());
    profiles.row({"slot", "validator", "profile"});
    for (const auto& r : records) {
      for (std::size_t i = 0; i < r.committee.size(); ++i) {
        profiles.row({format_u64(r.slot), format_u64(r.committee[i]),
                      format_double(r.profiles_after[i])});
      }
    }

    std::vector<double> final_profiles(cfg.scenario.population,
                                       cfg.scenario.initial_profile);
    for (const auto& r : records) {
      for (std::size_t i = 0; i < r.committee.size(); ++i) {
        final_profiles[r.committee[i]] = r.profiles_after[i];
      }
    }

    const auto recovery = recovery_slot(records);
    summary["kind"] = "consensus";
    summary["recovery_slot"] = recovery ? json(*recovery) : json(nullptr);
    summary["committed"] = committed;
    summary["skipped"] = records.size() - committed;
    summary["final_profiles"] = final_profiles;
    manifest.outputs = {"slots.csv", "profiles.csv", "summary.json"};
    status = "recovery_slot=" + (recovery ? format_u64(*recovery) : std::string("none")) +
             " committed=" + format_u64(committed);

    if (opt.gnuplot) {
      std::ofstream plot(fs::path(out_dir) / "plot.gp", std::ios::binary);
      plot << "set datafile separator \",\"\n"
           << "set key autotitle columnhead\n"
           << "set xlabel \"slot\"\n"
           << "set ylabel \"weighted approval fraction\"\n"
           << "plot \"slots.csv\" using 1:2 with lines title \"approval\", \\\n"
           << "     2.0/3.0 with lines dashtype 2 title \"2/3 threshold\"\n";
      manifest.outputs.push_back("plot.gp");
    }
  } else {
    const TrajectoryConfig& t = cfg.trajectory;
    manifest.seed = t.seed;
    const auto schedule =
        make_schedule(t.mix, static_cast<std::size_t>(t.horizon), t.schedule, t.seed);
    const auto traj = run_trajectory(t.initial_profile, schedule, t.update);

    CsvWriter csv((fs::path(out_dir) / "trajectory.csv").string());
    csv.row({"slot", "classification", "profile"});
    std::uint64_t counts[3] = {0, 0, 0};
    std::optional<std::uint64_t> cap_slot;
    const double cap = 1.0 - t.update.cap_margin;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      ++counts[static_cast<int>(schedule[i])];
      if (!cap_slot && traj[i] >= cap) cap_slot = i;
      csv.row({format_u64(i), classification_name(schedule[i]), format_double(traj[i])});
    }

    summary["kind"] = "trajectory";
    summary["final_profile"] = traj.empty() ? t.initial_profile : traj.back();
    summary["cap_first_slot"] = cap_slot ? json(*cap_slot) : json(nullptr);
    summary["schedule_counts"] = json{{"correct", counts[0]},
                                      {"abstained", counts[1]},
                                      {"approved_invalid", counts[2]}};
    manifest.outputs = {"trajectory.csv", "summary.json"};
    status = "final_profile=" +
             format_double(traj.empty() ? t.initial_profile : traj.back());

    if (opt.gnuplot) {
      std::ofstream plot(fs::path(out_dir) / "plot.gp", std::ios::binary);
      plot << "set datafile separator \",\"\n"
           << "set key autotitle columnhead\n"
           << "set xlabel \"slot\"\nset ylabel \"voting profile\"\n"
           << "plot \"trajectory.csv\" using 1:3 with lines title \"profile\"\n";
      manifest.outputs.push_back("plot.gp");
    }
  }

  write_json_file(fs::path(out_dir) / "summary.json", summary);
  manifest.finished_utc = utc_timestamp();
  write_json_file(fs::path(out_dir) / "manifest.json", manifest_json(manifest));
  return out_dir + ": " + status;
}

struct SweepOptions {
  std::vector<std::string> configs;
  std::string out_dir = "wvote-out";
  std::vector<std::string> overrides;
  unsigned jobs = 0;
};

int cmd_sweep(const SweepOptions& opt) {
  std::vector<std::string> stems;
  for (const auto& c : opt.configs) {
    const std::string stem = fs::path(c).stem().string();
    for (const auto& seen : stems) {
      if (seen == stem) throw ConfigError("sweep: duplicate config stem \"" + stem + "\"");
    }
    stems.push_back(stem);
  }

  const unsigned jobs = opt.jobs == 0
                            ? std::max(1u, std::thread::hardware_concurrency())
                            : opt.jobs;
  std::atomic<std::size_t> next{0};
  std::vector<std::string> results(opt.configs.size());
  std::vector<int> failed(opt.configs.size(), 0);  // 0 ok, 2 config, 3 runtime

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= opt.configs.size()) return;
      SimulateOptions sim;
      sim.config_path = opt.configs[i];
      sim.out_dir = (fs::path(opt.out_dir) / stems[i]).string();
      sim.overrides = opt.overrides;
      try {
        results[i] = run_simulation(sim);
      } catch (const ConfigError& e) {
        results[i] = std::string("config error: ") + e.what();
        failed[i] = kExitConfig;
      } catch (const std::exception& e) {
        results[i] = std::string("error: ") + e.what();
        failed[i] = kExitRuntime;
      }
    }
  };

  std::vector<std::thread> pool;
  for (unsigned j = 0; j < std::min<std::size_t>(jobs, opt.configs.size()); ++j) {
    pool.emplace_back(worker);
  }
  for (auto& th : pool) th.join();

  int exit_code = kExitOk;
  for (std::size_t i = 0; i < opt.configs.size(); ++i) {
    std::cout << (failed[i] ? "[fail] " : "[ ok ] ") << opt.configs[i] << " -> "
              << results[i] << "\n";
    if (failed[i]) exit_code = std::max(exit_code, failed[i]);
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted majority voting for proof-of-stake committees: optimal "
               "rules, multiplicative profile updates, and recovery simulation"};
  app.set_version_flag("--version", kToolVersion);
  app.footer("Exit codes: 0 success, 2 usage or configuration error, 3 runtime error.\n"
             "WVOTE_OUT_DIR overrides the default output directory of simulate/sweep.");
  app.require_subcommand(1);

  CommitteeInput weights_in;
  auto* weights_cmd =
      app.add_subcommand("weights", "Log-odds weights for a committee of profiles");
  weights_cmd->add_option("profiles", weights_in.positional, "Voting profiles in (0, 1)");
  weights_cmd->add_option("--file", weights_in.file, "JSON file with profiles/committees");

  CommitteeInput quota_in;
  WelfareFlags quota_flags;
  auto* quota_cmd = app.add_subcommand("quota", "Welfare-optimal quota for a committee");
  quota_cmd->add_option("profiles", quota_in.positional, "Voting profiles in (0, 1)");
  quota_cmd->add_option("--file", quota_in.file, "JSON file with profiles/committees");
  quota_flags.add_to(quota_cmd);

  CommitteeInput prob_in;
  WelfareFlags prob_flags;
  ProbOptions prob_opt;
  auto* prob_cmd =
      app.add_subcommand("prob", "Probability of a correct consensus outcome");
  prob_cmd->add_option("profiles", prob_in.positional, "Voting profiles in (0, 1)");
  prob_cmd->add_option("--file", prob_in.file, "JSON file with profiles");
  prob_cmd->add_option("--rule", prob_opt.rule, "unweighted | weighted | optimal");
  prob_cmd->add_option("--quota", prob_opt.quota, "Quota for unweighted/weighted rules");
  prob_cmd->add_option("--weights", prob_opt.weights_csv, "Comma-separated weights");
  prob_cmd->add_option("--validity", prob_opt.validity, "Condition on valid | invalid");
  prob_cmd->add_option("--method", prob_opt.method, "exact | mc");
  prob_cmd->add_option("--trials", prob_opt.trials, "Monte-Carlo trials");
  prob_cmd->add_option("--seed", prob_opt.seed, "Monte-Carlo seed");
  prob_cmd->add_flag("--condorcet-check", prob_opt.condorcet_check,
                     "Report the binomial-tail cross-check (identical profiles, odd n)");
  prob_flags.add_to(prob_cmd);

  DecideOptions decide_opt;
  WelfareFlags decide_flags;
  auto* decide_cmd = app.add_subcommand("decide", "Evaluate one weighted decision");
  decide_cmd->add_option("--profiles", decide_opt.profiles_csv,
                         "Comma-separated profiles (weights via log-odds)");
  decide_cmd->add_option("--weights", decide_opt.weights_csv, "Comma-separated weights");
  auto* decide_quota =
      decide_cmd->add_option("--quota", decide_opt.quota, "Quota (default: optimal)");
  decide_cmd->add_option("--votes", decide_opt.votes,
                         "Votes, e.g. \"++--+\" or \"1,-1,-1\"");
  decide_flags.add_to(decide_cmd);

  ToleranceOptions tol_opt;
  WelfareFlags tol_flags;
  auto* tol_cmd = app.add_subcommand(
      "tolerance", "Fault-tolerance constants and the sustain/degrade verdict");
  tol_cmd->add_option("--delta", tol_opt.delta, "Update step");
  auto* tol_q = tol_cmd->add_option("--q", tol_opt.q, "Fraction of correct votes");
  tol_cmd->add_option("--q1", tol_opt.q1, "Fraction of missed valid blocks");
  tol_flags.add_to(tol_cmd);

  SimulateOptions sim_opt;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario config");
  sim_cmd->add_option("config", sim_opt.config_path, "JSON scenario config")->required();
  sim_cmd->add_option("--out", sim_opt.out_dir, "Output directory");
  sim_cmd->add_option("--set", sim_opt.overrides,
                      "Override a config field, e.g. --set update.delta=0.002");
  sim_cmd->add_flag("--gnuplot-script", sim_opt.gnuplot, "Also write plot.gp");

  SweepOptions sweep_opt;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run several configs concurrently");
  sweep_cmd->add_option("configs", sweep_opt.configs, "JSON scenario configs")->required();
  sweep_cmd->add_option("--out", sweep_opt.out_dir, "Base output directory");
  sweep_cmd->add_option("--set", sweep_opt.overrides, "Override applied to every config");
  sweep_cmd->add_option("--jobs", sweep_opt.jobs, "Worker threads (default: hardware)");

  try {
    app.parse(argc, argv);
    if (weights_cmd->parsed()) {
      weights_in.load();
      cmd_weights(weights_in);
    } else if (quota_cmd->parsed()) {
      quota_in.load();
      cmd_quota(quota_in, quota_flags);
    } else if (prob_cmd->parsed()) {
      prob_in.load();
      cmd_prob(prob_in, prob_flags, prob_opt);
    } else if (decide_cmd->parsed()) {
      decide_opt.quota_given = decide_quota->count() > 0;
      cmd_decide(decide_opt, decide_flags);
    } else if (tol_cmd->parsed()) {
      tol_opt.q_given = tol_q->count() > 0;
      cmd_tolerance(tol_opt, tol_flags);
    } else if (sim_cmd->parsed()) {
      std::cout << run_simulation(sim_opt) << "\n";
    } else if (sweep_cmd->parsed()) {
      return cmd_sweep(sweep_opt);
    }
    return kExitOk;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
