/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "wvote/config.hpp"

#include <ctime>
#include <fstream>

namespace wvote {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("config: unknown key \"" + where + key + "\"");
  }
}

double get_number(const json& obj, const std::string& where, const char* key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("config: " + where + key + " must be a number");
  return v.get<double>();
}

std::uint64_t get_count(const json& obj, const std::string& where, const char* key,
                        std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError("config: " + where + key + " must be a non-negative integer");
  }
  return static_cast<std::uint64_t>(v.get<std::int64_t>());
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError("config: " + where + key + " must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError("config: " + where + key + " must be a string");
  return v.get<std::string>();
}

ScheduleKind parse_schedule(const std::string& s, const std::string& where) {
  if (s == "periodic") return ScheduleKind::periodic;
  if (s == "seeded_random") return ScheduleKind::seeded_random;
  throw ConfigError("config: " + where + " must be \"periodic\" or \"seeded_random\"");
}

WelfareParams parse_welfare(const json& obj) {
  require_keys(obj, "welfare.", {"alpha", "loss_reject_valid", "loss_accept_invalid"});
  WelfareParams w;
  w.alpha = get_number(obj, "welfare.", "alpha", w.alpha);
  w.loss_reject_valid = get_number(obj, "welfare.", "loss_reject_valid", w.loss_reject_valid);
  w.loss_accept_invalid =
      get_number(obj, "welfare.", "loss_accept_invalid", w.loss_accept_invalid);
  return w;
}

UpdateParams parse_update(const json& obj, const WelfareParams& welfare) {
  require_keys(obj, "update.", {"delta", "grace_period", "cap_margin", "suspension_enabled"});
  UpdateParams u;
  u.loss_reject_valid = welfare.loss_reject_valid;
  u.loss_accept_invalid = welfare.loss_accept_invalid;
  u.delta = get_number(obj, "update.", "delta", u.delta);
  u.grace_period = get_count(obj, "update.", "grace_period", u.grace_period);
  u.cap_margin = get_number(obj, "update.", "cap_margin", u.cap_margin);
  u.suspension_enabled = get_bool(obj, "update.", "suspension_enabled", u.suspension_enabled);
  return u;
}

json welfare_echo(const WelfareParams& w) {
  return json{{"alpha", w.alpha},
              {"loss_reject_valid", w.loss_reject_valid},
              {"loss_accept_invalid", w.loss_accept_invalid}};
}

json update_echo(const UpdateParams& u) {
  return json{{"delta", u.delta},
              {"grace_period", u.grace_period},
              {"cap_margin", u.cap_margin},
              {"suspension_enabled", u.suspension_enabled}};
}

const char* schedule_name(ScheduleKind k) {
  return k == ScheduleKind::periodic ? "periodic" : "seeded_random";
}

}  // namespace

nlohmann::json default_config_json() {
  return parse_run_config(json::object()).resolved;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return parse_run_config(doc);
}

RunConfig parse_run_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  const std::string kind = get_string(doc, "", "kind", "consensus");
  if (kind != "consensus" && kind != "trajectory") {
    throw ConfigError("config: kind must be \"consensus\" or \"trajectory\"");
  }

  RunConfig run;
  const json behavior = doc.contains("behavior") ? doc.at("behavior") : json::object();
  if (!behavior.is_object()) throw ConfigError("config: behavior must be an object");
  const json welfare_obj = doc.contains("welfare") ? doc.at("welfare") : json::object();
  if (!welfare_obj.is_object()) throw ConfigError("config: welfare must be an object");
  const json update_obj = doc.contains("update") ? doc.at("update") : json::object();
  if (!update_obj.is_object()) throw ConfigError("config: update must be an object");

  const WelfareParams welfare = parse_welfare(welfare_obj);
  const UpdateParams update = parse_update(update_obj, welfare);

  if (kind == "trajectory") {
    require_keys(doc, "", {"kind", "initial_profile", "behavior", "welfare", "update",
                           "horizon", "seed"});
    require_keys(behavior, "behavior.", {"correct", "abstain", "schedule"});
    run.kind = RunKind::trajectory;
    TrajectoryConfig& t = run.trajectory;
    t.initial_profile = get_number(doc, "", "initial_profile", t.initial_profile);
    t.mix.correct = get_number(behavior, "behavior.", "correct", t.mix.correct);
    t.mix.abstain = get_number(behavior, "behavior.", "abstain", t.mix.abstain);
    t.schedule = parse_schedule(
        get_string(behavior, "behavior.", "schedule", "periodic"), "behavior.schedule");
    t.update = update;
    t.horizon = get_count(doc, "", "horizon", t.horizon);
    t.seed = get_count(doc, "", "seed", t.seed);
    try {
      t.update.validate();
      t.mix.validate();
      const double cap = 1.0 - t.update.cap_margin;
      if (!(t.initial_profile >= kProfileFloor) || !(t.initial_profile <= cap)) {
        throw std::invalid_argument("initial_profile must lie in [0.5, 1 - cap_margin]");
      }
      if (t.horizon == 0) throw std::invalid_argument("horizon must be >= 1");
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }

    run.resolved = json{{"kind", "trajectory"},
                        {"initial_profile", t.initial_profile},
                        {"behavior",
                         json{{"correct", t.mix.correct},
                              {"abstain", t.mix.abstain},
                              {"schedule", schedule_name(t.schedule)}}},
                        {"welfare", welfare_echo(welfare)},
                        {"update", update_echo(t.update)},
                        {"horizon", t.horizon},
                        {"seed", t.seed}};
    return run;
  }

  require_keys(doc, "",
               {"kind", "population", "committee_size", "committee_mode", "initial_profile",
                "initial_stake", "adversary_fraction", "behavior", "welfare", "update",
                "quota", "validity_policy", "horizon", "seed"});
  require_keys(behavior, "behavior.", {"kind", "correct", "abstain", "schedule"});

  run.kind = RunKind::consensus;
  ScenarioConfig& s = run.scenario;
  s.welfare = welfare;
  s.update = update;
  s.population =
      static_cast<std::uint32_t>(get_count(doc, "", "population", s.population));
  s.committee_size =
      static_cast<std::uint32_t>(get_count(doc, "", "committee_size", s.committee_size));
  s.initial_profile = get_number(doc, "", "initial_profile", s.initial_profile);
  s.initial_stake = get_number(doc, "", "initial_stake", s.initial_stake);
  s.adversary_fraction = get_number(doc, "", "adversary_fraction", s.adversary_fraction);
  s.horizon = get_count(doc, "", "horizon", s.horizon);
  s.seed = get_count(doc, "", "seed", s.seed);

  const std::string mode = get_string(doc, "", "committee_mode", "whole_population");
  if (mode == "whole_population") {
    s.committee_mode = CommitteeMode::whole_population;
  } else if (mode == "stake_sampled") {
    s.committee_mode = CommitteeMode::stake_sampled;
  } else {
    throw ConfigError("config: committee_mode must be \"whole_population\" or \"stake_sampled\"");
  }

  const std::string validity = get_string(doc, "", "validity_policy", "all_valid");
  if (validity == "all_valid") {
    s.validity_policy = ValidityPolicy::all_valid;
  } else if (validity == "prior") {
    s.validity_policy = ValidityPolicy::prior;
  } else {
    throw ConfigError("config: validity_policy must be \"all_valid\" or \"prior\"");
  }

  const std::string bkind = get_string(behavior, "behavior.", "kind", "honest");
  if (bkind == "honest") {
    s.voting_behavior = BehaviorPolicy::honest();
  } else if (bkind == "mixed") {
    BehaviorMix mix;
    mix.correct = get_number(behavior, "behavior.", "correct", mix.correct);
    mix.abstain = get_number(behavior, "behavior.", "abstain", mix.abstain);
    s.voting_behavior = BehaviorPolicy::mixed(
        mix, parse_schedule(get_string(behavior, "behavior.", "schedule", "seeded_random"),
                            "behavior.schedule"));
  } else {
    throw ConfigError("config: behavior.kind must be \"honest\" or \"mixed\"");
  }

  const json quota = doc.contains("quota") ? doc.at("quota") : json::object();
  if (!quota.is_object()) throw ConfigError("config: quota must be an object");
  require_keys(quota, "quota.", {"policy", "value"});
  const std::string qpolicy = get_string(quota, "quota.", "policy", "fixed");
  if (qpolicy == "fixed") {
    s.quota_policy = QuotaPolicy::fixed;
    s.fixed_quota = get_number(quota, "quota.", "value", s.fixed_quota);
  } else if (qpolicy == "theorem1_optimal") {
    s.quota_policy = QuotaPolicy::theorem1_optimal;
    if (quota.contains("value")) {
      throw ConfigError("config: quota.value is only valid with the fixed policy");
    }
  } else {
    throw ConfigError("config: quota.policy must be \"fixed\" or \"theorem1_optimal\"");
  }

  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  json behavior_echo{{"kind", bkind}};
  if (bkind == "mixed") {
    behavior_echo["correct"] = s.voting_behavior.mix.correct;
    behavior_echo["abstain"] = s.voting_behavior.mix.abstain;
    behavior_echo["schedule"] = schedule_name(s.voting_behavior.schedule);
  }
  json quota_echo{{"policy", qpolicy}};
  if (s.quota_policy == QuotaPolicy::fixed) quota_echo["value"] = s.fixed_quota;

  run.resolved = json{{"kind", "consensus"},
                      {"population", s.population},
                      {"committee_size", s.committee_size},
                      {"committee_mode", mode},
                      {"initial_profile", s.initial_profile},
                      {"initial_stake", s.initial_stake},
                      {"adversary_fraction", s.adversary_fraction},
                      {"behavior", behavior_echo},
                      {"welfare", welfare_echo(s.welfare)},
                      {"update", update_echo(s.update)},
                      {"quota", quota_echo},
                      {"validity_policy", validity},
                      {"horizon", s.horizon},
                      {"seed", s.seed}};
  return run;
}

void apply_overrides(nlohmann::json& doc, std::span<const std::string> overrides) {
  for (const std::string& entry : overrides) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override must look like path.to.key=value: " + entry);
    }
    const std::string path = entry.substr(0, eq);
    const std::string raw = entry.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;  // bare strings are fine
    }
    json* node = &doc;
    std::size_t begin = 0;
    while (true) {
      const auto dot = path.find('.', begin);
      const std::string key = path.substr(begin, dot - begin);
      if (key.empty()) throw ConfigError("override has an empty path segment: " + entry);
      if (dot == std::string::npos) {
        (*node)[key] = value;
        break;
      }
      node = &(*node)[key];
      if (!node->is_object() && !node->is_null()) {
        throw ConfigError("override path crosses a non-object: " + entry);
      }
      begin = dot + 1;
    }
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json manifest_json(const RunManifest& manifest) {
  return json{{"tool", manifest.tool},       {"version", manifest.version},
              {"seed", manifest.seed},       {"config", manifest.config},
              {"started_utc", manifest.started_utc},
              {"finished_utc", manifest.finished_utc},
              {"outputs", manifest.outputs}};
}

}  // namespace wvote
