#include "dpkit/mdp/spec.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "dpkit/errors.hpp"
#include "dpkit/jsonl.hpp"

namespace dpkit::mdp {

namespace {

using nlohmann::json;

Objective objective_from_string(const std::string& s) {
  if (s == "maximize") return Objective::Maximize;
  if (s == "minimize") return Objective::Minimize;
  raise(ErrorKind::Parse, "objective must be maximize or minimize, got " + s);
}

Horizon horizon_from_json(const json& j) {
  Horizon h;
  std::string kind;
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else if (j.is_object()) {
    require(j.contains("kind"), ErrorKind::Parse, "horizon object needs a kind field");
    kind = j.at("kind").get<std::string>();
  } else {
    raise(ErrorKind::Parse, "horizon must be a string or an object");
  }
  if (kind == "finite") {
    h.kind = HorizonKind::Finite;
    require(j.is_object() && j.contains("T"), ErrorKind::Parse, "finite horizon needs T");
    require(j.at("T").is_number_integer(), ErrorKind::Parse, "horizon T must be an integer");
    h.T = j.at("T").get<int>();
  } else if (kind == "discounted") {
    h.kind = HorizonKind::Discounted;
    require(j.is_object() && j.contains("gamma"), ErrorKind::Parse,
            "discounted horizon needs gamma");
    h.gamma = j.at("gamma").get<double>();
  } else if (kind == "average") {
    h.kind = HorizonKind::Average;
  } else {
    raise(ErrorKind::Parse, "horizon kind must be finite, discounted, or average");
  }
  return h;
}

json horizon_to_json(const Horizon& h) {
  switch (h.kind) {
    case HorizonKind::Finite: return json{{"kind", "finite"}, {"T", h.T}};
    case HorizonKind::Discounted: return json{{"kind", "discounted"}, {"gamma", h.gamma}};
    case HorizonKind::Average: return json{{"kind", "average"}};
  }
  return json{};
}

std::map<std::string, std::vector<std::string>> action_map_from_json(const json& j) {
  require(j.is_object(), ErrorKind::Parse, "actions must map state -> action list");
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [state, list] : j.items()) {
    require(list.is_array(), ErrorKind::Parse, "action list for " + state + " must be an array");
    out[state] = list.get<std::vector<std::string>>();
  }
  return out;
}

TransitionRow transition_from_json(const json& j) {
  TransitionRow row;
  row.epoch = j.value("epoch", 0);
  row.state = j.at("state").get<std::string>();
  row.action = j.at("action").get<std::string>();
  require(j.contains("next") && j.at("next").is_array(), ErrorKind::Parse,
          "transition row needs a next array");
  for (const auto& entry : j.at("next")) {
    require(entry.is_array() && entry.size() == 2, ErrorKind::Parse,
            "transition entry must be [next_state, probability]");
    row.next.emplace_back(entry[0].get<std::string>(), entry[1].get<double>());
  }
  return row;
}

RewardEntry reward_from_json(const json& j) {
  RewardEntry e;
  e.epoch = j.value("epoch", 0);
  e.state = j.at("state").get<std::string>();
  e.action = j.at("action").get<std::string>();
  e.value = j.at("value").get<double>();
  return e;
}

}  // namespace

const char* to_string(HorizonKind kind) noexcept {
  switch (kind) {
    case HorizonKind::Finite: return "finite";
    case HorizonKind::Discounted: return "discounted";
    case HorizonKind::Average: return "average";
  }
  return "finite";
}

const char* to_string(Objective objective) noexcept {
  return objective == Objective::Maximize ? "maximize" : "minimize";
}

DPSpec spec_from_json(const json& j) {
  require(j.is_object(), ErrorKind::Parse, "spec document must be a JSON object");
  DPSpec spec;
  require(j.contains("horizon"), ErrorKind::Parse, "spec needs a horizon field");
  spec.horizon = horizon_from_json(j.at("horizon"));
  require(j.contains("objective"), ErrorKind::Parse, "spec needs an objective field");
  spec.objective = objective_from_string(j.at("objective").get<std::string>());
  require(j.contains("states") && j.at("states").is_array(), ErrorKind::Parse,
          "spec needs a states array");
  spec.states = j.at("states").get<std::vector<std::string>>();
  require(j.contains("actions"), ErrorKind::Parse, "spec needs an actions map");
  spec.actions = action_map_from_json(j.at("actions"));
  if (j.contains("epoch_actions")) {
    require(j.at("epoch_actions").is_object(), ErrorKind::Parse,
            "epoch_actions must map epoch -> actions map");
    for (const auto& [epoch_str, overrides] : j.at("epoch_actions").items()) {
      int epoch = 0;
      try {
        epoch = std::stoi(epoch_str);
      } catch (const std::exception&) {
        raise(ErrorKind::Parse, "epoch_actions key must be an integer epoch");
      }
      spec.epoch_actions[epoch] = action_map_from_json(overrides);
    }
  }
  require(j.contains("transitions") && j.at("transitions").is_array(), ErrorKind::Parse,
          "spec needs a transitions array");
  for (const auto& row : j.at("transitions")) spec.transitions.push_back(transition_from_json(row));
  if (j.contains("rewards")) {
    require(j.at("rewards").is_array(), ErrorKind::Parse, "rewards must be an array");
    for (const auto& e : j.at("rewards")) spec.rewards.push_back(reward_from_json(e));
  }
  if (j.contains("terminal_rewards")) {
    require(j.at("terminal_rewards").is_object(), ErrorKind::Parse,
            "terminal_rewards must map state -> value");
    for (const auto& [state, value] : j.at("terminal_rewards").items()) {
      spec.terminal_rewards[state] = value.get<double>();
    }
  }
  require(j.contains("initial"), ErrorKind::Parse, "spec needs an initial field");
  const auto& initial = j.at("initial");
  if (initial.is_string()) {
    spec.initial.emplace_back(initial.get<std::string>(), 1.0);
  } else if (initial.is_object()) {
    for (const auto& [state, prob] : initial.items()) {
      spec.initial.emplace_back(state, prob.get<double>());
    }
  } else {
    raise(ErrorKind::Parse, "initial must be a state id or a distribution object");
  }
  spec.query = j.value("query", "value_at_initial");
  return spec;
}

json spec_to_json(const DPSpec& spec) {
  json j;
  j["horizon"] = horizon_to_json(spec.horizon);
  j["objective"] = to_string(spec.objective);
  j["states"] = spec.states;
  json actions = json::object();
  for (const auto& [state, list] : spec.actions) actions[state] = list;
  j["actions"] = actions;
  if (!spec.epoch_actions.empty()) {
    json overrides = json::object();
    for (const auto& [epoch, map] : spec.epoch_actions) {
      json per_state = json::object();
      for (const auto& [state, list] : map) per_state[state] = list;
      overrides[std::to_string(epoch)] = per_state;
    }
    j["epoch_actions"] = overrides;
  }
  json transitions = json::array();
  for (const auto& row : spec.transitions) {
    json r{{"state", row.state}, {"action", row.action}};
    if (row.epoch != 0) r["epoch"] = row.epoch;
    json next = json::array();
    for (const auto& [state, prob] : row.next) next.push_back(json::array({state, prob}));
    r["next"] = next;
    transitions.push_back(r);
  }
  j["transitions"] = transitions;
  json rewards = json::array();
  for (const auto& e : spec.rewards) {
    json r{{"state", e.state}, {"action", e.action}, {"value", e.value}};
    if (e.epoch != 0) r["epoch"] = e.epoch;
    rewards.push_back(r);
  }
  j["rewards"] = rewards;
  if (!spec.terminal_rewards.empty()) {
    json terminal = json::object();
    for (const auto& [state, value] : spec.terminal_rewards) terminal[state] = value;
    j["terminal_rewards"] = terminal;
  }
  if (spec.initial.size() == 1 && spec.initial.front().second == 1.0) {
    j["initial"] = spec.initial.front().first;
  } else {
    json initial = json::object();
    for (const auto& [state, prob] : spec.initial) initial[state] = prob;
    j["initial"] = initial;
  }
  j["query"] = spec.query;
  return j;
}

DPSpec parse_spec(const std::string& text) {
  return spec_from_json(parse_json(text));
}

DPSpec validate_spec(DPSpec spec) {
  require(!spec.states.empty(), ErrorKind::InvalidSpec, "states list is empty");
  std::set<std::string> state_set(spec.states.begin(), spec.states.end());
  require(state_set.size() == spec.states.size(), ErrorKind::InvalidSpec,
          "duplicate state identifiers");

  const bool finite = spec.horizon.kind == HorizonKind::Finite;
  if (finite) {
    require(spec.horizon.T >= 1, ErrorKind::InvalidSpec,
            "finite horizon requires T >= 1, got T=" + std::to_string(spec.horizon.T));
  } else {
    require(spec.epoch_actions.empty(), ErrorKind::InvalidSpec,
            "epoch_actions only apply to finite horizons");
    require(spec.terminal_rewards.empty(), ErrorKind::InvalidSpec,
            "terminal_rewards only apply to finite horizons");
    for (const auto& row : spec.transitions) {
      require(row.epoch == 0, ErrorKind::InvalidSpec,
              "epoch-indexed transitions only apply to finite horizons");
    }
    for (const auto& e : spec.rewards) {
      require(e.epoch == 0, ErrorKind::InvalidSpec,
              "epoch-indexed rewards only apply to finite horizons");
    }
  }
  if (spec.horizon.kind == HorizonKind::Discounted) {
    require(spec.horizon.gamma > 0.0 && spec.horizon.gamma < 1.0, ErrorKind::InvalidSpec,
            "gamma out of (0,1): " + std::to_string(spec.horizon.gamma));
  }

  auto check_action_map = [&](const std::map<std::string, std::vector<std::string>>& map,
                              const std::string& where) {
    for (const auto& [state, list] : map) {
      require(state_set.count(state) == 1, ErrorKind::InvalidSpec,
              where + " references unknown state " + state);
      require(!list.empty(), ErrorKind::InvalidSpec,
              where + " gives state " + state + " an empty action list");
      std::set<std::string> uniq(list.begin(), list.end());
      require(uniq.size() == list.size(), ErrorKind::InvalidSpec,
              where + " gives state " + state + " duplicate actions");
    }
  };
  for (const auto& state : spec.states) {
    require(spec.actions.count(state) == 1, ErrorKind::InvalidSpec,
            "state " + state + " has no action list");
  }
  check_action_map(spec.actions, "actions");
  for (const auto& [epoch, map] : spec.epoch_actions) {
    require(epoch >= 1 && epoch <= spec.horizon.T - 1, ErrorKind::InvalidSpec,
            "epoch_actions epoch " + std::to_string(epoch) + " outside decision range");
    check_action_map(map, "epoch_actions[" + std::to_string(epoch) + "]");
  }

  // Admissible action lookup: epoch overrides fall back to the stationary map.
  auto actions_at = [&](int epoch, const std::string& state) -> const std::vector<std::string>& {
    if (epoch != 0) {
      auto it = spec.epoch_actions.find(epoch);
      if (it != spec.epoch_actions.end()) {
        auto jt = it->second.find(state);
        if (jt != it->second.end()) return jt->second;
      }
    }
    return spec.actions.at(state);
  };
  auto is_admissible = [&](int epoch, const std::string& state, const std::string& action) {
    const auto& list = actions_at(epoch, state);
    return std::find(list.begin(), list.end(), action) != list.end();
  };

  // Transition rows: keyed uniqueness, known states, valid probabilities.
  std::set<std::string> row_keys;
  for (auto& row : spec.transitions) {
    require(state_set.count(row.state) == 1, ErrorKind::InvalidSpec,
            "transition row references unknown state " + row.state);
    if (finite && row.epoch != 0) {
      require(row.epoch >= 1 && row.epoch <= spec.horizon.T - 1, ErrorKind::InvalidSpec,
              "transition row epoch " + std::to_string(row.epoch) + " outside decision range");
    }
    require(is_admissible(row.epoch, row.state, row.action), ErrorKind::InvalidSpec,
            "transition row for inadmissible action " + row.action + " in state " + row.state);
    const std::string key =
        std::to_string(row.epoch) + "|" + row.state + "|" + row.action;
    require(row_keys.insert(key).second, ErrorKind::InvalidSpec,
            "duplicate transition row for (" + row.state + ", " + row.action + ")");
    require(!row.next.empty(), ErrorKind::InvalidSpec,
            "empty transition row for (" + row.state + ", " + row.action + ")");
    double sum = 0.0;
    std::set<std::string> seen_next;
    for (const auto& [next_state, prob] : row.next) {
      require(state_set.count(next_state) == 1, ErrorKind::InvalidSpec,
              "transition row references unknown next state " + next_state);
      require(seen_next.insert(next_state).second, ErrorKind::InvalidSpec,
              "transition row lists next state " + next_state + " twice");
      require(std::isfinite(prob) && prob >= 0.0, ErrorKind::InvalidSpec,
              "negative or non-finite probability in row (" + row.state + ", " + row.action + ")");
      sum += prob;
    }
    require(std::fabs(sum - 1.0) <= kProbabilityTolerance, ErrorKind::InvalidSpec,
            "row sums to " + std::to_string(sum) + " for (" + row.state + ", " + row.action + ")");
    if (sum != 1.0) {
      for (auto& [next_state, prob] : row.next) prob /= sum;
    }
  }

  // Coverage: every admissible (epoch, state, action) resolves to exactly one row.
  auto has_row = [&](int epoch, const std::string& state, const std::string& action) {
    if (epoch != 0 &&
        row_keys.count(std::to_string(epoch) + "|" + state + "|" + action) == 1) {
      return true;
    }
    return row_keys.count("0|" + state + "|" + action) == 1;
  };
  if (finite) {
    for (int t = 1; t <= spec.horizon.T - 1; ++t) {
      for (const auto& state : spec.states) {
        for (const auto& action : actions_at(t, state)) {
          require(has_row(t, state, action), ErrorKind::InvalidSpec,
                  "missing transition row for epoch " + std::to_string(t) + ", (" + state +
                      ", " + action + ")");
        }
      }
    }
  } else {
    for (const auto& state : spec.states) {
      for (const auto& action : spec.actions.at(state)) {
        require(has_row(0, state, action), ErrorKind::InvalidSpec,
                "missing transition row for (" + state + ", " + action + ")");
      }
    }
  }

  // Rewards: admissible keys, no duplicates, finite values. Missing entries
  // default to zero at compile time.
  std::set<std::string> reward_keys;
  for (const auto& e : spec.rewards) {
    require(state_set.count(e.state) == 1, ErrorKind::InvalidSpec,
            "reward entry references unknown state " + e.state);
    if (finite && e.epoch != 0) {
      require(e.epoch >= 1 && e.epoch <= spec.horizon.T - 1, ErrorKind::InvalidSpec,
              "reward entry epoch " + std::to_string(e.epoch) + " outside decision range");
    }
    require(is_admissible(e.epoch, e.state, e.action), ErrorKind::InvalidSpec,
            "reward entry for inadmissible action " + e.action + " in state " + e.state);
    require(std::isfinite(e.value), ErrorKind::InvalidSpec,
            "non-finite reward for (" + e.state + ", " + e.action + ")");
    const std::string key = std::to_string(e.epoch) + "|" + e.state + "|" + e.action;
    require(reward_keys.insert(key).second, ErrorKind::InvalidSpec,
            "duplicate reward entry for (" + e.state + ", " + e.action + ")");
  }
  for (const auto& [state, value] : spec.terminal_rewards) {
    require(state_set.count(state) == 1, ErrorKind::InvalidSpec,
            "terminal reward references unknown state " + state);
    require(std::isfinite(value), ErrorKind::InvalidSpec,
            "non-finite terminal reward for state " + state);
  }

  // Initial distribution.
  require(!spec.initial.empty(), ErrorKind::InvalidSpec, "initial distribution is empty");
  double initial_sum = 0.0;
  std::set<std::string> initial_seen;
  for (const auto& [state, prob] : spec.initial) {
    require(state_set.count(state) == 1, ErrorKind::InvalidSpec,
            "initial distribution references unknown state " + state);
    require(initial_seen.insert(state).second, ErrorKind::InvalidSpec,
            "initial distribution lists state " + state + " twice");
    require(std::isfinite(prob) && prob >= 0.0, ErrorKind::InvalidSpec,
            "negative or non-finite initial probability for state " + state);
    initial_sum += prob;
  }
  require(std::fabs(initial_sum - 1.0) <= kProbabilityTolerance, ErrorKind::InvalidSpec,
          "initial distribution sums to " + std::to_string(initial_sum));
  if (initial_sum != 1.0) {
    for (auto& [state, prob] : spec.initial) prob /= initial_sum;
  }

  require(spec.query == "value_at_initial", ErrorKind::InvalidSpec,
          "unsupported query: " + spec.query);
  return spec;
}

CompiledSpec compile(const DPSpec& raw) {
  const DPSpec spec = validate_spec(raw);
  CompiledSpec out;
  out.horizon = spec.horizon;
  out.objective = spec.objective;
  out.states = spec.states;

  std::unordered_map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(spec.states.size()); ++i) index[spec.states[i]] = i;

  std::unordered_map<std::string, const TransitionRow*> rows;
  for (const auto& row : spec.transitions) {
    rows[std::to_string(row.epoch) + "|" + row.state + "|" + row.action] = &row;
  }
  std::unordered_map<std::string, double> rewards;
  for (const auto& e : spec.rewards) {
    rewards[std::to_string(e.epoch) + "|" + e.state + "|" + e.action] = e.value;
  }

  auto build_action = [&](int epoch, const std::string& state, const std::string& action,
                          int action_index) {
    CompiledAction a;
    a.index = action_index;
    a.id = action;
    const std::string epoch_key = std::to_string(epoch) + "|" + state + "|" + action;
    const std::string stationary_key = "0|" + state + "|" + action;
    auto rit = rewards.find(epoch_key);
    if (rit == rewards.end()) rit = rewards.find(stationary_key);
    a.reward = rit == rewards.end() ? 0.0 : rit->second;
    auto tit = rows.find(epoch_key);
    if (tit == rows.end()) tit = rows.find(stationary_key);
    for (const auto& [next_state, prob] : tit->second->next) {
      a.next.emplace_back(index.at(next_state), prob);
    }
    return a;
  };

  const int n = static_cast<int>(spec.states.size());
  out.stationary.resize(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    const auto& list = spec.actions.at(spec.states[static_cast<std::size_t>(s)]);
    for (int k = 0; k < static_cast<int>(list.size()); ++k) {
      out.stationary[static_cast<std::size_t>(s)].push_back(
          build_action(0, spec.states[static_cast<std::size_t>(s)],
                       list[static_cast<std::size_t>(k)], k));
    }
  }

  if (spec.horizon.kind == HorizonKind::Finite) {
    out.per_epoch.resize(static_cast<std::size_t>(std::max(0, spec.horizon.T - 1)));
    for (int t = 1; t <= spec.horizon.T - 1; ++t) {
      auto& per_state = out.per_epoch[static_cast<std::size_t>(t - 1)];
      per_state.resize(static_cast<std::size_t>(n));
      for (int s = 0; s < n; ++s) {
        const std::string& state = spec.states[static_cast<std::size_t>(s)];
        const std::vector<std::string>* list = &spec.actions.at(state);
        auto it = spec.epoch_actions.find(t);
        if (it != spec.epoch_actions.end()) {
          auto jt = it->second.find(state);
          if (jt != it->second.end()) list = &jt->second;
        }
        for (int k = 0; k < static_cast<int>(list->size()); ++k) {
          per_state[static_cast<std::size_t>(s)].push_back(
              build_action(t, state, (*list)[static_cast<std::size_t>(k)], k));
        }
      }
    }
    out.terminal.assign(static_cast<std::size_t>(n), 0.0);
    for (const auto& [state, value] : spec.terminal_rewards) {
      out.terminal[static_cast<std::size_t>(index.at(state))] = value;
    }
  }

  for (const auto& [state, prob] : spec.initial) {
    out.initial.emplace_back(index.at(state), prob);
  }
  return out;
}

bool is_degenerate_model(const DPSpec& spec) {
  const CompiledSpec c = compile(spec);
  auto state_is_inert = [](const std::vector<CompiledAction>& actions) {
    for (std::size_t k = 1; k < actions.size(); ++k) {
      if (actions[k].reward != actions[0].reward) return false;
      if (actions[k].next != actions[0].next) return false;
    }
    return true;
  };
  if (c.horizon.kind == HorizonKind::Finite) {
    for (const auto& per_state : c.per_epoch) {
      for (const auto& actions : per_state) {
        if (!state_is_inert(actions)) return false;
      }
    }
    return true;
  }
  for (const auto& actions : c.stationary) {
    if (!state_is_inert(actions)) return false;
  }
  return true;
}

}  // namespace dpkit::mdp
