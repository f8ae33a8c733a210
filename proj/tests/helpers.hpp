#pragma once

#include <random>
#include <string>
#include <vector>

#include "dpkit/jsonl.hpp"
#include "dpkit/mdp/spec.hpp"

namespace dpkit::testing {

inline std::filesystem::path data_dir() { return DPKIT_DATA_DIR; }
inline std::filesystem::path fixture_dir() { return DPKIT_FIXTURE_DIR; }

inline mdp::DPSpec load_spec(const std::string& name) {
  return mdp::parse_spec(read_file(data_dir() / "specs" / name));
}

inline mdp::DPSpec warehouse_spec() { return load_spec("warehouse.json"); }
inline mdp::DPSpec warehouse_capped_spec() { return load_spec("warehouse_capped.json"); }

// The two-epoch stay/flip example: terminal rewards r_2(s0)=0, r_2(s1)=1;
// at epoch 1 in s0 "stay" costs 0 and keeps s0, "flip" costs 0.3 and moves
// to s1. Exhaustive enumeration of the two policies that differ at s0:
// stay: 0 + 0 = 0; flip: -0.3 + 1 = 0.7. Optimum (maximize) = 0.7.
inline mdp::DPSpec flip_stay_spec() {
  return mdp::parse_spec(R"({
    "horizon": {"kind": "finite", "T": 2},
    "objective": "maximize",
    "states": ["s0", "s1"],
    "actions": {"s0": ["stay", "flip"], "s1": ["stay"]},
    "transitions": [
      {"state": "s0", "action": "stay", "next": [["s0", 1.0]]},
      {"state": "s0", "action": "flip", "next": [["s1", 1.0]]},
      {"state": "s1", "action": "stay", "next": [["s1", 1.0]]}
    ],
    "rewards": [
      {"state": "s0", "action": "stay", "value": 0.0},
      {"state": "s0", "action": "flip", "value": -0.3},
      {"state": "s1", "action": "stay", "value": 0.0}
    ],
    "terminal_rewards": {"s0": 0.0, "s1": 1.0},
    "initial": "s0"
  })");
}

// Single state, single action, reward 1, gamma 0.5: value 1/(1-0.5) = 2.
inline mdp::DPSpec single_state_spec() {
  return mdp::parse_spec(R"({
    "horizon": {"kind": "discounted", "gamma": 0.5},
    "objective": "maximize",
    "states": ["only"],
    "actions": {"only": ["go"]},
    "transitions": [{"state": "only", "action": "go", "next": [["only", 1.0]]}],
    "rewards": [{"state": "only", "action": "go", "value": 1.0}],
    "initial": "only"
  })");
}

// Deterministic two-state cycle with rewards 0 and 2: long-run gain 1.
inline mdp::DPSpec two_cycle_spec() {
  return mdp::parse_spec(R"({
    "horizon": {"kind": "average"},
    "objective": "maximize",
    "states": ["a", "b"],
    "actions": {"a": ["move"], "b": ["move"]},
    "transitions": [
      {"state": "a", "action": "move", "next": [["b", 1.0]]},
      {"state": "b", "action": "move", "next": [["a", 1.0]]}
    ],
    "rewards": [
      {"state": "a", "action": "move", "value": 0.0},
      {"state": "b", "action": "move", "value": 2.0}
    ],
    "initial": "a"
  })");
}

struct RandomSpecOptions {
  int max_states = 4;
  int max_actions = 3;
  int max_horizon = 4;  // finite only
  mdp::HorizonKind kind = mdp::HorizonKind::Finite;
  double gamma_max = 0.9;    // discounted only
  bool ensure_unichain = false;  // mix every row toward state 0
};

// Random small spec generator used by the oracle-equivalence suites.
inline mdp::DPSpec random_spec(std::mt19937_64& rng, const RandomSpecOptions& opt) {
  mdp::DPSpec spec;
  std::uniform_int_distribution<int> state_count(2, opt.max_states);
  std::uniform_int_distribution<int> action_count(1, opt.max_actions);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> reward(-5.0, 5.0);

  const int n = state_count(rng);
  for (int s = 0; s < n; ++s) spec.states.push_back("s" + std::to_string(s));
  spec.objective = unit(rng) < 0.5 ? mdp::Objective::Maximize : mdp::Objective::Minimize;

  spec.horizon.kind = opt.kind;
  if (opt.kind == mdp::HorizonKind::Finite) {
    std::uniform_int_distribution<int> horizon(2, opt.max_horizon);
    spec.horizon.T = horizon(rng);
  } else if (opt.kind == mdp::HorizonKind::Discounted) {
    spec.horizon.gamma = 0.1 + (opt.gamma_max - 0.1) * unit(rng);
  }

  for (int s = 0; s < n; ++s) {
    const int na = action_count(rng);
    std::vector<std::string> actions;
    for (int a = 0; a < na; ++a) actions.push_back("a" + std::to_string(a));
    spec.actions[spec.states[static_cast<std::size_t>(s)]] = actions;
    for (int a = 0; a < na; ++a) {
      mdp::TransitionRow row;
      row.state = spec.states[static_cast<std::size_t>(s)];
      row.action = actions[static_cast<std::size_t>(a)];
      std::vector<double> weights(static_cast<std::size_t>(n));
      double total = 0.0;
      for (int j = 0; j < n; ++j) {
        weights[static_cast<std::size_t>(j)] = unit(rng) < 0.5 ? 0.0 : unit(rng);
        total += weights[static_cast<std::size_t>(j)];
      }
      if (opt.ensure_unichain) {
        weights[0] += 0.25 * (total > 0.0 ? total : 1.0) + 0.1;
      } else if (total == 0.0) {
        weights[static_cast<std::size_t>(s)] = 1.0;
      }
      total = 0.0;
      for (double w : weights) total += w;
      for (int j = 0; j < n; ++j) {
        const double p = weights[static_cast<std::size_t>(j)] / total;
        if (p > 0.0) row.next.emplace_back(spec.states[static_cast<std::size_t>(j)], p);
      }
      spec.transitions.push_back(row);
      spec.rewards.push_back({0, row.state, row.action, reward(rng)});
    }
  }

  if (opt.kind == mdp::HorizonKind::Finite) {
    for (int s = 0; s < n; ++s) {
      spec.terminal_rewards[spec.states[static_cast<std::size_t>(s)]] = reward(rng);
    }
  }
  spec.initial.emplace_back(spec.states[0], 1.0);
  return spec;
}

}  // namespace dpkit::testing
