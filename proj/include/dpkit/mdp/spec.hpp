#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace dpkit::mdp {

enum class HorizonKind { Finite, Discounted, Average };
enum class Objective { Maximize, Minimize };

const char* to_string(HorizonKind kind) noexcept;
const char* to_string(Objective objective) noexcept;

struct Horizon {
  HorizonKind kind = HorizonKind::Finite;
  int T = 0;           // finite: decisions at epochs 1..T-1, terminal values at T
  double gamma = 0.0;  // discounted: strictly inside (0,1)
};

// One transition row: the distribution over next states for taking
// `action` in `state` (at `epoch`, when epoch-indexed; 0 means stationary).
struct TransitionRow {
  int epoch = 0;
  std::string state;
  std::string action;
  std::vector<std::pair<std::string, double>> next;
};

struct RewardEntry {
  int epoch = 0;
  std::string state;
  std::string action;
  double value = 0.0;
};

// The executable DP model document. Field names match the on-disk JSON
// format one-to-one; see README for the schema.
struct DPSpec {
  Horizon horizon;
  Objective objective = Objective::Maximize;
  std::vector<std::string> states;
  std::map<std::string, std::vector<std::string>> actions;
  // Finite horizon only: per-epoch action-set overrides, keyed by epoch.
  std::map<int, std::map<std::string, std::vector<std::string>>> epoch_actions;
  std::vector<TransitionRow> transitions;
  std::vector<RewardEntry> rewards;
  std::map<std::string, double> terminal_rewards;  // finite only, default 0
  std::vector<std::pair<std::string, double>> initial;  // distribution; single state = mass 1
  std::string query = "value_at_initial";
};

DPSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const DPSpec& spec);
DPSpec parse_spec(const std::string& text);  // ErrorKind::Parse on malformed input

// Checks every DPSpec invariant and normalizes probability rows (and the
// initial distribution) that sum to one within 1e-9 to exact unit mass.
// Throws Error(InvalidSpec, detail) naming the first violated invariant.
DPSpec validate_spec(DPSpec spec);

inline constexpr double kProbabilityTolerance = 1e-9;

// Indexed form used by the solvers. Built from a validated spec;
// compile() revalidates, so solver entry points accept raw specs.
struct CompiledAction {
  int index = 0;  // position in the state's declared action list
  std::string id;
  double reward = 0.0;
  std::vector<std::pair<int, double>> next;  // (state index, probability)
};

struct CompiledSpec {
  Horizon horizon;
  Objective objective = Objective::Maximize;
  std::vector<std::string> states;
  // Stationary action sets (discounted/average; also the finite-horizon default).
  std::vector<std::vector<CompiledAction>> stationary;
  // Finite horizon: actions per decision epoch t=1..T-1 (index t-1) per state.
  std::vector<std::vector<std::vector<CompiledAction>>> per_epoch;
  std::vector<double> terminal;               // finite only
  std::vector<std::pair<int, double>> initial;  // (state index, probability)

  bool maximize() const noexcept { return objective == Objective::Maximize; }
  int num_states() const noexcept { return static_cast<int>(states.size()); }
  const std::vector<std::vector<CompiledAction>>& epoch_actions(int t) const {
    return horizon.kind == HorizonKind::Finite ? per_epoch[static_cast<std::size_t>(t - 1)]
                                               : stationary;
  }
};

CompiledSpec compile(const DPSpec& spec);

// True when no decision anywhere can change anything: in every state all
// admissible actions share one transition row and one reward. Used by the
// backward-generation code-level filter; plain solving never rejects on this.
bool is_degenerate_model(const DPSpec& spec);

}  // namespace dpkit::mdp
