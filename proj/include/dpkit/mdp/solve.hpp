#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dpkit/mdp/spec.hpp"

namespace dpkit::mdp {

struct PolicyDecision {
  int epoch = 0;  // 0 for stationary policies
  std::string state;
  std::string action;
};

struct SolveOutcome {
  double value = 0.0;                   // answer to the spec's query
  std::vector<PolicyDecision> policy;   // ordered by (epoch, state index)
  long iterations = 0;
  double residual = 0.0;                // final sup-norm change; 0 for exact methods
};

nlohmann::json to_json(const SolveOutcome& outcome);

inline constexpr long kMaxIterations = 1'000'000;
inline constexpr double kEnumerationBound = 1e6;

// Exact finite-horizon recursion from the terminal epoch backward.
// Ties broken by smallest index in the state's declared action order.
SolveOutcome backward_induction(const DPSpec& spec);

// Successive approximation from v = 0; stops when the sup-norm change drops
// below tol*(1-gamma)/(2*gamma), which bounds the value error by tol.
SolveOutcome value_iteration(const DPSpec& spec, double tol = 1e-9);

// Exact policy evaluation (direct linear solve) alternated with greedy
// improvement until the policy is stable.
SolveOutcome policy_iteration(const DPSpec& spec);

// Average-reward gain via relative value iteration against the first state.
// Applies the standard aperiodicity transformation internally so periodic
// unichain models (e.g. deterministic cycles) converge.
SolveOutcome relative_value_iteration(const DPSpec& spec, double tol = 1e-9);

// Brute-force oracle: enumerates every deterministic policy (epoch-indexed
// for finite horizon, stationary otherwise) and evaluates each exactly.
// Refuses instances whose policy count exceeds kEnumerationBound.
SolveOutcome enumerate_policies(const DPSpec& spec);

// Dispatch by horizon kind: backward induction / value iteration /
// relative value iteration.
SolveOutcome solve(const DPSpec& spec, double tol = 1e-9);

}  // namespace dpkit::mdp
