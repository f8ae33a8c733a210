#include <doctest.h>

#include <cmath>
#include <random>

#include "dpkit/errors.hpp"
#include "dpkit/mdp/solve.hpp"
#include "helpers.hpp"

using namespace dpkit;
using namespace dpkit::mdp;
using dpkit::testing::RandomSpecOptions;

namespace {

// Frozen from the first enumerate_policies run on the shipped fixtures.
// The optimal policy orders up to level 4 in states 0 and 1 and orders
// nothing at 2 and 3; the capped-at-3 misreading costs strictly more.
constexpr double kWarehouseValue = 28.051020408163275;
constexpr double kWarehouseCappedValue = 29.071428571428584;

double simulate_average(const DPSpec& spec, const SolveOutcome& outcome, long steps,
                        std::uint64_t seed) {
  const CompiledSpec c = compile(spec);
  std::map<std::string, std::string> decision;
  for (const auto& d : outcome.policy) decision[d.state] = d.action;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int s = c.initial.front().first;
  double total = 0.0;
  for (long step = 0; step < steps; ++step) {
    const auto& actions = c.stationary[static_cast<std::size_t>(s)];
    const std::string& chosen = decision.at(c.states[static_cast<std::size_t>(s)]);
    const CompiledAction* act = nullptr;
    for (const auto& a : actions) {
      if (a.id == chosen) act = &a;
    }
    REQUIRE(act != nullptr);
    total += act->reward;
    double u = unit(rng);
    int next = act->next.back().first;
    for (const auto& [j, p] : act->next) {
      if (u < p) {
        next = j;
        break;
      }
      u -= p;
    }
    s = next;
  }
  return total / static_cast<double>(steps);
}

}  // namespace

TEST_CASE("backward induction: flip/stay two-epoch example") {
  const SolveOutcome bi = backward_induction(testing::flip_stay_spec());
  CHECK(bi.value == doctest::Approx(0.7).epsilon(1e-12));
  bool found = false;
  for (const auto& d : bi.policy) {
    if (d.epoch == 1 && d.state == "s0") {
      CHECK(d.action == "flip");
      found = true;
    }
  }
  CHECK(found);

  const SolveOutcome oracle = enumerate_policies(testing::flip_stay_spec());
  CHECK(oracle.value == bi.value);
  CHECK(oracle.iterations == 2);  // exactly the two policies differing at s0
}

TEST_CASE("backward induction: T=1 reduces to the boundary condition") {
  DPSpec spec = testing::flip_stay_spec();
  spec.horizon.T = 1;
  spec.initial = {{"s1", 1.0}};
  const SolveOutcome out = backward_induction(spec);
  CHECK(out.value == 1.0);
  CHECK(out.policy.empty());
}

TEST_CASE("backward induction equals the enumeration oracle exactly") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 60; ++i) {
    const DPSpec spec = testing::random_spec(rng, RandomSpecOptions{});
    const SolveOutcome bi = backward_induction(spec);
    const SolveOutcome oracle = enumerate_policies(spec);
    CHECK(std::fabs(bi.value - oracle.value) <= 1e-12);
  }
}

TEST_CASE("backward induction rejects infinite-horizon specs") {
  try {
    backward_induction(testing::single_state_spec());
    FAIL("expected HorizonMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::HorizonMismatch);
  }
}

TEST_CASE("value iteration: geometric series single state") {
  const SolveOutcome out = value_iteration(testing::single_state_spec());
  CHECK(out.value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(out.residual >= 0.0);
}

TEST_CASE("policy iteration: single state converges in one round") {
  const SolveOutcome out = policy_iteration(testing::single_state_spec());
  CHECK(out.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(out.iterations == 1);
}

TEST_CASE("warehouse regression values are frozen") {
  const SolveOutcome oracle = enumerate_policies(testing::warehouse_spec());
  CHECK(oracle.value == doctest::Approx(kWarehouseValue).epsilon(1e-12));
  const SolveOutcome capped = enumerate_policies(testing::warehouse_capped_spec());
  CHECK(capped.value == doctest::Approx(kWarehouseCappedValue).epsilon(1e-12));
}

TEST_CASE("warehouse: value iteration matches the enumeration oracle") {
  const SolveOutcome vi = value_iteration(testing::warehouse_spec());
  const SolveOutcome oracle = enumerate_policies(testing::warehouse_spec());
  CHECK(std::fabs(vi.value - oracle.value) < 1e-6);
}

TEST_CASE("warehouse: policy iteration agrees with value iteration") {
  const SolveOutcome pi = policy_iteration(testing::warehouse_spec());
  const SolveOutcome vi = value_iteration(testing::warehouse_spec());
  CHECK(std::fabs(pi.value - vi.value) <= 1e-9);
  CHECK(pi.policy.size() == vi.policy.size());
  for (std::size_t i = 0; i < pi.policy.size(); ++i) {
    CHECK(pi.policy[i].state == vi.policy[i].state);
    CHECK(pi.policy[i].action == vi.policy[i].action);
  }
}

TEST_CASE("order-up-to-4 model never costs more than the capped-at-3 model") {
  const SolveOutcome full = enumerate_policies(testing::warehouse_spec());
  const SolveOutcome capped = enumerate_policies(testing::warehouse_capped_spec());
  CHECK(full.value <= capped.value);
}

TEST_CASE("discounted solvers agree pairwise on random specs") {
  std::mt19937_64 rng(99);
  RandomSpecOptions opt;
  opt.kind = HorizonKind::Discounted;
  opt.max_states = 5;
  for (int i = 0; i < 40; ++i) {
    const DPSpec spec = testing::random_spec(rng, opt);
    const double vi = value_iteration(spec).value;
    const double pi = policy_iteration(spec).value;
    const double oracle = enumerate_policies(spec).value;
    CHECK(std::fabs(vi - pi) < 1e-6);
    CHECK(std::fabs(vi - oracle) < 1e-6);
    CHECK(std::fabs(pi - oracle) < 1e-6);
  }
}

TEST_CASE("relative value iteration: two-state cycle gain is exactly 1") {
  const SolveOutcome out = relative_value_iteration(testing::two_cycle_spec());
  CHECK(out.value == 1.0);
}

TEST_CASE("relative value iteration: absorbing state gain equals its reward") {
  const DPSpec spec = parse_spec(R"({
    "horizon": {"kind": "average"},
    "objective": "maximize",
    "states": ["stay"],
    "actions": {"stay": ["idle"]},
    "transitions": [{"state": "stay", "action": "idle", "next": [["stay", 1.0]]}],
    "rewards": [{"state": "stay", "action": "idle", "value": 3.0}],
    "initial": "stay"
  })");
  CHECK(relative_value_iteration(spec).value == 3.0);
}

TEST_CASE("relative value iteration matches a long-run simulation") {
  std::mt19937_64 rng(2024);
  RandomSpecOptions opt;
  opt.kind = HorizonKind::Average;
  opt.ensure_unichain = true;
  for (int i = 0; i < 3; ++i) {
    const DPSpec spec = testing::random_spec(rng, opt);
    const SolveOutcome out = relative_value_iteration(spec);
    const double simulated = simulate_average(spec, out, 1'000'000, 5 + i);
    CHECK(std::fabs(out.value - simulated) < 1e-2);
  }
}

TEST_CASE("relative value iteration gain matches the enumeration oracle") {
  std::mt19937_64 rng(77);
  RandomSpecOptions opt;
  opt.kind = HorizonKind::Average;
  opt.ensure_unichain = true;
  for (int i = 0; i < 20; ++i) {
    const DPSpec spec = testing::random_spec(rng, opt);
    const double rvi = relative_value_iteration(spec).value;
    const double oracle = enumerate_policies(spec).value;
    CHECK(std::fabs(rvi - oracle) < 1e-7);
  }
}

TEST_CASE("gain is shift-invariant: adding c to all rewards adds c to the gain") {
  std::mt19937_64 rng(31);
  RandomSpecOptions opt;
  opt.kind = HorizonKind::Average;
  opt.ensure_unichain = true;
  for (int i = 0; i < 10; ++i) {
    DPSpec spec = testing::random_spec(rng, opt);
    const double base = relative_value_iteration(spec).value;
    const double c = 2.75;
    for (auto& e : spec.rewards) e.value += c;
    const double shifted = relative_value_iteration(spec).value;
    CHECK(std::fabs(shifted - (base + c)) < 1e-8);
  }
}

TEST_CASE("scaling rewards scales the value and keeps the argmax policy") {
  std::mt19937_64 rng(55);
  for (int i = 0; i < 20; ++i) {
    RandomSpecOptions opt;
    opt.kind = i % 2 == 0 ? HorizonKind::Finite : HorizonKind::Discounted;
    DPSpec spec = testing::random_spec(rng, opt);
    const SolveOutcome base = opt.kind == HorizonKind::Finite ? backward_induction(spec)
                                                              : policy_iteration(spec);
    const double c = 3.5;
    for (auto& e : spec.rewards) e.value *= c;
    for (auto& [state, value] : spec.terminal_rewards) value *= c;
    const SolveOutcome scaled = opt.kind == HorizonKind::Finite ? backward_induction(spec)
                                                                : policy_iteration(spec);
    CHECK(std::fabs(scaled.value - c * base.value) <= 1e-7 * std::max(1.0, std::fabs(base.value)));
    REQUIRE(scaled.policy.size() == base.policy.size());
    for (std::size_t k = 0; k < base.policy.size(); ++k) {
      CHECK(scaled.policy[k].action == base.policy[k].action);
    }
  }
}

TEST_CASE("enlarging an action set never hurts") {
  std::mt19937_64 rng(808);
  RandomSpecOptions opt;
  opt.kind = HorizonKind::Discounted;
  for (int i = 0; i < 15; ++i) {
    DPSpec spec = testing::random_spec(rng, opt);
    const double base = enumerate_policies(spec).value;
    // Add a fresh action to state 0 with a random row and reward.
    const std::string state = spec.states[0];
    spec.actions[state].push_back("bonus");
    spec.transitions.push_back({0, state, "bonus", {{spec.states.back(), 1.0}}});
    spec.rewards.push_back({0, state, "bonus", i % 2 == 0 ? 4.0 : -4.0});
    const double enlarged = enumerate_policies(spec).value;
    if (spec.objective == Objective::Maximize) {
      CHECK(enlarged >= base - 1e-12);
    } else {
      CHECK(enlarged <= base + 1e-12);
    }
  }
}

TEST_CASE("value iteration residual bound holds against the oracle") {
  std::mt19937_64 rng(4711);
  RandomSpecOptions opt;
  opt.kind = HorizonKind::Discounted;
  const double tol = 1e-7;
  for (int i = 0; i < 15; ++i) {
    const DPSpec spec = testing::random_spec(rng, opt);
    const double vi = value_iteration(spec, tol).value;
    const double oracle = enumerate_policies(spec).value;
    CHECK(std::fabs(vi - oracle) < tol);
  }
}

TEST_CASE("enumerate_policies: single-policy spec returns its exact evaluation") {
  const SolveOutcome out = enumerate_policies(testing::single_state_spec());
  CHECK(out.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(out.iterations == 1);
}

TEST_CASE("enumerate_policies refuses oversized instances") {
  DPSpec spec = testing::flip_stay_spec();
  spec.horizon.T = 50;
  // 2 actions at s0 across 49 decision epochs: 2^49 policies.
  try {
    enumerate_policies(spec);
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooLarge);
  }
}
