#include "dpkit/mdp/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "dpkit/errors.hpp"

namespace dpkit::mdp {

namespace {

// opt-comparison: strict improvement in the spec's objective direction.
struct Better {
  bool maximize;
  bool operator()(double candidate, double incumbent) const {
    return maximize ? candidate > incumbent : candidate < incumbent;
  }
};

void require_horizon(const CompiledSpec& c, HorizonKind kind, const char* op) {
  require(c.horizon.kind == kind, ErrorKind::HorizonMismatch,
          std::string(op) + " requires a " + to_string(kind) + " horizon, got " +
              to_string(c.horizon.kind));
}

double value_at_initial(const CompiledSpec& c, const std::vector<double>& v) {
  double value = 0.0;
  for (const auto& [s, p] : c.initial) value += p * v[static_cast<std::size_t>(s)];
  return value;
}

std::vector<PolicyDecision> stationary_policy(const CompiledSpec& c,
                                              const std::vector<int>& choice) {
  std::vector<PolicyDecision> policy;
  for (int s = 0; s < c.num_states(); ++s) {
    const auto& a = c.stationary[static_cast<std::size_t>(s)][static_cast<std::size_t>(
        choice[static_cast<std::size_t>(s)])];
    policy.push_back({0, c.states[static_cast<std::size_t>(s)], a.id});
  }
  return policy;
}

// One Bellman backup at a state: optimal action value plus argmin/argmax
// index, ties resolved to the smallest index by strict-improvement scanning.
std::pair<double, int> backup(const std::vector<CompiledAction>& actions,
                              const std::vector<double>& future, double discount,
                              Better better) {
  double best = 0.0;
  int best_index = -1;
  for (const auto& a : actions) {
    double q = a.reward;
    for (const auto& [j, p] : a.next) q += discount * p * future[static_cast<std::size_t>(j)];
    if (best_index < 0 || better(q, best)) {
      best = q;
      best_index = a.index;
    }
  }
  return {best, best_index};
}

// Greedy stationary policy w.r.t. a value estimate.
std::vector<int> greedy(const CompiledSpec& c, const std::vector<double>& v, double discount) {
  Better better{c.maximize()};
  std::vector<int> choice(static_cast<std::size_t>(c.num_states()), 0);
  for (int s = 0; s < c.num_states(); ++s) {
    choice[static_cast<std::size_t>(s)] =
        backup(c.stationary[static_cast<std::size_t>(s)], v, discount, better).second;
  }
  return choice;
}

// Exact evaluation of a stationary policy under discounting:
// solve (I - gamma * P_pi) v = r_pi by direct elimination.
std::vector<double> evaluate_discounted(const CompiledSpec& c, const std::vector<int>& choice) {
  const int n = c.num_states();
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b(n);
  for (int s = 0; s < n; ++s) {
    const auto& a = c.stationary[static_cast<std::size_t>(s)][static_cast<std::size_t>(
        choice[static_cast<std::size_t>(s)])];
    b(s) = a.reward;
    for (const auto& [j, p] : a.next) A(s, j) -= c.horizon.gamma * p;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd v = lu.solve(b);
  require(v.allFinite() && (A * v - b).cwiseAbs().maxCoeff() < 1e-6,
          ErrorKind::SingularEvaluation, "policy evaluation system is singular");
  return {v.data(), v.data() + n};
}

// Exact gain of a stationary policy on a unichain model: solve the
// evaluation equations g + h(s) = r(s) + sum_j P(s,j) h(j) with h(ref) = 0.
double evaluate_average_gain(const CompiledSpec& c, const std::vector<int>& choice) {
  const int n = c.num_states();
  // Unknowns: x(0) = g, x(i) = h(state i) for i >= 1; h(state 0) = 0.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b(n);
  for (int s = 0; s < n; ++s) {
    const auto& a = c.stationary[static_cast<std::size_t>(s)][static_cast<std::size_t>(
        choice[static_cast<std::size_t>(s)])];
    A(s, 0) = 1.0;
    if (s >= 1) A(s, s) += 1.0;
    for (const auto& [j, p] : a.next) {
      if (j >= 1) A(s, j) -= p;
    }
    b(s) = a.reward;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  require(lu.isInvertible(), ErrorKind::SingularEvaluation,
          "gain evaluation system is singular (policy likely multichain)");
  Eigen::VectorXd x = lu.solve(b);
  require(x.allFinite(), ErrorKind::SingularEvaluation, "gain evaluation produced non-finite values");
  return x(0);
}

// Exact evaluation of a finite-horizon policy by expectation recursion;
// mirrors backward_induction's arithmetic so agreed values match bit-close.
double evaluate_finite(const CompiledSpec& c, const std::vector<std::vector<int>>& choice) {
  std::vector<double> v = c.terminal;
  for (int t = c.horizon.T - 1; t >= 1; --t) {
    std::vector<double> next(static_cast<std::size_t>(c.num_states()), 0.0);
    const auto& per_state = c.epoch_actions(t);
    for (int s = 0; s < c.num_states(); ++s) {
      const auto& a = per_state[static_cast<std::size_t>(s)][static_cast<std::size_t>(
          choice[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(s)])];
      double q = a.reward;
      for (const auto& [j, p] : a.next) q += p * v[static_cast<std::size_t>(j)];
      next[static_cast<std::size_t>(s)] = q;
    }
    v = std::move(next);
  }
  return value_at_initial(c, v);
}

}  // namespace

nlohmann::json to_json(const SolveOutcome& outcome) {
  nlohmann::json policy = nlohmann::json::array();
  for (const auto& d : outcome.policy) {
    nlohmann::json entry{{"state", d.state}, {"action", d.action}};
    if (d.epoch != 0) entry["epoch"] = d.epoch;
    policy.push_back(entry);
  }
  return nlohmann::json{{"value", outcome.value},
                        {"policy", policy},
                        {"iterations", outcome.iterations},
                        {"residual", outcome.residual}};
}

SolveOutcome backward_induction(const DPSpec& spec) {
  const CompiledSpec c = compile(spec);
  require_horizon(c, HorizonKind::Finite, "backward_induction");
  Better better{c.maximize()};

  std::vector<double> v = c.terminal;
  std::vector<PolicyDecision> policy;
  for (int t = c.horizon.T - 1; t >= 1; --t) {
    std::vector<double> next(static_cast<std::size_t>(c.num_states()), 0.0);
    const auto& per_state = c.epoch_actions(t);
    std::vector<PolicyDecision> epoch_policy;
    for (int s = 0; s < c.num_states(); ++s) {
      auto [value, index] = backup(per_state[static_cast<std::size_t>(s)], v, 1.0, better);
      next[static_cast<std::size_t>(s)] = value;
      epoch_policy.push_back({t, c.states[static_cast<std::size_t>(s)],
                              per_state[static_cast<std::size_t>(s)][static_cast<std::size_t>(index)].id});
    }
    policy.insert(policy.begin(), epoch_policy.begin(), epoch_policy.end());
    v = std::move(next);
  }

  SolveOutcome out;
  out.value = value_at_initial(c, v);
  out.policy = std::move(policy);
  out.iterations = std::max(0, c.horizon.T - 1);
  out.residual = 0.0;
  return out;
}

SolveOutcome value_iteration(const DPSpec& spec, double tol) {
  const CompiledSpec c = compile(spec);
  require_horizon(c, HorizonKind::Discounted, "value_iteration");
  require(tol > 0.0, ErrorKind::Precondition, "value_iteration tolerance must be positive");
  Better better{c.maximize()};
  const double gamma = c.horizon.gamma;
  const double threshold = tol * (1.0 - gamma) / (2.0 * gamma);

  std::vector<double> v(static_cast<std::size_t>(c.num_states()), 0.0);
  double delta = 0.0;
  long iterations = 0;
  while (true) {
    ++iterations;
    std::vector<double> next(v.size(), 0.0);
    delta = 0.0;
    for (int s = 0; s < c.num_states(); ++s) {
      next[static_cast<std::size_t>(s)] =
          backup(c.stationary[static_cast<std::size_t>(s)], v, gamma, better).first;
      delta = std::max(delta, std::fabs(next[static_cast<std::size_t>(s)] -
                                        v[static_cast<std::size_t>(s)]));
    }
    v = std::move(next);
    if (delta < threshold) break;
    require(iterations < kMaxIterations, ErrorKind::NonConvergence,
            "value iteration hit the iteration cap");
  }

  SolveOutcome out;
  out.value = value_at_initial(c, v);
  out.policy = stationary_policy(c, greedy(c, v, gamma));
  out.iterations = iterations;
  out.residual = delta;
  return out;
}

SolveOutcome policy_iteration(const DPSpec& spec) {
  const CompiledSpec c = compile(spec);
  require_horizon(c, HorizonKind::Discounted, "policy_iteration");
  const std::vector<double> zero(static_cast<std::size_t>(c.num_states()), 0.0);
  std::vector<int> policy = greedy(c, zero, c.horizon.gamma);

  long iterations = 0;
  std::vector<double> v;
  while (true) {
    ++iterations;
    v = evaluate_discounted(c, policy);
    std::vector<int> improved = greedy(c, v, c.horizon.gamma);
    if (improved == policy) break;
    policy = std::move(improved);
    require(iterations < 100000, ErrorKind::NonConvergence,
            "policy iteration failed to stabilize");
  }

  SolveOutcome out;
  out.value = value_at_initial(c, v);
  out.policy = stationary_policy(c, policy);
  out.iterations = iterations;
  out.residual = 0.0;
  return out;
}

SolveOutcome relative_value_iteration(const DPSpec& spec, double tol) {
  const CompiledSpec c = compile(spec);
  require_horizon(c, HorizonKind::Average, "relative_value_iteration");
  require(tol > 0.0, ErrorKind::Precondition,
          "relative_value_iteration tolerance must be positive");
  Better better{c.maximize()};

  // Aperiodicity transformation: mix each action's row with a tau-weighted
  // self-loop and scale rewards by tau. The transformed model has the same
  // optimal policies and exactly tau times the gain, but converges under
  // relative value iteration even for periodic chains.
  const double tau = 0.5;
  const int n = c.num_states();
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  std::vector<double> lw(static_cast<std::size_t>(n), 0.0);
  long iterations = 0;
  double span = 0.0;
  double gain_estimate = 0.0;

  while (true) {
    ++iterations;
    double dmin = std::numeric_limits<double>::infinity();
    double dmax = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < n; ++s) {
      double best = 0.0;
      bool first = true;
      for (const auto& a : c.stationary[static_cast<std::size_t>(s)]) {
        double q = tau * a.reward + (1.0 - tau) * w[static_cast<std::size_t>(s)];
        for (const auto& [j, p] : a.next) q += tau * p * w[static_cast<std::size_t>(j)];
        if (first || better(q, best)) {
          best = q;
          first = false;
        }
      }
      lw[static_cast<std::size_t>(s)] = best;
      const double d = best - w[static_cast<std::size_t>(s)];
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
    span = dmax - dmin;
    gain_estimate = 0.5 * (dmin + dmax) / tau;
    if (span < tol * tau) break;
    require(iterations < kMaxIterations, ErrorKind::NonConvergence,
            "relative value iteration hit the iteration cap (model may be multichain)");
    const double ref = lw[0];
    for (int s = 0; s < n; ++s) {
      w[static_cast<std::size_t>(s)] = lw[static_cast<std::size_t>(s)] - ref;
    }
  }

  SolveOutcome out;
  out.value = gain_estimate;
  out.policy = stationary_policy(c, greedy(c, w, 1.0));
  out.iterations = iterations;
  out.residual = span / tau;
  return out;
}

SolveOutcome enumerate_policies(const DPSpec& spec) {
  const CompiledSpec c = compile(spec);
  const bool finite = c.horizon.kind == HorizonKind::Finite;
  Better better{c.maximize()};

  // Bound the policy count before enumerating.
  double count = 1.0;
  if (finite) {
    for (int t = 1; t <= c.horizon.T - 1; ++t) {
      for (const auto& actions : c.epoch_actions(t)) {
        count *= static_cast<double>(actions.size());
        require(count <= kEnumerationBound, ErrorKind::TooLarge,
                "policy enumeration bound exceeded");
      }
    }
  } else {
    for (const auto& actions : c.stationary) {
      count *= static_cast<double>(actions.size());
      require(count <= kEnumerationBound, ErrorKind::TooLarge,
              "policy enumeration bound exceeded");
    }
  }

  SolveOutcome out;
  out.residual = 0.0;

  if (finite) {
    // Odometer across (epoch, state) slots.
    const int epochs = std::max(0, c.horizon.T - 1);
    std::vector<std::vector<int>> choice(static_cast<std::size_t>(epochs));
    for (int t = 1; t <= epochs; ++t) {
      choice[static_cast<std::size_t>(t - 1)].assign(static_cast<std::size_t>(c.num_states()), 0);
    }
    bool have_best = false;
    double best_value = 0.0;
    std::vector<std::vector<int>> best_choice = choice;
    long evaluated = 0;
    bool done = false;
    while (!done) {
      ++evaluated;
      const double value = evaluate_finite(c, choice);
      if (!have_best || better(value, best_value)) {
        have_best = true;
        best_value = value;
        best_choice = choice;
      }
      // Advance the odometer.
      done = true;
      for (int t = 1; t <= epochs && done; ++t) {
        for (int s = 0; s < c.num_states() && done; ++s) {
          int& k = choice[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(s)];
          const int limit = static_cast<int>(c.epoch_actions(t)[static_cast<std::size_t>(s)].size());
          if (k + 1 < limit) {
            ++k;
            done = false;
          } else {
            k = 0;
          }
        }
      }
    }
    out.value = best_value;
    out.iterations = evaluated;
    for (int t = 1; t <= epochs; ++t) {
      for (int s = 0; s < c.num_states(); ++s) {
        const auto& a = c.epoch_actions(t)[static_cast<std::size_t>(s)][static_cast<std::size_t>(
            best_choice[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(s)])];
        out.policy.push_back({t, c.states[static_cast<std::size_t>(s)], a.id});
      }
    }
    return out;
  }

  std::vector<int> choice(static_cast<std::size_t>(c.num_states()), 0);
  bool have_best = false;
  double best_value = 0.0;
  std::vector<int> best_choice = choice;
  long evaluated = 0;
  bool done = false;
  while (!done) {
    ++evaluated;
    const double value = c.horizon.kind == HorizonKind::Discounted
                             ? value_at_initial(c, evaluate_discounted(c, choice))
                             : evaluate_average_gain(c, choice);
    if (!have_best || better(value, best_value)) {
      have_best = true;
      best_value = value;
      best_choice = choice;
    }
    done = true;
    for (int s = 0; s < c.num_states() && done; ++s) {
      int& k = choice[static_cast<std::size_t>(s)];
      const int limit = static_cast<int>(c.stationary[static_cast<std::size_t>(s)].size());
      if (k + 1 < limit) {
        ++k;
        done = false;
      } else {
        k = 0;
      }
    }
  }
  out.value = best_value;
  out.iterations = evaluated;
  out.policy = stationary_policy(c, best_choice);
  return out;
}

SolveOutcome solve(const DPSpec& spec, double tol) {
  switch (spec.horizon.kind) {
    case HorizonKind::Finite: return backward_induction(spec);
    case HorizonKind::Discounted: return value_iteration(spec, tol);
    case HorizonKind::Average: return relative_value_iteration(spec, tol);
  }
  raise(ErrorKind::InvalidSpec, "unknown horizon kind");
}

}  // namespace dpkit::mdp
