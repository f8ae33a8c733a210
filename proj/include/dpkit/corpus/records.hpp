#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpkit/jsonl.hpp"
#include "dpkit/mdp/execute.hpp"

namespace dpkit::corpus {

enum class Provenance { Seed, Forward, Backward };

const char* to_string(Provenance p) noexcept;

// A natural-language problem description plus bookkeeping.
struct ProblemRecord {
  std::string id;
  std::string pnl;
  std::vector<std::string> labels;
  std::string domain_category;
  Provenance provenance = Provenance::Seed;
  std::string seed_id;      // forward/backward only
  std::string scenario_id;  // forward/backward only
};

// One (CoT, model text, code, answer) tuple produced by a persona.
struct SolutionAttempt {
  std::string cot;
  std::string model_text;
  mdp::SolutionCode code;
  std::optional<double> answer;  // present iff status == Ok
  mdp::ExecStatus status = mdp::ExecStatus::RuntimeError;
  int role_index = 1;
  int attempt_index = 0;
};

// An ordered attempt sequence ending in a verified answer. Single-attempt
// trajectories cover the standard (non-reflected) case.
struct Trajectory {
  std::string problem_id;
  std::vector<SolutionAttempt> attempts;
  double final_answer = 0.0;
  bool recovered = false;  // true iff success came after attempt 0
};

// One emitted dataset record: the unit of every generated dataset file.
struct TrainingRecord {
  std::string id;
  ProblemRecord problem;
  Trajectory trajectory;
};

nlohmann::json to_json(const ProblemRecord& r);
nlohmann::json to_json(const SolutionAttempt& a);
nlohmann::json to_json(const Trajectory& t);
nlohmann::json to_json(const TrainingRecord& r);
ProblemRecord problem_from_json(const nlohmann::json& j);
SolutionAttempt attempt_from_json(const nlohmann::json& j);
Trajectory trajectory_from_json(const nlohmann::json& j);
TrainingRecord training_record_from_json(const nlohmann::json& j);

void validate(const ProblemRecord& r);
void validate(const SolutionAttempt& a);
void validate(const Trajectory& t);

}  // namespace dpkit::corpus
