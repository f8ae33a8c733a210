#include "dpkit/corpus/records.hpp"

#include "dpkit/errors.hpp"

namespace dpkit {
namespace corpus {

namespace {

Provenance provenance_from_string(const std::string& s) {
  if (s == "seed") return Provenance::Seed;
  if (s == "forward") return Provenance::Forward;
  if (s == "backward") return Provenance::Backward;
  raise(ErrorKind::Parse, "unknown provenance: " + s);
}

}  // namespace

const char* to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::Seed: return "seed";
    case Provenance::Forward: return "forward";
    case Provenance::Backward: return "backward";
  }
  return "seed";
}

nlohmann::json to_json(const ProblemRecord& r) {
  nlohmann::json j{
      {"id", r.id},
      {"pnl", r.pnl},
      {"labels", r.labels},
      {"domain_category", r.domain_category},
      {"provenance", to_string(r.provenance)},
  };
  if (!r.seed_id.empty()) j["seed_id"] = r.seed_id;
  if (!r.scenario_id.empty()) j["scenario_id"] = r.scenario_id;
  return j;
}

ProblemRecord problem_from_json(const nlohmann::json& j) {
  ProblemRecord r;
  r.id = j.at("id").get<std::string>();
  r.pnl = j.at("pnl").get<std::string>();
  if (j.contains("labels")) r.labels = j.at("labels").get<std::vector<std::string>>();
  if (j.contains("domain_category")) r.domain_category = j.at("domain_category").get<std::string>();
  r.provenance = provenance_from_string(j.value("provenance", "seed"));
  r.seed_id = j.value("seed_id", "");
  r.scenario_id = j.value("scenario_id", "");
  validate(r);
  return r;
}

void validate(const ProblemRecord& r) {
  require(!r.pnl.empty(), ErrorKind::InvalidSpec, "problem pnl is empty");
  if (r.provenance == Provenance::Seed) {
    require(r.scenario_id.empty(), ErrorKind::InvalidSpec,
            "seed problem must not carry a scenario_id");
  } else {
    require(!r.seed_id.empty() && !r.scenario_id.empty(), ErrorKind::InvalidSpec,
            "generated problem must carry seed_id and scenario_id");
  }
}

nlohmann::json to_json(const SolutionAttempt& a) {
  nlohmann::json j{
      {"cot", a.cot},
      {"model_text", a.model_text},
      {"code", {{"kind", a.code.kind == mdp::CodeKind::Spec ? "spec" : "script"},
                {"source", a.code.source}}},
      {"status", mdp::to_string(a.status)},
      {"role_index", a.role_index},
      {"attempt_index", a.attempt_index},
  };
  if (a.answer.has_value()) j["answer"] = *a.answer;
  else j["answer"] = nullptr;
  return j;
}

SolutionAttempt attempt_from_json(const nlohmann::json& j) {
  SolutionAttempt a;
  a.cot = j.value("cot", "");
  a.model_text = j.value("model_text", "");
  const auto& code = j.at("code");
  a.code.kind = code.at("kind").get<std::string>() == "script" ? mdp::CodeKind::Script
                                                               : mdp::CodeKind::Spec;
  a.code.source = code.at("source").get<std::string>();
  a.status = mdp::exec_status_from_string(j.value("status", "ok"));
  if (j.contains("answer") && !j.at("answer").is_null()) {
    a.answer = j.at("answer").get<double>();
  }
  a.role_index = j.value("role_index", 1);
  a.attempt_index = j.value("attempt_index", 0);
  validate(a);
  return a;
}

void validate(const SolutionAttempt& a) {
  require(a.answer.has_value() == (a.status == mdp::ExecStatus::Ok),
          ErrorKind::InvalidSpec, "attempt answer must be present iff status is ok");
}

nlohmann::json to_json(const Trajectory& t) {
  nlohmann::json attempts = nlohmann::json::array();
  for (const auto& a : t.attempts) attempts.push_back(to_json(a));
  return nlohmann::json{
      {"problem_id", t.problem_id},
      {"attempts", attempts},
      {"final_answer", t.final_answer},
      {"recovered", t.recovered},
  };
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
  Trajectory t;
  t.problem_id = j.at("problem_id").get<std::string>();
  for (const auto& a : j.at("attempts")) t.attempts.push_back(attempt_from_json(a));
  t.final_answer = j.at("final_answer").get<double>();
  t.recovered = j.value("recovered", false);
  validate(t);
  return t;
}

void validate(const Trajectory& t) {
  require(!t.attempts.empty(), ErrorKind::InvalidSpec, "trajectory has no attempts");
  const auto& last = t.attempts.back();
  require(last.answer.has_value() && *last.answer == t.final_answer,
          ErrorKind::InvalidSpec,
          "trajectory final_answer must equal the last attempt's answer");
}

nlohmann::json to_json(const TrainingRecord& r) {
  nlohmann::json j{
      {"schema_version", kSchemaVersion},
      {"id", r.id},
      {"problem", to_json(r.problem)},
      {"final_answer", r.trajectory.final_answer},
      {"recovered", r.trajectory.recovered},
  };
  nlohmann::json attempts = nlohmann::json::array();
  for (const auto& a : r.trajectory.attempts) attempts.push_back(to_json(a));
  j["attempts"] = attempts;
  return j;
}

TrainingRecord training_record_from_json(const nlohmann::json& j) {
  TrainingRecord r;
  r.id = j.at("id").get<std::string>();
  r.problem = problem_from_json(j.at("problem"));
  r.trajectory.problem_id = r.problem.id;
  for (const auto& a : j.at("attempts")) r.trajectory.attempts.push_back(attempt_from_json(a));
  r.trajectory.final_answer = j.at("final_answer").get<double>();
  r.trajectory.recovered = j.value("recovered", false);
  validate(r.trajectory);
  return r;
}

}  // namespace corpus
}  // namespace dpkit
