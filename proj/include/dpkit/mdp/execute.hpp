#pragma once

#include <chrono>
#include <optional>
#include <string>

#include <json.hpp>

namespace dpkit::mdp {

enum class CodeKind { Spec, Script };

// A solution's executable artifact: either a DPSpec JSON document
// (interpreted in-process) or an opaque script run in a subprocess.
struct SolutionCode {
  CodeKind kind = CodeKind::Spec;
  std::string source;
};

enum class ExecStatus {
  Ok,
  ParseError,
  InvalidSpec,
  RuntimeError,
  Timeout,
  NonNumericOutput,
};

const char* to_string(ExecStatus status) noexcept;
ExecStatus exec_status_from_string(const std::string& s);

struct ExecutionResult {
  std::optional<double> answer;
  ExecStatus status = ExecStatus::RuntimeError;
  std::string detail;  // diagnostics: validation message, stderr tail, ...

  bool ok() const noexcept { return status == ExecStatus::Ok; }
};

nlohmann::json to_json(const ExecutionResult& result);

struct ExecOptions {
  std::chrono::milliseconds timeout{10'000};
  std::string interpreter = "python3";  // script backend only
  double solver_tol = 1e-9;             // spec backend iterative solvers
};

// Runs a solution artifact and captures the numeric answer. Never throws
// for content failures: every outcome is encoded in the status. The spec
// backend validates and dispatches to the horizon-appropriate solver; the
// script backend runs a subprocess (environment stripped of credential-like
// variables), enforces the wall-clock timeout, requires exit code 0, and
// parses the last stdout line as a single numeric token.
ExecutionResult execute_solution(const SolutionCode& code, const ExecOptions& options = {});

}  // namespace dpkit::mdp
