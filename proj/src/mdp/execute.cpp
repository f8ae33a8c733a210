#include "dpkit/mdp/execute.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>
#include <vector>

#include "dpkit/errors.hpp"
#include "dpkit/hash.hpp"
#include "dpkit/mdp/solve.hpp"
#include "dpkit/numeric.hpp"

extern char** environ;

namespace dpkit::mdp {

namespace {

bool looks_secret(const std::string& name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (const char* marker : {"KEY", "TOKEN", "SECRET", "PASSWORD", "CREDENTIAL"}) {
    if (upper.find(marker) != std::string::npos) return true;
  }
  return false;
}

std::string last_nonempty_line(const std::string& text) {
  std::size_t end = text.size();
  while (end > 0) {
    std::size_t begin = text.find_last_of('\n', end - 1);
    const std::size_t start = begin == std::string::npos ? 0 : begin + 1;
    const std::string line = text.substr(start, end - start);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
    if (begin == std::string::npos) break;
    end = begin;
  }
  return "";
}

struct ScriptOutput {
  int exit_code = -1;
  bool timed_out = false;
  std::string stdout_text;
  std::string stderr_text;
};

ScriptOutput run_script(const std::string& interpreter, const std::filesystem::path& script,
                        std::chrono::milliseconds timeout) {
  int out_pipe[2];
  int err_pipe[2];
  require(pipe(out_pipe) == 0 && pipe(err_pipe) == 0, ErrorKind::Io, "pipe() failed");

  const pid_t pid = fork();
  require(pid >= 0, ErrorKind::Io, "fork() failed");

  if (pid == 0) {
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);

    // Inherited environment minus credential-like variables.
    std::vector<std::string> kept;
    for (char** e = environ; *e != nullptr; ++e) {
      const std::string entry(*e);
      const auto eq = entry.find('=');
      if (eq == std::string::npos || looks_secret(entry.substr(0, eq))) continue;
      kept.push_back(entry);
    }
    std::vector<char*> envp;
    envp.reserve(kept.size() + 1);
    for (auto& entry : kept) envp.push_back(entry.data());
    envp.push_back(nullptr);

    const std::string path = script.string();
    char* argv[] = {const_cast<char*>(interpreter.c_str()), const_cast<char*>(path.c_str()),
                    nullptr};
    execvpe(interpreter.c_str(), argv, envp.data());
    _exit(127);
  }

  close(out_pipe[1]);
  close(err_pipe[1]);
  fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
  fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

  ScriptOutput result;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  char buffer[4096];
  bool exited = false;
  int wait_status = 0;

  auto drain = [&](int fd, std::string& sink) {
    while (true) {
      const ssize_t n = read(fd, buffer, sizeof(buffer));
      if (n <= 0) break;
      if (sink.size() < (1u << 20)) sink.append(buffer, static_cast<std::size_t>(n));
    }
  };

  while (true) {
    drain(out_pipe[0], result.stdout_text);
    drain(err_pipe[0], result.stderr_text);
    const pid_t done = waitpid(pid, &wait_status, WNOHANG);
    if (done == pid) {
      exited = true;
      break;
    }
    if (std::chrono::steady_clock::now() >= deadline) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }

  if (!exited) {
    kill(pid, SIGKILL);
    waitpid(pid, &wait_status, 0);
    result.timed_out = true;
  }
  drain(out_pipe[0], result.stdout_text);
  drain(err_pipe[0], result.stderr_text);
  close(out_pipe[0]);
  close(err_pipe[0]);

  if (!result.timed_out && WIFEXITED(wait_status)) {
    result.exit_code = WEXITSTATUS(wait_status);
  }
  return result;
}

ExecutionResult execute_spec(const std::string& source, const ExecOptions& options) {
  ExecutionResult result;
  DPSpec spec;
  try {
    spec = parse_spec(source);
  } catch (const Error& e) {
    result.status = ExecStatus::ParseError;
    result.detail = e.what();
    return result;
  }
  try {
    spec = validate_spec(std::move(spec));
  } catch (const Error& e) {
    result.status = ExecStatus::InvalidSpec;
    result.detail = e.what();
    return result;
  }
  try {
    const SolveOutcome outcome = solve(spec, options.solver_tol);
    if (!std::isfinite(outcome.value)) {
      result.status = ExecStatus::RuntimeError;
      result.detail = "solver produced a non-finite value";
      return result;
    }
    result.answer = outcome.value;
    result.status = ExecStatus::Ok;
  } catch (const Error& e) {
    result.status = ExecStatus::RuntimeError;
    result.detail = e.what();
  } catch (const std::exception& e) {
    result.status = ExecStatus::RuntimeError;
    result.detail = e.what();
  }
  return result;
}

ExecutionResult execute_script(const std::string& source, const ExecOptions& options) {
  ExecutionResult result;
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / ("dpkit_exec_" + content_hash(source) + "_" +
                           std::to_string(::getpid()) + ".script");
  try {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorKind::Io, "cannot write temp script");
    out << source;
    out.close();

    const ScriptOutput run = run_script(options.interpreter, path, options.timeout);
    std::filesystem::remove(path);

    if (run.timed_out) {
      result.status = ExecStatus::Timeout;
      result.detail = "wall-clock timeout exceeded";
      return result;
    }
    if (run.exit_code != 0) {
      result.status = ExecStatus::RuntimeError;
      result.detail = "exit code " + std::to_string(run.exit_code) + "; stderr: " +
                      run.stderr_text.substr(0, 2000);
      return result;
    }
    const std::string line = last_nonempty_line(run.stdout_text);
    const auto value = parse_numeric_token(line);
    if (!value.has_value() || !std::isfinite(*value)) {
      result.status = ExecStatus::NonNumericOutput;
      result.detail = "last stdout line is not a numeric token: " + line.substr(0, 200);
      return result;
    }
    result.answer = *value;
    result.status = ExecStatus::Ok;
  } catch (const std::exception& e) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    result.status = ExecStatus::RuntimeError;
    result.detail = e.what();
  }
  return result;
}

}  // namespace

const char* to_string(ExecStatus status) noexcept {
  switch (status) {
    case ExecStatus::Ok: return "ok";
    case ExecStatus::ParseError: return "parse_error";
    case ExecStatus::InvalidSpec: return "invalid_spec";
    case ExecStatus::RuntimeError: return "runtime_error";
    case ExecStatus::Timeout: return "timeout";
    case ExecStatus::NonNumericOutput: return "non_numeric_output";
  }
  return "runtime_error";
}

ExecStatus exec_status_from_string(const std::string& s) {
  if (s == "ok") return ExecStatus::Ok;
  if (s == "parse_error") return ExecStatus::ParseError;
  if (s == "invalid_spec") return ExecStatus::InvalidSpec;
  if (s == "runtime_error") return ExecStatus::RuntimeError;
  if (s == "timeout") return ExecStatus::Timeout;
  if (s == "non_numeric_output") return ExecStatus::NonNumericOutput;
  raise(ErrorKind::Parse, "unknown execution status: " + s);
}

nlohmann::json to_json(const ExecutionResult& result) {
  nlohmann::json j{{"status", to_string(result.status)}, {"detail", result.detail}};
  if (result.answer.has_value()) j["answer"] = *result.answer;
  else j["answer"] = nullptr;
  return j;
}

ExecutionResult execute_solution(const SolutionCode& code, const ExecOptions& options) {
  return code.kind == CodeKind::Spec ? execute_spec(code.source, options)
                                     : execute_script(code.source, options);
}

}  // namespace dpkit::mdp
