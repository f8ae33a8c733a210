#include <doctest.h>

#include "dpkit/jsonl.hpp"
#include "dpkit/mdp/execute.hpp"
#include "dpkit/mdp/solve.hpp"
#include "helpers.hpp"

using namespace dpkit;
using namespace dpkit::mdp;

TEST_CASE("spec backend solves the warehouse fixture") {
  const std::string source = read_file(testing::data_dir() / "specs" / "warehouse.json");
  const ExecutionResult result = execute_solution({CodeKind::Spec, source});
  REQUIRE(result.ok());
  const double oracle = enumerate_policies(testing::warehouse_spec()).value;
  CHECK(*result.answer == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("spec backend reports malformed JSON as parse_error") {
  const ExecutionResult result = execute_solution({CodeKind::Spec, "{not json"});
  CHECK(result.status == ExecStatus::ParseError);
  CHECK_FALSE(result.answer.has_value());
}

TEST_CASE("spec backend reports invariant violations as invalid_spec") {
  const ExecutionResult result = execute_solution({CodeKind::Spec, R"({
    "horizon": {"kind": "discounted", "gamma": 1.5},
    "objective": "maximize",
    "states": ["x"],
    "actions": {"x": ["a"]},
    "transitions": [{"state": "x", "action": "a", "next": [["x", 1.0]]}],
    "initial": "x"
  })"});
  CHECK(result.status == ExecStatus::InvalidSpec);
}

TEST_CASE("script backend parses the last numeric stdout line") {
  ExecOptions options;
  options.timeout = std::chrono::milliseconds(5000);
  const ExecutionResult result =
      execute_solution({CodeKind::Script, "print('working...')\nprint(12.5)\n"}, options);
  REQUIRE(result.ok());
  CHECK(*result.answer == 12.5);
}

TEST_CASE("script printing prose yields non_numeric_output") {
  ExecOptions options;
  options.timeout = std::chrono::milliseconds(5000);
  const ExecutionResult result = execute_solution({CodeKind::Script, "print('hello')\n"}, options);
  CHECK(result.status == ExecStatus::NonNumericOutput);
  CHECK_FALSE(result.answer.has_value());
}

TEST_CASE("script sleeping past the timeout yields timeout") {
  ExecOptions options;
  options.timeout = std::chrono::milliseconds(300);
  const ExecutionResult result =
      execute_solution({CodeKind::Script, "import time\ntime.sleep(10)\nprint(1)\n"}, options);
  CHECK(result.status == ExecStatus::Timeout);
}

TEST_CASE("script with nonzero exit yields runtime_error") {
  ExecOptions options;
  options.timeout = std::chrono::milliseconds(5000);
  const ExecutionResult result =
      execute_solution({CodeKind::Script, "import sys\nprint(3.0)\nsys.exit(2)\n"}, options);
  CHECK(result.status == ExecStatus::RuntimeError);
  CHECK_FALSE(result.answer.has_value());
}

TEST_CASE("execution results serialize with null answers") {
  const ExecutionResult result = execute_solution({CodeKind::Spec, "{not json"});
  const auto j = to_json(result);
  CHECK(j.at("answer").is_null());
  CHECK(j.at("status") == "parse_error");
}
