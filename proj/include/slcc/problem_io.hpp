#pragma once

#include <string>
#include <variant>

#include "slcc/system.hpp"

namespace slcc {

struct Problem {
  ControlSystem sys;
  StochasticData sd;
  TerminalSet k;
};

struct ParseError {
  int line = 0;
  std::string field;
  std::string message;

  std::string to_string() const;
};

/// Parses the problem text format (see docs/problem-format.md). Sections
/// system { ... }, stochastic { ... }, terminal_set { ... } with key = value
/// entries; matrices as row lists [[...],[...]], vectors as [...].
std::variant<Problem, ParseError> parse_problem(const std::string& text);

std::variant<Problem, ParseError> load_problem(const std::string& path);

/// The built-in worked example: four states, four controls, two mixed
/// constraints, normal + uniform noise, ball terminal set.
Problem builtin_example5();

/// The built-in problem rendered in the text format (canonical sample).
std::string builtin_example5_text();

}  // namespace slcc
