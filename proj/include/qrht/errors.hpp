#pragma once

#include <stdexcept>
#include <string>

namespace qrht {

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SingularError : std::runtime_error {
  explicit SingularError(std::size_t index)
      : std::runtime_error("zero diagonal entry at index " + std::to_string(index)),
        index(index) {}
  std::size_t index;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line(line) {}
  std::size_t line;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qrht
