#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cdag {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownNodeError : public Error {
 public:
  explicit UnknownNodeError(const std::string& name)
      : Error("unknown node '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class InvalidGraphError : public Error {
 public:
  using Error::Error;
};

inline std::string join_cycle(const std::vector<std::string>& cycle) {
  std::string out;
  for (const auto& v : cycle) {
    out += v;
    out += " -> ";
  }
  if (!cycle.empty()) out += cycle.front();
  return out;
}

/// A directed cycle was found; `cycle()` lists its nodes in edge order.
class CycleError : public InvalidGraphError {
 public:
  explicit CycleError(std::vector<std::string> cycle)
      : InvalidGraphError("directed cycle: " + join_cycle(cycle)),
        cycle_(std::move(cycle)) {}
  const std::vector<std::string>& cycle() const noexcept { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

/// The cluster graph induced by a partition has a directed cycle.
class InadmissibleError : public Error {
 public:
  explicit InadmissibleError(std::vector<std::string> cycle)
      : Error("inadmissible partition, cluster cycle: " + join_cycle(cycle)),
        cycle_(std::move(cycle)) {}
  const std::vector<std::string>& cycle() const noexcept { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

class InvalidQueryError : public Error {
 public:
  using Error::Error;
};

/// Raised for an empty intervention set; callers should marginalize instead.
class EmptyInterventionError : public InvalidQueryError {
 public:
  EmptyInterventionError()
      : InvalidQueryError(
            "empty intervention set: P(y) is a plain marginal, no identification needed") {}
};

class ZeroConditioningMass : public Error {
 public:
  using Error::Error;
};

class StateSpaceError : public Error {
 public:
  using Error::Error;
};

class NotApplicableError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace cdag
