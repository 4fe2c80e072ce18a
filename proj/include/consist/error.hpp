#pragma once

#include <stdexcept>
#include <string>

namespace consist {

/// Parameter or argument outside the domain an operation accepts.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A file parsed but its contents violate a data invariant.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid input row. The message carries the 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoFeasibleModel : public std::runtime_error {
 public:
  NoFeasibleModel() : std::runtime_error("no feasible model") {}
};

class MergeConflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace consist
