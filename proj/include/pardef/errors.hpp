#pragma once

#include <stdexcept>
#include <string>

namespace pardef {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
  ParseError(int line, int column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

/// Principal logarithm requested at an eigenvalue on the branch cut (-1).
class BranchCut : public Error {
public:
  using Error::Error;
};

/// Rank decision too close to the threshold to be trusted.
class IllConditioned : public Error {
public:
  IllConditioned(const std::string& where, int rank_low, int rank_high)
      : Error(where + ": ill-conditioned rank cut, candidate ranks " + std::to_string(rank_low) + " and " +
              std::to_string(rank_high)),
        rank_low_(rank_low),
        rank_high_(rank_high) {}

  int rank_low() const { return rank_low_; }
  int rank_high() const { return rank_high_; }

private:
  int rank_low_;
  int rank_high_;
};

class NotACocycle : public Error {
public:
  using Error::Error;
};

/// Input that is structurally inconsistent (wrong sizes, mismatched names).
class InvalidInput : public Error {
public:
  using Error::Error;
};

}  // namespace pardef
