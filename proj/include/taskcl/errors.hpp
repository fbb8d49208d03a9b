#pragma once

#include <stdexcept>
#include <string>

namespace taskcl {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FuelExhausted : public Error {
 public:
  FuelExhausted() : Error("beta normalization ran out of fuel") {}
};

class ArithError : public Error {
 public:
  using Error::Error;
};

class UnknownBuiltin : public Error {
 public:
  explicit UnknownBuiltin(const std::string& name)
      : Error("unknown builtin predicate '" + name + "'") {}
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, std::string expected)
      : Error("parse error at " + std::to_string(line) + ":" + std::to_string(column) +
              ": expected " + expected),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& expected() const { return expected_; }

 private:
  int line_;
  int column_;
  std::string expected_;
};

class PolarityError : public Error {
 public:
  using Error::Error;
};

// Environment-side failures during a play.
class EnvExhausted : public Error {
 public:
  explicit EnvExhausted(const std::string& site)
      : Error("environment move required at " + site + " but none left") {}
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class BadTerm : public Error {
 public:
  using Error::Error;
};

class ScriptMismatch : public Error {
 public:
  using Error::Error;
};

class DomainMissing : public Error {
 public:
  explicit DomainMissing(const std::string& site)
      : Error("no witness domain for environment site " + site) {}
};

// Session protocol.
class UnknownSession : public Error {
 public:
  explicit UnknownSession(const std::string& id) : Error("unknown session " + id) {}
};

class IllegalState : public Error {
 public:
  using Error::Error;
};

}  // namespace taskcl
