#pragma once

#include <stdexcept>
#include <string>

namespace crackfield {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NonIntegralDivision : public Error {
public:
  using Error::Error;
};

class InvalidScenario : public Error {
public:
  using Error::Error;
};

class UnknownCase : public Error {
public:
  using Error::Error;
};

/// Iterative solver hit its iteration cap before reaching the tolerance.
class NoConvergence : public Error {
public:
  NoConvergence(const std::string& what, int iterations, double residual)
      : Error(what + " (iterations=" + std::to_string(iterations) +
              ", residual=" + std::to_string(residual) + ")"),
        iterations_(iterations), residual_(residual) {}

  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

private:
  int iterations_;
  double residual_;
};

class NoCrack : public Error {
public:
  using Error::Error;
};

class EmptyWindow : public Error {
public:
  using Error::Error;
};

class TipOutOfDomain : public Error {
public:
  using Error::Error;
};

class RankDeficient : public Error {
public:
  using Error::Error;
};

class Degenerate : public Error {
public:
  using Error::Error;
};

class MissingReference : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

class ValidationError : public Error {
public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

private:
  std::string field_;
};

class IoError : public Error {
public:
  using Error::Error;
};

class CorruptArchive : public Error {
public:
  using Error::Error;
};

}  // namespace crackfield
