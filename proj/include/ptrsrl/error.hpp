#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ptrsrl {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number of the offending row.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class SerializationError : public Error {
 public:
  using Error::Error;
};

/// Graph cannot be mapped back onto CoNLL frames.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  DimensionError(const std::string& op, const std::string& what)
      : Error(op + ": " + what) {}
};

/// Gold and predicted corpora cannot be aligned.
class EvalError : public Error {
 public:
  EvalError(std::size_t sentence, const std::string& what)
      : Error("sentence " + std::to_string(sentence) + ": " + what),
        sentence_(sentence) {}
  std::size_t sentence() const { return sentence_; }

 private:
  std::size_t sentence_;
};

}  // namespace ptrsrl
