#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace respgames {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes (2 = usage/parse, 3 = resource/degenerate).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax errors in model files, formulas and polynomial text.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, std::size_t column,
             const std::string& message)
      : Error(source + ":" + std::to_string(line) + ":" +
              std::to_string(column) + ": " + message),
        source_(std::move(source)),
        line_(line),
        column_(column),
        detail_(message) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string source_;
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

// A model violates a structural invariant (distribution does not sum to 1,
// unknown identifiers, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

// A valuation does not assign a parameter that the computation needs.
class MissingParameterError : public Error {
 public:
  explicit MissingParameterError(std::string param)
      : Error("missing value for parameter " + param), param_(std::move(param)) {}
  const std::string& param() const { return param_; }

 private:
  std::string param_;
};

// Term-count or path-count guard tripped.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// A responsibility degree whose denominator is identically zero while the
// kappa guard holds, or a rational function evaluated on a pole.
class DegenerateQueryError : public Error {
 public:
  using Error::Error;
};

// The query is well formed but outside what the engine decides
// (too many coalition parameters, infinite utilities, ...).
class UnsupportedQueryError : public Error {
 public:
  using Error::Error;
};

// A parameter valuation breaks one of the three admissibility conditions.
class InadmissibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace respgames
