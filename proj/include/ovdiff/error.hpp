#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ovdiff {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed RDF input. Line and column are 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& message)
      : Error("syntax error at " + std::to_string(line) + ":" +
              std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnsupportedSyntax : public Error {
 public:
  using Error::Error;
};

/// Missing or invalid content in an alignment, entity list or manifest.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Alignment relation other than equivalence.
class RelationError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Embedding endpoint failure (network, HTTP status, malformed body).
class ProviderError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A precondition of the OV classification was violated.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// A cross-reference names an IRI that is not an entity of its ontology.
class ScopeError : public Error {
 public:
  ScopeError(const std::string& iri, const std::string& message)
      : Error(message + ": " + iri), iri_(iri) {}
  const std::string& iri() const noexcept { return iri_; }

 private:
  std::string iri_;
};

class KindMismatch : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace ovdiff
