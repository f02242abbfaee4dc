#pragma once

#include <stdexcept>
#include <string>

namespace floer {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class NotAComplex : public Error {
 public:
  NotAComplex(int degree, const std::string& what)
      : Error(what), degree_(degree) {}
  int degree() const { return degree_; }

 private:
  int degree_;
};

class NotAChainMap : public Error {
 public:
  using Error::Error;
};

class NonTransverse : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& field, const std::string& what, int line = -1)
      : Error(line >= 0 ? "line " + std::to_string(line) + ": " + field + ": " + what
                        : field + ": " + what),
        field_(field),
        line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

class VersionMismatch : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

class DegenerateEndpoint : public Error {
 public:
  using Error::Error;
};

class RefinementLimit : public Error {
 public:
  using Error::Error;
};

class ActionNotCommuting : public Error {
 public:
  using Error::Error;
};

class ChainMapFailure : public Error {
 public:
  using Error::Error;
};

namespace lab {

class LabError : public Error {
 public:
  using Error::Error;
};
class NonIsolatedDegenerate : public LabError {
 public:
  using LabError::LabError;
};
class IndexInconsistent : public LabError {
 public:
  using LabError::LabError;
};
class EscapeError : public LabError {
 public:
  using LabError::LabError;
};
class StallError : public LabError {
 public:
  using LabError::LabError;
};
class ResolutionTooCoarse : public LabError {
 public:
  using LabError::LabError;
};

}  // namespace lab
}  // namespace floer
