#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dec {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- mesh construction / io -------------------------------------------------

class InvalidMesh : public Error {
 public:
  using Error::Error;
};

class NonManifoldEdge : public InvalidMesh {
 public:
  using InvalidMesh::InvalidMesh;
};

class InconsistentOrientation : public InvalidMesh {
 public:
  using InvalidMesh::InvalidMesh;
};

class DegenerateTriangle : public InvalidMesh {
 public:
  using InvalidMesh::InvalidMesh;
};

class MismatchedBoundary : public InvalidMesh {
 public:
  using InvalidMesh::InvalidMesh;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// ---- mesh generation ----------------------------------------------------------

class GenerationFailed : public Error {
 public:
  using Error::Error;
};

class TargetUnreachable : public Error {
 public:
  using Error::Error;
};

// ---- numerics -----------------------------------------------------------------

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ZeroDualVolume : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularMatrix : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Solve completed but the residual contract could not be met.
class InaccurateSolve : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RankDeficient : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class PlacementMismatch : public Error {
 public:
  using Error::Error;
};

// Invalid experiment configuration (unknown key, value out of range, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dec
