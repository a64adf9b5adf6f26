#pragma once

#include <stdexcept>
#include <string>

namespace depthprobe {

// Base of every error the library throws. Callers that only care about
// "something failed" catch this; the subclasses let experiment loops record
// a precise trial status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Ground contact at or above the horizon: the flat-ground model has no solution.
class AboveHorizonError : public DomainError {
 public:
  using DomainError::DomainError;
};

class PlacementError : public Error {
 public:
  using Error::Error;
};

class CropError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

// Enough data, but no usable ground line (e.g. zero slope, too few inliers).
class DegenerateSceneError : public FitError {
 public:
  using FitError::FitError;
};

class BandEmptyError : public FitError {
 public:
  using FitError::FitError;
};

class StatisticsError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Malformed model response. `file()` names the offending file in the
// exchange directory.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& file, const std::string& what)
      : Error("protocol error in " + file + ": " + what), file_(file) {}
  const std::string& file() const noexcept { return file_; }

 private:
  std::string file_;
};

class EndpointTimeoutError : public Error {
 public:
  using Error::Error;
};

// Model process failed; the message carries captured diagnostics.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace depthprobe
