/**
 * Copyright 2026 The rashdx Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef RASHDX_ERROR_HPP_
#define RASHDX_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace rashdx {

/// Base of every error raised by the library. `kind()` is a stable short tag
/// used by the CLI and the service when reporting failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string &message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string &kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// A caller broke an operation's precondition.
class ContractError : public Error {
 public:
  explicit ContractError(const std::string &m) : Error("contract_error", m) {}
};

/// A file could not be found or opened.
class IngestionError : public Error {
 public:
  explicit IngestionError(const std::string &m) : Error("ingestion_error", m) {}
};

/// Malformed text input; `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string &m, std::size_t line)
      : Error("parse_error", line ? "line " + std::to_string(line) + ": " + m : m), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string &m) : Error("validation_error", m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string &m) : Error("io_error", m) {}
};

class DecodeError : public Error {
 public:
  explicit DecodeError(const std::string &m) : Error("decode_error", m) {}
};

/// Loss became NaN or infinite. `epoch()` is 0-based.
class TrainingDivergedError : public Error {
 public:
  TrainingDivergedError(const std::string &m, int epoch)
      : Error("training_diverged", m), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

class UnsupportedArchitectureError : public Error {
 public:
  explicit UnsupportedArchitectureError(const std::string &m)
      : Error("unsupported_architecture", m) {}
};

/// An upload exceeded the configured size cap.
class PayloadTooLargeError : public Error {
 public:
  explicit PayloadTooLargeError(const std::string &m) : Error("payload_too_large", m) {}
};

/// The service has no model loaded yet.
class ServiceUnavailableError : public Error {
 public:
  explicit ServiceUnavailableError(const std::string &m) : Error("service_unavailable", m) {}
};

inline void require(bool condition, const std::string &message) {
  if (!condition) throw ContractError(message);
}

}  // namespace rashdx

#endif  // RASHDX_ERROR_HPP_
