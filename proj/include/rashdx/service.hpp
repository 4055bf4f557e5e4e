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
#ifndef RASHDX_SERVICE_HPP_
#define RASHDX_SERVICE_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rashdx/image.hpp"
#include "rashdx/labels.hpp"
#include "rashdx/trainer.hpp"
#include "rashdx/util.hpp"

namespace rashdx::service {

inline constexpr double kDefaultThreshold = 0.6;
inline constexpr std::size_t kDefaultMaxPayload = 10u * 1024u * 1024u;

/// Shown with every result below the review threshold.
extern const char *const kManualReviewPrompt;

struct ServiceConfig {
  double threshold = kDefaultThreshold;
  std::size_t max_payload_bytes = kDefaultMaxPayload;
  std::filesystem::path reference_dir;  // <dir>/<Class>/<image>, empty = no gallery
  std::filesystem::path request_log;    // JSON lines, empty = no log
  double heatmap_alpha = 0.5;

  void validate() const;
  /// Keys service.threshold, service.max_payload_bytes,
  /// service.reference_dir, service.request_log, service.heatmap_alpha.
  static ServiceConfig from_config(const KeyValueConfig &config);
};

struct DiagnosisOptions {
  bool include_heatmap = false;
};

struct DiagnosisResult {
  ClassLabel label = ClassLabel::kBullous;
  double probability = 0.0;
  trainer::Probabilities per_class{};
  bool needs_manual_review = true;
  std::string model_version;
  std::optional<std::string> heatmap_png_base64;
  std::optional<std::string> heatmap_error;  // set when a heatmap was asked for but not possible
};

/// Keys: label, probability, per_class (name -> probability),
/// needs_manual_review, model_version, plus prompt when review is needed and
/// heatmap_png_base64 / heatmap_error when present.
nlohmann::json to_json(const DiagnosisResult &result);

/// Applies the triage rule to a probability vector: label is the argmax
/// (lowest index on ties), review is needed iff its probability < threshold.
DiagnosisResult triage(const trainer::Probabilities &per_class, double threshold, std::string model_version);

struct Health {
  std::string status;  // "loading" or "ready"
  std::string model_version;
  std::vector<std::string> class_roster;
};
nlohmann::json to_json(const Health &health);

/// The request-independent core of the server. Weights are read-only once
/// installed; `install` swaps them atomically for subsequent requests while
/// in-flight requests finish on the model they started with.
class DiagnosisService {
 public:
  explicit DiagnosisService(ServiceConfig config = {});

  void install(trainer::ClassifierModel model);
  void load_checkpoint(const std::filesystem::path &path);

  /// ServiceUnavailableError without a model, PayloadTooLargeError above
  /// the cap, DecodeError for anything that is not a PNG or JPEG.
  DiagnosisResult diagnose(std::span<const std::uint8_t> payload, const DiagnosisOptions &options = {}) const;
  DiagnosisResult diagnose_image(const ImageTensor &image, const DiagnosisOptions &options = {}) const;

  Health health() const;

  /// {"class": name, "images": [file names]} for the deployer's gallery;
  /// ValidationError for an unknown class name.
  nlohmann::json reference_listing(std::string_view class_name) const;
  /// Raw bytes of one gallery file; IngestionError when absent or when the
  /// name tries to leave the class directory.
  std::string reference_file(std::string_view class_name, std::string_view file_name) const;

  const ServiceConfig &config() const { return config_; }

 private:
  std::shared_ptr<const trainer::ClassifierModel> model() const;

  ServiceConfig config_;
  mutable std::mutex mutex_;
  std::shared_ptr<const trainer::ClassifierModel> model_;
};

/// HTTP/1.1 front end:
///   POST /api/v1/diagnose[?heatmap=1]  multipart field `image`
///   GET  /api/v1/health
///   GET  /api/v1/reference/<Class>[/<file>]
/// Errors are JSON {"error": {"kind", "message"}} with status 400 (bad
/// request / decode_error), 404 (unknown class or file), 413
/// (payload_too_large), 503 (service_unavailable) or 500.
class HttpServer {
 public:
  explicit HttpServer(DiagnosisService &service);
  ~HttpServer();
  HttpServer(const HttpServer &) = delete;
  HttpServer &operator=(const HttpServer &) = delete;

  /// Binds `host:port` (port 0 picks a free one) and returns the bound port.
  int bind(const std::string &host, int port);
  /// Serves until stop(); call after bind().
  void serve();
  /// Blocks until a concurrent serve() is accepting connections.
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rashdx::service

#endif  // RASHDX_SERVICE_HPP_
