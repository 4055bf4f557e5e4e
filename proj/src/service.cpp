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
#include "rashdx/service.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "rashdx/error.hpp"
#include "rashdx/explain.hpp"

namespace rashdx::service {

namespace fs = std::filesystem;

const char *const kManualReviewPrompt =
    "The prediction confidence is below the review threshold. Manual intervention is required: "
    "please have this image assessed by a clinician.";

void ServiceConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ValidationError("service.threshold must lie in [0, 1]");
  if (max_payload_bytes == 0) throw ValidationError("service.max_payload_bytes must be positive");
  if (!(heatmap_alpha >= 0.0 && heatmap_alpha <= 1.0)) throw ValidationError("service.heatmap_alpha must lie in [0, 1]");
}

ServiceConfig ServiceConfig::from_config(const KeyValueConfig &config) {
  ServiceConfig c;
  c.threshold = config.get_double("service.threshold", c.threshold);
  const long long cap = config.get_int("service.max_payload_bytes", static_cast<long long>(c.max_payload_bytes));
  if (cap <= 0) throw ValidationError("service.max_payload_bytes must be positive");
  c.max_payload_bytes = static_cast<std::size_t>(cap);
  c.reference_dir = config.get_string("service.reference_dir", "");
  c.request_log = config.get_string("service.request_log", "");
  c.heatmap_alpha = config.get_double("service.heatmap_alpha", c.heatmap_alpha);
  c.validate();
  return c;
}

nlohmann::json to_json(const DiagnosisResult &r) {
  nlohmann::json per_class = nlohmann::json::object();
  for (std::size_t c = 0; c < kNumClasses; ++c) per_class[std::string(kClassNames[c])] = r.per_class[c];
  nlohmann::json j = {{"label", std::string(name_of(r.label))},
                      {"probability", r.probability},
                      {"per_class", per_class},
                      {"needs_manual_review", r.needs_manual_review},
                      {"model_version", r.model_version}};
  if (r.needs_manual_review) j["prompt"] = kManualReviewPrompt;
  if (r.heatmap_png_base64) j["heatmap_png_base64"] = *r.heatmap_png_base64;
  if (r.heatmap_error) j["heatmap_error"] = *r.heatmap_error;
  return j;
}

DiagnosisResult triage(const trainer::Probabilities &per_class, double threshold, std::string model_version) {
  DiagnosisResult r;
  r.per_class = per_class;
  auto [label, p] = trainer::argmax_label(per_class);
  r.label = label;
  r.probability = p;
  r.needs_manual_review = p < threshold;
  r.model_version = std::move(model_version);
  return r;
}

nlohmann::json to_json(const Health &h) {
  return {{"status", h.status}, {"model_version", h.model_version}, {"class_roster", h.class_roster}};
}

DiagnosisService::DiagnosisService(ServiceConfig config) : config_(std::move(config)) { config_.validate(); }

void DiagnosisService::install(trainer::ClassifierModel model) {
  auto next = std::make_shared<const trainer::ClassifierModel>(std::move(model));
  std::lock_guard lock(mutex_);
  model_ = std::move(next);
}

void DiagnosisService::load_checkpoint(const fs::path &path) { install(trainer::load_classifier(path)); }

std::shared_ptr<const trainer::ClassifierModel> DiagnosisService::model() const {
  std::lock_guard lock(mutex_);
  return model_;
}

DiagnosisResult DiagnosisService::diagnose(std::span<const std::uint8_t> payload, const DiagnosisOptions &options) const {
  if (payload.size() > config_.max_payload_bytes) {
    throw PayloadTooLargeError("payload of " + std::to_string(payload.size()) + " bytes exceeds the " +
                               std::to_string(config_.max_payload_bytes) + "-byte limit");
  }
  if (!model()) throw ServiceUnavailableError("no model is loaded");
  return diagnose_image(decode_image(payload), options);
}

DiagnosisResult DiagnosisService::diagnose_image(const ImageTensor &image, const DiagnosisOptions &options) const {
  auto m = model();
  if (!m) throw ServiceUnavailableError("no model is loaded");
  DiagnosisResult r = triage(trainer::predict(*m, image), config_.threshold, m->version);
  if (options.include_heatmap) {
    try {
      auto heat = explain::gradcam_heatmap(*m, image, r.label);
      auto overlay = explain::colorize_overlay(heat, preprocess(image), config_.heatmap_alpha);
      auto png = encode_png(overlay);
      r.heatmap_png_base64 = httplib::detail::base64_encode(std::string(png.begin(), png.end()));
    } catch (const UnsupportedArchitectureError &e) {
      r.heatmap_error = e.what();
    }
  }
  return r;
}

Health DiagnosisService::health() const {
  Health h;
  auto m = model();
  h.status = m ? "ready" : "loading";
  h.model_version = m ? m->version : "";
  for (auto name : kClassNames) h.class_roster.emplace_back(name);
  return h;
}

namespace {

ClassLabel gallery_class(std::string_view name) {
  auto label = parse_class(name);
  if (!label) throw ValidationError("unknown class '" + std::string(name) + "'");
  return *label;
}

bool is_gallery_image(const fs::path &p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

nlohmann::json DiagnosisService::reference_listing(std::string_view class_name) const {
  const ClassLabel label = gallery_class(class_name);
  std::vector<std::string> names;
  if (!config_.reference_dir.empty()) {
    const fs::path dir = config_.reference_dir / std::string(name_of(label));
    std::error_code ec;
    if (fs::is_directory(dir, ec)) {
      for (const auto &entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_gallery_image(entry.path())) names.push_back(entry.path().filename().string());
      }
    }
  }
  std::sort(names.begin(), names.end());
  return {{"class", std::string(name_of(label))}, {"images", names}};
}

std::string DiagnosisService::reference_file(std::string_view class_name, std::string_view file_name) const {
  const ClassLabel label = gallery_class(class_name);
  const fs::path name(file_name);
  if (file_name.empty() || name.has_parent_path() || name.filename() != name || file_name == "." || file_name == ".." ||
      !is_gallery_image(name) || config_.reference_dir.empty()) {
    throw IngestionError("no reference image '" + std::string(file_name) + "'");
  }
  const fs::path path = config_.reference_dir / std::string(name_of(label)) / name;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("no reference image '" + std::string(file_name) + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------------------

namespace {

int status_for(const Error &e) {
  const std::string &k = e.kind();
  if (k == "payload_too_large") return 413;
  if (k == "service_unavailable") return 503;
  if (k == "decode_error" || k == "validation_error" || k == "contract_error") return 400;
  if (k == "ingestion_error") return 404;
  return 500;
}

void send_error(httplib::Response &res, int status, const std::string &kind, const std::string &message) {
  res.status = status;
  nlohmann::json body = {{"error", {{"kind", kind}, {"message", message}}}};
  res.set_content(body.dump(), "application/json");
}

void send_json(httplib::Response &res, const nlohmann::json &body) {
  res.status = 200;
  res.set_content(body.dump(), "application/json");
}

std::string content_type_for(const std::string &file) {
  const std::string ext = fs::path(file).extension().string();
  return (ext == ".png" || ext == ".PNG") ? "image/png" : "image/jpeg";
}

class RequestLog {
 public:
  explicit RequestLog(const fs::path &path) {
    if (!path.empty()) {
      out_.open(path, std::ios::app);
      if (!out_) throw IoError("cannot open request log " + path.string());
    }
  }
  void write(const nlohmann::json &entry) {
    if (!out_.is_open()) return;
    std::lock_guard lock(mutex_);
    out_ << entry.dump() << '\n';
    out_.flush();
  }

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

}  // namespace

struct HttpServer::Impl {
  DiagnosisService &service;
  httplib::Server server;
  RequestLog log;

  explicit Impl(DiagnosisService &s) : service(s), log(s.config().request_log) {}
};

HttpServer::HttpServer(DiagnosisService &service) : impl_(std::make_unique<Impl>(service)) {
  auto &srv = impl_->server;
  auto *impl = impl_.get();
  // The multipart envelope adds a little on top of the image itself; the
  // exact cap is enforced on the extracted field.
  srv.set_payload_max_length(service.config().max_payload_bytes + 64 * 1024);

  srv.Post("/api/v1/diagnose", [impl](const httplib::Request &req, httplib::Response &res) {
    const auto started = std::chrono::steady_clock::now();
    nlohmann::json entry = {{"timestamp", iso_timestamp()}, {"endpoint", "diagnose"}};
    try {
      if (!req.is_multipart_form_data()) {
        throw ValidationError("expected multipart/form-data with an 'image' field");
      }
      if (!req.has_file("image")) throw ValidationError("missing multipart field 'image'");
      const auto &file = req.get_file_value("image");
      DiagnosisOptions options;
      options.include_heatmap = req.has_param("heatmap") && req.get_param_value("heatmap") == "1";
      const auto *bytes = reinterpret_cast<const std::uint8_t *>(file.content.data());
      DiagnosisResult result = impl->service.diagnose({bytes, file.content.size()}, options);
      send_json(res, to_json(result));
      entry["label"] = std::string(name_of(result.label));
      entry["probability"] = result.probability;
      entry["needs_manual_review"] = result.needs_manual_review;
    } catch (const Error &e) {
      send_error(res, status_for(e), e.kind(), e.what());
      entry["error"] = e.kind();
    } catch (const std::exception &e) {
      send_error(res, 500, "internal_error", e.what());
      entry["error"] = "internal_error";
    }
    entry["status"] = res.status;
    entry["latency_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    impl->log.write(entry);
  });

  srv.Get("/api/v1/health", [impl](const httplib::Request &, httplib::Response &res) {
    send_json(res, to_json(impl->service.health()));
  });

  srv.Get(R"(/api/v1/reference/([^/]+))", [impl](const httplib::Request &req, httplib::Response &res) {
    try {
      send_json(res, impl->service.reference_listing(req.matches[1].str()));
    } catch (const ValidationError &e) {
      send_error(res, 404, e.kind(), e.what());
    }
  });

  srv.Get(R"(/api/v1/reference/([^/]+)/([^/]+))", [impl](const httplib::Request &req, httplib::Response &res) {
    try {
      const std::string file = req.matches[2].str();
      res.set_content(impl->service.reference_file(req.matches[1].str(), file), content_type_for(file));
      res.status = 200;
    } catch (const Error &e) {
      send_error(res, 404, e.kind(), e.what());
    }
  });

  // httplib answers oversized bodies itself; give them the documented shape.
  srv.set_error_handler([](const httplib::Request &, httplib::Response &res) {
    if (!res.body.empty()) return;
    if (res.status == 413) {
      send_error(res, 413, "payload_too_large", "request body exceeds the upload limit");
    } else if (res.status == 404) {
      send_error(res, 404, "not_found", "no such endpoint");
    } else {
      send_error(res, res.status, "http_error", "request failed");
    }
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string &host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::serve() {
  if (!impl_->server.listen_after_bind()) throw IoError("HTTP server stopped with an error");
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace rashdx::service
