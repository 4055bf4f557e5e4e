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
#include <fstream>
#include <numeric>
#include <thread>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "rashdx/error.hpp"
#include "rashdx/service.hpp"

// After Eigen: httplib pulls in system headers that define clashing macros.
#include <httplib.h>

using namespace rashdx;
using namespace rashdx::service;
using nlohmann::json;

namespace {

std::string png_bytes(std::uint64_t seed, int size = 48) {
  auto bytes = encode_png(quantize8(fixtures::random_image(size, size, seed)));
  return std::string(bytes.begin(), bytes.end());
}

std::vector<std::uint8_t> as_bytes(const std::string &s) { return {s.begin(), s.end()}; }

trainer::ClassifierModel model() {
  auto m = trainer::make_classifier(nn::encoder_spec("tiny_cnn"), 7);
  m.version = "test-model";
  return m;
}

// Runs an HttpServer on a free port for the lifetime of the fixture.
class LiveServer : public ::testing::Test {
 protected:
  void SetUp() override {
    ServiceConfig cfg;
    cfg.max_payload_bytes = 256 * 1024;
    cfg.reference_dir = gallery_.path();
    std::filesystem::create_directories(gallery_ / "Mpox");
    std::ofstream(gallery_ / "Mpox/b.png", std::ios::binary) << png_bytes(1, 8);
    std::ofstream(gallery_ / "Mpox/a.jpg", std::ios::binary) << "x";
    std::ofstream(gallery_ / "Mpox/notes.txt") << "skip";
    service_ = std::make_unique<DiagnosisService>(cfg);
    server_ = std::make_unique<HttpServer>(*service_);
    port_ = server_->bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_->serve(); });
    server_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    server_->stop();
    thread_.join();
  }

  httplib::Result post_image(const std::string &bytes, const std::string &query = "",
                             const std::string &field = "image") {
    httplib::MultipartFormDataItems items{{field, bytes, "x.png", "image/png"}};
    return client_->Post("/api/v1/diagnose" + query, items);
  }

  fixtures::TempDir gallery_{"gallery"};
  std::unique_ptr<DiagnosisService> service_;
  std::unique_ptr<HttpServer> server_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace

TEST(Triage, ReviewIffBelowThreshold) {
  trainer::Probabilities p{0.6, 0.4, 0, 0, 0, 0, 0, 0};
  auto r = triage(p, 0.6, "v");
  EXPECT_EQ(r.label, ClassLabel::kBullous);
  EXPECT_FALSE(r.needs_manual_review);
  EXPECT_FALSE(to_json(r).contains("prompt"));
  trainer::Probabilities q{0.59, 0.41, 0, 0, 0, 0, 0, 0};
  auto s = triage(q, 0.6, "v");
  EXPECT_TRUE(s.needs_manual_review);
  EXPECT_EQ(to_json(s)["prompt"], kManualReviewPrompt);
  EXPECT_EQ(to_json(s)["per_class"].size(), 8u);
}

TEST(Service, LifecycleAndErrors) {
  DiagnosisService svc;
  EXPECT_EQ(svc.health().status, "loading");
  EXPECT_THROW(svc.diagnose(as_bytes(png_bytes(1))), ServiceUnavailableError);
  svc.install(model());
  EXPECT_EQ(svc.health().status, "ready");
  EXPECT_EQ(svc.health().model_version, "test-model");
  EXPECT_EQ(svc.health().class_roster.size(), 8u);
  EXPECT_THROW(svc.diagnose(as_bytes("not an image")), DecodeError);

  ServiceConfig small;
  small.max_payload_bytes = 100;
  DiagnosisService capped(small);
  capped.install(model());
  EXPECT_THROW(capped.diagnose(as_bytes(png_bytes(2))), PayloadTooLargeError);
}

TEST(Service, DiagnosisIsADeterministicDistribution) {
  DiagnosisService svc;
  svc.install(model());
  auto a = svc.diagnose(as_bytes(png_bytes(3)));
  EXPECT_NEAR(std::accumulate(a.per_class.begin(), a.per_class.end(), 0.0), 1.0, 1e-6);
  EXPECT_EQ(a.needs_manual_review, a.probability < 0.6);
  auto b = svc.diagnose(as_bytes(png_bytes(3)));
  EXPECT_EQ(a.per_class, b.per_class);
  EXPECT_FALSE(a.heatmap_png_base64.has_value());
  auto h = svc.diagnose(as_bytes(png_bytes(3)), {true});
  ASSERT_TRUE(h.heatmap_png_base64.has_value());
  EXPECT_GT(h.heatmap_png_base64->size(), 100u);
}

TEST(Service, DenseModelReportsHeatmapError) {
  DiagnosisService svc;
  svc.install(trainer::make_classifier(nn::encoder_spec("tiny_mlp"), 1));
  auto r = svc.diagnose(as_bytes(png_bytes(4)), {true});
  EXPECT_FALSE(r.heatmap_png_base64.has_value());
  EXPECT_TRUE(r.heatmap_error.has_value());
}

TEST(Service, ConfigValidation) {
  ServiceConfig c;
  c.validate();
  c.threshold = 1.5;
  EXPECT_THROW(c.validate(), Error);
  auto parsed = ServiceConfig::from_config(KeyValueConfig::parse("service.threshold = 0.7\n"));
  EXPECT_DOUBLE_EQ(parsed.threshold, 0.7);
  EXPECT_EQ(parsed.max_payload_bytes, kDefaultMaxPayload);
}

TEST_F(LiveServer, HealthBeforeAndAfterInstall) {
  auto res = client_->Get("/api/v1/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["status"], "loading");
  auto unavailable = post_image(png_bytes(1));
  ASSERT_TRUE(unavailable);
  EXPECT_EQ(unavailable->status, 503);
  service_->install(model());
  EXPECT_EQ(json::parse(client_->Get("/api/v1/health")->body)["status"], "ready");
}

TEST_F(LiveServer, DiagnoseRoundTrip) {
  service_->install(model());
  auto res = post_image(png_bytes(5));
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  auto j = json::parse(res->body);
  double sum = 0.0;
  for (auto &[k, v] : j["per_class"].items()) sum += v.get<double>();
  EXPECT_EQ(j["per_class"].size(), 8u);
  EXPECT_NEAR(sum, 1.0, 1e-6);
  EXPECT_EQ(j["needs_manual_review"].get<bool>(), j["probability"].get<double>() < 0.6);
  EXPECT_EQ(json::parse(post_image(png_bytes(5))->body)["per_class"], j["per_class"]);

  auto heat = post_image(png_bytes(5), "?heatmap=1");
  ASSERT_EQ(heat->status, 200);
  EXPECT_TRUE(json::parse(heat->body).contains("heatmap_png_base64"));
}

TEST_F(LiveServer, BadRequests) {
  service_->install(model());
  auto junk = post_image("definitely not a png");
  ASSERT_TRUE(junk);
  EXPECT_EQ(junk->status, 400);
  EXPECT_EQ(json::parse(junk->body)["error"]["kind"], "decode_error");

  auto wrong_field = post_image(png_bytes(6), "", "photo");
  ASSERT_TRUE(wrong_field);
  EXPECT_EQ(wrong_field->status, 400);

  auto big = post_image(std::string(300 * 1024, 'x'));
  ASSERT_TRUE(big);
  EXPECT_EQ(big->status, 413);
  EXPECT_EQ(json::parse(big->body)["error"]["kind"], "payload_too_large");

  auto raw = client_->Post("/api/v1/diagnose", "{}", "application/json");
  ASSERT_TRUE(raw);
  EXPECT_EQ(raw->status, 400);
}

TEST_F(LiveServer, ReferenceGallery) {
  auto res = client_->Get("/api/v1/reference/Mpox");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["images"], json({"a.jpg", "b.png"}));
  auto file = client_->Get("/api/v1/reference/Mpox/b.png");
  ASSERT_EQ(file->status, 200);
  EXPECT_EQ(file->body, png_bytes(1, 8));
  EXPECT_EQ(client_->Get("/api/v1/reference/Psoriasis")->status, 404);
  EXPECT_EQ(client_->Get("/api/v1/reference/Mpox/missing.png")->status, 404);
  EXPECT_EQ(client_->Get("/api/v1/reference/Mpox/..%2F..%2Fetc")->status, 404);
}
