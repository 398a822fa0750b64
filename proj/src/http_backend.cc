// Copyright 2026 The Prosody Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <random>
#include <semaphore>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"
#include "prosody/llm.h"
#include "text_util.h"

namespace prosody {
namespace {

using json = nlohmann::json;

constexpr std::ptrdiff_t kMaxParallelLimit = 1024;

struct Endpoint {
  std::string scheme_host_port;
  std::string path_prefix;
};

Endpoint SplitBaseUrl(const std::string& base_url) {
  const std::size_t scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidInput,
                "base URL must start with http:// or https://");
  }
  const std::string scheme = base_url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::kInvalidInput,
                "unsupported URL scheme '" + scheme + "'");
  }
  const std::size_t path_start = base_url.find('/', scheme_end + 3);
  Endpoint endpoint;
  endpoint.scheme_host_port = base_url.substr(0, path_start);
  if (path_start != std::string::npos) {
    endpoint.path_prefix = base_url.substr(path_start);
    while (!endpoint.path_prefix.empty() && endpoint.path_prefix.back() == '/') {
      endpoint.path_prefix.pop_back();
    }
  }
  return endpoint;
}

// Outcome of one HTTP exchange.
struct Exchange {
  enum class Kind { kOk, kTransient, kFatal } kind = Kind::kFatal;
  ErrorCode code = ErrorCode::kNetwork;
  std::string message;
  std::string content;
  std::optional<double> retry_after_s;
};

std::string ApiErrorMessage(const std::string& body) {
  const json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_object() && doc.contains("error") && doc["error"].is_object() &&
      doc["error"].contains("message") && doc["error"]["message"].is_string()) {
    return ": " + doc["error"]["message"].get<std::string>();
  }
  return "";
}

std::string ExtractContent(const std::string& body) {
  const json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::kMalformedApiResponse, "response body is not JSON");
  }
  if (!doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array() ||
      doc["choices"].empty()) {
    throw Error(ErrorCode::kMalformedApiResponse, "response has no choices");
  }
  const json& choice = doc["choices"][0];
  if (choice.contains("message") && choice["message"].is_object() &&
      choice["message"].contains("content") &&
      choice["message"]["content"].is_string()) {
    return choice["message"]["content"].get<std::string>();
  }
  if (choice.contains("text") && choice["text"].is_string()) {
    return choice["text"].get<std::string>();
  }
  throw Error(ErrorCode::kMalformedApiResponse,
              "first choice carries no message content");
}

}  // namespace

struct HttpBackend::Impl {
  BackendConfig config;
  Endpoint endpoint;
  SleepFn sleep;
  std::counting_semaphore<kMaxParallelLimit> slots;
  std::mutex rng_mutex;
  std::mt19937_64 rng{std::random_device{}()};

  Impl(BackendConfig c, SleepFn s)
      : config(std::move(c)),
        endpoint(SplitBaseUrl(config.base_url)),
        sleep(std::move(s)),
        slots(std::min<std::ptrdiff_t>(config.max_parallel, kMaxParallelLimit)) {}

  double Jitter() {
    std::lock_guard<std::mutex> lock(rng_mutex);
    return std::uniform_real_distribution<double>(0.5, 1.0)(rng);
  }

  double BackoffSeconds(int retry, std::optional<double> retry_after) {
    double delay = config.backoff_base_s * std::pow(2.0, retry);
    delay = std::min(delay, config.backoff_max_s) * Jitter();
    if (retry_after) delay = std::max(delay, std::min(*retry_after, config.backoff_max_s));
    return delay;
  }

  Exchange Send(const std::string& body, const std::string& key) {
    httplib::Client client(endpoint.scheme_host_port);
    const auto timeout = std::chrono::duration<double>(config.timeout_s);
    client.set_connection_timeout(
        std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(
        std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(
        std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    const httplib::Headers headers = {{"Authorization", "Bearer " + key}};

    Exchange out;
    const auto result = client.Post(endpoint.path_prefix + "/chat/completions",
                                    headers, body, "application/json");
    if (!result) {
      out.kind = Exchange::Kind::kTransient;
      out.code = ErrorCode::kNetwork;
      out.message = "request failed: " + httplib::to_string(result.error());
      return out;
    }
    const int status = result->status;
    if (result->has_header("Retry-After")) {
      out.retry_after_s = internal::ParseDouble(result->get_header_value("Retry-After"));
    }
    if (status == 200) {
      out.kind = Exchange::Kind::kOk;
      out.content = ExtractContent(result->body);
      return out;
    }
    out.message = "HTTP " + std::to_string(status) + ApiErrorMessage(result->body);
    if (status == 401 || status == 403) {
      out.kind = Exchange::Kind::kFatal;
      out.code = ErrorCode::kAuth;
    } else if (status == 429) {
      out.kind = Exchange::Kind::kTransient;
      out.code = ErrorCode::kRateLimited;
    } else if (status == 408 || status >= 500) {
      out.kind = Exchange::Kind::kTransient;
      out.code = ErrorCode::kNetwork;
    } else {
      out.kind = Exchange::Kind::kFatal;
      out.code = ErrorCode::kNetwork;
    }
    return out;
  }
};

HttpBackend::HttpBackend(BackendConfig config, SleepFn sleep) {
  ValidateBackendConfig(config);
  if (!sleep) {
    sleep = [](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); };
  }
  impl_ = std::make_unique<Impl>(std::move(config), std::move(sleep));
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::Complete(const std::string& prompt) {
  const BackendConfig& config = impl_->config;
  const char* key = std::getenv(config.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw BackendError(ErrorCode::kAuth,
                       "environment variable " + config.api_key_env +
                           " holds no API key",
                       0);
  }
  const json request = {
      {"model", config.model_name},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", config.temperature},
  };
  const std::string body = request.dump();

  impl_->slots.acquire();
  struct Release {
    Impl* impl;
    ~Release() { impl->slots.release(); }
  } release{impl_.get()};

  for (int attempt = 1;; ++attempt) {
    Exchange exchange;
    try {
      exchange = impl_->Send(body, key);
    } catch (const Error& e) {
      throw BackendError(e.code(), e.what(), attempt);
    }
    switch (exchange.kind) {
      case Exchange::Kind::kOk:
        return exchange.content;
      case Exchange::Kind::kFatal:
        throw BackendError(exchange.code, exchange.message, attempt);
      case Exchange::Kind::kTransient:
        if (attempt > config.max_retries) {
          throw BackendError(exchange.code, exchange.message, attempt);
        }
        impl_->sleep(std::chrono::duration<double>(
            impl_->BackoffSeconds(attempt - 1, exchange.retry_after_s)));
        break;
    }
  }
}

}  // namespace prosody
