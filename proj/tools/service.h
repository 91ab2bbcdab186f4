// Copyright 2026 The Warpgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// HTTP facade over the discovery engine. Routing and error mapping live in
// Service::handle so they can be tested without a socket; serve() binds it
// to cpp-httplib.

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "warpgate/engine.h"
#include "warpgate/error.h"

namespace warpgate::service {

struct Request {
  std::string method;  // "GET", "POST", ...
  std::string path;    // without query string
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;  // JSON
  std::map<std::string, std::string> headers;
};

/// Wire codes of ApiError bodies: {"code": ..., "message": ...}.
std::string_view api_error_code(ErrorCode code);
int http_status(ErrorCode code);

struct ServiceOptions {
  /// POST /index waits this long for the build before answering 202 with a
  /// job id. Zero always answers 202.
  std::chrono::milliseconds sync_build_wait{2000};
};

/// Single-node service holding one catalog and at most one loaded index.
/// Read endpoints run concurrently against a snapshot of the current
/// engine; builds are single-flight and swap the engine in atomically.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Installs a catalog, and optionally an engine built over it, e.g. one
  /// opened from an index file at startup.
  void install(std::shared_ptr<const Catalog> catalog,
               std::shared_ptr<const DiscoveryEngine> engine);

  Response handle(const Request& request);

  /// Blocks serving HTTP/1.1 on host:port until stop() is called.
  /// Returns false if the address cannot be bound.
  bool serve(const std::string& host, int port);
  void stop();

 private:
  struct Job {
    std::string id;
    std::string state = "running";  // running | succeeded | failed
    nlohmann::json manifest;
    nlohmann::json error;
  };
  struct Snapshot {
    std::shared_ptr<const Catalog> catalog;
    std::shared_ptr<const DiscoveryEngine> engine;
  };

  Snapshot snapshot() const;
  std::shared_ptr<const DiscoveryEngine> require_engine() const;

  Response health();
  Response post_corpus(const nlohmann::json& body);
  Response post_index(const nlohmann::json& body);
  Response get_job(const std::string& id);
  Response list_tables();
  Response get_table(const std::string& id);
  Response get_columns(const std::string& id);
  Response get_rows(const std::string& id, const Request& request);
  Response post_search(const nlohmann::json& body);
  Response post_preview(const nlohmann::json& body);

  ServiceOptions options_;
  mutable std::mutex mu_;
  std::condition_variable job_done_;
  std::shared_ptr<const Catalog> catalog_;
  std::shared_ptr<const DiscoveryEngine> engine_;
  bool building_ = false;
  std::uint64_t next_job_ = 1;
  std::map<std::string, Job> jobs_;
  std::thread builder_;
  void* server_ = nullptr;  // httplib::Server while serving
};

/// Parses "host:port" (host may be empty for all interfaces).
/// Throws InvalidArgument.
std::pair<std::string, int> parse_address(const std::string& address);

}  // namespace warpgate::service
