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

#include "service.h"

#include <charconv>
#include <initializer_list>
#include <string_view>
#include <utility>
#include <vector>

#include <httplib.h>

#include "warpgate/json_io.h"

namespace warpgate::service {

namespace {

using nlohmann::json;

Response json_response(int status, const json& body) {
  return {status, body.dump(), {}};
}

Response api_error(int status, std::string_view code, const std::string& message) {
  return json_response(status, {{"code", code}, {"message", message}});
}

Response error_response(const Error& e) {
  return api_error(http_status(e.code()), api_error_code(e.code()), e.what());
}

json parse_body(const std::string& body, bool allow_empty) {
  if (body.empty() && allow_empty) return json::object();
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kInvalidArgument, std::string("request body is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  return j;
}

void check_keys(const json& body, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : body.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) fail(ErrorCode::kInvalidArgument, "unknown field '" + key + "'");
  }
}

std::string required_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end()) fail(ErrorCode::kInvalidArgument, std::string("missing field '") + key + "'");
  if (!it->is_string()) fail(ErrorCode::kInvalidArgument, std::string(key) + " must be a string");
  return it->get<std::string>();
}

std::size_t optional_count(const json& body, const char* key, std::size_t fallback) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
    fail(ErrorCode::kInvalidArgument, std::string(key) + " must be a non-negative integer");
  }
  return it->get<std::size_t>();
}

std::size_t query_count(const Request& r, const char* key, std::size_t fallback) {
  auto it = r.query.find(key);
  if (it == r.query.end()) return fallback;
  std::size_t value = 0;
  const auto& s = it->second;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size()) {
    fail(ErrorCode::kInvalidArgument, std::string(key) + " must be a non-negative integer");
  }
  return value;
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t end = std::min(path.find('/', start), path.size());
    if (end > start) parts.emplace_back(path.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

std::string_view naming_name(DatabaseNaming naming) {
  return naming == DatabaseNaming::kFlat ? "flat" : "per_subdirectory";
}

DatabaseNaming parse_naming(const std::string& text) {
  if (text == "per_subdirectory") return DatabaseNaming::kPerSubdirectory;
  if (text == "flat") return DatabaseNaming::kFlat;
  fail(ErrorCode::kInvalidArgument,
       "database_naming must be 'per_subdirectory' or 'flat', got '" + text + "'");
}

json table_summary(const TableMeta& t) {
  return {{"table_id", t.table_id},
          {"name", t.name},
          {"database", t.database},
          {"row_count", t.row_count},
          {"column_count", t.column_names.size()}};
}

}  // namespace

std::string_view api_error_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownTable: return "unknown_table";
    case ErrorCode::kUnknownColumn: return "unknown_column";
    case ErrorCode::kIndexNotBuilt: return "index_not_built";
    case ErrorCode::kBuildInProgress: return "build_in_progress";
    case ErrorCode::kIo:
    case ErrorCode::kCorruptFile:
    case ErrorCode::kVersionMismatch: return "internal";
    default: return "bad_request";
  }
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownTable:
    case ErrorCode::kUnknownColumn: return 404;
    case ErrorCode::kIndexNotBuilt:
    case ErrorCode::kBuildInProgress: return 409;
    case ErrorCode::kIo:
    case ErrorCode::kCorruptFile:
    case ErrorCode::kVersionMismatch: return 500;
    default: return 400;
  }
}

std::pair<std::string, int> parse_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos) {
    fail(ErrorCode::kInvalidArgument, "address must be host:port, got '" + address + "'");
  }
  std::string host = address.substr(0, colon);
  const std::string port_text = address.substr(colon + 1);
  int port = 0;
  auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || end != port_text.data() + port_text.size() || port < 1 ||
      port > 65535) {
    fail(ErrorCode::kInvalidArgument, "invalid port in address '" + address + "'");
  }
  if (host.empty()) host = "0.0.0.0";
  return {host, port};
}

Service::Service(ServiceOptions options) : options_(options) {}

Service::~Service() {
  stop();
  if (builder_.joinable()) builder_.join();
}

void Service::install(std::shared_ptr<const Catalog> catalog,
                      std::shared_ptr<const DiscoveryEngine> engine) {
  std::lock_guard lock(mu_);
  catalog_ = std::move(catalog);
  engine_ = std::move(engine);
}

Service::Snapshot Service::snapshot() const {
  std::lock_guard lock(mu_);
  return {catalog_, engine_};
}

std::shared_ptr<const DiscoveryEngine> Service::require_engine() const {
  auto engine = snapshot().engine;
  if (!engine) fail(ErrorCode::kIndexNotBuilt, "no index is loaded; POST /index first");
  return engine;
}

Response Service::handle(const Request& request) {
  try {
    const auto parts = split_path(request.path);
    const std::string& method = request.method;
    const bool get = method == "GET";
    const bool post = method == "POST";
    auto only = [&](bool allowed) {
      if (!allowed) fail(ErrorCode::kInvalidArgument, "method " + method + " not allowed on " + request.path);
    };
    if (parts.size() == 1 && parts[0] == "health") {
      only(get);
      return health();
    }
    if (parts.size() == 1 && parts[0] == "corpus") {
      only(post);
      return post_corpus(parse_body(request.body, false));
    }
    if (parts.size() == 1 && parts[0] == "index") {
      only(post);
      return post_index(parse_body(request.body, true));
    }
    if (parts.size() == 3 && parts[0] == "index" && parts[1] == "jobs") {
      only(get);
      return get_job(parts[2]);
    }
    if (!parts.empty() && parts[0] == "tables" && parts.size() <= 3) {
      only(get);
      if (parts.size() == 1) return list_tables();
      if (parts.size() == 2) return get_table(parts[1]);
      if (parts[2] == "columns") return get_columns(parts[1]);
      if (parts[2] == "rows") return get_rows(parts[1], request);
    }
    if (parts.size() == 1 && parts[0] == "search") {
      only(post);
      return post_search(parse_body(request.body, false));
    }
    if (parts.size() == 1 && parts[0] == "preview-join") {
      only(post);
      return post_preview(parse_body(request.body, false));
    }
    return api_error(404, "bad_request", "no route for " + method + " " + request.path);
  } catch (const Error& e) {
    return error_response(e);
  } catch (const json::exception& e) {
    return api_error(400, "bad_request", e.what());
  } catch (const std::exception& e) {
    return api_error(500, "internal", e.what());
  }
}

Response Service::health() {
  const auto snap = snapshot();
  bool building = false;
  {
    std::lock_guard lock(mu_);
    building = building_;
  }
  json manifest = nullptr;
  if (snap.engine) {
    const auto& m = snap.engine->manifest();
    manifest = {{"corpus_root", m.corpus_root},
                {"tables_indexed", m.tables_indexed},
                {"columns_indexed", m.columns_indexed},
                {"total_columns", m.total_columns},
                {"built_at", m.built_at}};
  }
  return json_response(200, {{"status", "ok"},
                             {"index_loaded", snap.engine != nullptr},
                             {"corpus_loaded", snap.catalog != nullptr},
                             {"build_in_progress", building},
                             {"manifest", manifest}});
}

Response Service::post_corpus(const json& body) {
  check_keys(body, {"root", "database_naming"});
  const std::string root = required_string(body, "root");
  const DatabaseNaming naming =
      parse_naming(body.value("database_naming", std::string("per_subdirectory")));
  {
    std::lock_guard lock(mu_);
    if (building_) fail(ErrorCode::kBuildInProgress, "an index build is running");
    building_ = true;
  }
  struct Release {
    Service* self;
    ~Release() {
      std::lock_guard lock(self->mu_);
      self->building_ = false;
    }
  } release{this};

  auto catalog = std::make_shared<Catalog>();
  const RegisterReport report = catalog->register_corpus(root, naming);
  json rejected = json::array();
  for (const auto& r : report.rejected) {
    rejected.push_back({{"path", r.path.string()}, {"reason", r.reason}});
  }
  json body_out = {{"root", catalog->corpus_root().string()},
                   {"database_naming", naming_name(naming)},
                   {"tables_loaded", report.tables_loaded},
                   {"columns", catalog->column_count()},
                   {"rejected", rejected}};
  // A new corpus invalidates the loaded index.
  std::lock_guard lock(mu_);
  catalog_ = std::move(catalog);
  engine_.reset();
  return json_response(200, body_out);
}

Response Service::post_index(const json& body) {
  check_keys(body, {"sample", "embedder", "lsh"});
  const SampleSpec sample = sample_spec_from_json(body.value("sample", json::object()));
  const EmbedderConfig emb = embedder_config_from_json(body.value("embedder", json::object()));
  LshConfig base;
  base.dimension = emb.dimension;
  const LshConfig lsh = lsh_config_from_json(body.value("lsh", json::object()), base);
  sample.validate();
  lsh.validate();
  auto embedder = std::make_shared<HashingEmbedder>(emb);

  std::unique_lock lock(mu_);
  if (!catalog_) fail(ErrorCode::kInvalidArgument, "no corpus is loaded; POST /corpus first");
  if (building_) fail(ErrorCode::kBuildInProgress, "an index build is already running");
  building_ = true;
  const std::string id = "job-" + std::to_string(next_job_++);
  jobs_[id].id = id;
  if (builder_.joinable()) builder_.join();
  auto catalog = catalog_;
  builder_ = std::thread([this, id, catalog, sample, embedder, lsh] {
    std::shared_ptr<const DiscoveryEngine> engine;
    json error;
    int status = 0;
    try {
      engine = std::make_shared<const DiscoveryEngine>(
          DiscoveryEngine::build(catalog, sample, embedder, lsh));
    } catch (const Error& e) {
      error = {{"code", api_error_code(e.code())}, {"message", e.what()}};
      status = http_status(e.code());
    } catch (const std::exception& e) {
      error = {{"code", "internal"}, {"message", e.what()}};
      status = 500;
    }
    std::lock_guard guard(mu_);
    Job& job = jobs_[id];
    if (engine) {
      job.state = "succeeded";
      job.manifest = manifest_to_json(engine->manifest());
      engine_ = std::move(engine);
    } else {
      job.state = "failed";
      job.error = std::move(error);
      job.error["status"] = status;
    }
    building_ = false;
    job_done_.notify_all();
  });

  job_done_.wait_for(lock, options_.sync_build_wait,
                     [&] { return jobs_[id].state != "running"; });
  const Job& job = jobs_[id];
  if (job.state == "succeeded") return json_response(200, job.manifest);
  if (job.state == "failed") {
    return api_error(job.error["status"].get<int>(), job.error["code"].get<std::string>(),
                     job.error["message"].get<std::string>());
  }
  return json_response(202, {{"job_id", id}, {"state", job.state}, {"poll", "/index/jobs/" + id}});
}

Response Service::get_job(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) return api_error(404, "bad_request", "unknown job '" + id + "'");
  const Job& job = it->second;
  json out = {{"job_id", job.id}, {"state", job.state}};
  if (job.state == "succeeded") out["manifest"] = job.manifest;
  if (job.state == "failed") {
    out["error"] = {{"code", job.error["code"]}, {"message", job.error["message"]}};
  }
  return json_response(200, out);
}

Response Service::list_tables() {
  const auto snap = snapshot();
  json out = json::array();
  if (snap.catalog) {
    for (const TableMeta* t : snap.catalog->tables()) out.push_back(table_summary(*t));
  }
  return json_response(200, out);
}

Response Service::get_table(const std::string& id) {
  const auto snap = snapshot();
  if (!snap.catalog) fail(ErrorCode::kUnknownTable, "unknown table '" + id + "'");
  const TableMeta& t = snap.catalog->resolve_table(id);
  json out = table_summary(t);
  out["columns"] = t.column_names;
  return json_response(200, out);
}

Response Service::get_columns(const std::string& id) {
  const auto engine = require_engine();
  const TableMeta& t = engine->catalog().resolve_table(id);
  json out = json::array();
  for (const auto& c : engine->list_candidate_columns(t.table_id)) {
    out.push_back({{"name", c.name},
                   {"index", c.index},
                   {"distinct_count", c.distinct_count},
                   {"null_count", c.null_count},
                   {"sampled", c.sampled},
                   {"indexed", c.indexed}});
  }
  return json_response(200, out);
}

Response Service::get_rows(const std::string& id, const Request& request) {
  const auto snap = snapshot();
  if (!snap.catalog) fail(ErrorCode::kUnknownTable, "unknown table '" + id + "'");
  const TableMeta& t = snap.catalog->resolve_table(id);
  const std::size_t limit = query_count(request, "limit", 100);
  const std::size_t offset = query_count(request, "offset", 0);
  const std::size_t end = std::min(t.row_count, offset + std::min(limit, t.row_count));
  std::vector<std::span<const std::string>> columns;
  for (std::size_t c = 0; c < t.column_names.size(); ++c) {
    columns.push_back(snap.catalog->column(t.table_id, c));
  }
  json rows = json::array();
  for (std::size_t r = offset; r < end; ++r) {
    json row = json::array();
    for (const auto& col : columns) row.push_back(col[r]);
    rows.push_back(std::move(row));
  }
  return json_response(200, {{"table_id", t.table_id},
                             {"columns", t.column_names},
                             {"offset", offset},
                             {"row_count", t.row_count},
                             {"rows", rows}});
}

Response Service::post_search(const json& body) {
  check_keys(body, {"table_id", "column_name", "k", "min_score", "exclude_query_table"});
  const std::string table = required_string(body, "table_id");
  const std::string column = required_string(body, "column_name");
  SearchParams params;
  params.k = optional_count(body, "k", params.k);
  if (auto it = body.find("min_score"); it != body.end() && !it->is_null()) {
    if (!it->is_number()) fail(ErrorCode::kInvalidArgument, "min_score must be a number");
    params.min_score = it->get<double>();
  }
  if (auto it = body.find("exclude_query_table"); it != body.end()) {
    if (!it->is_boolean()) fail(ErrorCode::kInvalidArgument, "exclude_query_table must be a boolean");
    params.exclude_query_table = it->get<bool>();
  }
  params.validate();

  const auto engine = require_engine();
  const Catalog& catalog = engine->catalog();
  const ColumnRef ref = catalog.column_ref(catalog.resolve_table(table).table_id, column);
  const SearchResult result = engine->search(ref, params);
  Response out = json_response(200, candidates_to_json(result.candidates));
  const auto& t = result.timing;
  out.headers["X-Warpgate-Timing"] =
      json{{"lookup_ms", t.lookup_seconds * 1e3}, {"end_to_end_ms", t.end_to_end_seconds * 1e3}}
          .dump();
  return out;
}

Response Service::post_preview(const json& body) {
  check_keys(body, {"query_table", "query_column", "candidate_table", "candidate_column",
                    "selected_columns", "limit"});
  const std::string query_table = required_string(body, "query_table");
  const std::string query_column = required_string(body, "query_column");
  const std::string candidate_table = required_string(body, "candidate_table");
  const std::string candidate_column = required_string(body, "candidate_column");
  std::vector<std::string> selected;
  if (auto it = body.find("selected_columns"); it != body.end()) {
    if (!it->is_array()) fail(ErrorCode::kInvalidArgument, "selected_columns must be an array");
    for (const auto& s : *it) {
      if (!s.is_string()) fail(ErrorCode::kInvalidArgument, "selected_columns must hold strings");
      selected.push_back(s.get<std::string>());
    }
  }
  const std::size_t limit = optional_count(body, "limit", 10);

  const auto engine = require_engine();
  const Catalog& catalog = engine->catalog();
  const TableMeta& left = catalog.resolve_table(query_table);
  const TableMeta& right = catalog.resolve_table(candidate_table);
  const ColumnRef right_key = catalog.column_ref(right.table_id, candidate_column);
  const JoinPreview p =
      engine->join_preview(left.table_id, query_column, right_key, selected, limit);
  json rows = json::array();
  for (const auto& row : p.rows) {
    json r = json::array();
    for (const auto& cell : row) r.push_back(cell ? json(*cell) : json(nullptr));
    rows.push_back(std::move(r));
  }
  return json_response(200, {{"columns", p.columns},
                             {"first_added_column", p.first_added_column},
                             {"rows", rows},
                             {"row_count", p.row_count},
                             {"matched_rows", p.matched_rows},
                             {"duplicate_keys", p.duplicate_keys},
                             {"warnings", p.warnings}});
}

bool Service::serve(const std::string& host, int port) {
  httplib::Server server;
  auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    Request r{req.method, req.path, {}, req.body};
    for (const auto& [key, value] : req.params) r.query.emplace(key, value);
    const Response out = handle(r);
    res.status = out.status;
    for (const auto& [key, value] : out.headers) res.set_header(key, value);
    res.set_content(out.body, "application/json");
  };
  server.Get(".*", dispatch);
  server.Post(".*", dispatch);
  server.Put(".*", dispatch);
  server.Delete(".*", dispatch);
  server.Patch(".*", dispatch);
  if (!server.bind_to_port(host, port)) return false;
  {
    std::lock_guard lock(mu_);
    server_ = &server;
  }
  log(LogLevel::kInfo, "listening on " + host + ":" + std::to_string(port));
  server.listen_after_bind();
  std::lock_guard lock(mu_);
  server_ = nullptr;
  return true;
}

void Service::stop() {
  std::lock_guard lock(mu_);
  if (server_ != nullptr) static_cast<httplib::Server*>(server_)->stop();
}

}  // namespace warpgate::service
