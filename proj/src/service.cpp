#include "contacttrees/service.hpp"

#include <filesystem>

#include "contacttrees/error.hpp"
#include "contacttrees/layout.hpp"
#include "contacttrees/mapping.hpp"
#include "contacttrees/render.hpp"
#include "json_util.hpp"

// After Eigen: <resolv.h> defines a `_res` macro that breaks Eigen's headers.
#include <httplib.h>

namespace contacttrees {

using detail::json;

namespace {

HttpResult json_result(int status, const json& body) { return {status, body.dump(2) + "\n"}; }

HttpResult error_result(int status, std::string_view kind, std::string_view message) {
  return json_result(status, {{"error", kind}, {"message", message}});
}

HttpResult mapping_rejected(std::string rule, std::string message) {
  ValidationReport report;
  report.errors.push_back({"mapping", "mapping", std::move(rule), std::move(message)});
  return {422, report_to_json(report)};
}

}  // namespace

void LayoutService::add_dataset(std::string id, Diary diary) {
  if (datasets_.count(id)) throw Error(ErrorKind::DuplicateId, "dataset '" + id + "' loaded twice");
  datasets_.emplace(std::move(id), std::move(diary));
}

HttpResult LayoutService::health() const { return json_result(200, {{"status", "ok"}}); }

HttpResult LayoutService::list_datasets() const {
  json ids = json::array();
  for (const auto& [id, _] : datasets_) ids.push_back(id);
  return json_result(200, {{"datasets", ids}});
}

HttpResult LayoutService::list_egos(std::string_view dataset) const {
  auto it = datasets_.find(dataset);
  if (it == datasets_.end())
    return error_result(404, "UnknownDataset", "unknown dataset '" + std::string(dataset) + "'");
  const auto stats = diary_stats(it->second);
  json egos = json::array();
  for (const auto& e : stats.per_ego)
    egos.push_back({{"id", e.ego},
                    {"ties", e.ties},
                    {"contacts", e.contacts},
                    {"contacts_per_tie_min", e.contacts_per_tie_min},
                    {"contacts_per_tie_median", e.contacts_per_tie_median},
                    {"contacts_per_tie_max", e.contacts_per_tie_max}});
  return json_result(200, {{"dataset", it->first}, {"egos", egos}});
}

HttpResult LayoutService::list_mappings() const {
  json presets = json::array();
  for (const auto& name : preset_names())
    presets.push_back(
        {{"name", name}, {"spec", json::parse(serialize_mapping_json(preset_mapping(name)))}});
  return json_result(200, {{"presets", presets}});
}

HttpResult LayoutService::layout(std::string_view body) const {
  json req;
  try {
    req = json::parse(body);
  } catch (const json::parse_error& e) {
    return error_result(400, "MalformedInput", e.what());
  }
  if (!req.is_object()) return error_result(400, "MalformedInput", "request must be an object");
  for (const char* key : {"dataset", "ego"})
    if (!req.contains(key) || !req[key].is_string())
      return error_result(400, "MalformedInput", std::string("'") + key + "' must be a string");
  if (!req.contains("mapping"))
    return error_result(400, "MalformedInput", "'mapping' is required");

  const auto dataset = req["dataset"].get<std::string>();
  const auto ego = req["ego"].get<std::string>();
  auto it = datasets_.find(dataset);
  if (it == datasets_.end())
    return error_result(404, "UnknownDataset", "unknown dataset '" + dataset + "'");
  const Diary& diary = it->second;
  if (!diary.find_ego(ego)) return error_result(404, "UnknownEgo", "unknown ego '" + ego + "'");

  std::optional<Period> period;
  LayoutParams params;
  try {
    if (req.contains("period") && !req["period"].is_null()) {
      if (!req["period"].is_string())
        return error_result(400, "MalformedInput", "'period' must be a string");
      period = Period::parse(req["period"].get<std::string>());
    }
    if (req.contains("params") && !req["params"].is_null())
      params = parse_layout_params(req["params"].dump());
  } catch (const Error& e) {
    return error_result(400, to_string(e.kind()), e.what());
  }

  MappingSpec spec;
  const auto& m = req["mapping"];
  try {
    if (m.is_string())
      spec = preset_mapping(m.get<std::string>());
    else if (m.is_object())
      spec = parse_mapping_json(m.dump());
    else
      return error_result(400, "MalformedInput", "'mapping' must be a preset name or an object");
  } catch (const Error& e) {
    return mapping_rejected(e.kind() == ErrorKind::UnknownPreset ? "unknown-preset" : "bad-spec",
                            e.what());
  }
  auto report = validate_mapping(spec, diary.schema);
  if (!report.ok()) return {422, report_to_json(report)};

  try {
    return {200, scene_to_json(layout_tree(diary, ego, period, spec, params))};
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::InvalidParams:
      case ErrorKind::MalformedInput: return error_result(400, to_string(e.kind()), e.what());
      case ErrorKind::UnknownEgo: return error_result(404, to_string(e.kind()), e.what());
      case ErrorKind::InvalidMapping:
      case ErrorKind::IncompatibleKind: return mapping_rejected("bad-spec", e.what());
      default: return error_result(500, to_string(e.kind()), e.what());
    }
  }
}

HttpResult LayoutService::handle(std::string_view method, std::string_view path,
                                 std::string_view body) const {
  auto q = path.find('?');
  if (q != std::string_view::npos) path = path.substr(0, q);
  if (path.size() > 1 && path.back() == '/') path.remove_suffix(1);

  const bool get = method == "GET", post = method == "POST";
  if (path == "/api/health") return get ? health() : error_result(405, "MethodNotAllowed", path);
  if (path == "/api/datasets")
    return get ? list_datasets() : error_result(405, "MethodNotAllowed", path);
  if (path == "/api/mappings")
    return get ? list_mappings() : error_result(405, "MethodNotAllowed", path);
  if (path == "/api/layout") return post ? layout(body) : error_result(405, "MethodNotAllowed", path);

  constexpr std::string_view prefix = "/api/datasets/", suffix = "/egos";
  if (path.starts_with(prefix) && path.ends_with(suffix) &&
      path.size() > prefix.size() + suffix.size()) {
    auto id = path.substr(prefix.size(), path.size() - prefix.size() - suffix.size());
    if (id.find('/') == std::string_view::npos)
      return get ? list_egos(id) : error_result(405, "MethodNotAllowed", path);
  }
  return error_result(404, "NotFound", "no route for " + std::string(path));
}

std::string dataset_id_for(const std::string& data) {
  namespace fs = std::filesystem;
  auto comma = data.find(',');
  if (comma != std::string::npos) {
    fs::path ties(data.substr(0, comma));
    auto parent = ties.parent_path().filename().string();
    return parent.empty() ? ties.stem().string() : parent;
  }
  fs::path p(data);
  while (!p.empty() && p.filename().empty()) p = p.parent_path();
  return fs::is_directory(p) ? p.filename().string() : p.stem().string();
}

// --- HTTP -------------------------------------------------------------------

struct HttpServer::Impl {
  Impl(const LayoutService& s, ServeOptions o) : service(s), options(std::move(o)) {}
  const LayoutService& service;
  ServeOptions options;
  httplib::Server server;
};

HttpServer::HttpServer(const LayoutService& service, ServeOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    auto r = impl_->service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type + "; charset=utf-8");
  };
  auto& s = impl_->server;
  s.Get(R"(/api/.*)", handler);
  s.Post(R"(/api/.*)", handler);
  s.Put(R"(/api/.*)", handler);
  s.Delete(R"(/api/.*)", handler);
  if (impl_->options.static_dir && !s.set_mount_point("/", *impl_->options.static_dir))
    throw Error(ErrorKind::MalformedInput,
                "static directory '" + *impl_->options.static_dir + "' does not exist");
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  auto& o = impl_->options;
  if (o.port == 0) {
    int port = impl_->server.bind_to_any_port(o.host);
    if (port < 0) throw Error(ErrorKind::MalformedInput, "cannot bind " + o.host);
    return o.port = port;
  }
  if (!impl_->server.bind_to_port(o.host, o.port))
    throw Error(ErrorKind::MalformedInput,
                "cannot bind " + o.host + ":" + std::to_string(o.port));
  return o.port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace contacttrees
