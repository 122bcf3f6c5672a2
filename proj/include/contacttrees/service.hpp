#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "contacttrees/diary.hpp"

namespace contacttrees {

struct HttpResult {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Read-only layout API over diaries loaded at startup. `handle` is safe to
/// call from many threads at once.
class LayoutService {
 public:
  /// Throws DuplicateId when the id is taken.
  void add_dataset(std::string id, Diary diary);
  const std::map<std::string, Diary, std::less<>>& datasets() const { return datasets_; }

  HttpResult handle(std::string_view method, std::string_view path, std::string_view body) const;

  HttpResult health() const;
  HttpResult list_datasets() const;
  HttpResult list_egos(std::string_view dataset) const;
  HttpResult list_mappings() const;
  HttpResult layout(std::string_view body) const;

 private:
  std::map<std::string, Diary, std::less<>> datasets_;
};

/// Dataset id for a --data argument: the file or directory stem.
std::string dataset_id_for(const std::string& data);

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::string> static_dir;
};

/// HTTP front end for a LayoutService.
class HttpServer {
 public:
  HttpServer(const LayoutService& service, ServeOptions options);
  ~HttpServer();

  /// Binds the socket and returns the port. Throws MalformedInput on failure.
  int bind();
  /// Serves until stop() is called.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace contacttrees
