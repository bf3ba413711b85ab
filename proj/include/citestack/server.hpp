#pragma once

#include <filesystem>
#include <string>

#include <httplib.h>

#include "citestack/api.hpp"

namespace citestack::api {

inline constexpr const char* kPlaceholderPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>citestack</title></head>"
    "<body><h1>citestack</h1><p>No portal bundle installed. The JSON API is under "
    "<a href=\"/v1/journals\">/v1/</a>.</p></body></html>";

/// Wires the pure handlers into an httplib server. `static_dir`, when it
/// exists, is served at `/`; otherwise `/` returns a placeholder page.
inline void configure_server(httplib::Server& server, const FindingsStore& store, const std::string& static_dir = "") {
  server.Get(R"(/v1/.*)", [&store](const httplib::Request& req, httplib::Response& res) {
    Params params(req.params.begin(), req.params.end());
    const auto r = handle(store, req.path, params);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  });
  if (!static_dir.empty() && std::filesystem::is_directory(static_dir)) {
    server.set_mount_point("/", static_dir);
  } else {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kPlaceholderPage, "text/html");
    });
  }
}

}  // namespace citestack::api
