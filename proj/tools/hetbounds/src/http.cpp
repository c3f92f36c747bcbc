#include "hetbounds_cli/http.hpp"

#include "hetbounds/error.hpp"

namespace hetbounds::cli {
namespace {

constexpr const char* kPlaceholderIndex = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>hetbounds</title></head>
<body>
<h1>hetbounds service</h1>
<p>The explorer UI assets were not provided (start with <code>--ui-dir</code>).
The JSON API is available at <code>/api/model</code>, <code>/api/pin</code>,
<code>/api/rho</code> and <code>/api/health</code>.</p>
</body></html>
)";

void reply(httplib::Response& res, const ModelService::Response& r) {
  res.status = r.status;
  res.set_content(dump_canonical(r.body), "application/json; charset=utf-8");
}

}  // namespace

void mount_routes(httplib::Server& server, ModelService& service,
                  const std::optional<std::filesystem::path>& ui_dir) {
  server.Get("/api/health", [&service](const httplib::Request&, httplib::Response& res) {
    reply(res, service.health());
  });
  server.Get("/api/model", [&service](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> id;
    if (req.has_param("snapshot")) id = req.get_param_value("snapshot");
    reply(res, service.model(id));
  });
  server.Post("/api/pin", [&service](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.pin(req.body));
  });
  server.Post("/api/rho", [&service](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.rho(req.body));
  });
  if (ui_dir) {
    if (!server.set_mount_point("/", ui_dir->string())) {
      throw InvalidInput("UI directory '" + ui_dir->string() + "' does not exist");
    }
  } else {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kPlaceholderIndex, "text/html; charset=utf-8");
    });
  }
  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (req.path.rfind("/api/", 0) == 0 && res.body.empty()) {
      json body = {{"error", {{"code", res.status == 404 ? "not_found" : "http_error"},
                              {"message", "no route for " + req.method + " " + req.path}}}};
      res.set_content(dump_canonical(body), "application/json; charset=utf-8");
    }
  });
}

void serve(ModelService& service, const std::string& host, int port,
           const std::optional<std::filesystem::path>& ui_dir) {
  httplib::Server server;
  // httplib's default also sets SO_REUSEPORT, which lets a second server
  // share a port silently.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
  });
  mount_routes(server, service, ui_dir);
  if (!server.bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port) + " (port in use?)");
  }
  server.listen_after_bind();
}

}  // namespace hetbounds::cli
