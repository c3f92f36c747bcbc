#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "httplib.h"
#include "hetbounds_cli/service.hpp"

namespace hetbounds::cli {

/// Registers the /api routes and, when `ui_dir` is given, serves it as
/// static files at "/".
void mount_routes(httplib::Server& server, ModelService& service,
                  const std::optional<std::filesystem::path>& ui_dir);

/// Binds and serves until stopped. Throws Error when the port is taken.
void serve(ModelService& service, const std::string& host, int port,
           const std::optional<std::filesystem::path>& ui_dir);

}  // namespace hetbounds::cli
