#pragma once

#include <string>

#include <json.hpp>

namespace iwas {

// Where an external model server lives. Used by both the generator and the
// scorer clients.
struct HttpEndpoint {
  std::string url;  // e.g. http://127.0.0.1:8089/generate
  double timeout_seconds = 30.0;
  std::string auth_header;  // sent as Authorization when non-empty

  bool operator==(const HttpEndpoint&) const = default;
};

// POSTs body as application/json and returns the parsed 2xx response.
// Throws std::runtime_error on transport failure, non-2xx status, or a
// response that is not JSON; context names the caller in error messages.
nlohmann::json http_post_json(const HttpEndpoint& ep, const nlohmann::json& body,
                              const std::string& context);

}  // namespace iwas
