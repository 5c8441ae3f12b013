#include "iwas/http.hpp"

#include <cmath>
#include <stdexcept>

#include <httplib.h>

namespace iwas {

namespace {

// Splits "http://host:port/path" into the client base and the request path.
void split_url(const std::string& url, std::string& base, std::string& path) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw std::runtime_error("endpoint URL '" + url + "' lacks a scheme");
  }
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) {
    base = url;
    path = "/";
  } else {
    base = url.substr(0, slash);
    path = url.substr(slash);
  }
}

}  // namespace

nlohmann::json http_post_json(const HttpEndpoint& ep, const nlohmann::json& body,
                              const std::string& context) {
  std::string base, path;
  split_url(ep.url, base, path);

  httplib::Client client(base);
  const auto secs = static_cast<time_t>(ep.timeout_seconds);
  const auto usecs =
      static_cast<time_t>((ep.timeout_seconds - std::floor(ep.timeout_seconds)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  if (!ep.auth_header.empty()) headers.emplace("Authorization", ep.auth_header);

  const auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    throw std::runtime_error(context + ": transport failure contacting '" + ep.url +
                             "': " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw std::runtime_error(context + ": server '" + ep.url + "' returned status " +
                             std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(context + ": schema error: response is not JSON: " +
                             e.what());
  }
}

}  // namespace iwas
