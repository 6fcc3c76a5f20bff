#pragma once

#include <chrono>
#include <string>

#include "socsim/llm/transport.hpp"

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

namespace socsim::llm {

// Plain cpp-httplib client; one connection per request.
class HttpTransport : public Transport {
 public:
  HttpResponse post(const std::string& url, const std::string& body,
                    const std::map<std::string, std::string>& headers, int timeout_ms,
                    const std::string&) override {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("llm.endpoint: missing scheme in " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    const auto timeout = std::chrono::milliseconds(timeout_ms);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                                  static_cast<long>((timeout_ms % 1000) * 1000));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                            static_cast<long>((timeout_ms % 1000) * 1000));
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);

    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(path, h, body, "application/json");
    HttpResponse out;
    out.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (!res) {
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }
};

}  // namespace socsim::llm
