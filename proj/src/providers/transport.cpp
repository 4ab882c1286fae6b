#include "fewl/providers/transport.hpp"

#include <httplib.h>

#include <cstdlib>
#include <thread>

namespace fewl {

HttpResponse HttpTransport::post_json(const std::string& url, const std::string& body, const HttpHeaders& headers,
                                      std::chrono::milliseconds timeout) {
  // Split "scheme://host[:port]/path" into the client base and the path.
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(base);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);
  auto res = client.Post(path, hdrs, body, "application/json");
  if (!res) return {0, httplib::to_string(res.error())};
  return {res->status, res->body};
}

bool is_retryable_status(int status) { return status == 0 || status == 429 || status >= 500; }

HttpResponse post_with_retries(Transport& transport, const std::string& url, const std::string& body,
                               const HttpHeaders& headers, std::chrono::milliseconds timeout,
                               const RetryPolicy& policy) {
  HttpResponse res;
  for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
    if (attempt > 0 && policy.base_delay.count() > 0) {
      std::this_thread::sleep_for(policy.base_delay * (1LL << std::min(attempt - 1, 6)));
    }
    res = transport.post_json(url, body, headers, timeout);
    if (!is_retryable_status(res.status)) return res;
  }
  return res;
}

HttpHeaders auth_headers(const std::string& auth_env) {
  HttpHeaders h;
  if (auth_env.empty()) return h;
  if (const char* token = std::getenv(auth_env.c_str()); token && *token) {
    h.emplace_back("Authorization", std::string("Bearer ") + token);
  }
  return h;
}

}  // namespace fewl
