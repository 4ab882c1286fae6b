#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace fewl {

struct HttpResponse {
  int status = 0;  // 0 means the request never completed (DNS, connect, timeout)
  std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

// Seam between providers and the network. Tests inject counting fakes here.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post_json(const std::string& url, const std::string& body, const HttpHeaders& headers,
                                 std::chrono::milliseconds timeout) = 0;
};

class HttpTransport final : public Transport {
 public:
  HttpResponse post_json(const std::string& url, const std::string& body, const HttpHeaders& headers,
                         std::chrono::milliseconds timeout) override;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{500};
};

bool is_retryable_status(int status);

// POSTs with exponential backoff on network failures, 429 and 5xx. Returns the
// last response; callers decide what a non-2xx status means.
HttpResponse post_with_retries(Transport& transport, const std::string& url, const std::string& body,
                               const HttpHeaders& headers, std::chrono::milliseconds timeout,
                               const RetryPolicy& policy);

// Authorization header from the named environment variable, if it is set.
HttpHeaders auth_headers(const std::string& auth_env);

}  // namespace fewl
