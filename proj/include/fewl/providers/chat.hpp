#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>

#include "fewl/core/types.hpp"
#include "fewl/providers/cache.hpp"
#include "fewl/providers/contrastive.hpp"
#include "fewl/providers/transport.hpp"

namespace fewl {

enum class ProviderMode { Live, Replay, Mock };

std::string_view to_string(ProviderMode mode);
ProviderMode parse_provider_mode(std::string_view name);

struct ProviderConfig {
  std::string name;  // reference id used in reports
  std::string endpoint_url;
  std::string model;
  double temperature = 0.0;         // single-answer queries
  double sample_temperature = 1.0;  // diversified multi-sample queries
  int max_tokens = 512;
  std::chrono::milliseconds request_timeout{60000};
  int max_retries = 3;
  std::chrono::milliseconds retry_base_delay{500};
  int max_concurrency = 8;
  ProviderMode mode = ProviderMode::Mock;
  std::filesystem::path fixture_dir;  // Replay
  std::string auth_env;               // name of the env var holding the API token
  std::string system_prompt;          // optional; sent as a system message

  // Throws ConfigError naming the missing piece (endpoint for Live, fixture
  // directory for Replay).
  void validate() const;
};

enum class ChatPurpose { Answer, Contrastive };

struct ChatRequest {
  std::string prompt;
  double temperature = 0;
  int max_tokens = 0;
  ChatPurpose purpose = ChatPurpose::Answer;
  std::string question_id;
  int sample = 0;  // >0 selects an independent diversified draw
};

// Mock backends answer from canned data or a callback.
using MockResponder = std::function<std::string(const ChatRequest&)>;

// Canned responses keyed by question id: {"answers": {"q1": "..." | ["...", ...]},
// "contrastive": {"q1": "..."}}. Sample j of a list answer picks element j mod n.
MockResponder load_mock_fixture(const std::filesystem::path& path);

// Handle to one reference LLM. Thread-safe; at most max_concurrency requests
// are in flight through one handle.
class ChatProvider {
 public:
  // `cache` may be null (no caching). Replay mode reads fixtures from
  // config.fixture_dir and never touches the transport.
  ChatProvider(ProviderConfig config, std::shared_ptr<const ResponseCache> cache,
               std::shared_ptr<Transport> transport, MockResponder mock = {});

  const ProviderConfig& config() const { return config_; }
  const std::string& name() const { return config_.name; }
  std::string identity() const;

  std::string complete(const ChatRequest& request) const;

  // h_i(x). sample 0 uses the single-answer temperature; sample j > 0 is the
  // j-th diversified draw.
  std::string answer(const Question& question, int sample = 0) const;

  // One call yielding all k pairs.
  ContrastiveParse generate_contrastive(const Question& question, int k_pairs) const;

  CacheKey key_for(const ChatRequest& request) const;
  nlohmann::json request_body(const ChatRequest& request) const;

 private:
  std::string call_live(const ChatRequest& request) const;

  ProviderConfig config_;
  std::shared_ptr<const ResponseCache> cache_;
  std::shared_ptr<const ResponseCache> fixtures_;
  std::shared_ptr<Transport> transport_;
  MockResponder mock_;
  std::unique_ptr<std::counting_semaphore<>> slots_;
};

std::string render_answer_prompt(const Question& question);

}  // namespace fewl
