#include "fewl/providers/chat.hpp"

#include <algorithm>
#include <cctype>

#include "fewl/core/error.hpp"
#include "fewl/util/files.hpp"

namespace fewl {

using json = nlohmann::json;

std::string_view to_string(ProviderMode mode) {
  switch (mode) {
    case ProviderMode::Live: return "live";
    case ProviderMode::Replay: return "replay";
    case ProviderMode::Mock: return "mock";
  }
  return "?";
}

ProviderMode parse_provider_mode(std::string_view name) {
  if (name == "live") return ProviderMode::Live;
  if (name == "replay") return ProviderMode::Replay;
  if (name == "mock") return ProviderMode::Mock;
  throw Error(ErrorCode::ConfigError, std::string(name),
              "unknown provider mode '" + std::string(name) + "' (expected live, replay or mock)");
}

void ProviderConfig::validate() const {
  if (model.empty()) throw Error(ErrorCode::ConfigError, name + ".model", "provider " + name + " needs a model");
  if (temperature < 0 || sample_temperature < 0) {
    throw Error(ErrorCode::ConfigError, name + ".temperature", "temperature must be >= 0");
  }
  if (max_tokens <= 0) throw Error(ErrorCode::ConfigError, name + ".max_tokens", "max_tokens must be positive");
  if (max_concurrency <= 0) {
    throw Error(ErrorCode::ConfigError, "max_concurrency", "max_concurrency must be positive");
  }
  if (mode == ProviderMode::Live && endpoint_url.empty()) {
    throw Error(ErrorCode::ConfigError, name + ".endpoint_url", "live provider " + name + " needs endpoint_url");
  }
  if (mode == ProviderMode::Replay && fixture_dir.empty()) {
    throw Error(ErrorCode::ConfigError, "fixture_dir", "replay mode needs a fixture directory");
  }
}

std::string render_answer_prompt(const Question& question) {
  return "Answer the following question concisely and factually.\n\nQuestion: " + question.text + "\nAnswer:";
}

MockResponder load_mock_fixture(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(util::read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string(), "invalid mock fixture " + path.string() + ": " + e.what());
  }
  auto answers = std::make_shared<std::map<std::string, std::vector<std::string>>>();
  auto contrastive = std::make_shared<std::map<std::string, std::string>>();
  if (auto it = doc.find("answers"); it != doc.end()) {
    for (const auto& [qid, v] : it->items()) {
      if (v.is_string()) {
        (*answers)[qid] = {v.get<std::string>()};
      } else {
        (*answers)[qid] = v.get<std::vector<std::string>>();
      }
    }
  }
  if (auto it = doc.find("contrastive"); it != doc.end()) {
    for (const auto& [qid, v] : it->items()) (*contrastive)[qid] = v.get<std::string>();
  }
  return [answers, contrastive](const ChatRequest& req) -> std::string {
    if (req.purpose == ChatPurpose::Contrastive) {
      auto it = contrastive->find(req.question_id);
      if (it == contrastive->end()) {
        throw Error(ErrorCode::ProviderUnavailable, req.question_id, "no canned contrastive reply for " + req.question_id);
      }
      return it->second;
    }
    auto it = answers->find(req.question_id);
    if (it == answers->end() || it->second.empty()) {
      throw Error(ErrorCode::ProviderUnavailable, req.question_id, "no canned answer for " + req.question_id);
    }
    return it->second[static_cast<std::size_t>(req.sample) % it->second.size()];
  };
}

ChatProvider::ChatProvider(ProviderConfig config, std::shared_ptr<const ResponseCache> cache,
                           std::shared_ptr<Transport> transport, MockResponder mock)
    : config_(std::move(config)),
      cache_(std::move(cache)),
      transport_(std::move(transport)),
      mock_(std::move(mock)),
      slots_(std::make_unique<std::counting_semaphore<>>(std::max(1, config_.max_concurrency))) {
  config_.validate();
  if (config_.mode == ProviderMode::Replay) {
    fixtures_ = std::make_shared<const ResponseCache>(config_.fixture_dir, false);
  }
  if (config_.mode == ProviderMode::Mock && !mock_) {
    throw Error(ErrorCode::ConfigError, config_.name, "mock provider " + config_.name + " has no canned responses");
  }
  if (config_.mode == ProviderMode::Live && !transport_) {
    throw Error(ErrorCode::ConfigError, config_.name, "live provider " + config_.name + " has no transport");
  }
}

std::string ChatProvider::identity() const { return config_.name + ":" + config_.model; }

CacheKey ChatProvider::key_for(const ChatRequest& request) const {
  std::string kind = "chat";
  if (request.sample > 0) kind += "#sample=" + std::to_string(request.sample);
  std::string prompt = request.prompt;
  if (!config_.system_prompt.empty()) prompt = config_.system_prompt + "\n\n" + prompt;
  return CacheKey::make(kind, config_.model, prompt, request.temperature, request.max_tokens);
}

json ChatProvider::request_body(const ChatRequest& request) const {
  json messages = json::array();
  if (!config_.system_prompt.empty()) messages.push_back({{"role", "system"}, {"content", config_.system_prompt}});
  messages.push_back({{"role", "user"}, {"content", request.prompt}});
  return {{"model", config_.model},
          {"messages", std::move(messages)},
          {"temperature", request.temperature},
          {"max_tokens", request.max_tokens}};
}

std::string ChatProvider::call_live(const ChatRequest& request) const {
  slots_->acquire();
  struct Release {
    std::counting_semaphore<>* s;
    ~Release() { s->release(); }
  } release{slots_.get()};

  const HttpResponse res = post_with_retries(*transport_, config_.endpoint_url, request_body(request).dump(),
                                             auth_headers(config_.auth_env), config_.request_timeout,
                                             {config_.max_retries, config_.retry_base_delay});
  if (res.status < 200 || res.status >= 300) {
    throw Error(ErrorCode::ProviderUnavailable, request.question_id,
                config_.name + " returned HTTP " + std::to_string(res.status) + " for " + request.question_id);
  }
  try {
    const json body = json::parse(res.body);
    return body.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ProviderUnavailable, request.question_id,
                config_.name + " returned a malformed completion: " + e.what());
  }
}

std::string ChatProvider::complete(const ChatRequest& request) const {
  const CacheKey key = key_for(request);
  std::string text;
  switch (config_.mode) {
    case ProviderMode::Replay: {
      auto hit = fixtures_->lookup(key);
      if (!hit) throw Error(ErrorCode::ReplayMiss, request.question_id);
      text = std::move(*hit);
      break;
    }
    case ProviderMode::Live:
      if (cache_) {
        text = cache_->cached_call(key, request_body(request), [&] { return call_live(request); });
      } else {
        text = call_live(request);
      }
      break;
    case ProviderMode::Mock:
      if (cache_) {
        text = cache_->cached_call(key, request_body(request), [&] { return mock_(request); });
      } else {
        text = mock_(request);
      }
      break;
  }
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
    throw Error(ErrorCode::EmptyCompletion, request.question_id);
  }
  return text;
}

std::string ChatProvider::answer(const Question& question, int sample) const {
  ChatRequest req;
  req.prompt = render_answer_prompt(question);
  req.temperature = sample > 0 ? config_.sample_temperature : config_.temperature;
  req.max_tokens = config_.max_tokens;
  req.purpose = ChatPurpose::Answer;
  req.question_id = question.id;
  req.sample = sample;
  return complete(req);
}

ContrastiveParse ChatProvider::generate_contrastive(const Question& question, int k_pairs) const {
  ChatRequest req;
  req.prompt = render_contrastive_prompt(question.text, k_pairs);
  req.temperature = config_.temperature;
  req.max_tokens = std::max(config_.max_tokens, 64 * k_pairs);
  req.purpose = ChatPurpose::Contrastive;
  req.question_id = question.id;
  try {
    return parse_contrastive(complete(req), k_pairs);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseFailure) throw Error(ErrorCode::ParseFailure, question.id, e.what());
    throw;
  }
}

}  // namespace fewl
