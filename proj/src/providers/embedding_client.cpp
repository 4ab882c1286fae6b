#include "fewl/providers/embedding_client.hpp"

#include <nlohmann/json.hpp>

#include "fewl/core/error.hpp"

namespace fewl {

using json = nlohmann::json;

HttpEmbedder::HttpEmbedder(EmbeddingClientConfig config, std::shared_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  if (config_.endpoint_url.empty()) {
    throw Error(ErrorCode::ConfigError, "embedding.endpoint_url", "http embedder needs embedding.endpoint_url");
  }
  if (config_.dim == 0) throw Error(ErrorCode::ConfigError, "embedding.dim", "http embedder needs embedding.dim");
  if (!transport_) throw Error(ErrorCode::ConfigError, "embedding", "http embedder has no transport");
}

std::vector<EmbeddingVector> HttpEmbedder::embed_batch(std::span<const std::string> texts) const {
  if (texts.empty()) return {};
  const json body = {{"model", config_.model}, {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  const HttpResponse res = post_with_retries(*transport_, config_.endpoint_url, body.dump(),
                                             auth_headers(config_.auth_env), config_.request_timeout, config_.retry);
  if (res.status < 200 || res.status >= 300) {
    throw Error(ErrorCode::ProviderUnavailable, identity(),
                "embedding endpoint returned HTTP " + std::to_string(res.status));
  }
  std::vector<EmbeddingVector> out;
  try {
    const json doc = json::parse(res.body);
    const auto& data = doc.at("data");
    if (data.size() != texts.size()) {
      throw Error(ErrorCode::ProviderUnavailable, identity(), "embedding endpoint returned the wrong number of vectors");
    }
    for (const auto& item : data) {
      auto values = item.at("embedding").get<std::vector<double>>();
      if (values.size() != config_.dim) {
        throw Error(ErrorCode::DimensionMismatch, identity(),
                    "embedding endpoint returned dim " + std::to_string(values.size()) + ", expected " +
                        std::to_string(config_.dim));
      }
      out.emplace_back(std::move(values));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ProviderUnavailable, identity(), std::string("malformed embedding response: ") + e.what());
  }
  return out;
}

CachedEmbedder::CachedEmbedder(std::shared_ptr<const Embedder> inner, std::shared_ptr<const ResponseCache> cache,
                               bool replay_only)
    : inner_(std::move(inner)), cache_(std::move(cache)), replay_only_(replay_only) {}

CacheKey CachedEmbedder::key_for(const std::string& identity, const std::string& text) {
  return CacheKey::make("embedding", identity, text, 0.0, 0);
}

std::vector<EmbeddingVector> CachedEmbedder::embed_batch(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out(texts.size());
  std::vector<std::size_t> misses;
  const std::string id = inner_->identity();
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (auto hit = cache_->lookup(key_for(id, texts[i]))) {
      try {
        auto values = json::parse(*hit).get<std::vector<double>>();
        if (values.size() == inner_->dim()) {
          out[i] = EmbeddingVector(std::move(values));
          continue;
        }
      } catch (const std::exception&) {
        // unreadable entry: fall through and recompute
      }
    }
    misses.push_back(i);
  }
  if (misses.empty()) return out;
  if (replay_only_) throw Error(ErrorCode::ReplayMiss, texts[misses.front()].substr(0, 40));

  std::vector<std::string> pending;
  for (std::size_t i : misses) pending.push_back(texts[i]);
  auto fresh = inner_->embed_batch(pending);
  for (std::size_t j = 0; j < misses.size(); ++j) {
    const auto values = fresh[j].values();
    if (cache_->writable()) {
      cache_->store(key_for(id, pending[j]), {{"kind", "embedding"}, {"model", id}, {"input", pending[j]}},
                    json(std::vector<double>(values.begin(), values.end())).dump());
    }
    out[misses[j]] = std::move(fresh[j]);
  }
  return out;
}

}  // namespace fewl
