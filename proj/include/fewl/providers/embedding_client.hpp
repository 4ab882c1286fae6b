#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "fewl/providers/cache.hpp"
#include "fewl/providers/transport.hpp"
#include "fewl/similarity/embedder.hpp"

namespace fewl {

struct EmbeddingClientConfig {
  std::string endpoint_url;
  std::string model;
  std::size_t dim = 0;
  std::string auth_env;
  std::chrono::milliseconds request_timeout{60000};
  RetryPolicy retry;
};

// POST {"model", "input": [...]} -> {"data": [{"embedding": [...]}, ...]}.
class HttpEmbedder final : public Embedder {
 public:
  HttpEmbedder(EmbeddingClientConfig config, std::shared_ptr<Transport> transport);

  std::string identity() const override { return "http:" + config_.model; }
  std::size_t dim() const override { return config_.dim; }
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

 private:
  EmbeddingClientConfig config_;
  std::shared_ptr<Transport> transport_;
};

// Serves vectors from the response cache and forwards only misses. With
// `replay_only` set a miss raises ReplayMiss instead of reaching the inner
// embedder.
class CachedEmbedder final : public Embedder {
 public:
  CachedEmbedder(std::shared_ptr<const Embedder> inner, std::shared_ptr<const ResponseCache> cache,
                 bool replay_only = false);

  std::string identity() const override { return inner_->identity(); }
  std::size_t dim() const override { return inner_->dim(); }
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

  static CacheKey key_for(const std::string& identity, const std::string& text);

 private:
  std::shared_ptr<const Embedder> inner_;
  std::shared_ptr<const ResponseCache> cache_;
  bool replay_only_;
};

}  // namespace fewl
