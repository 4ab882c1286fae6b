#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fewl/similarity/embedding.hpp"

namespace fewl {

// Source of embeddings. Implementations must be safe to call concurrently.
class Embedder {
 public:
  virtual ~Embedder() = default;

  // Stable identity used in cache keys and run manifests.
  virtual std::string identity() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const = 0;
};

// Rejects empty text before touching the provider.
EmbeddingVector embed(const Embedder& provider, const std::string& text);

class MockEmbedder final : public Embedder {
 public:
  MockEmbedder(std::size_t dim, std::uint64_t seed);

  std::string identity() const override;
  std::size_t dim() const override { return dim_; }
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

}  // namespace fewl
