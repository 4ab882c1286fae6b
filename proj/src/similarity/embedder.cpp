#include "fewl/similarity/embedder.hpp"

#include <algorithm>
#include <cctype>

#include "fewl/core/error.hpp"

namespace fewl {

EmbeddingVector embed(const Embedder& provider, const std::string& text) {
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
    throw Error(ErrorCode::EmptyText, "embed", "cannot embed empty text");
  }
  auto out = provider.embed_batch(std::span<const std::string>(&text, 1));
  if (out.size() != 1) throw Error(ErrorCode::ProviderUnavailable, provider.identity(), "embedder returned no vector");
  if (out.front().dim() != provider.dim()) {
    throw Error(ErrorCode::DimensionMismatch, provider.identity(),
                "embedder returned dim " + std::to_string(out.front().dim()) + ", expected " +
                    std::to_string(provider.dim()));
  }
  return std::move(out.front());
}

MockEmbedder::MockEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim < 2) throw Error(ErrorCode::InvalidArgument, "mock", "mock embedding dim must be >= 2");
}

std::string MockEmbedder::identity() const {
  return "mock-3gram/dim=" + std::to_string(dim_) + "/seed=" + std::to_string(seed_);
}

std::vector<EmbeddingVector> MockEmbedder::embed_batch(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(mock_embed(t, dim_, seed_));
  return out;
}

}  // namespace fewl
