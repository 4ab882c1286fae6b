#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace fewl {

// SHA-256 over the canonical JSON serialization of the logical request.
struct CacheKey {
  std::string digest;

  static CacheKey make(const std::string& provider_kind, const std::string& model, const std::string& prompt,
                       double temperature, int max_tokens);
  static std::string canonical(const std::string& provider_kind, const std::string& model, const std::string& prompt,
                               double temperature, int max_tokens);

  friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

struct CacheStats {
  std::size_t entries = 0;
  std::uintmax_t bytes = 0;
};

// Content-addressed store: one `<digest>.json` file per key holding
// {"request": {...}, "response": "..."}. The same layout serves as the replay
// fixture directory.
class ResponseCache {
 public:
  // A writable cache creates the directory and probes it once, raising
  // CacheIo immediately when it cannot be written.
  ResponseCache(std::filesystem::path dir, bool writable);

  const std::filesystem::path& dir() const { return dir_; }
  bool writable() const { return writable_; }

  // Missing or unreadable entries (e.g. truncated JSON) count as misses.
  std::optional<std::string> lookup(const CacheKey& key) const;
  void store(const CacheKey& key, const nlohmann::json& request, const std::string& response) const;

  // Returns the stored value on a hit; otherwise runs `compute`, stores its
  // result atomically and returns it. Concurrent misses on one key may both
  // compute; the last complete write wins.
  std::string cached_call(const CacheKey& key, const nlohmann::json& request,
                          const std::function<std::string()>& compute) const;

  CacheStats stats() const;
  std::size_t clear() const;

  std::filesystem::path entry_path(const CacheKey& key) const;

 private:
  std::filesystem::path dir_;
  bool writable_;
};

}  // namespace fewl
