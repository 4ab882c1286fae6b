#include "fewl/providers/cache.hpp"

#include <fstream>

#include "fewl/core/error.hpp"
#include "fewl/util/files.hpp"
#include "fewl/util/sha256.hpp"

namespace fewl {

using json = nlohmann::json;

std::string CacheKey::canonical(const std::string& provider_kind, const std::string& model, const std::string& prompt,
                                double temperature, int max_tokens) {
  // nlohmann::json objects keep keys sorted, and doubles print as the
  // shortest round-trip form, so this string is platform independent.
  json obj;
  obj["kind"] = provider_kind;
  obj["model"] = model;
  obj["prompt"] = prompt;
  obj["temperature"] = temperature;
  obj["max_tokens"] = max_tokens;
  return obj.dump();
}

CacheKey CacheKey::make(const std::string& provider_kind, const std::string& model, const std::string& prompt,
                        double temperature, int max_tokens) {
  return {util::sha256_hex(canonical(provider_kind, model, prompt, temperature, max_tokens))};
}

ResponseCache::ResponseCache(std::filesystem::path dir, bool writable) : dir_(std::move(dir)), writable_(writable) {
  std::error_code ec;
  if (writable_) {
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::CacheIo, dir_.string(), "cannot create cache directory " + dir_.string());
    const auto probe = dir_ / ".write-probe";
    try {
      util::write_file_atomic(probe, "ok");
    } catch (const Error&) {
      throw Error(ErrorCode::CacheIo, dir_.string(), "cache directory " + dir_.string() + " is not writable");
    }
    std::filesystem::remove(probe, ec);
  } else if (!std::filesystem::is_directory(dir_, ec)) {
    throw Error(ErrorCode::CacheIo, dir_.string(), "fixture directory " + dir_.string() + " does not exist");
  }
}

std::filesystem::path ResponseCache::entry_path(const CacheKey& key) const { return dir_ / (key.digest + ".json"); }

std::optional<std::string> ResponseCache::lookup(const CacheKey& key) const {
  std::ifstream in(entry_path(key), std::ios::binary);
  if (!in) return std::nullopt;
  try {
    json entry = json::parse(in);
    auto it = entry.find("response");
    if (it == entry.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

void ResponseCache::store(const CacheKey& key, const json& request, const std::string& response) const {
  if (!writable_) throw Error(ErrorCode::CacheIo, dir_.string(), "cache at " + dir_.string() + " is read-only");
  json entry;
  entry["request"] = request;
  entry["response"] = response;
  try {
    util::write_file_atomic(entry_path(key), entry.dump(2) + "\n");
  } catch (const Error& e) {
    throw Error(ErrorCode::CacheIo, key.digest, e.what());
  }
}

std::string ResponseCache::cached_call(const CacheKey& key, const json& request,
                                       const std::function<std::string()>& compute) const {
  if (auto hit = lookup(key)) return *hit;
  std::string value = compute();
  store(key, request, value);
  return value;
}

CacheStats ResponseCache::stats() const {
  CacheStats s;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir_, ec)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    ++s.entries;
    s.bytes += entry.file_size();
  }
  return s;
}

std::size_t ResponseCache::clear() const {
  if (!writable_) throw Error(ErrorCode::CacheIo, dir_.string(), "cache at " + dir_.string() + " is read-only");
  std::size_t removed = 0;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir_, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      std::filesystem::remove(entry.path(), ec);
      if (!ec) ++removed;
    }
  }
  return removed;
}

}  // namespace fewl
