#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fewl/providers/chat.hpp"
#include "fewl/providers/embedding_client.hpp"
#include "fewl/ranking/table.hpp"
#include "fewl/scoring/config.hpp"

namespace fewl {

struct EmbeddingSettings {
  std::string provider = "mock";  // mock | http
  std::size_t dim = 256;
  std::uint64_t seed = 0;
  EmbeddingClientConfig http;
};

// Everything a scoring run needs besides the dataset. Relative paths in the
// file resolve against the config file's directory.
//
//   [run]        mode, references = [...], generator, fixture_dir, cache_dir, max_concurrency
//   [scoring]    see ScoringConfig
//   [embedding]  provider, dim, seed, endpoint_url, model, auth_env, timeout_ms
//   [providers.NAME]  model, endpoint_url, auth_env, temperature, sample_temperature,
//                     max_tokens, timeout_ms, max_retries, retry_base_delay_ms,
//                     system_prompt, mock_fixture
struct RunConfig {
  ScoringConfig scoring;
  std::map<std::string, ProviderConfig> providers;
  std::map<std::string, std::filesystem::path> mock_fixtures;
  std::vector<std::string> references;
  std::string generator;
  EmbeddingSettings embedding;
  ProviderMode mode = ProviderMode::Mock;
  std::filesystem::path fixture_dir;
  std::filesystem::path cache_dir;
  int max_concurrency = 8;

  static RunConfig from_toml(const util::TomlDocument& doc, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& path);
};

struct RunOverrides {
  std::optional<ProviderMode> mode;
  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::filesystem::path> fixture_dir;
  std::optional<int> max_concurrency;
  std::optional<std::uint64_t> seed;
};

void apply_overrides(RunConfig& config, const RunOverrides& overrides);

struct BuiltResources {
  ScoringResources resources;
  std::shared_ptr<const ResponseCache> cache;  // null without a cache dir
  std::vector<std::string> identities;        // references, generator, embedder
};

// Live providers talk through `transport` (an HttpTransport when null).
BuiltResources build_resources(const RunConfig& config, std::shared_ptr<Transport> transport = nullptr);

std::shared_ptr<const Embedder> build_embedder(const RunConfig& config, std::shared_ptr<Transport> transport,
                                               std::shared_ptr<const ResponseCache> cache);

// Provenance record written next to every artifact. The digest covers every
// field except the timestamps, so identical reruns share it.
struct RunManifest {
  std::string command;
  std::string config_digest;
  std::string dataset_digest;
  std::vector<std::string> providers;
  std::uint64_t seed = 0;
  std::string mode;
  std::string tool_version;
  nlohmann::json extra = nlohmann::json::object();  // command-specific inputs
  std::string started_at;
  std::string finished_at;

  std::string digest() const;
  nlohmann::json to_json() const;
};

std::string utc_timestamp();

}  // namespace fewl
