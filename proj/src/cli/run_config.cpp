#include "fewl/cli/run_config.hpp"

#include <ctime>

#include "fewl/core/error.hpp"
#include "fewl/util/sha256.hpp"

namespace fewl {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

ProviderConfig provider_from_toml(const util::TomlDocument& doc, const std::string& name) {
  const std::string t = "providers." + name + ".";
  ProviderConfig p;
  p.name = name;
  p.model = doc.get_string(t + "model").value_or(name);
  p.endpoint_url = doc.get_string(t + "endpoint_url").value_or("");
  p.auth_env = doc.get_string(t + "auth_env").value_or("");
  p.system_prompt = doc.get_string(t + "system_prompt").value_or("");
  if (auto v = doc.get_double(t + "temperature")) p.temperature = *v;
  if (auto v = doc.get_double(t + "sample_temperature")) p.sample_temperature = *v;
  if (auto v = doc.get_int(t + "max_tokens")) p.max_tokens = static_cast<int>(*v);
  if (auto v = doc.get_int(t + "timeout_ms")) p.request_timeout = std::chrono::milliseconds(*v);
  if (auto v = doc.get_int(t + "max_retries")) p.max_retries = static_cast<int>(*v);
  if (auto v = doc.get_int(t + "retry_base_delay_ms")) p.retry_base_delay = std::chrono::milliseconds(*v);
  return p;
}

}  // namespace

RunConfig RunConfig::from_toml(const util::TomlDocument& doc, const std::filesystem::path& base_dir) {
  RunConfig c;
  c.scoring = ScoringConfig::from_toml(doc);

  if (auto v = doc.get_string("run.mode")) c.mode = parse_provider_mode(*v);
  if (auto v = doc.get_string("run.fixture_dir")) c.fixture_dir = resolve(base_dir, *v);
  if (auto v = doc.get_string("run.cache_dir")) c.cache_dir = resolve(base_dir, *v);
  if (auto v = doc.get_int("run.max_concurrency")) c.max_concurrency = static_cast<int>(*v);

  for (const auto& name : doc.subtables("providers")) {
    c.providers[name] = provider_from_toml(doc, name);
    if (auto f = doc.get_string("providers." + name + ".mock_fixture")) c.mock_fixtures[name] = resolve(base_dir, *f);
  }
  auto refs = doc.get_string_array("run.references");
  if (!refs || refs->empty()) {
    throw Error(ErrorCode::ConfigError, "run.references", "missing required config key run.references");
  }
  c.references = *refs;
  c.generator = doc.get_string("run.generator").value_or(c.references.front());
  for (const auto& name : c.references) {
    if (!c.providers.count(name)) {
      throw Error(ErrorCode::ConfigError, "providers." + name, "reference " + name + " has no [providers." + name + "] table");
    }
  }
  if (!c.providers.count(c.generator)) {
    throw Error(ErrorCode::ConfigError, "run.generator", "generator " + c.generator + " has no provider table");
  }

  auto& e = c.embedding;
  if (auto v = doc.get_string("embedding.provider")) e.provider = *v;
  if (e.provider != "mock" && e.provider != "http") {
    throw Error(ErrorCode::ConfigError, "embedding.provider", "embedding.provider must be mock or http");
  }
  if (auto v = doc.get_int("embedding.dim")) {
    if (*v < 2) throw Error(ErrorCode::ConfigError, "embedding.dim", "embedding.dim must be at least 2");
    e.dim = static_cast<std::size_t>(*v);
  }
  if (auto v = doc.get_int("embedding.seed")) e.seed = static_cast<std::uint64_t>(*v);
  e.http.dim = e.dim;
  e.http.endpoint_url = doc.get_string("embedding.endpoint_url").value_or("");
  e.http.model = doc.get_string("embedding.model").value_or("");
  e.http.auth_env = doc.get_string("embedding.auth_env").value_or("");
  if (auto v = doc.get_int("embedding.timeout_ms")) e.http.request_timeout = std::chrono::milliseconds(*v);
  if (e.provider == "http" && (e.http.endpoint_url.empty() || e.http.model.empty())) {
    throw Error(ErrorCode::ConfigError, "embedding.endpoint_url", "http embedding needs endpoint_url and model");
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  auto doc = util::TomlDocument::load(path.string());
  return from_toml(doc, path.parent_path());
}

void apply_overrides(RunConfig& config, const RunOverrides& o) {
  if (o.mode) config.mode = *o.mode;
  if (o.cache_dir) config.cache_dir = *o.cache_dir;
  if (o.fixture_dir) config.fixture_dir = *o.fixture_dir;
  if (o.max_concurrency) config.max_concurrency = *o.max_concurrency;
  if (o.seed) config.scoring.seed = *o.seed;
}

std::shared_ptr<const Embedder> build_embedder(const RunConfig& config, std::shared_ptr<Transport> transport,
                                               std::shared_ptr<const ResponseCache> cache) {
  const auto& e = config.embedding;
  if (e.provider == "mock") return std::make_shared<MockEmbedder>(e.dim, e.seed);
  auto http = std::make_shared<HttpEmbedder>(e.http, transport ? transport : std::make_shared<HttpTransport>());
  if (config.mode == ProviderMode::Replay) {
    auto fixtures = std::make_shared<const ResponseCache>(config.fixture_dir, false);
    return std::make_shared<CachedEmbedder>(http, fixtures, true);
  }
  if (cache) return std::make_shared<CachedEmbedder>(http, cache, false);
  return http;
}

BuiltResources build_resources(const RunConfig& config, std::shared_ptr<Transport> transport) {
  if (config.max_concurrency <= 0) {
    throw Error(ErrorCode::ConfigError, "max_concurrency", "max_concurrency must be positive");
  }
  BuiltResources out;
  if (!config.cache_dir.empty() && config.mode != ProviderMode::Replay) {
    out.cache = std::make_shared<const ResponseCache>(config.cache_dir, true);
  }
  if (config.mode == ProviderMode::Live && !transport) transport = std::make_shared<HttpTransport>();

  std::map<std::string, std::shared_ptr<const ChatProvider>> built;
  auto provider = [&](const std::string& name) {
    if (auto it = built.find(name); it != built.end()) return it->second;
    ProviderConfig p = config.providers.at(name);
    p.mode = config.mode;
    p.fixture_dir = config.fixture_dir;
    p.max_concurrency = config.max_concurrency;
    MockResponder mock;
    if (config.mode == ProviderMode::Mock) {
      auto f = config.mock_fixtures.find(name);
      if (f == config.mock_fixtures.end()) {
        throw Error(ErrorCode::ConfigError, "providers." + name + ".mock_fixture",
                    "mock mode needs providers." + name + ".mock_fixture");
      }
      mock = load_mock_fixture(f->second);
    }
    auto cp = std::make_shared<const ChatProvider>(std::move(p), out.cache, transport, std::move(mock));
    built[name] = cp;
    return cp;
  };

  for (const auto& name : config.references) {
    out.resources.references.push_back(provider(name));
    out.identities.push_back(out.resources.references.back()->identity());
  }
  out.resources.generator = provider(config.generator);
  out.identities.push_back("generator=" + out.resources.generator->identity());
  out.resources.embedder = build_embedder(config, transport, out.cache);
  out.identities.push_back("embedder=" + out.resources.embedder->identity());
  out.resources.max_concurrency = config.max_concurrency;
  return out;
}

std::string RunManifest::digest() const {
  nlohmann::json j = to_json();
  j.erase("started_at");
  j.erase("finished_at");
  j.erase("manifest_digest");
  return util::sha256_hex(j.dump());
}

nlohmann::json RunManifest::to_json() const {
  return {{"command", command},           {"config_digest", config_digest}, {"dataset_digest", dataset_digest},
          {"providers", providers},       {"seed", seed},                   {"mode", mode},
          {"tool_version", tool_version}, {"inputs", extra},                {"started_at", started_at},
          {"finished_at", finished_at}};
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace fewl
