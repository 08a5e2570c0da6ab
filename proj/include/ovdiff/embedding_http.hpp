#pragma once

#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ovdiff/error.hpp"
#include "ovdiff/matchers.hpp"

namespace ovdiff {

/// Environment variable naming the default embedding endpoint.
inline constexpr const char* kEmbedUrlEnv = "OVDIFF_EMBED_URL";

inline std::optional<std::string> embed_url_from_env() {
  if (const char* v = std::getenv(kEmbedUrlEnv); v && *v) return std::string(v);
  return std::nullopt;
}

/// POSTs {"texts": [...]} to an HTTP endpoint and expects
/// {"vectors": [[...], ...]} back.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(const std::string& url, int timeout_seconds = 30) : timeout_(timeout_seconds) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ProviderError("embedding URL without scheme: " + url);
    if (url.compare(0, scheme_end, "http") != 0) {
      throw ProviderError("only http:// embedding endpoints are supported: " + url);
    }
    auto path_start = url.find('/', scheme_end + 3);
    origin_ = url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
  }

  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override {
    httplib::Client client(origin_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    nlohmann::json body = {{"texts", texts}};
    auto res = client.Post(path_, body.dump(), "application/json");
    if (!res) throw ProviderError("embedding request to " + origin_ + path_ + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200) {
      throw ProviderError("embedding endpoint returned HTTP " + std::to_string(res->status));
    }
    try {
      auto j = nlohmann::json::parse(res->body);
      return j.at("vectors").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(std::string("malformed embedding response: ") + e.what());
    }
  }

 private:
  std::string origin_;
  std::string path_;
  int timeout_;
};

}  // namespace ovdiff
