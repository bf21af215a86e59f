#pragma once

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "zsb/gateway.hpp"

namespace zsb {

// One chat-completions endpoint plus credentials. Routed by model id: the
// first provider whose list contains the model (or "*") wins.
struct ProviderEndpoint {
  std::string name;
  std::string base_url;          // e.g. https://host/v1
  std::string api_key_env;       // env var holding the bearer token
  std::vector<std::string> models{"*"};
  int timeout_seconds = 120;
};

// Chat-completions HTTP client. Images ride as data-URL content parts on user
// messages. 408/429/5xx and connection failures are transient; other 4xx are
// permanent.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(std::vector<ProviderEndpoint> endpoints);

  ModelResponse complete(const ModelRequest& req) override;
  std::string name() const override { return "http"; }

  const ProviderEndpoint& route(const std::string& model) const;

  // Wire-format helpers, exposed for tests.
  static nlohmann::json request_body(const ModelRequest& req);
  static ModelResponse parse_body(const nlohmann::json& body);

 private:
  std::vector<ProviderEndpoint> endpoints_;
};

}  // namespace zsb
