#include "zsb/http_provider.hpp"

#include <cstdlib>

#include "httplib.h"
#include "zsb/errors.hpp"

namespace zsb {

HttpProvider::HttpProvider(std::vector<ProviderEndpoint> endpoints)
    : endpoints_(std::move(endpoints)) {
  if (endpoints_.empty()) {
    throw SchemaError("http provider: at least one endpoint required");
  }
}

const ProviderEndpoint& HttpProvider::route(const std::string& model) const {
  for (const auto& ep : endpoints_) {
    for (const auto& m : ep.models) {
      if (m == "*" || m == model) return ep;
    }
  }
  throw ProviderError("no provider configured for model \"" + model + "\"");
}

nlohmann::json HttpProvider::request_body(const ModelRequest& req) {
  nlohmann::json body;
  body["model"] = req.model;
  body["temperature"] = req.sampling.temperature;
  body["max_tokens"] = req.sampling.max_tokens;
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : req.messages) {
    nlohmann::json mj;
    mj["role"] = to_string(m.role);
    if (m.image) {
      nlohmann::json parts = nlohmann::json::array();
      parts.push_back({{"type", "text"}, {"text", m.text}});
      parts.push_back(
          {{"type", "image_url"},
           {"image_url",
            {{"url", "data:" + m.image->media_type + ";base64," +
                         m.image->base64}}}});
      mj["content"] = std::move(parts);
    } else {
      mj["content"] = m.text;
    }
    messages.push_back(std::move(mj));
  }
  body["messages"] = std::move(messages);
  return body;
}

ModelResponse HttpProvider::parse_body(const nlohmann::json& body) {
  if (!body.contains("choices") || !body.at("choices").is_array() ||
      body.at("choices").empty()) {
    throw TransportError("chat response without choices");
  }
  const auto& choice = body.at("choices").at(0);
  ModelResponse resp;
  if (choice.contains("message") && choice.at("message").contains("content") &&
      choice.at("message").at("content").is_string()) {
    resp.text = choice.at("message").at("content").get<std::string>();
  } else {
    throw TransportError("chat response without message content");
  }
  resp.finish_reason = choice.value("finish_reason", "stop");
  if (body.contains("usage")) {
    const auto& u = body.at("usage");
    resp.usage.prompt_tokens = u.value("prompt_tokens", std::int64_t{0});
    resp.usage.completion_tokens = u.value("completion_tokens", std::int64_t{0});
  }
  return resp;
}

ModelResponse HttpProvider::complete(const ModelRequest& req) {
  const ProviderEndpoint& ep = route(req.model);

  std::string base = ep.base_url;
  std::string prefix;
  // Split scheme://host[:port] from any path prefix.
  const auto scheme_end = base.find("://");
  if (scheme_end != std::string::npos) {
    const auto path_begin = base.find('/', scheme_end + 3);
    if (path_begin != std::string::npos) {
      prefix = base.substr(path_begin);
      base = base.substr(0, path_begin);
    }
  }
  if (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client client(base);
  client.set_connection_timeout(ep.timeout_seconds);
  client.set_read_timeout(ep.timeout_seconds);
  httplib::Headers headers;
  if (!ep.api_key_env.empty()) {
    const char* key = std::getenv(ep.api_key_env.c_str());
    if (!key || !*key) {
      throw ProviderError("credential env var " + ep.api_key_env + " not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const std::string payload = request_body(req).dump();
  auto result = client.Post(prefix + "/chat/completions", headers, payload,
                            "application/json");
  if (!result) {
    throw TransportError("connection to " + ep.base_url +
                         " failed: " + httplib::to_string(result.error()));
  }
  const int status = result->status;
  if (status == 408 || status == 429 || status >= 500) {
    throw TransportError("provider " + ep.name + " returned HTTP " +
                         std::to_string(status));
  }
  if (status >= 400) {
    throw ProviderError("provider " + ep.name + " rejected request: HTTP " +
                        std::to_string(status) + " " + result->body);
  }
  nlohmann::json body = nlohmann::json::parse(result->body, nullptr, false);
  if (body.is_discarded()) {
    throw TransportError("provider " + ep.name + " returned invalid JSON");
  }
  return parse_body(body);
}

}  // namespace zsb
