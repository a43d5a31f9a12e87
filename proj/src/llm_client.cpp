#include "sggmech/llm_client.hpp"

#include "httplib.h"
#include "json.hpp"
#include "sggmech/error.hpp"

namespace sggmech {

std::string counter_action_prompt(std::string_view relation) {
  std::string prompt =
      "Question: Given the action 'ride', please generate its corresponding counter-action.\n"
      "Answer: 'be ridden by'.\n"
      "Question: Given the action 'eat', please generate its corresponding counter-action.\n"
      "Answer: 'be eaten by'.\n"
      "Question: Given the action '";
  prompt += relation;
  prompt += "', please generate its corresponding counter-action.\nAnswer:";
  return prompt;
}

LlmCounterAction::LlmCounterAction(LlmClientConfig config) : config_(std::move(config)) {
  const auto scheme_end = config_.url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::ConfigInvalid, "llm url needs a scheme: " + config_.url);
  }
  const auto path_start = config_.url.find('/', scheme_end + 3);
  origin_ = config_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : config_.url.substr(path_start);
  if (config_.timeout_ms <= 0 || config_.retries < 0) {
    throw Error(ErrorCode::ConfigInvalid, "llm timeout must be positive and retries non-negative");
  }
}

std::string LlmCounterAction::generate(std::string_view verb) const {
  httplib::Client client(origin_);
  const auto secs = config_.timeout_ms / 1000;
  const auto usecs = (config_.timeout_ms % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  const std::string body = nlohmann::json{{"prompt", counter_action_prompt(verb)}}.dump();
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    auto res = client.Post(path_, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    auto reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || !reply.contains("answer") || !reply["answer"].is_string()) {
      last_error = "response lacks a string 'answer'";
      continue;
    }
    return reply["answer"].get<std::string>();
  }
  throw Error(ErrorCode::LlmUnavailable, origin_ + path_ + ": " + last_error);
}

}  // namespace sggmech
