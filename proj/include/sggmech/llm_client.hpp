#pragma once

#include <string>
#include <string_view>

#include "sggmech/text.hpp"

namespace sggmech {

struct LlmClientConfig {
  std::string url = "http://127.0.0.1:8080/generate";
  int timeout_ms = 5000;
  int retries = 1;
};

// Few-shot counter-action question with `relation` substituted.
std::string counter_action_prompt(std::string_view relation);

// POSTs {"prompt": ...} and reads {"answer": ...}. Any transport or schema
// failure after all retries raises LlmUnavailable.
class LlmCounterAction final : public CounterActionBackend {
 public:
  explicit LlmCounterAction(LlmClientConfig config);
  std::string generate(std::string_view verb) const override;

 private:
  LlmClientConfig config_;
  std::string origin_;
  std::string path_;
};

}  // namespace sggmech
