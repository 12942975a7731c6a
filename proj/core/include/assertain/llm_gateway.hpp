#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

namespace assertain {

enum class Stage { Classify, Generate, Refine };

const char* stage_name(Stage s);

struct GatewayConfig {
  enum class Mode { Live, Mock };

  std::string classify_model = "gpt-4o";
  std::string generate_model = "gpt-5";
  std::string refine_model = "gpt-4o";
  std::string base_url = "https://api.openai.com";
  std::string api_key_env = "ASSERTAIN_API_KEY";
  std::uint64_t seed_base = 0;
  double timeout_seconds = 120.0;
  int max_retries = 3;
  Mode mode = Mode::Live;
  std::filesystem::path fixture_dir;  // mock mode only
};

struct GatewayRequest {
  Stage stage = Stage::Generate;
  std::string prompt;
  std::uint64_t seed = 0;
};

struct GatewayReply {
  std::string text;  // exactly as received, no trimming
  double latency_seconds = 0.0;
  int attempts = 0;
};

// Pure function of its inputs; keeps iterations distinct while runs
// stay reproducible.
std::uint64_t derive_seed(std::uint64_t seed_base, Stage stage,
                          int weakness_id, int iteration);

class LlmGateway {
 public:
  explicit LlmGateway(GatewayConfig cfg);
  ~LlmGateway();
  LlmGateway(LlmGateway&&) noexcept;
  LlmGateway& operator=(LlmGateway&&) noexcept;

  // Thread-safe. Mock mode replays fixtures and never touches the
  // network; live mode talks chat-completions with retry/backoff.
  GatewayReply complete(const GatewayRequest& req);

  const GatewayConfig& config() const;

  int calls(Stage stage) const;
  int total_calls() const;
  int network_operations() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace assertain
