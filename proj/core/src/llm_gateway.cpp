#include "assertain/llm_gateway.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include <httplib.h>

#include "assertain/errors.hpp"
#include "assertain/rtl_context.hpp"  // content_hash

namespace assertain {

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::Classify: return "classify";
    case Stage::Generate: return "generate";
    case Stage::Refine: return "refine";
  }
  return "?";
}

std::uint64_t derive_seed(std::uint64_t seed_base, Stage stage, int weakness_id,
                          int iteration) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (i * 8)) & 0xff;
      h *= 0x100000001b3ull;
    }
  };
  mix(seed_base);
  mix(static_cast<std::uint64_t>(stage));
  mix(static_cast<std::uint64_t>(weakness_id));
  mix(static_cast<std::uint64_t>(iteration));
  return h;
}

struct LlmGateway::Impl {
  GatewayConfig cfg;
  std::atomic<int> calls_by_stage[3] = {0, 0, 0};
  std::atomic<int> network_ops{0};
  std::mutex seq_mutex;
  int seq_by_stage[3] = {0, 0, 0};

  const std::string& model_for(Stage s) const {
    switch (s) {
      case Stage::Classify: return cfg.classify_model;
      case Stage::Generate: return cfg.generate_model;
      case Stage::Refine: return cfg.refine_model;
    }
    return cfg.generate_model;
  }

  // Mock replay: content-hash key preferred, scripted sequence otherwise.
  // The mock path holds no transport object at all, so it cannot perform
  // network activity.
  GatewayReply complete_mock(const GatewayRequest& req) {
    namespace fs = std::filesystem;
    const fs::path stage_dir = cfg.fixture_dir / stage_name(req.stage);

    const std::string hash_name = "h_" + content_hash(req.prompt) + ".txt";
    fs::path candidate = stage_dir / hash_name;
    if (!fs::exists(candidate)) {
      int seq;
      {
        std::lock_guard lock(seq_mutex);
        seq = ++seq_by_stage[static_cast<int>(req.stage)];
      }
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d.txt", seq);
      candidate = stage_dir / buf;
    }
    std::ifstream in(candidate, std::ios::binary);
    if (!in) {
      throw FixtureMissingError("no fixture for stage '" +
                                std::string(stage_name(req.stage)) + "' at " +
                                candidate.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return {text.str(), 0.0, 1};
  }

  GatewayReply complete_live(const GatewayRequest& req) {
    const char* key = std::getenv(cfg.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw MissingCredentialsError("environment variable " + cfg.api_key_env +
                                    " is not set");
    }

    nlohmann::json body = {
        {"model", model_for(req.stage)},
        {"messages", {{{"role", "user"}, {"content", req.prompt}}}},
        {"seed", req.seed},
        {"temperature", 0},
    };
    const std::string payload = body.dump();

    httplib::Client client(cfg.base_url);
    client.set_connection_timeout(std::chrono::duration<double>(cfg.timeout_seconds));
    client.set_read_timeout(std::chrono::duration<double>(cfg.timeout_seconds));
    client.set_bearer_token_auth(key);

    std::string last_error;
    const auto start = std::chrono::steady_clock::now();
    for (int attempt = 1; attempt <= std::max(1, cfg.max_retries); ++attempt) {
      ++network_ops;
      auto res = client.Post("/v1/chat/completions", payload, "application/json");
      if (res && res->status == 200) {
        auto j = nlohmann::json::parse(res->body, nullptr, false);
        if (!j.is_discarded() && j.contains("choices") && !j["choices"].empty()) {
          const auto elapsed =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
          return {j["choices"][0]["message"]["content"].get<std::string>(),
                  elapsed.count(), attempt};
        }
        last_error = "malformed completion response";
      } else if (res) {
        last_error = "HTTP status " + std::to_string(res->status);
        if (res->status < 500 && res->status != 429) break;  // not transient
      } else {
        last_error = "transport error: " + httplib::to_string(res.error());
      }
      if (attempt < cfg.max_retries) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100u << attempt));
      }
    }
    throw TransportExhaustedError("gateway retries exhausted (" + last_error + ")");
  }
};

LlmGateway::LlmGateway(GatewayConfig cfg) : impl_(std::make_unique<Impl>()) {
  impl_->cfg = std::move(cfg);
}

LlmGateway::~LlmGateway() = default;
LlmGateway::LlmGateway(LlmGateway&&) noexcept = default;
LlmGateway& LlmGateway::operator=(LlmGateway&&) noexcept = default;

GatewayReply LlmGateway::complete(const GatewayRequest& req) {
  ++impl_->calls_by_stage[static_cast<int>(req.stage)];
  if (impl_->cfg.mode == GatewayConfig::Mode::Mock) {
    return impl_->complete_mock(req);
  }
  return impl_->complete_live(req);
}

const GatewayConfig& LlmGateway::config() const { return impl_->cfg; }

int LlmGateway::calls(Stage stage) const {
  return impl_->calls_by_stage[static_cast<int>(stage)].load();
}

int LlmGateway::total_calls() const {
  return calls(Stage::Classify) + calls(Stage::Generate) + calls(Stage::Refine);
}

int LlmGateway::network_operations() const { return impl_->network_ops.load(); }

}  // namespace assertain
