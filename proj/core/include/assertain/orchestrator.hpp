#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "assertain/llm_gateway.hpp"

namespace assertain {

enum ExitCode : int {
  kOk = 0,
  kInvalidArguments = 2,
  kDesignLoadFailure = 3,
  kUnresolvableName = 4,
  kEmptyIntersection = 5,
  kMissingCredentials = 6,
  kGatewayExhausted = 7,
  kWriteFailure = 8,
};

struct RunConfig {
  std::filesystem::path design_path;
  std::vector<std::string> threat_names;
  int iterations = 3;
  std::filesystem::path out_dir = "assertain-out";
  GatewayConfig gateway;
  bool polish = false;
  bool intricate_suite = false;
  bool lint_advisory_only = false;
  bool keep_workspace = false;
  bool deterministic = false;
  std::optional<std::string> top_module_hint;
};

struct RunSummary {
  int exit_code = kOk;
  std::string error;

  std::string design_id;
  std::string category;
  std::vector<int> c_target;
  int raw_count = 0;
  int deduped_count = 0;
  int accepted_count = 0;
  int rejected_count = 0;
  std::map<int, int> per_cwe_accepted;
  int unique_cwe_count = 0;  // distinct cwe_id > 0 among accepted
  bool polish_fallback = false;
  std::string polish_fallback_reason;

  std::string sva_path;
  std::string ledger_path;
  std::string summary_path;
  std::string workspace_path;  // only retained with keep_workspace
};

// Executes the whole pipeline; never throws, every failure maps to one
// documented exit code. Logs (including the full RTL text) go to log.
RunSummary run(const RunConfig& config, LlmGateway& gateway,
               std::ostream& log);

// Convenience overload constructing the gateway from config.gateway.
RunSummary run(const RunConfig& config, std::ostream& log);

std::string render_summary_table(const RunSummary& summary);

// Single-line structured summary record (the golden-run anchor).
std::string summary_record(const RunSummary& summary);

}  // namespace assertain
