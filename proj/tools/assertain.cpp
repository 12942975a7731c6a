#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "assertain/orchestrator.hpp"

namespace {

std::vector<std::string> split_commas(const std::string& raw) {
  std::vector<std::string> out;
  std::stringstream in(raw);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto begin = item.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    const auto end = item.find_last_not_of(" \t");
    out.push_back(item.substr(begin, end - begin + 1));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Generates security-focused SystemVerilog assertions for an RTL "
      "design from a CWE-guided weakness analysis."};

  std::string design, threats_raw, out_dir = "assertain-out", mock_dir;
  assertain::RunConfig config;
  std::string top_module;

  app.add_option("--design", design, "RTL source file to analyze")->required();
  app.add_option("--threats", threats_raw,
                 "Comma-separated threat class names (quote names with spaces)")
      ->required();
  app.add_option("--iterations", config.iterations,
                 "Generation calls per target weakness");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", config.gateway.seed_base, "Base seed for all LLM calls");
  app.add_option("--classify-model", config.gateway.classify_model,
                 "Model for design classification");
  app.add_option("--gen-model", config.gateway.generate_model,
                 "Model for assertion generation");
  app.add_option("--refine-model", config.gateway.refine_model,
                 "Model for the polish pass");
  app.add_option("--base-url", config.gateway.base_url,
                 "Chat-completion endpoint base URL");
  app.add_option("--mock", mock_dir,
                 "Replay LLM replies from this fixture directory (no network)");
  app.add_option("--top", top_module, "Top-level module hint");
  app.add_flag("--polish", config.polish,
               "Ask the refine model to polish the final file (re-validated)");
  app.add_flag("--intricate-suite", config.intricate_suite,
               "Request an intricate 14-20 property suite during polish");
  app.add_flag("--lint-advisory-only", config.lint_advisory_only,
               "Lint failures tag candidates instead of rejecting them");
  app.add_flag("--keep-workspace", config.keep_workspace,
               "Keep the per-run staging workspace");
  app.add_flag("--deterministic", config.deterministic,
               "Fixed timestamps for byte-stable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int cli_exit = app.exit(e);
    return cli_exit == 0 ? 0 : assertain::kInvalidArguments;
  }

  config.design_path = design;
  config.threat_names = split_commas(threats_raw);
  config.out_dir = out_dir;
  if (!top_module.empty()) config.top_module_hint = top_module;
  if (!mock_dir.empty()) {
    config.gateway.mode = assertain::GatewayConfig::Mode::Mock;
    config.gateway.fixture_dir = mock_dir;
  }
  if (config.intricate_suite) config.polish = true;

  assertain::RunSummary summary = assertain::run(config, std::cerr);
  if (summary.exit_code == assertain::kOk) {
    std::cout << assertain::render_summary_table(summary);
  }
  return summary.exit_code;
}
