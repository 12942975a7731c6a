#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "assertain/orchestrator.hpp"

using namespace assertain;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = fs::path(ASSERTAIN_TEST_DIR) / "fixtures";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunConfig mock_config(const char* fixture_sub, const fs::path& out_dir) {
  RunConfig cfg;
  cfg.design_path = kFixtures / "dmi_jtag_like.sv";
  cfg.threat_names = {"Improper Access control"};
  cfg.iterations = 1;
  cfg.out_dir = out_dir;
  cfg.deterministic = true;
  cfg.gateway.mode = GatewayConfig::Mode::Mock;
  cfg.gateway.fixture_dir = kFixtures / fixture_sub;
  return cfg;
}

}  // namespace

TEST_CASE("golden mock run succeeds end to end") {
  const fs::path out_dir = fs::temp_directory_path() / "orc_golden";
  fs::remove_all(out_dir);
  RunConfig cfg = mock_config("mock_run", out_dir);
  LlmGateway gw(cfg.gateway);
  std::ostringstream log;
  const RunSummary s = run(cfg, gw, log);

  CHECK(s.exit_code == kOk);
  CHECK(s.category == "Memory Components");
  CHECK(s.c_target == std::vector<int>{1189, 1220, 1222, 1223, 1224});
  CHECK(s.deduped_count == 7);
  CHECK(s.accepted_count == 6);
  CHECK(s.rejected_count == 1);
  CHECK(s.unique_cwe_count == 5);
  CHECK(s.per_cwe_accepted.at(0) == 1);
  CHECK(s.per_cwe_accepted.at(1220) == 1);

  // the log carries the full RTL for traceability
  CHECK(log.str().find(slurp(cfg.design_path)) != std::string::npos);

  CHECK(fs::exists(out_dir / "assertions.sva"));
  CHECK(fs::exists(out_dir / "rejections.jsonl"));
  CHECK(fs::exists(out_dir / "summary"));
  // workspace removed without keep-workspace
  CHECK_FALSE(fs::exists(out_dir / ".workspace"));

  const std::string ledger = slurp(out_dir / "rejections.jsonl");
  CHECK(ledger.find("ghost_dbg_unlock") != std::string::npos);
  CHECK(ledger.find("MissingIdentifier") != std::string::npos);

  const std::string record = slurp(out_dir / "summary");
  CHECK(record.find("\"exit_code\":0") != std::string::npos);
  CHECK(record.find(s.design_id) != std::string::npos);

  const std::string table = render_summary_table(s);
  CHECK(table.find("Memory Components") != std::string::npos);
  CHECK(table.find("CWE-1224") != std::string::npos);
}

TEST_CASE("deterministic mode yields byte-identical outputs across runs") {
  const fs::path out_a = fs::temp_directory_path() / "orc_det_a";
  const fs::path out_b = fs::temp_directory_path() / "orc_det_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);
  std::ostringstream log;
  // identical out_dir text would trivially match; use the same path twice
  run(mock_config("mock_run", out_a), log);
  run(mock_config("mock_run", out_a), log);
  const std::string sva_first = slurp(out_a / "assertions.sva");
  run(mock_config("mock_run", out_b), log);

  CHECK(sva_first == slurp(out_a / "assertions.sva"));
  for (const char* name : {"assertions.sva", "rejections.jsonl"}) {
    CHECK(slurp(out_a / name) == slurp(out_b / name));
  }
}

TEST_CASE("keep-workspace retains the staged JSONL") {
  const fs::path out_dir = fs::temp_directory_path() / "orc_keep";
  fs::remove_all(out_dir);
  RunConfig cfg = mock_config("mock_run", out_dir);
  cfg.keep_workspace = true;
  std::ostringstream log;
  const RunSummary s = run(cfg, log);
  CHECK(s.exit_code == kOk);
  CHECK(fs::exists(out_dir / ".workspace" / "raw_properties.jsonl"));
  CHECK(s.workspace_path == (out_dir / ".workspace").string());
}

TEST_CASE("invalid configurations exit 2 without running anything") {
  std::ostringstream log;
  RunConfig cfg = mock_config("mock_run", fs::temp_directory_path() / "orc_bad");
  cfg.design_path.clear();
  CHECK(run(cfg, log).exit_code == kInvalidArguments);

  cfg = mock_config("mock_run", fs::temp_directory_path() / "orc_bad");
  cfg.threat_names.clear();
  CHECK(run(cfg, log).exit_code == kInvalidArguments);

  cfg = mock_config("mock_run", fs::temp_directory_path() / "orc_bad");
  cfg.iterations = 0;
  CHECK(run(cfg, log).exit_code == kInvalidArguments);
}

TEST_CASE("missing design file exits 3") {
  std::ostringstream log;
  RunConfig cfg = mock_config("mock_run", fs::temp_directory_path() / "orc_e3");
  cfg.design_path = kFixtures / "absent.sv";
  CHECK(run(cfg, log).exit_code == kDesignLoadFailure);
}

TEST_CASE("unresolvable threat name exits 4 before any gateway call") {
  std::ostringstream log;
  RunConfig cfg = mock_config("mock_run", fs::temp_directory_path() / "orc_e4");
  cfg.threat_names = {"Entirely Imaginary Threat Class"};
  LlmGateway gw(cfg.gateway);
  const RunSummary s = run(cfg, gw, log);
  CHECK(s.exit_code == kUnresolvableName);
  CHECK(gw.total_calls() == 0);
}

TEST_CASE("empty intersection exits 5 with zero generation calls") {
  std::ostringstream log;
  RunConfig cfg = mock_config("mock_empty", fs::temp_directory_path() / "orc_e5");
  cfg.threat_names = {"Confidentiality Attack"};
  LlmGateway gw(cfg.gateway);
  const RunSummary s = run(cfg, gw, log);
  CHECK(s.exit_code == kEmptyIntersection);
  CHECK(s.category == "Basic Digital Building Blocks");
  CHECK(gw.calls(Stage::Generate) == 0);
}

TEST_CASE("live mode without credentials exits 6 with zero network operations") {
  std::ostringstream log;
  RunConfig cfg = mock_config("mock_run", fs::temp_directory_path() / "orc_e6");
  cfg.gateway.mode = GatewayConfig::Mode::Live;
  cfg.gateway.api_key_env = "ASSERTAIN_TEST_NO_SUCH_KEY";
  unsetenv(cfg.gateway.api_key_env.c_str());
  LlmGateway gw(cfg.gateway);
  const RunSummary s = run(cfg, gw, log);
  CHECK(s.exit_code == kMissingCredentials);
  CHECK(gw.network_operations() == 0);
  CHECK(gw.total_calls() == 0);
}

TEST_CASE("polish fallback is recorded in the summary") {
  const fs::path out_dir = fs::temp_directory_path() / "orc_polish_fb";
  fs::remove_all(out_dir);
  // assemble a fixture dir whose refine reply has a ghost identifier
  const fs::path dir = fs::temp_directory_path() / "orc_polish_fix";
  fs::remove_all(dir);
  fs::create_directories(dir / "refine");
  fs::copy(kFixtures / "mock_run" / "classify", dir / "classify");
  fs::copy(kFixtures / "mock_run" / "generate", dir / "generate");
  fs::copy_file(kFixtures / "mock_polish" / "ghost.txt", dir / "refine" / "0001.txt");

  RunConfig cfg = mock_config("mock_run", out_dir);
  cfg.gateway.fixture_dir = dir;
  cfg.polish = true;
  std::ostringstream log;
  const RunSummary s = run(cfg, log);
  CHECK(s.exit_code == kOk);
  CHECK(s.polish_fallback);
  CHECK_FALSE(s.polish_fallback_reason.empty());
  const std::string record = slurp(out_dir / "summary");
  CHECK(record.find("\"polish_fallback\":true") != std::string::npos);
}

TEST_CASE("successful polish writes the fenced block verbatim") {
  const fs::path out_dir = fs::temp_directory_path() / "orc_polish_ok";
  fs::remove_all(out_dir);
  RunConfig cfg = mock_config("mock_run", out_dir);
  cfg.polish = true;
  std::ostringstream log;
  const RunSummary s = run(cfg, log);
  CHECK(s.exit_code == kOk);
  CHECK_FALSE(s.polish_fallback);
  CHECK(slurp(out_dir / "assertions.sva").find("assertain_polished") !=
        std::string::npos);
}
