#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "assertain/refinement.hpp"

using namespace assertain;

namespace {

const std::filesystem::path kFixtures =
    std::filesystem::path(ASSERTAIN_TEST_DIR) / "fixtures";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

DesignContext dmi_context() { return load_design(kFixtures / "dmi_jtag_like.sv"); }

PropertyTriplet triplet(int cwe, std::string scenario, std::string sva) {
  PropertyTriplet t;
  t.cwe_id = cwe;
  t.cwe_title = cwe == 0 ? "Functional" : "CWE-" + std::to_string(cwe);
  t.scenario = std::move(scenario);
  t.nl_property = "The property must hold.";
  t.sva = std::move(sva);
  return t;
}

RawPropertySet as_set(std::vector<PropertyTriplet> ts) {
  RawPropertySet set;
  set.triplets = std::move(ts);
  return set;
}

}  // namespace

TEST_CASE("the grounded paper listing is accepted against the fixture") {
  const DesignContext ctx = dmi_context();
  const auto listing2 = slurp(kFixtures / "listings" / "listing2.sva");
  const FilterResult r = verify_and_filter(as_set({triplet(441, "origin", listing2)}), ctx);
  REQUIRE(r.accepted.size() == 1);
  CHECK(r.rejected.empty());
  // lint-derived tags land on the accepted triplet
  const auto& tags = r.accepted[0].triplet.tags;
  CHECK(std::find(tags.begin(), tags.end(), "multi-cycle") != tags.end());
  CHECK(std::find(tags.begin(), tags.end(), "edge-anchored") != tags.end());
}

TEST_CASE("a single identifier rename turns acceptance into MissingIdentifier") {
  const DesignContext ctx = dmi_context();
  std::string mutated = slurp(kFixtures / "listings" / "listing2.sva");
  const auto pos = mutated.find("dmi_req_valid");
  REQUIRE(pos != std::string::npos);
  mutated.replace(pos, std::string("dmi_req_valid").size(), "dmi_request_valid");

  const FilterResult r =
      verify_and_filter(as_set({triplet(441, "origin", mutated)}), ctx);
  REQUIRE(r.rejected.size() == 1);
  CHECK(r.accepted.empty());
  CHECK(r.rejected[0].reason.kind == RejectionReason::Kind::MissingIdentifier);
  CHECK(r.rejected[0].reason.details ==
        std::vector<std::string>{"dmi_request_valid"});
}

TEST_CASE("an undefined macro is rejected; a defined one is not") {
  const DesignContext ctx = dmi_context();
  const std::string undefined =
      "property p_m; @(posedge tck_i) disable iff (!trst_ni) "
      "`ASSERT_NEVER |-> !dmi_req_valid; endproperty";
  const FilterResult bad = verify_and_filter(as_set({triplet(1, "m", undefined)}), ctx);
  REQUIRE(bad.rejected.size() == 1);
  CHECK(bad.rejected[0].reason.kind == RejectionReason::Kind::UndefinedMacro);
  CHECK(bad.rejected[0].reason.details == std::vector<std::string>{"ASSERT_NEVER"});

  const std::string defined =
      "property p_m; @(posedge tck_i) disable iff (!trst_ni) "
      "dr_q[`DMI_ABITS] |-> !dmi_req_valid; endproperty";
  const FilterResult ok = verify_and_filter(as_set({triplet(1, "m", defined)}), ctx);
  CHECK(ok.accepted.size() == 1);
}

TEST_CASE("mandatory lint failures reject unless advisory-only is set") {
  const DesignContext ctx = dmi_context();
  const std::string no_reset =
      "property p_r; @(posedge tck_i) capture_dr |=> !dmi_req_valid; endproperty";
  const FilterResult strict =
      verify_and_filter(as_set({triplet(1, "r", no_reset)}), ctx);
  REQUIRE(strict.rejected.size() == 1);
  CHECK(strict.rejected[0].reason.kind == RejectionReason::Kind::LintMandatoryFail);
  CHECK(strict.rejected[0].reason.details == std::vector<std::string>{"R3"});

  FilterOptions relaxed;
  relaxed.lint_advisory_only = true;
  const FilterResult loose =
      verify_and_filter(as_set({triplet(1, "r", no_reset)}), ctx, relaxed);
  CHECK(loose.accepted.size() == 1);
}

TEST_CASE("accepted plus rejected always partition the input") {
  const DesignContext ctx = dmi_context();
  const auto l1 = slurp(kFixtures / "listings" / "listing1.sva");
  const auto l2 = slurp(kFixtures / "listings" / "listing2.sva");
  const FilterResult r = verify_and_filter(
      as_set({triplet(1295, "a", l1), triplet(441, "b", l2),
              triplet(7, "c", "property p_x; ghost |-> gone; endproperty")}),
      ctx);
  CHECK(r.accepted.size() + r.rejected.size() == 3);
}

TEST_CASE("rendered file orders security sections before functional") {
  const DesignContext ctx = dmi_context();
  const auto l1 = slurp(kFixtures / "listings" / "listing1.sva");
  const std::string functional =
      "property p_func_idle; @(posedge tck_i) disable iff (!trst_ni) "
      "state_q == Idle && !dmi_access |=> state_q == Idle; endproperty";
  FilterResult r = verify_and_filter(
      as_set({triplet(0, "functional", functional), triplet(1295, "security", l1)}),
      ctx);
  REQUIRE(r.accepted.size() == 2);

  RenderOptions opts;
  opts.deterministic_timestamps = true;
  const std::string file = render_sva_file(r.accepted, ctx, opts);

  CHECK(file.find("CWE-1295") != std::string::npos);
  CHECK(file.find("CWE-1295") < file.find("Functional"));
  // the first directive line is the timescale
  CHECK(file.find("`timescale 1ns / 1ps") != std::string::npos);
  CHECK(file.find('`') == file.find("`timescale"));
  // each accepted property gets an $error-carrying assert
  CHECK(file.find("p_zero_data_on_error_capture_dbg failed") != std::string::npos);
  CHECK(file.find("p_func_idle failed") != std::string::npos);
  // typedefs backing referenced enum labels are replicated
  CHECK(file.find("dmi_error_e") != std::string::npos);
  CHECK(file.find("state_e") != std::string::npos);

  // deterministic mode renders byte-identically
  CHECK(file == render_sva_file(r.accepted, ctx, opts));
  // and the emitted file self-audits clean
  CHECK(audit_grounding(file, ctx).empty());
}

TEST_CASE("empty accepted set renders a header-only file with a warning") {
  const DesignContext ctx = dmi_context();
  RenderOptions opts;
  opts.deterministic_timestamps = true;
  const std::string file = render_sva_file({}, ctx, opts);
  CHECK(file.find("`timescale") != std::string::npos);
  CHECK(file.find("WARNING") != std::string::npos);
}

TEST_CASE("audit_grounding flags foreign identifiers") {
  const DesignContext ctx = dmi_context();
  const std::string file =
      "`timescale 1ns / 1ps\n"
      "module checker_m (input logic tck_i, input logic mystery_sig);\n"
      "  property p_a; @(posedge tck_i) disable iff (!trst_ni) "
      "capture_dr |=> unknown_net; endproperty\n"
      "endmodule\n";
  const auto missing = audit_grounding(file, ctx);
  CHECK(std::find(missing.begin(), missing.end(), "unknown_net") != missing.end());
  // mystery_sig is declared by the file itself, so it is grounded
  CHECK(std::find(missing.begin(), missing.end(), "mystery_sig") == missing.end());
}

TEST_CASE("llm_polish accepts a single valid fenced block verbatim") {
  const DesignContext ctx = dmi_context();
  const auto l1 = slurp(kFixtures / "listings" / "listing1.sva");
  FilterResult r = verify_and_filter(as_set({triplet(1295, "s", l1)}), ctx);
  REQUIRE(r.accepted.size() == 1);

  GatewayConfig cfg;
  cfg.mode = GatewayConfig::Mode::Mock;
  cfg.fixture_dir = kFixtures / "mock_run";
  LlmGateway gw(cfg);
  RenderOptions ropts;
  ropts.deterministic_timestamps = true;
  const PolishOutcome out = llm_polish(r.accepted, ctx, gw, false, ropts);
  CHECK_FALSE(out.used_fallback);
  CHECK(out.sva_file_text.find("assertain_polished") != std::string::npos);
  CHECK(out.sva_file_text.find("```") == std::string::npos);
  CHECK(gw.calls(Stage::Refine) == 1);
}

TEST_CASE("adversarial polish fixtures always fall back") {
  const DesignContext ctx = dmi_context();
  const auto l1 = slurp(kFixtures / "listings" / "listing1.sva");
  FilterResult r = verify_and_filter(as_set({triplet(1295, "s", l1)}), ctx);
  REQUIRE(r.accepted.size() == 1);
  RenderOptions ropts;
  ropts.deterministic_timestamps = true;
  const std::string reference = render_sva_file(r.accepted, ctx, ropts);

  for (const char* fixture : {"ghost.txt", "twoblocks.txt"}) {
    const auto dir =
        std::filesystem::temp_directory_path() / "polish_adv" / fixture;
    std::filesystem::create_directories(dir / "refine");
    std::filesystem::copy_file(kFixtures / "mock_polish" / fixture,
                               dir / "refine" / "0001.txt",
                               std::filesystem::copy_options::overwrite_existing);
    GatewayConfig cfg;
    cfg.mode = GatewayConfig::Mode::Mock;
    cfg.fixture_dir = dir;
    LlmGateway gw(cfg);
    const PolishOutcome out = llm_polish(r.accepted, ctx, gw, false, ropts);
    INFO(fixture, ": ", out.fallback_reason);
    CHECK(out.used_fallback);
    CHECK_FALSE(out.fallback_reason.empty());
    CHECK(out.sva_file_text == reference);
  }
}

TEST_CASE("standard directives are not macro uses") {
  for (const char* d : {"define", "ifdef", "ifndef", "endif", "else", "elsif",
                        "include", "timescale", "default_nettype", "undef"}) {
    CHECK(is_standard_directive(d));
  }
  CHECK_FALSE(is_standard_directive("ASSERT_NEVER"));
  CHECK_FALSE(is_standard_directive("DMI_ABITS"));
}
