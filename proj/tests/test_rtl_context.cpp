#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "assertain/errors.hpp"
#include "assertain/rtl_context.hpp"

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

// kind -> names, parsed from identifier_oracle.txt
std::map<std::string, std::set<std::string>> load_oracle() {
  std::ifstream in(kFixtures / "identifier_oracle.txt");
  REQUIRE(in);
  std::map<std::string, std::set<std::string>> oracle;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string kind, name;
    row >> kind >> name;
    oracle[kind].insert(name);
  }
  return oracle;
}

}  // namespace

TEST_CASE("extraction matches the hand-enumerated oracle exactly") {
  const auto oracle = load_oracle();
  std::set<std::string> expected_flat;
  for (const auto& [kind, names] : oracle) {
    expected_flat.insert(names.begin(), names.end());
  }
  REQUIRE(expected_flat.size() == 37);

  const IdentifierUniverse u =
      extract_identifiers(slurp(kFixtures / "identifier_oracle.sv"));
  const std::set<std::string> actual_flat(u.flat().begin(), u.flat().end());
  CHECK(actual_flat == expected_flat);

  CHECK(u.ports == oracle.at("port"));
  CHECK(u.parameters == oracle.at("parameter"));
  CHECK(u.typedef_names == oracle.at("typedef"));
  CHECK(u.enum_labels == oracle.at("enum_label"));
  CHECK(u.struct_fields == oracle.at("struct_field"));
  CHECK(u.nets_and_regs == oracle.at("net"));
  CHECK(u.instance_names == oracle.at("instance"));
  CHECK(u.macro_names == oracle.at("macro"));
}

TEST_CASE("decoys in comments and strings are never extracted") {
  const IdentifierUniverse u =
      extract_identifiers(slurp(kFixtures / "identifier_oracle.sv"));
  CHECK_FALSE(u.contains("ghost_comment_sig"));
  CHECK_FALSE(u.contains("another_ghost_sig"));
  CHECK_FALSE(u.contains("ghost_string_sig"));
}

TEST_CASE("module names are tracked but excluded from the flat universe") {
  const DesignContext ctx = analyze_source(slurp(kFixtures / "identifier_oracle.sv"));
  CHECK(ctx.module_names == std::vector<std::string>{"oracle_top", "oracle_mem"});
  CHECK_FALSE(ctx.identifiers.contains("oracle_top"));
  CHECK_FALSE(ctx.identifiers.contains("oracle_mem"));
}

TEST_CASE("declaration detail supports the renderer") {
  const DesignContext ctx = analyze_source(slurp(kFixtures / "dmi_jtag_like.sv"));
  CHECK(ctx.declared_types.at("error_q") == "dmi_error_e");
  CHECK(ctx.declared_types.at("state_q") == "state_e");
  CHECK(ctx.declared_ranges.at("dr_q") == "[40:0]");
  CHECK(ctx.typedef_texts.count("dmi_error_e") == 1);
  CHECK(ctx.enum_owner.at("DMIBusy") == "dmi_error_e");
  CHECK(ctx.field_owner.at("address") == "dmi_req_t");
  CHECK(ctx.macro_bodies.at("DMI_ABITS") == "7");
}

TEST_CASE("content hash is stable and input-sensitive") {
  CHECK(content_hash("abc") == content_hash("abc"));
  CHECK(content_hash("abc") != content_hash("abd"));
  CHECK(content_hash("").size() == 16);
}

TEST_CASE("load_design reports four distinct failure kinds") {
  auto kind_of = [](const std::filesystem::path& p) {
    try {
      load_design(p);
    } catch (const DesignLoadError& e) {
      return e.kind;
    }
    FAIL("expected DesignLoadError");
    return DesignLoadError::Kind::MissingFile;
  };

  CHECK(kind_of(kFixtures / "no_such_file.sv") == DesignLoadError::Kind::MissingFile);

  const auto tmp = std::filesystem::temp_directory_path();
  {
    std::ofstream out(tmp / "bin.sv", std::ios::binary);
    out << "module m;\0endmodule" << std::string(1, '\0');
  }
  CHECK(kind_of(tmp / "bin.sv") == DesignLoadError::Kind::DecodeFailure);
  {
    std::ofstream out(tmp / "empty.sv");
    out << "  \n\t\n";
  }
  CHECK(kind_of(tmp / "empty.sv") == DesignLoadError::Kind::EmptyDesign);
  {
    std::ofstream out(tmp / "nomod.sv");
    out << "// just a comment\nlogic floating;\n";
  }
  CHECK(kind_of(tmp / "nomod.sv") == DesignLoadError::Kind::NoModules);

  const DesignContext ok = load_design(kFixtures / "dmi_jtag_like.sv", "dmi_jtag");
  CHECK(ok.top_module_hint == "dmi_jtag");
  CHECK_FALSE(ok.design_id.empty());
}

TEST_CASE("contains_all reports missing names in input order, deduplicated") {
  const DesignContext ctx = analyze_source(slurp(kFixtures / "dmi_jtag_like.sv"));
  const GroundingVerdict ok =
      contains_all(ctx.identifiers, {"tck_i", "dr_q", "DMIBusy", "error_q"});
  CHECK(ok.ok);
  CHECK(ok.missing.empty());

  const GroundingVerdict bad = contains_all(
      ctx.identifiers, {"zeta_sig", "tck_i", "alpha_sig", "zeta_sig"});
  CHECK_FALSE(bad.ok);
  CHECK(bad.missing == std::vector<std::string>{"zeta_sig", "alpha_sig"});
}
