#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace assertain {

// Per-kind identifier sets extracted from a design. flat() is the union;
// it is filled by the extractor and must not be edited by hand.
struct IdentifierUniverse {
  std::set<std::string> ports;
  std::set<std::string> nets_and_regs;
  std::set<std::string> parameters;
  std::set<std::string> typedef_names;
  std::set<std::string> enum_labels;
  std::set<std::string> struct_fields;
  std::set<std::string> instance_names;
  std::set<std::string> submodule_port_names;
  std::set<std::string> macro_names;

  const std::unordered_set<std::string>& flat() const { return flat_; }
  bool contains(std::string_view name) const;

  // Rebuilds flat() from the per-kind sets.
  void finalize();

 private:
  std::unordered_set<std::string> flat_;
};

struct ExtractionDiagnostics {
  int skipped_regions = 0;
  int escaped_identifiers = 0;
  std::vector<std::string> notes;
};

struct DesignContext {
  std::string source_text;
  std::string design_id;  // stable content hash of source_text
  IdentifierUniverse identifiers;
  std::vector<std::string> module_names;
  std::optional<std::string> top_module_hint;

  // Declaration detail used by the .sva renderer.
  std::map<std::string, std::string> declared_ranges;  // name -> "[msb:lsb]"
  std::map<std::string, std::string> declared_types;   // name -> typedef name
  std::map<std::string, std::string> macro_bodies;     // macro -> body text
  std::map<std::string, std::string> typedef_texts;    // typedef -> full decl
  std::map<std::string, std::string> enum_owner;       // label -> typedef
  std::map<std::string, std::string> field_owner;      // field -> typedef

  ExtractionDiagnostics diagnostics;
};

std::string content_hash(std::string_view text);

// Full analysis of one source text: identifier extraction plus the
// declaration detail above.
DesignContext analyze_source(std::string source_text);

IdentifierUniverse extract_identifiers(std::string_view source_text);

DesignContext load_design(const std::filesystem::path& path,
                          std::optional<std::string> top_module_hint = {});

struct GroundingVerdict {
  bool ok = true;
  std::vector<std::string> missing;  // input order, deduplicated
};

GroundingVerdict contains_all(const IdentifierUniverse& universe,
                              const std::vector<std::string>& names);

}  // namespace assertain
