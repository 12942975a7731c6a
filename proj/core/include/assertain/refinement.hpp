#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "assertain/generation.hpp"
#include "assertain/llm_gateway.hpp"
#include "assertain/rtl_context.hpp"
#include "assertain/sva_lint.hpp"

namespace assertain {

struct RejectionReason {
  enum class Kind { MissingIdentifier, UndefinedMacro, LintMandatoryFail };
  Kind kind;
  std::vector<std::string> details;  // missing names or failed rule ids

  std::string describe() const;
};

const char* rejection_kind_name(RejectionReason::Kind k);

struct AcceptedProperty {
  PropertyTriplet triplet;
  LintReport report;
};

struct RejectedProperty {
  PropertyTriplet triplet;
  RejectionReason reason;
};

struct FilterOptions {
  bool lint_advisory_only = false;  // lint failures tag but never reject
  std::optional<std::string> clock_hint;
  std::optional<std::string> reset_hint;
};

// accepted + rejected always partition the input set.
struct FilterResult {
  std::vector<AcceptedProperty> accepted;
  std::vector<RejectedProperty> rejected;
};

FilterResult verify_and_filter(const RawPropertySet& set,
                               const DesignContext& ctx,
                               const FilterOptions& options = {});

struct RenderOptions {
  bool deterministic_timestamps = false;
  std::string tool_name = "assertain";
};

// Deterministic reference renderer: timescale directive, macro defines,
// wrapper module with inferred-width inputs, replicated typedefs, then
// per-assertion blocks grouped by CWE section (security before
// functional).
std::string render_sva_file(const std::vector<AcceptedProperty>& accepted,
                            const DesignContext& ctx,
                            const RenderOptions& options = {});

struct PolishOutcome {
  std::string sva_file_text;
  bool used_fallback = false;
  std::string fallback_reason;
};

// Trust-but-verify polish pass: asks the refine-stage model for a single
// systemverilog fenced block and re-validates every assertion in it; any
// regression falls back to the deterministic renderer.
PolishOutcome llm_polish(const std::vector<AcceptedProperty>& accepted,
                         const DesignContext& ctx, LlmGateway& gateway,
                         bool intricate, const RenderOptions& render_options,
                         const FilterOptions& filter_options = {});

// Self-audit: identifiers used in the emitted file that resolve neither
// in the design, nor in the file's own declarations, nor in the
// keyword/builtin whitelist.
std::vector<std::string> audit_grounding(std::string_view sva_file_text,
                                         const DesignContext& ctx);

// Backtick names that are compiler directives, not macro uses.
bool is_standard_directive(std::string_view name);

}  // namespace assertain
