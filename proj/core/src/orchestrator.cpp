#include "assertain/orchestrator.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "assertain/errors.hpp"
#include "assertain/generation.hpp"
#include "assertain/knowledge_base.hpp"
#include "assertain/refinement.hpp"
#include "assertain/rtl_context.hpp"
#include "assertain/semantic_alignment.hpp"
#include "assertain/sva_lint.hpp"

namespace assertain {

namespace {

namespace fs = std::filesystem;

RunSummary fail(RunSummary summary, int code, const std::string& message,
                std::ostream& log) {
  summary.exit_code = code;
  summary.error = message;
  log << "error: " << message << " (exit " << code << ")\n";
  return summary;
}

void write_file_or_throw(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WorkspaceError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw WorkspaceError("failed writing " + path.string());
}

std::string rejections_jsonl(const std::vector<RejectedProperty>& rejected) {
  std::ostringstream out;
  for (const auto& r : rejected) {
    nlohmann::ordered_json j;
    j["cwe_id"] = r.triplet.cwe_id;
    j["scenario"] = r.triplet.scenario;
    j["sva"] = r.triplet.sva;
    j["reason"] = rejection_kind_name(r.reason.kind);
    j["details"] = r.reason.details;
    out << j.dump() << "\n";
  }
  return out.str();
}

}  // namespace

RunSummary run(const RunConfig& config, LlmGateway& gateway, std::ostream& log) {
  RunSummary summary;

  if (config.design_path.empty())
    return fail(std::move(summary), kInvalidArguments, "no design file given", log);
  if (config.threat_names.empty())
    return fail(std::move(summary), kInvalidArguments, "no threat classes given", log);
  if (config.iterations < 1)
    return fail(std::move(summary), kInvalidArguments,
                "iterations must be at least 1", log);

  // Credential preflight for live mode: fail before any socket exists.
  if (gateway.config().mode == GatewayConfig::Mode::Live) {
    const char* key = std::getenv(gateway.config().api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      return fail(std::move(summary), kMissingCredentials,
                  "environment variable " + gateway.config().api_key_env +
                      " is not set",
                  log);
    }
  }

  fs::path workspace;
  try {
    const KnowledgeBase kb = KnowledgeBase::load();

    std::vector<ThreatClass> threats;
    try {
      threats = resolve_threats(config.threat_names, kb);
    } catch (const NoSuchThreatError& e) {
      return fail(std::move(summary), kUnresolvableName, e.what(), log);
    }

    DesignContext ctx;
    try {
      ctx = load_design(config.design_path, config.top_module_hint);
    } catch (const DesignLoadError& e) {
      return fail(std::move(summary), kDesignLoadFailure, e.what(), log);
    }
    summary.design_id = ctx.design_id;
    log << "design " << config.design_path.string() << " loaded, id "
        << ctx.design_id << ", " << ctx.identifiers.flat().size()
        << " identifiers\n";
    log << "---- design source ----\n"
        << ctx.source_text << "\n---- end design source ----\n";

    const DesignCategory* category = nullptr;
    try {
      category = &classify_design(ctx, kb, gateway);
    } catch (const MissingCredentialsError& e) {
      return fail(std::move(summary), kMissingCredentials, e.what(), log);
    } catch (const GatewayError& e) {
      return fail(std::move(summary), kGatewayExhausted, e.what(), log);
    } catch (const ClassificationUnresolvableError& e) {
      return fail(std::move(summary), kUnresolvableName, e.what(), log);
    }
    summary.category = category->name;
    log << "design classified as '" << category->name << "'\n";

    TargetWeaknessSet target = intersect(*category, threats);
    summary.c_target.assign(target.c_target.begin(), target.c_target.end());
    {
      std::ostringstream ids;
      for (int id : target.c_target) ids << " " << id;
      log << "target weakness set:" << (ids.str().empty() ? " (empty)" : ids.str())
          << "\n";
    }
    if (target.c_target.empty()) {
      return fail(std::move(summary), kEmptyIntersection,
                  "no weakness is shared by category '" + category->name +
                      "' and the requested threat classes",
                  log);
    }

    try {
      fs::create_directories(config.out_dir);
      workspace = config.out_dir / ".workspace";
      fs::create_directories(workspace);
    } catch (const std::exception& e) {
      return fail(std::move(summary), kWriteFailure, e.what(), log);
    }

    RawPropertySet raw;
    try {
      raw = generate_for_target(ctx, target, config.iterations, kb, gateway);
    } catch (const MissingCredentialsError& e) {
      return fail(std::move(summary), kMissingCredentials, e.what(), log);
    } catch (const GatewayError& e) {
      return fail(std::move(summary), kGatewayExhausted, e.what(), log);
    } catch (const StageError& e) {
      return fail(std::move(summary), kGatewayExhausted, e.what(), log);
    }
    summary.raw_count = static_cast<int>(raw.triplets.size()) +
                        static_cast<int>(raw.dropped.size());
    summary.deduped_count = static_cast<int>(raw.triplets.size());
    log << "generation yielded " << summary.deduped_count
        << " candidate properties (" << raw.dropped.size() << " rows dropped, "
        << raw.failed_calls << " calls failed)\n";
    for (const auto& d : raw.diagnostics) log << "  note: " << d << "\n";

    try {
      const fs::path staged = stage_jsonl(raw, workspace);
      log << "candidates staged at " << staged.string() << "\n";
    } catch (const std::exception& e) {
      return fail(std::move(summary), kWriteFailure, e.what(), log);
    }

    FilterOptions filter_options;
    filter_options.lint_advisory_only = config.lint_advisory_only;
    FilterResult filtered = verify_and_filter(raw, ctx, filter_options);
    summary.accepted_count = static_cast<int>(filtered.accepted.size());
    summary.rejected_count = static_cast<int>(filtered.rejected.size());
    for (const auto& a : filtered.accepted) {
      ++summary.per_cwe_accepted[a.triplet.cwe_id];
      if (a.triplet.cwe_id > 0 &&
          summary.per_cwe_accepted[a.triplet.cwe_id] == 1) {
        ++summary.unique_cwe_count;
      }
    }
    log << summary.accepted_count << " properties accepted, "
        << summary.rejected_count << " rejected\n";
    for (const auto& r : filtered.rejected) {
      log << "  rejected [" << r.reason.describe() << "] " << r.triplet.sva
          << "\n";
    }

    RenderOptions render_options;
    render_options.deterministic_timestamps = config.deterministic;
    std::string sva_text;
    if (config.polish && !filtered.accepted.empty()) {
      PolishOutcome polish;
      try {
        polish = llm_polish(filtered.accepted, ctx, gateway,
                            config.intricate_suite, render_options,
                            filter_options);
      } catch (const MissingCredentialsError& e) {
        return fail(std::move(summary), kMissingCredentials, e.what(), log);
      }
      summary.polish_fallback = polish.used_fallback;
      summary.polish_fallback_reason = polish.fallback_reason;
      if (polish.used_fallback) {
        log << "polish fell back to the reference renderer: "
            << polish.fallback_reason << "\n";
      }
      sva_text = std::move(polish.sva_file_text);
    } else {
      sva_text = render_sva_file(filtered.accepted, ctx, render_options);
    }

    const fs::path sva_path = config.out_dir / "assertions.sva";
    const fs::path ledger_path = config.out_dir / "rejections.jsonl";
    const fs::path summary_path = config.out_dir / "summary";
    try {
      write_file_or_throw(sva_path, sva_text);
      write_file_or_throw(ledger_path, rejections_jsonl(filtered.rejected));
    } catch (const std::exception& e) {
      return fail(std::move(summary), kWriteFailure, e.what(), log);
    }
    summary.sva_path = sva_path.string();
    summary.ledger_path = ledger_path.string();
    summary.summary_path = summary_path.string();

    if (config.keep_workspace) {
      summary.workspace_path = workspace.string();
    } else {
      std::error_code ec;
      fs::remove_all(workspace, ec);
      workspace.clear();
    }

    summary.exit_code = kOk;
    try {
      write_file_or_throw(summary_path, summary_record(summary) + "\n");
    } catch (const std::exception& e) {
      return fail(std::move(summary), kWriteFailure, e.what(), log);
    }

    log << render_summary_table(summary);
    return summary;
  } catch (const std::exception& e) {
    if (!config.keep_workspace && !workspace.empty()) {
      std::error_code ec;
      fs::remove_all(workspace, ec);
    }
    return fail(std::move(summary), kInvalidArguments,
                std::string("unexpected failure: ") + e.what(), log);
  }
}

RunSummary run(const RunConfig& config, std::ostream& log) {
  LlmGateway gateway(config.gateway);
  return run(config, gateway, log);
}

std::string render_summary_table(const RunSummary& summary) {
  std::ostringstream out;
  auto row = [&](const std::string& key, const std::string& value) {
    out << "  " << std::left << std::setw(22) << key << " " << value << "\n";
  };
  out << "run summary\n";
  row("design_id", summary.design_id);
  row("category", summary.category);
  {
    std::ostringstream ids;
    for (std::size_t i = 0; i < summary.c_target.size(); ++i) {
      if (i > 0) ids << ", ";
      ids << summary.c_target[i];
    }
    row("target weaknesses", ids.str());
  }
  row("candidates", std::to_string(summary.deduped_count) + " (from " +
                        std::to_string(summary.raw_count) + " raw rows)");
  row("accepted", std::to_string(summary.accepted_count));
  row("rejected", std::to_string(summary.rejected_count));
  row("distinct CWEs covered", std::to_string(summary.unique_cwe_count));
  for (const auto& [id, count] : summary.per_cwe_accepted) {
    row(id == 0 ? "  functional" : "  CWE-" + std::to_string(id),
        std::to_string(count));
  }
  if (summary.polish_fallback) {
    row("polish fallback", summary.polish_fallback_reason);
  }
  if (!summary.sva_path.empty()) row("assertions", summary.sva_path);
  if (!summary.ledger_path.empty()) row("rejections", summary.ledger_path);
  if (!summary.workspace_path.empty()) row("workspace", summary.workspace_path);
  row("exit code", std::to_string(summary.exit_code));
  return out.str();
}

std::string summary_record(const RunSummary& summary) {
  nlohmann::ordered_json j;
  j["exit_code"] = summary.exit_code;
  if (!summary.error.empty()) j["error"] = summary.error;
  j["design_id"] = summary.design_id;
  j["category"] = summary.category;
  j["c_target"] = summary.c_target;
  j["raw_rows"] = summary.raw_count;
  j["candidates"] = summary.deduped_count;
  j["accepted"] = summary.accepted_count;
  j["rejected"] = summary.rejected_count;
  nlohmann::ordered_json per;
  for (const auto& [id, count] : summary.per_cwe_accepted) {
    per[std::to_string(id)] = count;
  }
  j["per_cwe_accepted"] = std::move(per);
  j["unique_cwe_count"] = summary.unique_cwe_count;
  j["polish_fallback"] = summary.polish_fallback;
  if (summary.polish_fallback) {
    j["polish_fallback_reason"] = summary.polish_fallback_reason;
  }
  j["sva_path"] = summary.sva_path;
  j["rejections_path"] = summary.ledger_path;
  return j.dump();
}

}  // namespace assertain
