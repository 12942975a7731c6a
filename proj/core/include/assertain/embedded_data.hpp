#pragma once

// Text assets vendored into the library at build time; the pipeline
// never fetches data over the network.
namespace assertain::data {

extern const char* const cwe_entries_jsonl;
extern const char* const design_categories_jsonl;
extern const char* const threat_classes_jsonl;
extern const char* const rulebook_txt;

}  // namespace assertain::data
