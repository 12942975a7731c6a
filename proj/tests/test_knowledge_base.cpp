#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "assertain/errors.hpp"
#include "assertain/knowledge_base.hpp"

using namespace assertain;

TEST_CASE("embedded knowledge base loads and is complete") {
  const KnowledgeBase kb = KnowledgeBase::load();
  CHECK(kb.categories().size() == 13);
  CHECK(kb.threats().size() == 8);
  CHECK_FALSE(kb.provenance().empty());

  // every id referenced by a mapping row has a weakness entry
  for (const auto& c : kb.categories()) {
    for (int id : c.cwe_ids) {
      INFO("category ", c.name, " id ", id);
      CHECK(kb.find_entry(id) != nullptr);
    }
  }
  for (const auto& t : kb.threats()) {
    for (int id : t.cwe_ids) {
      INFO("threat ", t.name, " id ", id);
      CHECK(kb.find_entry(id) != nullptr);
    }
  }
}

TEST_CASE("spot values from the mapping tables") {
  const KnowledgeBase kb = KnowledgeBase::load();
  const auto& mem = kb.lookup_category("Memory Components");
  CHECK(mem.cwe_ids == std::vector<int>{1189, 1220, 1222, 1223, 1224, 1251, 1257, 1260});
  const auto& iac = kb.lookup_threat("Improper Access control");
  CHECK(iac.cwe_ids == std::vector<int>{1189, 1209, 1220, 1221, 1222, 1223, 1224, 1231});
}

TEST_CASE("normalize_label lowers, trims, and collapses whitespace") {
  CHECK(normalize_label("  Memory   Components  ") == "memory components");
  CHECK(normalize_label("MEMORY\tCOMPONENTS") == "memory components");
  CHECK(normalize_label("") == "");
}

TEST_CASE("edit_distance matches a tiny oracle") {
  CHECK(edit_distance("", "") == 0);
  CHECK(edit_distance("abc", "abc") == 0);
  CHECK(edit_distance("abc", "abd") == 1);
  CHECK(edit_distance("abc", "ab") == 1);
  CHECK(edit_distance("kitten", "sitting") == 3);
  CHECK(edit_distance("", "xyz") == 3);
}

TEST_CASE("lookup tolerates casing, spacing, and small typos") {
  const KnowledgeBase kb = KnowledgeBase::load();
  CHECK(kb.lookup_category("memory components").name == "Memory Components");
  CHECK(kb.lookup_category("  Memory   Components ").name == "Memory Components");
  CHECK(kb.lookup_category("Memory Componets").name == "Memory Components");
  CHECK(kb.lookup_threat("improper access CONTROL").name == "Improper Access control");
  // truncated label resolves to the nearest row
  CHECK(kb.lookup_threat("Fault Injection").name == "Fault Injection Attack");
}

TEST_CASE("unresolvable labels throw with the nearest candidate") {
  const KnowledgeBase kb = KnowledgeBase::load();
  CHECK_THROWS_AS(kb.lookup_category("Quantum Entanglement Unit"), NoSuchCategoryError);
  try {
    kb.lookup_threat("Side Chanel Atack Vector Overload");
    FAIL("expected NoSuchThreatError");
  } catch (const NoSuchThreatError& e) {
    CHECK_FALSE(e.nearest.empty());
  }
}

TEST_CASE("ties between equally distant rows resolve to the earlier row") {
  const KnowledgeBase kb = KnowledgeBase::load_from_text(
      "{\"id\": 1, \"title\": \"t\", \"definition\": \"d\", \"consequences\": [], "
      "\"examples\": []}\n",
      "{\"name\": \"alpha one\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"alphb one\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"c3\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"c4\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"c5\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"c6\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"c7\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"c8\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"c9\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"c10\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"c11\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"c12\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"c13\", \"cwe_ids\": [1]}\n",
      "{\"name\": \"t1\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"t2\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"t3\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"t4\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"t5\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"t6\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"t7\", \"cwe_ids\": [1]}\n"
      "{\"name\": \"t8\", \"cwe_ids\": [1]}\n");
  // "alphc one" is distance 1 from both "alpha one" and "alphb one"
  CHECK(kb.lookup_category("alphc one").name == "alpha one");
}
