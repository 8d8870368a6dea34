#include <gtest/gtest.h>

#include "railsafe/scenario.hpp"
#include "support/support.hpp"

using namespace railsafe;
using support::seed_ontology;

namespace {

ScenarioSheet exemplar_sheet() { return support::exemplar().sheet; }

ValidationReport check(const ScenarioSheet& s) {
  return validate_sheet(s, default_schema(seed_ontology()), seed_ontology());
}

std::vector<std::string> error_codes(const ValidationReport& r) {
  std::vector<std::string> out;
  for (const auto& f : r.findings()) {
    if (f.severity == Severity::error) out.push_back(f.subject + ":" + f.code);
  }
  return out;
}

}  // namespace

TEST(ParameterId, EightInSheetOrder) {
  ASSERT_EQ(kAllParameters.size(), 8u);
  EXPECT_EQ(to_string(kAllParameters.front()), "geographical-principle");
  EXPECT_EQ(to_string(kAllParameters.back()), "interim-solutions");
  for (auto p : kAllParameters) EXPECT_EQ(parse_parameter(to_string(p)), p);
  EXPECT_FALSE(parse_parameter("Risks").has_value());
}

TEST(Schema, DefaultSchemaFromSeed) {
  auto schema = default_schema(seed_ontology());
  ASSERT_EQ(schema.size(), 8u);
  for (const auto& s : schema) {
    bool coded = s.parameter == ParameterId::summarized_failures || s.parameter == ParameterId::interim_solutions;
    EXPECT_EQ(s.allows_coded_entry, coded);
    EXPECT_EQ(s.allows_numeric, s.parameter == ParameterId::actors);
  }
  EXPECT_EQ(schema[1].concept_id, "risk");
}

TEST(Schema, MissingAnchorsAreNamed) {
  Ontology tiny("t", {{"risk", "Risk", {}, "", Layer::generic, {}, false}}, {});
  try {
    default_schema(tiny);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::missing_anchor);
    EXPECT_EQ(e.details().size(), 7u);
  }
}

TEST(Codes, Shape) {
  EXPECT_TRUE(is_valid_code("OO26"));
  EXPECT_TRUE(is_valid_code("OS15"));
  EXPECT_FALSE(is_valid_code("O26"));
  EXPECT_FALSE(is_valid_code("oo26"));
  EXPECT_FALSE(is_valid_code("OO"));
  EXPECT_FALSE(is_valid_code("OO26x"));
}

TEST(ValidateSheet, ExemplarHasNoErrorsAndNoWarnings) {
  auto r = check(exemplar_sheet());
  EXPECT_EQ(r.error_count(), 0u) << ::testing::PrintToString(error_codes(r));
  EXPECT_EQ(r.warning_count(), 0u);
}

TEST(ValidateSheet, OutOfVocabularyRiskGivesOneUnknownValue) {
  auto s = exemplar_sheet();
  s.selections[ParameterId::risks] = {ValueSelection{"fire", true, std::nullopt}};
  EXPECT_EQ(error_codes(check(s)), std::vector<std::string>{"risks:unknown-value"});
}

TEST(ValidateSheet, EverySingleSubstitutionGivesExactlyOneError) {
  auto base = exemplar_sheet();
  for (auto& [p, list] : base.selections) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto s = base;
      auto& sel = s.selections[p][i];
      if (auto* v = std::get_if<ValueSelection>(&sel)) v->instance = "fire";
      else std::get<CodedEntry>(sel).code = "fire";
      EXPECT_EQ(check(s).error_count(), 1u) << to_string(p) << " #" << i;
    }
  }
}

TEST(ValidateSheet, StructuralErrors) {
  auto s = exemplar_sheet();
  s.selections[ParameterId::geographical_principle].push_back(ValueSelection{"fixed-canton", false, std::nullopt});
  s.selections[ParameterId::risks].push_back(ValueSelection{"collision", false, std::nullopt});
  s.selections[ParameterId::geographical_areas].push_back(ValueSelection{"derailment", false, std::nullopt});
  s.selections[ParameterId::risk_linked_functions].push_back(ValueSelection{"stops", false, 3});
  s.selections[ParameterId::actors][0] = ValueSelection{"number-of-trains", true, -1};
  s.selections[ParameterId::incidental_functions].push_back(CodedEntry{"OO27", "x", false});
  s.selections[ParameterId::summarized_failures].push_back(CodedEntry{"bad", "x", false});
  s.selections[ParameterId::interim_solutions].push_back(CodedEntry{"OS16", "", false});
  auto codes = error_codes(check(s));
  std::vector<std::string> expected = {"geographical-principle:cardinality",     "risks:duplicate-value",
                                       "risk-linked-functions:numeric-not-allowed", "geographical-areas:out-of-anchor",
                                       "actors:negative-qualifier",               "incidental-functions:coded-not-allowed",
                                       "summarized-failures:invalid-code",        "interim-solutions:empty-description"};
  std::sort(codes.begin(), codes.end());
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(codes, expected);
}

TEST(ValidateSheet, MissingParameterAndWarnings) {
  auto s = exemplar_sheet();
  s.selections.erase(ParameterId::actors);
  s.narrative.clear();
  for (auto& sel : s.selections[ParameterId::risks]) std::get<ValueSelection>(sel).key_concept = false;
  auto r = check(s);
  EXPECT_EQ(error_codes(r), std::vector<std::string>{"actors:missing-parameter"});
  EXPECT_EQ(r.warning_count(), 2u);
}

TEST(ValidateSheet, CodeRegisteredUnderAnotherAnchor) {
  auto s = exemplar_sheet();
  s.selections[ParameterId::summarized_failures] = {CodedEntry{"OS15", "wrong book", false}};
  EXPECT_EQ(error_codes(check(s)), std::vector<std::string>{"summarized-failures:out-of-anchor"});
}

TEST(ValidateSheet, EmptySchemaReportsEveryParameter) {
  auto r = validate_sheet(exemplar_sheet(), {}, seed_ontology());
  EXPECT_EQ(r.error_count(), 8u);
}

TEST(KeyConcepts, ExemplarStarredValues) {
  auto keys = key_concepts(exemplar_sheet());
  bool collision = false, trains = false;
  for (const auto& [p, sel] : keys) {
    if (p == ParameterId::risks && selection_key(sel) == "collision") collision = true;
    if (p == ParameterId::actors) {
      const auto& v = std::get<ValueSelection>(sel);
      trains = v.instance == "number-of-trains" && v.numeric_qualifier == 2;
    }
    EXPECT_TRUE(is_key_concept(sel));
  }
  EXPECT_TRUE(collision);
  EXPECT_TRUE(trains);
}

TEST(DiffSheets, AdditionAndChangedQualifier) {
  auto a = exemplar_sheet();
  auto b = a;
  b.selections[ParameterId::risks].push_back(ValueSelection{"derailment", false, std::nullopt});
  auto d = diff_sheets(a, b);
  ASSERT_EQ(d.parameters.size(), 1u);
  EXPECT_EQ(d.parameters.at(ParameterId::risks).added.size(), 1u);

  auto c = a;
  std::get<ValueSelection>(c.selections[ParameterId::actors][0]).numeric_qualifier = 3;
  auto d2 = diff_sheets(a, c);
  ASSERT_EQ(d2.parameters.size(), 1u);
  EXPECT_EQ(d2.parameters.at(ParameterId::actors).changed.size(), 1u);
  EXPECT_TRUE(diff_sheets(a, a).empty());
}

TEST(DiffSheets, DuplicateKeysAreRejected) {
  auto a = exemplar_sheet();
  auto b = a;
  b.selections[ParameterId::risks].push_back(ValueSelection{"collision", false, std::nullopt});
  try {
    diff_sheets(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::schema_mismatch);
  }
}

TEST(DiffSheets, ApplyReconstructsTarget) {
  support::Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    auto a = support::random_document(rng, "a").sheet;
    auto b = support::random_document(rng, "a").sheet;
    auto patched = apply_diff(a, diff_sheets(a, b));
    EXPECT_TRUE(selection_equal(patched, b));
    EXPECT_TRUE(diff_sheets(patched, b).empty());
  }
}

TEST(Codes, UnregisteredCodesBecomeInstances) {
  auto s = exemplar_sheet();
  s.selections[ParameterId::summarized_failures].push_back(CodedEntry{"OO31", "Loss of track circuit", false});
  s.selections[ParameterId::interim_solutions].push_back(CodedEntry{"OS2", "Degraded mode", false});
  auto extra = unregistered_codes(s, default_schema(seed_ontology()), seed_ontology());
  ASSERT_EQ(extra.size(), 2u);
  EXPECT_EQ(extra[0].id, "OO31");
  EXPECT_EQ(extra[0].concept_id, "summarized-failure");
  EXPECT_EQ(extra[1].concept_id, "interim-solution");
  auto grown = seed_ontology().with_instances(extra);
  EXPECT_TRUE(unregistered_codes(s, default_schema(grown), grown).empty());
  EXPECT_EQ(validate_sheet(s, default_schema(grown), grown).error_count(), 0u);
}
