#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include <httplib.h>

#include "railsafe/json_codec.hpp"
#include "railsafe/seed.hpp"
#include "railsafe/service.hpp"
#include "support/support.hpp"

using namespace railsafe;
using railsafe::json_codec::json;
using support::TempDir;

namespace {

void write(const std::filesystem::path& p, std::string_view content) { std::ofstream(p) << content; }

class Server {
 public:
  explicit Server(ServiceConfig config = {}) {
    write(tmp / "ontology.xml", seed::ontology_xml());
    kb = std::make_unique<KnowledgeBase>(Archive::create(tmp / "archive").root(), tmp / "ontology.xml");
    config.port = 0;
    config.host = "127.0.0.1";
    service = std::make_unique<Service>(*kb, config);
    port = service->bind();
    thread = std::thread([this] { service->run(); });
    // Wait until the accept loop runs so stop() cannot race the start.
    httplib::Client probe("127.0.0.1", port);
    for (int i = 0; i < 200 && !probe.Options("/"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ~Server() {
    service->stop();
    thread.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(30, 0);
    return c;
  }

  TempDir tmp;
  std::unique_ptr<KnowledgeBase> kb;
  std::unique_ptr<Service> service;
  int port = 0;
  std::thread thread;
};

json body_of(const httplib::Result& r) {
  EXPECT_TRUE(r) << "no response";
  return r ? json::parse(r->body) : json();
}

std::string exemplar_json() { return json_codec::to_json(support::exemplar()).dump(); }

}  // namespace

TEST(HttpStatus, Mapping) {
  EXPECT_EQ(http_status(ErrorCode::not_found), 404);
  EXPECT_EQ(http_status(ErrorCode::id_conflict), 409);
  EXPECT_EQ(http_status(ErrorCode::invariant_violation), 422);
  EXPECT_EQ(http_status(ErrorCode::consistency_error), 422);
  EXPECT_EQ(http_status(ErrorCode::storage_error), 500);
  EXPECT_EQ(http_status(ErrorCode::syntax_error), 400);
  EXPECT_EQ(http_status(ErrorCode::unknown_concept), 400);
}

TEST(KnowledgeBase, RegistersNewCodesInTheOntologyFile) {
  TempDir tmp;
  write(tmp / "o.xml", seed::ontology_xml());
  KnowledgeBase kb(Archive::create(tmp / "a").root(), tmp / "o.xml");
  auto before = kb.ontology();
  auto doc = support::exemplar();
  doc.meta.ontology_version.clear();
  doc.sheet.selections[ParameterId::summarized_failures].push_back(CodedEntry{"OO31", "Loss of detection", false});
  auto outcome = kb.save(doc, WriteMode::create_only);
  EXPECT_EQ(doc.meta.ontology_version, before->version());
  ASSERT_EQ(outcome.registered.size(), 1u);
  EXPECT_EQ(outcome.registered[0].id, "OO31");
  EXPECT_TRUE(kb.ontology()->has_instance("OO31"));
  EXPECT_FALSE(before->has_instance("OO31"));
  EXPECT_TRUE(load_ontology_file((tmp / "o.xml").string()).has_instance("OO31"));

  auto again = kb.save(doc, WriteMode::overwrite);
  EXPECT_TRUE(again.registered.empty());
}

TEST(KnowledgeBase, FailedReloadKeepsSnapshot) {
  TempDir tmp;
  write(tmp / "o.xml", seed::ontology_xml());
  KnowledgeBase kb(Archive::create(tmp / "a").root(), tmp / "o.xml");
  write(tmp / "o.xml", "<ontology");
  EXPECT_THROW(kb.reload_ontology(), Error);
  EXPECT_EQ(kb.ontology()->instances().size(), 45u);
}

TEST(Service, ScenarioLifecycle) {
  Server s;
  auto c = s.client();

  auto created = c.Post("/scenarios", exemplar_json(), "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  EXPECT_EQ(created->get_header_value("Location"), "/scenarios/table1-exemplar");
  auto cj = json::parse(created->body);
  EXPECT_EQ(cj["id"], "table1-exemplar");
  EXPECT_EQ(cj["report"]["errors"], 0);

  auto dup = c.Post("/scenarios", exemplar_json(), "application/json");
  EXPECT_EQ(dup->status, 409);
  EXPECT_EQ(body_of(dup)["code"], "id-conflict");

  auto got = c.Get("/scenarios/table1-exemplar");
  EXPECT_EQ(got->status, 200);
  EXPECT_EQ(json_codec::document_from_json(body_of(got)), s.kb->archive().load("table1-exemplar"));

  auto missing = c.Get("/scenarios/nope");
  EXPECT_EQ(missing->status, 404);
  auto mj = body_of(missing);
  EXPECT_EQ(mj["code"], "not-found");
  EXPECT_TRUE(mj.contains("message") && mj.contains("details"));

  auto list = body_of(c.Get("/scenarios"));
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list[0]["id"], "table1-exemplar");
  EXPECT_EQ(body_of(c.Get("/scenarios?status=draft")).size(), 0u);
  EXPECT_EQ(body_of(c.Get("/scenarios?q=risks%20isa%20%22collision%22")).size(), 1u);
  EXPECT_EQ(c.Get("/scenarios?q=risks%20has")->status, 400);

  auto edited = json_codec::to_json(support::exemplar());
  edited["sheet"]["title"] = "Edited";
  edited["meta"].erase("created");
  auto put = c.Put("/scenarios/table1-exemplar", edited.dump(), "application/json");
  EXPECT_EQ(put->status, 200);
  auto reloaded = s.kb->archive().load("table1-exemplar");
  EXPECT_EQ(reloaded.sheet.title, "Edited");
  EXPECT_EQ(reloaded.meta.created, support::exemplar().meta.created);

  EXPECT_EQ(c.Put("/scenarios/other", edited.dump(), "application/json")->status, 400);
  edited["id"] = "other";
  EXPECT_EQ(c.Put("/scenarios/other", edited.dump(), "application/json")->status, 404);

  auto v = c.Post("/scenarios/table1-exemplar/validate", "", "application/json");
  EXPECT_EQ(v->status, 200);
  EXPECT_EQ(body_of(v), json_codec::to_json(s.kb->validate(reloaded)));
}

TEST(Service, RejectsBadBodies) {
  Server s;
  auto c = s.client();
  auto r = c.Post("/scenarios", "{ nope", "application/json");
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(body_of(r)["code"], "parse-error");
  auto doc = json_codec::to_json(support::exemplar());
  doc["net"]["initial-marking"]["seg3"] = -1;
  r = c.Post("/scenarios", doc.dump(), "application/json");
  EXPECT_EQ(r->status, 422);
  EXPECT_EQ(body_of(r)["code"], "invariant-violation");
}

TEST(Service, SimulateMatchesLibraryAndPersists) {
  Server s;
  auto c = s.client();
  auto demo = document_from_xml(*seed::demo_xml("demo-collision"));
  ASSERT_EQ(c.Post("/scenarios", json_codec::to_json(demo).dump(), "application/json")->status, 201);

  auto r = c.Post("/scenarios/demo-collision/simulate", "{}", "application/json");
  ASSERT_EQ(r->status, 200);
  auto j = body_of(r);
  auto expected = petri::find_critical(demo.net->net, demo.net->initial, *demo.net->predicate, petri::ExplorationBounds{});
  EXPECT_EQ(j["tables"], json_codec::to_json(expected)["tables"]);
  EXPECT_EQ(j["predicate"], "seg3 >= 2");
  EXPECT_EQ(j["persisted"], true);
  EXPECT_EQ(s.kb->archive().load("demo-collision").tables, expected.tables);

  auto all = body_of(c.Post("/scenarios/demo-collision/simulate",
                            R"({"all-paths": true, "persist": false, "bounds": {"max-depth": 20}})", "application/json"));
  EXPECT_GE(all["tables"].size(), 1u);
  EXPECT_EQ(all["persisted"], false);

  auto bad = c.Post("/scenarios/demo-collision/simulate", R"({"predicate": "ghost >= 1"})", "application/json");
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(body_of(bad)["code"], "unknown-place");
  bad = c.Post("/scenarios/demo-collision/simulate", R"({"bounds": {"max-markings": 0}})", "application/json");
  EXPECT_EQ(body_of(bad)["code"], "invalid-bound");

  auto netless = support::exemplar();
  netless.sheet.scenario_id = "no-net";
  netless.net.reset();
  ASSERT_EQ(c.Post("/scenarios", json_codec::to_json(netless).dump(), "application/json")->status, 201);
  auto nn = c.Post("/scenarios/no-net/simulate", "{}", "application/json");
  EXPECT_EQ(nn->status, 409);
  EXPECT_EQ(body_of(nn)["code"], "no-net");
}

TEST(Service, QueryMatchesLibrary) {
  Server s;
  auto c = s.client();
  support::Rng rng(77);
  for (int i = 0; i < 15; ++i) {
    auto d = support::random_document(rng, "q" + std::to_string(i));
    ASSERT_EQ(c.Post("/scenarios", json_codec::to_json(d).dump(), "application/json")->status, 201);
  }
  for (int i = 0; i < 10; ++i) {
    auto ast = support::random_query(rng, 2);
    auto text = query::print_query(ast);
    auto r = c.Post("/query", json{{"text", text}, {"projection", "summaries"}}.dump(), "application/json");
    ASSERT_EQ(r->status, 200) << r->body;
    ast.projection = query::Projection::summaries;
    auto expected = query::evaluate(ast, s.kb->archive(), *s.kb->ontology());
    auto j = body_of(r);
    EXPECT_EQ(j["ids"], json(expected.ids));
    EXPECT_EQ(j["summaries"].size(), expected.summaries.size());
  }
  auto e = body_of(c.Post("/query", R"({"text": "risks isa \"risk\"", "explain": true})", "application/json"));
  ASSERT_EQ(e["explanation"].size(), 1u);
  EXPECT_EQ(e["explanation"][0]["index-served"], true);
  auto bad = c.Post("/query", R"({"text": "risks has"})", "application/json");
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(body_of(bad)["code"], "syntax-error");
  bad = c.Post("/query", R"({"text": "risks isa \"unheard-of\""})", "application/json");
  EXPECT_EQ(body_of(bad)["code"], "unknown-concept");
}

TEST(Service, OntologyRoutes) {
  Server s;
  auto c = s.client();
  auto tree = body_of(c.Get("/ontology/tree"));
  EXPECT_EQ(tree, json_codec::to_json(concept_tree(*s.kb->ontology())));
  auto risks = body_of(c.Get("/ontology/concepts/risk/instances"));
  EXPECT_EQ(risks.size(), 8u);
  auto direct = body_of(c.Get("/ontology/concepts/risk/instances?transitive=false"));
  EXPECT_LT(direct.size(), risks.size());
  EXPECT_EQ(c.Get("/ontology/concepts/nope/instances")->status, 404);
  EXPECT_EQ(c.Get("/ontology/concepts/risk/instances?transitive=maybe")->status, 400);

  // New codes registered through a save show up under their anchor.
  auto doc = support::exemplar();
  doc.sheet.selections[ParameterId::interim_solutions].push_back(CodedEntry{"OS40", "Manual drive", false});
  auto created = body_of(c.Post("/scenarios", json_codec::to_json(doc).dump(), "application/json"));
  EXPECT_EQ(created["registered"], json::array({"OS40"}));
  EXPECT_EQ(body_of(c.Get("/ontology/concepts/interim-solution/instances")).size(), 2u);

  auto reload = c.Post("/ontology/reload", "", "application/json");
  EXPECT_EQ(reload->status, 200);
  EXPECT_TRUE(s.kb->ontology()->has_instance("OS40"));
}

TEST(Service, BearerTokenAndCors) {
  ServiceConfig config;
  config.token = "s3cret";
  config.cors_origins = {"http://ui.local"};
  Server s(config);
  auto c = s.client();
  auto r = c.Get("/scenarios");
  EXPECT_EQ(r->status, 401);
  EXPECT_EQ(body_of(r)["code"], "unauthorized");
  EXPECT_EQ(c.Get("/scenarios", {{"Authorization", "Bearer wrong"}})->status, 401);
  EXPECT_EQ(c.Get("/scenarios", {{"Authorization", "Bearer s3cret"}})->status, 200);

  auto pre = c.Options("/scenarios", {{"Origin", "http://ui.local"}});
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  EXPECT_EQ(pre->get_header_value("Access-Control-Allow-Origin"), "http://ui.local");
  auto other = c.Get("/scenarios", {{"Origin", "http://evil.local"}, {"Authorization", "Bearer s3cret"}});
  EXPECT_FALSE(other->has_header("Access-Control-Allow-Origin"));
}
