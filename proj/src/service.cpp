#include "railsafe/service.hpp"

#include <algorithm>

#include <httplib.h>

#include "railsafe/json_codec.hpp"
#include "railsafe/query.hpp"

namespace railsafe {

using json = nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::id_conflict: return 409;
    case ErrorCode::consistency_error:
    case ErrorCode::invariant_violation: return 422;
    case ErrorCode::storage_error:
    case ErrorCode::missing_anchor: return 500;
    default: return 400;
  }
}

namespace {

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message,
                std::vector<std::string> details = {}) {
  send(res, status, {{"code", code}, {"message", message}, {"details", std::move(details)}});
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, "request body is not valid JSON", {e.what()});
  }
}

bool parse_flag(const httplib::Request& req, const std::string& key, bool fallback) {
  if (!req.has_param(key)) return fallback;
  auto v = req.get_param_value(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(ErrorCode::parse_error, "query parameter '" + key + "' must be true or false");
}

}  // namespace

struct Service::Impl {
  KnowledgeBase& kb;
  ServiceConfig config;
  httplib::Server server;

  Impl(KnowledgeBase& k, ServiceConfig c) : kb(k), config(std::move(c)) { routes(); }

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  // Every route runs through here so errors always take the {code, message, details} shape.
  httplib::Server::Handler guarded(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const Error& e) {
        send(res, http_status(e.code()), json_codec::to_json(e));
      } catch (const json::exception& e) {
        send_error(res, 400, "parse-error", e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "internal-error", e.what());
      }
    };
  }

  std::optional<std::string> allowed_origin(const httplib::Request& req) const {
    if (!req.has_header("Origin")) return std::nullopt;
    auto origin = req.get_header_value("Origin");
    for (const auto& o : config.cors_origins) {
      if (o == "*" || o == origin) return o == "*" ? "*" : origin;
    }
    return std::nullopt;
  }

  void routes() {
    server.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      if (auto origin = allowed_origin(req)) {
        res.set_header("Access-Control-Allow-Origin", *origin);
        res.set_header("Access-Control-Allow-Headers", "Authorization, Content-Type");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
        if (req.method == "OPTIONS") {
          res.status = 204;
          return httplib::Server::HandlerResponse::Handled;
        }
      }
      if (config.token && req.get_header_value("Authorization") != "Bearer " + *config.token) {
        send_error(res, 401, "unauthorized", "missing or invalid bearer token");
        return httplib::Server::HandlerResponse::Handled;
      }
      return httplib::Server::HandlerResponse::Unhandled;
    });

    server.Get("/ontology/tree", guarded([this](const auto&, auto& res) {
      send(res, 200, json_codec::to_json(concept_tree(*kb.ontology())));
    }));

    server.Get(R"(/ontology/concepts/([^/]+)/instances)", guarded([this](const auto& req, auto& res) {
      auto o = kb.ontology();
      const std::string id = req.matches[1];
      if (!o->has_concept(id)) throw Error(ErrorCode::not_found, "no concept with id '" + id + "'");
      json out = json::array();
      for (const auto& i : o->instances_of(id, parse_flag(req, "transitive", true))) out.push_back(json_codec::to_json(i));
      send(res, 200, out);
    }));

    server.Post("/ontology/reload", guarded([this](const auto&, auto& res) {
      kb.reload_ontology();
      send(res, 200, {{"version", kb.ontology()->version()}});
    }));

    server.Get("/scenarios", guarded([this](const auto& req, auto& res) { list(req, res); }));
    server.Post("/scenarios", guarded([this](const auto& req, auto& res) { create(req, res); }));
    server.Get(R"(/scenarios/([^/]+))", guarded([this](const auto& req, auto& res) {
      send(res, 200, json_codec::to_json(kb.archive().load(req.matches[1])));
    }));
    server.Put(R"(/scenarios/([^/]+))", guarded([this](const auto& req, auto& res) { replace(req, res); }));
    server.Post(R"(/scenarios/([^/]+)/validate)", guarded([this](const auto& req, auto& res) {
      send(res, 200, json_codec::to_json(kb.validate(kb.archive().load(req.matches[1]))));
    }));
    server.Post(R"(/scenarios/([^/]+)/simulate)", guarded([this](const auto& req, auto& res) { simulate(req, res); }));
    server.Post("/query", guarded([this](const auto& req, auto& res) { run_query(req, res); }));
  }

  void list(const httplib::Request& req, httplib::Response& res) {
    std::optional<Status> status;
    if (req.has_param("status")) {
      status = parse_status(req.get_param_value("status"));
      if (!status) throw Error(ErrorCode::parse_error, "status must be draft or validated");
    }
    std::vector<ScenarioSummary> rows;
    if (req.has_param("q")) {
      auto ast = query::parse_query(req.get_param_value("q"));
      ast.projection = query::Projection::summaries;
      rows = query::evaluate(ast, kb.archive(), *kb.ontology()).summaries;
      if (status) std::erase_if(rows, [&](const auto& s) { return s.status != *status; });
    } else {
      rows = kb.archive().list(status);
    }
    json out = json::array();
    for (const auto& s : rows) out.push_back(json_codec::to_json(s));
    send(res, 200, out);
  }

  json saved(const KnowledgeBase::SaveOutcome& outcome, const ScenarioDocument& doc) {
    json registered = json::array();
    for (const auto& i : outcome.registered) registered.push_back(i.id);
    return {{"id", outcome.id}, {"registered", registered}, {"report", json_codec::to_json(kb.validate(doc))}};
  }

  void create(const httplib::Request& req, httplib::Response& res) {
    auto doc = json_codec::document_from_json(parse_body(req));
    auto outcome = kb.save(doc, WriteMode::create_only);
    res.set_header("Location", "/scenarios/" + outcome.id);
    send(res, 201, saved(outcome, doc));
  }

  void replace(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    auto doc = json_codec::document_from_json(parse_body(req));
    if (doc.id() != id) {
      throw Error(ErrorCode::parse_error, "document id '" + doc.id() + "' does not match '" + id + "'", {"id"});
    }
    auto existing = kb.archive().load(id);
    if (doc.meta.created == text::Timestamp{}) doc.meta.created = existing.meta.created;
    auto outcome = kb.save(doc, WriteMode::overwrite);
    send(res, 200, saved(outcome, doc));
  }

  void simulate(const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req);
    auto doc = kb.archive().load(req.matches[1]);
    if (!doc.net) {
      send_error(res, 409, "no-net", "scenario '" + doc.id() + "' has no Petri net");
      return;
    }
    std::optional<petri::CriticalPredicate> pred = doc.net->predicate;
    if (body.contains("predicate") && !body["predicate"].is_null()) {
      pred = petri::CriticalPredicate::parse(body["predicate"].get<std::string>());
    }
    if (!pred) {
      send_error(res, 400, "no-predicate", "no critical predicate given and none stored with the net");
      return;
    }
    petri::check_predicate(doc.net->net, *pred);
    auto bounds = body.contains("bounds") ? json_codec::bounds_from_json(body["bounds"], config.bounds) : config.bounds;
    petri::check_bounds(bounds);
    bool all_paths = body.value("all-paths", false);
    bool persist = body.value("persist", true);

    petri::ExplorationControl control;
    control.deadline = std::chrono::steady_clock::now() + config.simulate_budget;
    auto result = all_paths ? petri::find_critical_all_paths(doc.net->net, doc.net->initial, *pred, bounds, 1000, control)
                            : petri::find_critical(doc.net->net, doc.net->initial, *pred, bounds, control);
    json out = json_codec::to_json(result);
    out["predicate"] = pred->to_string();
    if (persist) {
      doc.net->predicate = pred;
      doc.tables = result.tables;
      kb.save(doc, WriteMode::overwrite);
    }
    out["persisted"] = persist;
    send(res, 200, out);
  }

  void run_query(const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req);
    auto ast = query::parse_query(body.value("text", std::string()));
    if (body.contains("projection")) {
      auto p = query::parse_projection(body["projection"].get<std::string>());
      if (!p) throw Error(ErrorCode::parse_error, "projection must be ids, summaries or full", {"projection"});
      ast.projection = *p;
    }
    auto o = kb.ontology();
    json out = json_codec::to_json(query::evaluate(ast, kb.archive(), *o), ast.projection);
    out["query"] = query::print_query(ast);
    if (body.value("explain", false)) out["explanation"] = json_codec::to_json(query::explain(ast, *o));
    send(res, 200, out);
  }
};

Service::Service(KnowledgeBase& kb, ServiceConfig config) : impl_(std::make_unique<Impl>(kb, std::move(config))) {}

Service::~Service() { stop(); }

int Service::bind() {
  auto& c = impl_->config;
  if (c.port < 0 || c.port > 65535) throw Error(ErrorCode::storage_error, "port must be in [0, 65535]");
  if (c.port == 0) {
    int port = impl_->server.bind_to_any_port(c.host);
    if (port < 0) throw Error(ErrorCode::storage_error, "cannot bind " + c.host);
    c.port = port;
  } else if (!impl_->server.bind_to_port(c.host, c.port)) {
    throw Error(ErrorCode::storage_error, "cannot bind " + c.host + ":" + std::to_string(c.port));
  }
  return c.port;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace railsafe
