#include "railsafe/cli.hpp"

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <thread>

#include <CLI11.hpp>

#include "railsafe/json_codec.hpp"
#include "railsafe/knowledge_base.hpp"
#include "railsafe/query.hpp"
#include "railsafe/seed.hpp"
#include "railsafe/service.hpp"
#include "railsafe/xml.hpp"

namespace railsafe {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Globals {
  std::string archive = "archive";
  std::string ontology = "ontology.xml";
  bool json_output = false;
  CLI::Option* ontology_opt = nullptr;
};

bool exists(const std::string& path) {
  std::error_code ec;
  return fs::is_regular_file(path, ec);
}

bool explicit_ontology(const Globals& g) { return g.ontology_opt && g.ontology_opt->count() > 0; }

// Falls back to the built-in seed when no ontology file was requested and
// the default one is absent.
Ontology ontology_for_reading(const Globals& g, std::ostream& err) {
  if (exists(g.ontology) || explicit_ontology(g)) return load_ontology_file(g.ontology);
  err << "note: " << g.ontology << " not found, using the built-in seed ontology\n";
  return load_ontology(seed::ontology_xml());
}

KnowledgeBase open_kb(const Globals& g) {
  if (!fs::is_directory(g.archive)) {
    throw Error(ErrorCode::storage_error, "archive '" + g.archive + "' does not exist (run `railsafe init`)");
  }
  if (!exists(g.ontology)) {
    throw Error(ErrorCode::storage_error, "ontology '" + g.ontology + "' does not exist (run `railsafe init`)");
  }
  return KnowledgeBase(g.archive, g.ontology);
}

std::string xml_root_name(std::string_view content) {
  auto t = text::trim(content);
  if (t.empty() || t.front() != '<') return "";
  return xml::parse(t).name;
}

void print_report(std::ostream& out, const ValidationReport& r) {
  for (const auto& f : r.sorted()) {
    out << std::left << std::setw(8) << to_string(f.severity) << (f.subject.empty() ? "-" : f.subject) << "  "
        << f.code << "  " << f.message << "\n";
  }
  out << r.error_count() << " errors, " << r.warning_count() << " warnings\n";
}

// init ----------------------------------------------------------------------

int cmd_init(const Globals& g, bool demos, bool force, std::ostream& out) {
  if (!exists(g.ontology) || force) {
    auto parent = fs::path(g.ontology).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    text::write_file_atomic(g.ontology, std::string(seed::ontology_xml()));
    out << "wrote seed ontology to " << g.ontology << "\n";
  } else {
    out << "keeping existing ontology " << g.ontology << "\n";
  }
  Archive::create(g.archive);
  KnowledgeBase kb(g.archive, g.ontology);
  out << "archive ready at " << g.archive << " (" << kb.archive().ids().size() << " scenarios, "
      << kb.ontology()->instances().size() << " ontology instances)\n";
  if (demos) {
    for (auto id : seed::demo_ids()) {
      auto doc = document_from_xml(*seed::demo_xml(id));
      kb.save(doc, WriteMode::overwrite);
      out << "imported " << doc.id() << "\n";
    }
  }
  return 0;
}

// validate ------------------------------------------------------------------

int cmd_validate(const Globals& g, const std::vector<std::string>& files, std::ostream& out, std::ostream& err) {
  bool failed = false;
  std::optional<Ontology> ontology;
  json results = json::array();
  for (const auto& file : files) {
    auto content = text::read_file(file);
    ValidationReport report;
    auto root = xml_root_name(content);
    if (root == "ontology") {
      auto loaded = parse_ontology(content);
      for (const auto& w : loaded.warnings) report.warning("", "loader", w);
      for (const auto& w : loaded.ontology.lint()) report.warning("", "lint", w);
    } else if (root == "scenario") {
      if (!ontology) ontology = ontology_for_reading(g, err);
      report = validate_document(parse_document_xml(content), *ontology);
    } else {
      auto model = petri::parse_net_text(content);
      report = petri::validate_net(model.net);
    }
    failed = failed || !report.ok();
    if (g.json_output) {
      auto j = json_codec::to_json(report);
      j["file"] = file;
      results.push_back(std::move(j));
    } else {
      if (files.size() > 1) out << file << ":\n";
      print_report(out, report);
    }
  }
  if (g.json_output) out << results.dump(2) << "\n";
  return failed ? 1 : 0;
}

// simulate ------------------------------------------------------------------

struct SimulationSource {
  std::string name;
  petri::NetModel model;
  std::optional<ScenarioDocument> document;
  bool from_archive = false;
};

SimulationSource resolve_source(const Globals& g, const std::string& what) {
  if (is_valid_scenario_id(what) && fs::is_directory(g.archive)) {
    Archive archive(g.archive);
    if (archive.contains(what)) {
      auto doc = archive.load(what);
      if (!doc.net) throw Error(ErrorCode::not_found, "scenario '" + what + "' has no Petri net");
      return {what, *doc.net, doc, true};
    }
  }
  if (exists(what)) {
    auto content = text::read_file(what);
    if (xml_root_name(content) == "scenario") {
      auto doc = document_from_xml(content);
      if (!doc.net) throw Error(ErrorCode::not_found, "scenario '" + doc.id() + "' has no Petri net");
      return {doc.id(), *doc.net, doc, false};
    }
    return {fs::path(what).stem().string(), petri::parse_net_text(content), std::nullopt, false};
  }
  if (auto demo = seed::demo_xml(what)) {
    auto doc = document_from_xml(*demo);
    return {what, *doc.net, doc, false};
  }
  throw Error(ErrorCode::not_found, "'" + what + "' is neither an archived scenario, a file, nor a built-in demo");
}

petri::ExplorationBounds parse_bounds(const std::vector<std::string>& specs) {
  petri::ExplorationBounds b;
  for (const auto& s : specs) {
    auto eq = s.find('=');
    auto key = s.substr(0, eq);
    auto value = eq == std::string::npos ? std::nullopt : text::parse_int(std::string_view(s).substr(eq + 1));
    if (!value || *value <= 0) throw Error(ErrorCode::invalid_bound, "bound '" + s + "' needs a positive integer value");
    if (key == "markings" || key == "max-markings") b.max_markings = static_cast<std::size_t>(*value);
    else if (key == "tokens" || key == "max-tokens") b.max_tokens = *value;
    else if (key == "depth" || key == "max-depth") b.max_depth = static_cast<std::size_t>(*value);
    else throw Error(ErrorCode::invalid_bound, "unknown bound '" + key + "' (markings, tokens, depth)");
  }
  return b;
}

void print_table(std::ostream& out, const petri::SequencingTable& t, std::size_t number) {
  out << "Table " << number << (t.critical ? " (critical, " : " (") << t.rows.size() << " steps)\n";
  std::size_t tw = std::string("transition").size();
  std::size_t mw = std::max(t.initial.to_string().size(), std::string("marking").size());
  for (const auto& r : t.rows) {
    tw = std::max(tw, r.transition.size());
    mw = std::max(mw, r.marking.to_string().size());
  }
  auto row = [&](const std::string& step, const std::string& tr, const std::string& m, const std::string& s) {
    out << "  " << std::left << std::setw(5) << step << std::setw(static_cast<int>(tw) + 2) << tr
        << std::setw(static_cast<int>(mw) + 2) << m << s << "\n";
  };
  row("step", "transition", "marking", "situation");
  row("0", "-", t.initial.to_string(), "initial");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    row(std::to_string(i + 1), t.rows[i].transition, t.rows[i].marking.to_string(), t.rows[i].situation_label);
  }
}

struct SimulateOptions {
  std::string source;
  std::string predicate;
  std::vector<std::string> bounds;
  bool all_paths = false;
  bool save = false;
  double timeout = 0;
};

int cmd_simulate(const Globals& g, const SimulateOptions& opt, std::ostream& out) {
  auto src = resolve_source(g, opt.source);
  std::optional<petri::CriticalPredicate> pred = src.model.predicate;
  if (!opt.predicate.empty()) pred = petri::CriticalPredicate::parse(opt.predicate);
  if (!pred) throw Error(ErrorCode::syntax_error, "no critical predicate: pass --pred");
  petri::check_predicate(src.model.net, *pred);
  auto bounds = parse_bounds(opt.bounds);

  petri::ExplorationControl control;
  if (opt.timeout > 0) {
    control.deadline = std::chrono::steady_clock::now() +
                       std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(opt.timeout));
  }
  auto result = opt.all_paths
                    ? petri::find_critical_all_paths(src.model.net, src.model.initial, *pred, bounds, 1000, control)
                    : petri::find_critical(src.model.net, src.model.initial, *pred, bounds, control);

  if (opt.save) {
    if (!src.from_archive) throw Error(ErrorCode::not_found, "--save needs an archived scenario id");
    auto kb = open_kb(g);
    auto doc = *src.document;
    doc.net->predicate = pred;
    doc.tables = result.tables;
    kb.save(doc, WriteMode::overwrite);
  }

  if (g.json_output) {
    auto j = json_codec::to_json(result);
    j["source"] = src.name;
    j["predicate"] = pred->to_string();
    out << j.dump(2) << "\n";
    return 0;
  }
  out << src.name << ": predicate " << pred->to_string() << ", " << result.tables.size()
      << " critical table(s), " << result.markings_explored << " markings explored\n";
  if (result.truncated.any()) {
    out << "warning: exploration truncated (" << json_codec::to_json(result.truncated).dump() << ")\n";
  }
  if (result.tables.empty()) out << "no critical marking reachable within the bounds\n";
  for (std::size_t i = 0; i < result.tables.size(); ++i) print_table(out, result.tables[i], i + 1);
  if (opt.save) out << "saved tables to " << src.name << "\n";
  return 0;
}

// query ---------------------------------------------------------------------

int cmd_query(const Globals& g, const std::string& text, const std::string& projection, bool explain, bool scan,
              std::ostream& out) {
  auto kb = open_kb(g);
  auto ast = query::parse_query(text);
  auto p = query::parse_projection(projection);
  if (!p) throw Error(ErrorCode::parse_error, "projection must be ids, summaries or full");
  ast.projection = *p;
  auto o = kb.ontology();
  auto result = query::evaluate(ast, kb.archive(), *o, {scan});
  if (g.json_output) {
    auto j = json_codec::to_json(result, ast.projection);
    j["query"] = query::print_query(ast);
    if (explain) j["explanation"] = json_codec::to_json(query::explain(ast, *o));
    out << j.dump(2) << "\n";
    return 0;
  }
  if (explain) {
    for (const auto& a : query::explain(ast, *o).atoms) {
      out << "# " << a.atom << (a.index_served ? "  [index]" : "  [scan]");
      if (!a.expansion.empty()) {
        out << " ->";
        for (const auto& e : a.expansion) out << " " << e;
      }
      out << "\n";
    }
  }
  switch (ast.projection) {
    case query::Projection::ids:
      for (const auto& id : result.ids) out << id << "\n";
      break;
    case query::Projection::summaries:
      for (const auto& s : result.summaries) {
        out << s.id << "\t" << to_string(s.status) << "\t" << text::format_rfc3339(s.modified) << "\t" << s.title << "\n";
      }
      break;
    case query::Projection::full:
      for (const auto& d : result.documents) out << to_xml(d);
      break;
  }
  return 0;
}

// import / export -----------------------------------------------------------

int cmd_import(const Globals& g, const std::vector<std::string>& files, bool overwrite, std::ostream& out) {
  auto kb = open_kb(g);
  for (const auto& f : files) {
    std::string content;
    if (exists(f)) content = text::read_file(f);
    else if (f == "exemplar") content = seed::exemplar_xml();
    else if (auto demo = seed::demo_xml(f)) content = *demo;
    else throw Error(ErrorCode::not_found, "no file '" + f + "'");
    auto doc = document_from_xml(content);
    auto outcome = kb.save(doc, overwrite ? WriteMode::overwrite : WriteMode::create_only);
    out << "imported " << outcome.id << "\n";
    for (const auto& i : outcome.registered) out << "registered code " << i.id << " under " << i.concept_id << "\n";
  }
  return 0;
}

int cmd_export(const Globals& g, const std::string& id, const std::string& format, const std::string& output,
               std::ostream& out) {
  Archive archive(g.archive);
  auto doc = archive.load(id);
  std::string content;
  if (format == "xml") content = to_xml(doc);
  else if (format == "json") content = json_codec::to_json(doc).dump(2) + "\n";
  else if (format == "net") {
    if (!doc.net) throw Error(ErrorCode::not_found, "scenario '" + id + "' has no Petri net");
    content = petri::export_net_text(*doc.net);
  } else {
    throw Error(ErrorCode::parse_error, "format must be xml, json or net");
  }
  if (output.empty()) out << content;
  else text::write_file_atomic(output, content);
  return 0;
}

// tree ----------------------------------------------------------------------

void print_tree(std::ostream& out, const std::vector<TreeNode>& nodes, int depth, bool instances) {
  for (const auto& n : nodes) {
    out << std::string(depth * 2, ' ') << n.concept_id << "  (" << n.label << ")\n";
    if (instances) {
      for (const auto& i : n.instances) out << std::string(depth * 2 + 2, ' ') << "- " << i.id << "  " << i.label << "\n";
    }
    print_tree(out, n.children, depth + 1, instances);
  }
}

int cmd_tree(const Globals& g, bool instances, std::ostream& out, std::ostream& err) {
  auto o = ontology_for_reading(g, err);
  auto forest = concept_tree(o);
  if (g.json_output) out << json_codec::to_json(forest).dump(2) << "\n";
  else print_tree(out, forest, 0, instances);
  return 0;
}

// serve ---------------------------------------------------------------------

int cmd_serve(const Globals& g, ServiceConfig config, std::ostream& out) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto kb = open_kb(g);
  Service service(kb, config);
  int port = service.bind();
  out << "listening on http://" << config.host << ":" << port << "\n" << std::flush;
  std::jthread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });
  service.run();
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
  }
  out << "stopped\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Railway accident scenario knowledge base", "railsafe"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--archive", g.archive, "Archive directory")->envname("RAILSAFE_ARCHIVE")->capture_default_str();
  g.ontology_opt = app.add_option("--ontology", g.ontology, "Ontology file")
                       ->envname("RAILSAFE_ONTOLOGY")
                       ->capture_default_str();
  app.add_flag("--json", g.json_output, "Machine-readable JSON output");

  bool demos = false, force = false;
  auto* init = app.add_subcommand("init", "Create the archive and install the seed ontology");
  init->add_flag("--demos", demos, "Also import the built-in demo scenarios");
  init->add_flag("--force", force, "Overwrite an existing ontology file with the seed");

  std::vector<std::string> files;
  auto* validate = app.add_subcommand("validate", "Validate scenario documents, ontologies or net files");
  validate->add_option("files", files)->required();

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Search a scenario net for critical markings");
  simulate->add_option("source", sim.source, "Archived id, document or net file, or built-in demo")->required();
  simulate->add_option("--pred", sim.predicate, "Critical predicate, e.g. \"seg3 >= 2\"");
  simulate->add_option("--bound", sim.bounds, "Exploration bound: markings=N, tokens=N or depth=N");
  simulate->add_flag("--all-paths", sim.all_paths, "Enumerate every repetition-free path to a critical marking");
  simulate->add_flag("--save", sim.save, "Store the tables with the archived scenario");
  simulate->add_option("--timeout", sim.timeout, "Time budget in seconds");

  std::string query_text, projection = "ids";
  bool explain = false, scan = false;
  auto* query_cmd = app.add_subcommand("query", "Query the archive");
  query_cmd->add_option("expr", query_text, "Query expression (empty matches all)");
  query_cmd->add_option("--projection", projection, "ids, summaries or full")->capture_default_str();
  query_cmd->add_flag("--explain", explain, "Show how each atom expands");
  query_cmd->add_flag("--scan", scan, "Bypass the index");

  bool overwrite = false;
  auto* import = app.add_subcommand("import", "Import scenario documents into the archive");
  import->add_option("files", files, "Document files, or `exemplar` / a demo id")->required();
  import->add_flag("--overwrite", overwrite, "Replace scenarios that already exist");

  std::string export_id, format = "xml", output;
  auto* export_cmd = app.add_subcommand("export", "Print an archived scenario");
  export_cmd->add_option("id", export_id)->required();
  export_cmd->add_option("--format", format, "xml, json or net")->check(CLI::IsMember({"xml", "json", "net"}))->capture_default_str();
  export_cmd->add_option("-o,--output", output, "Write to a file instead of standard output");

  bool tree_instances = false;
  auto* tree = app.add_subcommand("tree", "Print the ontology forest");
  tree->add_flag("--instances", tree_instances, "List instances under each concept");

  ServiceConfig config;
  std::string token;
  double budget = 10;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--host", config.host)->capture_default_str();
  serve->add_option("--port", config.port)->check(CLI::Range(1, 65535))->capture_default_str();
  serve->add_option("--token", token, "Require this bearer token")->envname("RAILSAFE_TOKEN");
  serve->add_option("--cors", config.cors_origins, "Allowed CORS origin (repeatable, * for any)");
  serve->add_option("--budget", budget, "Simulation time budget in seconds")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 2;
  }

  try {
    if (*init) return cmd_init(g, demos, force, out);
    if (*validate) return cmd_validate(g, files, out, err);
    if (*simulate) return cmd_simulate(g, sim, out);
    if (*query_cmd) return cmd_query(g, query_text, projection, explain, scan, out);
    if (*import) return cmd_import(g, files, overwrite, out);
    if (*export_cmd) return cmd_export(g, export_id, format, output, out);
    if (*tree) return cmd_tree(g, tree_instances, out, err);
    if (*serve) {
      if (!token.empty()) config.token = token;
      config.simulate_budget = std::chrono::milliseconds(static_cast<long long>(budget * 1000));
      return cmd_serve(g, config, out);
    }
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    for (const auto& d : e.details()) err << "  " << d << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace railsafe
