#include "railsafe/archive.hpp"

#include <fstream>

#include <json.hpp>

namespace railsafe {

namespace fs = std::filesystem;
using json = nlohmann::json;

void ArchiveIndex::add(const ScenarioDocument& doc) {
  remove(doc.id());
  documents[doc.id()] = {doc.id(), doc.sheet.title, doc.meta.status, doc.meta.modified};
  for (const auto& [p, list] : doc.sheet.selections) {
    for (const auto& sel : list) postings[{p, selection_key(sel)}].insert(doc.id());
  }
}

void ArchiveIndex::remove(const std::string& id) {
  if (!documents.erase(id)) return;
  for (auto it = postings.begin(); it != postings.end();) {
    it->second.erase(id);
    it = it->second.empty() ? postings.erase(it) : std::next(it);
  }
}

std::size_t ArchiveIndex::entry_count() const {
  std::size_t n = 0;
  for (const auto& [key, ids] : postings) n += ids.size();
  return n;
}

namespace {

constexpr const char* kIndexFile = ".index";

bool is_scenario_file(const fs::directory_entry& e) {
  auto name = e.path().filename().string();
  return e.is_regular_file() && !name.empty() && name.front() != '.' && e.path().extension() == ".xml";
}

void require_id(const std::string& id) {
  if (!is_valid_scenario_id(id)) throw Error(ErrorCode::not_found, "no scenario with id '" + id + "'");
}

}  // namespace

Archive::Archive(fs::path root) : root_(std::move(root)), mutex_(std::make_unique<std::shared_mutex>()) {
  std::error_code ec;
  if (!fs::is_directory(root_, ec)) {
    throw Error(ErrorCode::storage_error, "archive directory '" + root_.string() + "' does not exist");
  }
  if (!read_index()) rebuild_index();
}

Archive Archive::create(const fs::path& root) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorCode::storage_error, "cannot create archive '" + root.string() + "': " + ec.message());
  return Archive(root);
}

Archive::Archive(Archive&&) noexcept = default;
Archive& Archive::operator=(Archive&&) noexcept = default;
Archive::~Archive() = default;

void Archive::set_ontology(std::shared_ptr<const Ontology> o) {
  std::unique_lock lock(*mutex_);
  ontology_ = std::move(o);
}

std::shared_ptr<const Ontology> Archive::ontology() const {
  std::shared_lock lock(*mutex_);
  return ontology_;
}

fs::path Archive::path_for(const std::string& id) const { return root_ / (id + ".xml"); }

namespace {

void check_document(const ScenarioDocument& doc, const Ontology* o) {
  ValidationReport report = (o && doc.meta.status == Status::validated) ? validate_document(doc, *o)
                                                                         : validate_structure(doc);
  if (report.ok()) return;
  std::vector<std::string> details;
  for (const auto& f : report.findings()) {
    if (f.severity == Severity::error) details.push_back(f.subject + ": " + f.message);
  }
  throw Error(ErrorCode::invariant_violation, "scenario '" + doc.id() + "' is invalid: " + details.front(), details);
}

}  // namespace

std::string Archive::save(ScenarioDocument& doc, WriteMode mode) {
  std::unique_lock lock(*mutex_);
  check_document(doc, ontology_.get());
  auto dest = path_for(doc.id());
  std::error_code ec;
  if (mode == WriteMode::create_only && fs::exists(dest, ec)) {
    throw Error(ErrorCode::id_conflict, "scenario '" + doc.id() + "' already exists");
  }
  auto now = text::now_utc();
  if (doc.meta.created == text::Timestamp{}) doc.meta.created = now;
  doc.meta.modified = now;
  text::write_file_atomic(dest, to_xml(doc));
  index_.add(doc);
  persist_index();
  return doc.id();
}

ScenarioDocument Archive::load(const std::string& id) const {
  require_id(id);
  auto path = path_for(id);
  std::error_code ec;
  if (!fs::exists(path, ec)) throw Error(ErrorCode::not_found, "no scenario with id '" + id + "'");
  auto doc = document_from_xml(text::read_file(path.string()));
  if (doc.id() != id) {
    throw Error(ErrorCode::invariant_violation, "file '" + path.filename().string() + "' holds scenario '" + doc.id() + "'");
  }
  check_document(doc, ontology().get());
  return doc;
}

bool Archive::contains(const std::string& id) const {
  std::shared_lock lock(*mutex_);
  return index_.documents.count(id) > 0;
}

void Archive::remove(const std::string& id) {
  require_id(id);
  std::unique_lock lock(*mutex_);
  auto path = path_for(id);
  std::error_code ec;
  if (!fs::remove(path, ec)) {
    if (ec) throw Error(ErrorCode::storage_error, "cannot remove '" + path.string() + "': " + ec.message());
    throw Error(ErrorCode::not_found, "no scenario with id '" + id + "'");
  }
  index_.remove(id);
  persist_index();
}

std::vector<ScenarioSummary> Archive::list(std::optional<Status> filter) const {
  std::shared_lock lock(*mutex_);
  std::vector<ScenarioSummary> out;
  for (const auto& [id, s] : index_.documents) {
    if (!filter || s.status == *filter) out.push_back(s);
  }
  return out;
}

std::set<std::string> Archive::lookup(ParameterId parameter, const std::string& value) const {
  std::shared_lock lock(*mutex_);
  auto it = index_.postings.find({parameter, value});
  return it == index_.postings.end() ? std::set<std::string>{} : it->second;
}

std::vector<std::string> Archive::ids() const {
  std::shared_lock lock(*mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : index_.documents) out.push_back(id);
  return out;
}

ArchiveIndex Archive::index() const {
  std::shared_lock lock(*mutex_);
  return index_;
}

IndexStats Archive::rebuild_index() {
  std::unique_lock lock(*mutex_);
  IndexStats stats;
  ArchiveIndex fresh;
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(root_, ec)) {
    if (is_scenario_file(e)) files.push_back(e.path());
  }
  if (ec) throw Error(ErrorCode::storage_error, "cannot scan '" + root_.string() + "': " + ec.message());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    ++stats.documents_scanned;
    try {
      auto doc = document_from_xml(text::read_file(f.string()));
      if (doc.id() + ".xml" != f.filename().string()) {
        throw Error(ErrorCode::invariant_violation, "file holds scenario '" + doc.id() + "'");
      }
      check_document(doc, ontology_.get());
      fresh.add(doc);
      ++stats.documents_indexed;
    } catch (const Error& err) {
      stats.corrupt.emplace_back(f.filename().string(), err.what());
    }
  }
  stats.entries_created = fresh.entry_count();
  index_ = std::move(fresh);
  persist_index();
  return stats;
}

void Archive::persist_index() const {
  json j;
  j["version"] = 1;
  j["documents"] = json::array();
  for (const auto& [id, s] : index_.documents) {
    j["documents"].push_back({{"id", id},
                              {"title", s.title},
                              {"status", to_string(s.status)},
                              {"modified", text::format_rfc3339(s.modified)}});
  }
  j["postings"] = json::array();
  for (const auto& [key, ids] : index_.postings) {
    j["postings"].push_back({{"parameter", to_string(key.first)}, {"value", key.second}, {"ids", ids}});
  }
  text::write_file_atomic(root_ / kIndexFile, j.dump(1) + "\n");
}

bool Archive::read_index() {
  std::ifstream in(root_ / kIndexFile);
  if (!in) return false;
  try {
    json j = json::parse(in);
    if (j.at("version").get<int>() != 1) return false;
    ArchiveIndex idx;
    for (const auto& d : j.at("documents")) {
      auto status = parse_status(d.at("status").get<std::string>());
      auto modified = text::parse_rfc3339(d.at("modified").get<std::string>());
      if (!status || !modified) return false;
      auto id = d.at("id").get<std::string>();
      idx.documents[id] = {id, d.at("title").get<std::string>(), *status, *modified};
    }
    for (const auto& p : j.at("postings")) {
      auto param = parse_parameter(p.at("parameter").get<std::string>());
      if (!param) return false;
      idx.postings[{*param, p.at("value").get<std::string>()}] = p.at("ids").get<std::set<std::string>>();
    }
    // Stale when the file set differs or any file is newer than the cache.
    std::error_code ec;
    auto stamp = fs::last_write_time(root_ / kIndexFile, ec);
    if (ec) return false;
    std::set<std::string> on_disk;
    for (const auto& e : fs::directory_iterator(root_, ec)) {
      if (!is_scenario_file(e)) continue;
      on_disk.insert(e.path().stem().string());
      if (e.last_write_time() > stamp) return false;
    }
    if (ec || on_disk.size() != idx.documents.size()) return false;
    for (const auto& id : on_disk) {
      if (!idx.documents.count(id)) return false;
    }
    index_ = std::move(idx);
    return true;
  } catch (const json::exception&) {
    return false;
  } catch (const fs::filesystem_error&) {
    return false;
  }
}

}  // namespace railsafe
