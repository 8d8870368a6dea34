#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "railsafe/document.hpp"

namespace railsafe {

struct ScenarioSummary {
  std::string id;
  std::string title;
  Status status = Status::draft;
  text::Timestamp modified{};

  friend bool operator==(const ScenarioSummary&, const ScenarioSummary&) = default;
};

/// Derived lookup cache: (parameter, value) postings plus per-document summaries.
/// Always reconstructible from the files on disk.
struct ArchiveIndex {
  std::map<std::pair<ParameterId, std::string>, std::set<std::string>> postings;
  std::map<std::string, ScenarioSummary> documents;

  void add(const ScenarioDocument& doc);
  void remove(const std::string& id);
  std::size_t entry_count() const;

  friend bool operator==(const ArchiveIndex&, const ArchiveIndex&) = default;
};

struct IndexStats {
  std::size_t documents_scanned = 0;
  std::size_t documents_indexed = 0;
  std::size_t entries_created = 0;
  /// (file name, reason) for every file that failed to load.
  std::vector<std::pair<std::string, std::string>> corrupt;
};

enum class WriteMode { create_only, overwrite };

/// One XML file per scenario in a flat directory, `<root>/<id>.xml`, with the
/// index cached at `<root>/.index`.
///
/// Writes are serialized through an internal lock and published with a
/// write-temp-then-rename so readers never observe a partial file. Readers may
/// run concurrently with each other. Cross-process locking is not provided.
class Archive {
 public:
  /// Opens an existing archive directory. Uses the cached index when it is
  /// readable, otherwise rebuilds it. Throws storage_error if the directory is missing.
  explicit Archive(std::filesystem::path root);

  /// Creates the directory (and parents) if needed, then opens it.
  static Archive create(const std::filesystem::path& root);

  Archive(const Archive&) = delete;
  Archive& operator=(const Archive&) = delete;
  Archive(Archive&&) noexcept;
  Archive& operator=(Archive&&) noexcept;
  ~Archive();

  const std::filesystem::path& root() const noexcept { return root_; }

  /// When set, documents with status validated must pass full validation
  /// against this ontology on save and on load.
  void set_ontology(std::shared_ptr<const Ontology> o);
  std::shared_ptr<const Ontology> ontology() const;

  /// Persists `doc`, stamping meta.modified (and meta.created when unset) in
  /// place. Throws id_conflict in create_only mode when the id exists,
  /// invariant_violation for invalid documents, storage_error on I/O failure.
  std::string save(ScenarioDocument& doc, WriteMode mode = WriteMode::create_only);

  /// Throws not_found, parse_error, or invariant_violation.
  ScenarioDocument load(const std::string& id) const;
  bool contains(const std::string& id) const;
  /// Throws not_found.
  void remove(const std::string& id);

  /// Sorted by id.
  std::vector<ScenarioSummary> list(std::optional<Status> filter = std::nullopt) const;

  /// Ids whose sheet selects `value` under `parameter`.
  std::set<std::string> lookup(ParameterId parameter, const std::string& value) const;
  std::vector<std::string> ids() const;
  ArchiveIndex index() const;

  IndexStats rebuild_index();

  std::filesystem::path path_for(const std::string& id) const;

 private:
  void persist_index() const;
  bool read_index();

  std::filesystem::path root_;
  ArchiveIndex index_;
  std::shared_ptr<const Ontology> ontology_;
  mutable std::unique_ptr<std::shared_mutex> mutex_;
};

}  // namespace railsafe
