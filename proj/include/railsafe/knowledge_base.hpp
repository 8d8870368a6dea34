#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "railsafe/archive.hpp"
#include "railsafe/ontology.hpp"

namespace railsafe {

/// An archive bound to an ontology file. Shared by the CLI and the HTTP
/// service so both perform the same steps on save.
class KnowledgeBase {
 public:
  /// Loads the ontology (parse_error / consistency_error) and opens the
  /// archive (storage_error).
  KnowledgeBase(std::filesystem::path archive_dir, std::filesystem::path ontology_file);

  /// Immutable snapshot; stays valid across reloads.
  std::shared_ptr<const Ontology> ontology() const;
  const std::filesystem::path& ontology_path() const noexcept { return ontology_path_; }

  Archive& archive() noexcept { return archive_; }
  const Archive& archive() const noexcept { return archive_; }

  /// Re-reads the ontology file; the current snapshot is kept if it fails.
  void reload_ontology();

  struct SaveOutcome {
    std::string id;
    /// Failure and solution codes first seen in this document, now ontology instances.
    std::vector<Instance> registered;
  };

  /// Stamps the ontology version when unset, saves, then registers new codes
  /// in the ontology file.
  SaveOutcome save(ScenarioDocument& doc, WriteMode mode);

  ValidationReport validate(const ScenarioDocument& doc) const;

 private:
  void publish(std::shared_ptr<const Ontology> o);

  std::filesystem::path ontology_path_;
  Archive archive_;
  mutable std::mutex snapshot_mutex_;
  std::mutex registration_mutex_;
  std::shared_ptr<const Ontology> ontology_;
};

}  // namespace railsafe
