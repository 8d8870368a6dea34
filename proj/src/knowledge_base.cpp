#include "railsafe/knowledge_base.hpp"

namespace railsafe {

KnowledgeBase::KnowledgeBase(std::filesystem::path archive_dir, std::filesystem::path ontology_file)
    : ontology_path_(std::move(ontology_file)), archive_(std::move(archive_dir)) {
  publish(std::make_shared<const Ontology>(load_ontology_file(ontology_path_.string())));
}

std::shared_ptr<const Ontology> KnowledgeBase::ontology() const {
  std::lock_guard lock(snapshot_mutex_);
  return ontology_;
}

void KnowledgeBase::publish(std::shared_ptr<const Ontology> o) {
  archive_.set_ontology(o);
  std::lock_guard lock(snapshot_mutex_);
  ontology_ = std::move(o);
}

void KnowledgeBase::reload_ontology() {
  std::lock_guard reg(registration_mutex_);
  publish(std::make_shared<const Ontology>(load_ontology_file(ontology_path_.string())));
}

KnowledgeBase::SaveOutcome KnowledgeBase::save(ScenarioDocument& doc, WriteMode mode) {
  if (doc.meta.ontology_version.empty()) doc.meta.ontology_version = ontology()->version();
  SaveOutcome out;
  out.id = archive_.save(doc, mode);

  std::lock_guard reg(registration_mutex_);
  auto current = ontology();
  std::vector<AttributeSchema> schema;
  try {
    schema = default_schema(*current);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::missing_anchor) throw;
    return out;
  }
  out.registered = unregistered_codes(doc.sheet, schema, *current);
  if (!out.registered.empty()) {
    auto next = std::make_shared<const Ontology>(current->with_instances(out.registered));
    text::write_file_atomic(ontology_path_, serialize_ontology(*next));
    publish(std::move(next));
  }
  return out;
}

ValidationReport KnowledgeBase::validate(const ScenarioDocument& doc) const {
  return validate_document(doc, *ontology());
}

}  // namespace railsafe
