#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "railsafe/knowledge_base.hpp"
#include "railsafe/petri.hpp"

namespace railsafe {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  /// 0 picks a free port.
  int port = 8080;
  petri::ExplorationBounds bounds;
  std::chrono::milliseconds simulate_budget{10000};
  /// When set, every request needs `Authorization: Bearer <token>`.
  std::optional<std::string> token;
  /// Origins allowed by CORS; `*` allows any.
  std::vector<std::string> cors_origins;
};

/// HTTP status for an error code.
int http_status(ErrorCode code);

/// JSON API over a knowledge base.
class Service {
 public:
  Service(KnowledgeBase& kb, ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds the listening socket and returns the port. Throws storage_error on failure.
  int bind();
  /// Serves until stop(); in-flight requests complete before it returns.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace railsafe
