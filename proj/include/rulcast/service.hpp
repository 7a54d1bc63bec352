#pragma once

// HTTP planning service over an immutable snapshot. Routing lives in
// PlanningService::handle so it can be exercised without sockets; serve()
// only adapts it to cpp-httplib.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "rulcast/pipeline.hpp"

namespace rulcast::service {

struct Response {
  int status = 200;
  std::string body;  // JSON
};

using Query = std::map<std::string, std::string>;
/// Builds a snapshot carrying the given version stamp.
using SnapshotBuilder = std::function<Snapshot(std::uint64_t version)>;

class PlanningService {
 public:
  /// Builds the first snapshot immediately; throws when that fails.
  explicit PlanningService(SnapshotBuilder builder);
  explicit PlanningService(const RunConfig& config);

  Response handle(const std::string& method, const std::string& path, const Query& query,
                  const std::string& body) const;

  std::shared_ptr<const Snapshot> snapshot() const;
  /// Rebuilds and swaps; on failure the previous snapshot keeps serving and
  /// the error propagates.
  std::shared_ptr<const Snapshot> reload() const;

 private:
  SnapshotBuilder builder_;
  mutable std::mutex reload_mutex_;  // serializes rebuilds
  mutable std::mutex current_mutex_; // guards the pointer swap only
  mutable std::shared_ptr<const Snapshot> current_;
  mutable std::uint64_t next_version_ = 1;
};

/// Blocks serving HTTP on host:port with CORS enabled.
void serve(const PlanningService& service, const std::string& host, int port);

}  // namespace rulcast::service
