#pragma once

#include <cstddef>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include "hetbounds/polytope.hpp"
#include "hetbounds_cli/json_format.hpp"
#include "hetbounds_cli/problem.hpp"

namespace hetbounds::cli {

/// Immutable solved model. Pins read it and never modify it.
struct Snapshot {
  std::string id;  ///< content hash of the problem
  ProblemFile problem;
  ConstraintGraph graph;
  SolvedPolytope solved;
  std::vector<TransitivityViolation> violations;
};

/// Request handling behind the HTTP API, independent of the transport.
///
/// Snapshots are keyed by content hash. Edits create new snapshots; the
/// base snapshot stays available. Problems with more than
/// `async_threshold` settings are solved on a background task and report
/// "pending" until ready.
class ModelService {
 public:
  struct Response {
    int status = 200;
    json body;
  };

  explicit ModelService(ProblemFile problem, std::size_t async_threshold = 256);

  const std::string& base_snapshot() const noexcept { return base_id_; }

  Response health() const;
  /// GET /api/model[?snapshot=id]
  Response model(const std::optional<std::string>& snapshot) const;
  /// POST /api/pin {"setting", "value" | "fraction", "snapshot"?}
  /// or {"pins": [...], "snapshot"?} for simultaneous pins.
  Response pin(const std::string& body) const;
  /// POST /api/rho {"edits": [pair...], "snapshot"?}
  Response rho(const std::string& body);

  /// Blocks until the snapshot is solved; nullptr when unknown.
  std::shared_ptr<const Snapshot> wait(const std::string& id) const;

 private:
  using Future = std::shared_future<std::shared_ptr<const Snapshot>>;

  std::string submit(ProblemFile problem);
  std::optional<Future> find(const std::string& id) const;
  static Response error(int status, const std::string& code, const std::string& message);

  std::size_t async_threshold_;
  std::string base_id_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Future> snapshots_;
};

std::shared_ptr<const Snapshot> solve_snapshot(ProblemFile problem);
json snapshot_to_json(const Snapshot& s);

}  // namespace hetbounds::cli
