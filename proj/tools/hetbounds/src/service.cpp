#include "hetbounds_cli/service.hpp"

#include <mutex>

#include "hetbounds/error.hpp"
#include "hetbounds_cli/report.hpp"
#include "hetbounds_cli/rho_io.hpp"

namespace hetbounds::cli {

std::shared_ptr<const Snapshot> solve_snapshot(ProblemFile problem) {
  auto s = std::make_shared<Snapshot>();
  s->id = content_hash(problem);
  s->graph = build(problem.estimates, problem.nus, problem.rho, problem.symmetric);
  s->solved = close(s->graph);
  s->violations = transitivity_audit(problem.rho);
  s->problem = std::move(problem);
  return s;
}

json snapshot_to_json(const Snapshot& s) {
  json j = solved_to_json(s.solved);
  j["snapshot"] = s.id;
  j["status"] = "ready";
  j["symmetric"] = s.problem.symmetric;
  json estimates = json::object();
  for (const auto& e : s.problem.estimates) estimates[e.setting] = number(e.theta_s);
  j["estimates"] = std::move(estimates);
  j["transitivity_violations"] = violations_to_json(s.violations);
  for (const auto& w : s.problem.warnings) j["warnings"].push_back(w);
  return j;
}

ModelService::ModelService(ProblemFile problem, std::size_t async_threshold)
    : async_threshold_(async_threshold) {
  base_id_ = submit(std::move(problem));
}

ModelService::Response ModelService::error(int status, const std::string& code,
                                           const std::string& message) {
  return Response{status, {{"error", {{"code", code}, {"message", message}}}}};
}

std::string ModelService::submit(ProblemFile problem) {
  const std::string id = content_hash(problem);
  {
    std::shared_lock lock(mutex_);
    if (snapshots_.count(id)) return id;
  }
  Future f;
  if (problem.estimates.size() > async_threshold_) {
    f = std::async(std::launch::async, solve_snapshot, std::move(problem)).share();
  } else {
    std::promise<std::shared_ptr<const Snapshot>> p;
    p.set_value(solve_snapshot(std::move(problem)));
    f = p.get_future().share();
  }
  std::unique_lock lock(mutex_);
  snapshots_.try_emplace(id, std::move(f));
  return id;
}

std::optional<ModelService::Future> ModelService::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto it = snapshots_.find(id);
  if (it == snapshots_.end()) return std::nullopt;
  return it->second;
}

std::shared_ptr<const Snapshot> ModelService::wait(const std::string& id) const {
  const auto f = find(id);
  return f ? f->get() : nullptr;
}

ModelService::Response ModelService::health() const {
  std::shared_lock lock(mutex_);
  return Response{200, {{"status", "ok"}, {"snapshots", snapshots_.size()}, {"base_snapshot", base_id_}}};
}

ModelService::Response ModelService::model(const std::optional<std::string>& snapshot) const {
  const std::string id = snapshot.value_or(base_id_);
  const auto f = find(id);
  if (!f) return error(404, "unknown_snapshot", "no snapshot with id '" + id + "'");
  if (f->wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
    return Response{202, {{"snapshot", id}, {"status", "pending"}}};
  }
  return Response{200, snapshot_to_json(*f->get())};
}

ModelService::Response ModelService::pin(const std::string& body) const {
  json req;
  try {
    req = json::parse(body);
  } catch (const json::parse_error& e) {
    return error(400, "malformed_json", e.what());
  }
  if (!req.is_object()) return error(400, "invalid_request", "request body must be a JSON object");
  try {
    const std::string id = req.contains("snapshot") ? req.at("snapshot").get<std::string>() : base_id_;
    const auto f = find(id);
    if (!f) return error(404, "unknown_snapshot", "no snapshot with id '" + id + "'");
    if (f->wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
      return Response{202, {{"snapshot", id}, {"status", "pending"}}};
    }
    const auto snap = f->get();
    PinResult result;
    if (req.contains("pins")) {
      std::vector<Pin> pins;
      for (const auto& p : req.at("pins")) {
        const PinRequest pr = parse_pin_request(p);
        if (pr.fraction) {
          return error(400, "invalid_request", "simultaneous pins take values, not fractions");
        }
        pins.push_back(Pin{pr.setting, *pr.value});
      }
      result = pin_many(snap->solved.graph, pins);
    } else {
      const PinRequest pr = parse_pin_request(req);
      snap->graph.index_of(pr.setting);
      if (!snap->solved.feasible) {
        return error(409, "infeasible_model", kInfeasibleNotice);
      }
      result = run_pin(snap->solved.graph, pr);
    }
    json out = pin_result_to_json(result);
    out["snapshot"] = id;
    return Response{200, out};
  } catch (const InvalidInput& e) {
    return error(400, "invalid_request", e.what());
  } catch (const InfeasibleError& e) {
    return error(409, "infeasible_model", e.what());
  } catch (const json::exception& e) {
    return error(400, "invalid_request", e.what());
  }
}

ModelService::Response ModelService::rho(const std::string& body) {
  json req;
  try {
    req = json::parse(body);
  } catch (const json::parse_error& e) {
    return error(400, "malformed_json", e.what());
  }
  if (!req.is_object() || !req.contains("edits")) {
    return error(400, "invalid_request", "request body needs an 'edits' array");
  }
  try {
    const std::string from = req.contains("snapshot") ? req.at("snapshot").get<std::string>() : base_id_;
    const auto base = wait(from);
    if (!base) return error(404, "unknown_snapshot", "no snapshot with id '" + from + "'");
    ProblemFile next = base->problem;
    apply_rho_pairs(next.rho, req.at("edits"));
    if (req.contains("symmetric")) next.symmetric = req.at("symmetric").get<bool>();
    const std::string id = submit(std::move(next));
    const auto f = find(id);
    const bool ready = f && f->wait_for(std::chrono::seconds(0)) == std::future_status::ready;
    return Response{ready ? 200 : 202, {{"snapshot", id}, {"status", ready ? "ready" : "pending"}}};
  } catch (const InvalidInput& e) {
    return error(400, "invalid_request", e.what());
  } catch (const json::exception& e) {
    return error(400, "invalid_request", e.what());
  }
}

}  // namespace hetbounds::cli
