#include "hetbounds/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "hetbounds/error.hpp"

namespace hetbounds {
namespace {

using Matrix = std::vector<std::optional<double>>;

double sharpening_tolerance(double theta_s) { return 1e-9 * (1.0 + std::abs(theta_s)); }

// One Floyd-Warshall sweep over optional weights. Returns whether any
// entry decreased.
bool relax_pass(Matrix& d, std::size_t n, bool diagonal) {
  bool changed = false;
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t a = 0; a < n; ++a) {
      const auto& am = d[a * n + m];
      if (!am) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (!diagonal && a == b) continue;
        const auto& mb = d[m * n + b];
        if (!mb) continue;
        const double via = *am + *mb;
        auto& ab = d[a * n + b];
        if (!ab || via < *ab) {
          ab = via;
          changed = true;
        }
      }
    }
  }
  return changed;
}

// Shortest-path closure. Returns false when a self-distance drops below
// -kFeasibilityTolerance; smaller negative self-distances are clamped to
// zero and reported through `warnings`. Extra off-diagonal sweeps run
// until nothing moves, so closing a closed matrix is an exact no-op
// despite rounding.
bool floyd_warshall(Matrix& d, std::size_t n, std::vector<std::string>& warnings) {
  relax_pass(d, n, true);
  for (std::size_t a = 0; a < n; ++a) {
    const double self = *d[a * n + a];
    if (self < -kFeasibilityTolerance) return false;
  }
  for (std::size_t a = 0; a < n; ++a) {
    const double self = *d[a * n + a];
    if (self < 0.0) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "node %zu self-distance %.3g clamped to zero (numerical noise)", a, self);
      warnings.emplace_back(buf);
      d[a * n + a] = 0.0;
    }
  }
  for (std::size_t pass = 0; pass < n && relax_pass(d, n, false); ++pass) {
  }
  return true;
}

// Adds x_u - x_v <= w to an already closed matrix in O(n^2): a new
// shortest path uses the new edge at most once. Same feasibility and
// clamping rules as floyd_warshall.
bool add_to_closed(Matrix& d, std::size_t n, std::size_t u, std::size_t v, double w,
                   std::vector<std::string>& warnings) {
  if (d[u * n + v] && w >= *d[u * n + v]) return true;
  std::vector<std::optional<double>> to_u(n), from_v(n);
  for (std::size_t a = 0; a < n; ++a) {
    to_u[a] = d[a * n + u];
    from_v[a] = d[v * n + a];
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (!to_u[a]) continue;
    for (std::size_t b = 0; b < n; ++b) {
      if (!from_v[b]) continue;
      const double via = *to_u[a] + w + *from_v[b];
      auto& ab = d[a * n + b];
      if (!ab || via < *ab) ab = via;
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    const double self = *d[a * n + a];
    if (self < -kFeasibilityTolerance) return false;
    if (self < 0.0) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "node %zu self-distance %.3g clamped to zero (numerical noise)", a, self);
      warnings.emplace_back(buf);
      d[a * n + a] = 0.0;
    }
  }
  return true;
}

std::vector<SharpeningRecord> sharpening_records(const ConstraintGraph& g,
                                                 const std::vector<Interval>& marginals) {
  const auto& est = g.estimates();
  const auto& nus = g.nus();
  std::vector<SharpeningRecord> out;
  out.reserve(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) {
    SharpeningRecord r;
    r.setting = est[i].setting;
    r.original = g.original()[i];
    r.projected = marginals[i];
    const double tol = sharpening_tolerance(est[i].theta_s);
    r.lower_raise = r.projected.lower - r.original.lower;
    r.upper_lower = r.original.upper - r.projected.upper;
    r.lower_raised = r.lower_raise > tol;
    r.upper_lowered = r.upper_lower > tol;
    out.push_back(std::move(r));
  }
  for (const PairConstraint& pc : g.pair_constraints()) {
    const BiasBound& nj = nus[pc.j];
    const BiasBound& nk = nus[pc.k];
    const double tol = sharpening_tolerance(est[pc.j].theta_s);
    if (nk.nu_u + pc.c.c_u < nj.nu_u - tol) {
      out[pc.j].lower_partners.push_back(est[pc.k].setting);
    }
    if (nk.nu_l + pc.c.c_l > nj.nu_l + tol) {
      out[pc.j].upper_partners.push_back(est[pc.k].setting);
    }
  }
  return out;
}

std::vector<Interval> read_marginals(const Matrix& d, std::size_t settings) {
  const std::size_t n = settings + 1;
  std::vector<Interval> out;
  out.reserve(settings);
  for (std::size_t i = 0; i < settings; ++i) {
    const std::size_t node = ConstraintGraph::node_of(i);
    // Every setting carries a box, so both slots are present.
    const double upper = *d[node * n + ConstraintGraph::kZeroNode];
    const double lower = -*d[ConstraintGraph::kZeroNode * n + node];
    // A clamped near-degenerate system can leave lower a hair above upper.
    out.push_back(lower <= upper ? Interval{lower, upper}
                                 : Interval{0.5 * (lower + upper), 0.5 * (lower + upper)});
  }
  return out;
}

}  // namespace

ConstraintGraph::ConstraintGraph(std::vector<SettingEstimate> estimates,
                                 std::vector<BiasBound> nus)
    : estimates_(std::move(estimates)), nus_(std::move(nus)) {
  if (estimates_.size() != nus_.size()) {
    throw InvalidInput("one bias bound per setting estimate is required");
  }
  std::set<std::string> seen;
  for (const auto& e : estimates_) {
    if (!seen.insert(e.setting).second) {
      throw InvalidInput("duplicate setting label '" + e.setting + "'");
    }
  }
  original_.reserve(estimates_.size());
  for (std::size_t i = 0; i < estimates_.size(); ++i) {
    const Interval box = individual_set(estimates_[i], nus_[i]);
    original_.push_back(box);
    add_edge(node_of(i), kZeroNode, box.upper);
    add_edge(kZeroNode, node_of(i), -box.lower);
  }
}

std::size_t ConstraintGraph::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < estimates_.size(); ++i) {
    if (estimates_[i].setting == label) return i;
  }
  throw InvalidInput("unknown setting '" + label + "'");
}

std::optional<double> ConstraintGraph::weight(std::size_t a, std::size_t b) const {
  std::optional<double> w;
  for (const Edge& e : edges_) {
    if (e.from == a && e.to == b && (!w || e.weight < *w)) w = e.weight;
  }
  return w;
}

void ConstraintGraph::add_edge(std::size_t from, std::size_t to, double weight) {
  if (from >= node_count() || to >= node_count()) {
    throw InvalidInput("constraint edge refers to an unknown node");
  }
  if (!std::isfinite(weight)) throw InvalidInput("constraint edge weight must be finite");
  edges_.push_back(Edge{from, to, weight});
  closed_ = false;
}

void ConstraintGraph::add_difference(std::size_t j, std::size_t k, const Interval& range) {
  if (j >= settings_count() || k >= settings_count()) {
    throw InvalidInput("difference constraint refers to an unknown setting");
  }
  add_edge(node_of(j), node_of(k), range.upper);
  add_edge(node_of(k), node_of(j), -range.lower);
}

void ConstraintGraph::add_pair_constraint(const PairConstraint& pc) {
  add_difference(pc.j, pc.k, pc.theta_difference);
  pairs_.push_back(pc);
}

void ConstraintGraph::add_pin(std::size_t setting, double value) {
  if (setting >= settings_count()) throw InvalidInput("pin refers to an unknown setting");
  add_edge(node_of(setting), kZeroNode, value);
  add_edge(kZeroNode, node_of(setting), -value);
}

std::vector<std::optional<double>> ConstraintGraph::weight_matrix() const {
  const std::size_t n = node_count();
  Matrix d(n * n);
  for (std::size_t a = 0; a < n; ++a) d[a * n + a] = 0.0;
  for (const Edge& e : edges_) {
    auto& slot = d[e.from * n + e.to];
    if (!slot || e.weight < *slot) slot = e.weight;
  }
  return d;
}

void ConstraintGraph::assign_closed(const std::vector<std::optional<double>>& matrix) {
  const std::size_t n = node_count();
  if (matrix.size() != n * n) throw InvalidInput("closed matrix has the wrong size");
  edges_.clear();
  closed_ = true;
  for (std::size_t a = 0; a < n; ++a) {
    const auto& self = matrix[a * n + a];
    if (!self || *self < 0.0) closed_ = false;
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && matrix[a * n + b]) edges_.push_back(Edge{a, b, *matrix[a * n + b]});
    }
  }
}

const Interval& SolvedPolytope::marginal(const std::string& label) const {
  if (!feasible) throw InfeasibleError("the joint identified set is empty");
  return marginals.at(graph.index_of(label));
}

std::optional<Interval> PinResult::conditional_for(const std::string& label) const {
  for (const auto& c : conditional) {
    if (c.setting == label) return c.interval;
  }
  return std::nullopt;
}

ConstraintGraph build(const std::vector<SettingEstimate>& estimates,
                      const std::vector<BiasBound>& nus, const RhoMatrix& rhos,
                      bool symmetric) {
  if (rhos.size() != estimates.size()) {
    throw InvalidInput("rho matrix covers " + std::to_string(rhos.size()) +
                       " settings but " + std::to_string(estimates.size()) +
                       " estimates were given");
  }
  ConstraintGraph g(estimates, nus);
  std::vector<std::size_t> rho_index(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    rho_index[i] = rhos.index_of(estimates[i].setting);
  }
  for (std::size_t j = 0; j < estimates.size(); ++j) {
    for (std::size_t k = 0; k < estimates.size(); ++k) {
      if (j == k) continue;
      const auto c = bias_difference_bounds(nus[k], rhos.at(rho_index[j], rho_index[k]),
                                            symmetric);
      if (!c) continue;
      g.add_pair_constraint(
          PairConstraint{j, k, *c, difference_interval(estimates[j], estimates[k], *c)});
    }
  }
  return g;
}

SolvedPolytope close(const ConstraintGraph& graph) {
  SolvedPolytope s;
  s.graph = graph;
  const std::size_t n = graph.node_count();
  Matrix d = graph.weight_matrix();
  s.feasible = graph.is_closed() || floyd_warshall(d, n, s.warnings);
  if (!graph.is_closed()) s.graph.assign_closed(d);
  if (s.feasible) {
    s.marginals = read_marginals(d, graph.settings_count());
    s.sharpening = sharpening_records(s.graph, s.marginals);
  }
  return s;
}

Interval project(const ConstraintGraph& graph, const std::string& setting) {
  const std::size_t i = graph.index_of(setting);
  const SolvedPolytope s = close(graph);
  if (!s.feasible) throw InfeasibleError("the joint identified set is empty");
  return s.marginals[i];
}

PinResult pin_many(const ConstraintGraph& graph, const std::vector<Pin>& pins) {
  if (pins.empty()) throw InvalidInput("at least one pin is required");
  std::vector<std::size_t> pinned;
  for (const Pin& p : pins) {
    if (!std::isfinite(p.value)) throw InvalidInput("pin value must be finite");
    pinned.push_back(graph.index_of(p.setting));
  }
  PinResult r;
  r.pinned_setting = pins.front().setting;
  r.pinned_value = pins.front().value;

  const SolvedPolytope base = close(graph);
  if (!base.feasible) return r;

  const std::size_t n = graph.node_count();
  Matrix d = base.graph.weight_matrix();
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < pins.size(); ++i) {
    const std::size_t node = ConstraintGraph::node_of(pinned[i]);
    if (!add_to_closed(d, n, node, ConstraintGraph::kZeroNode, pins[i].value, warnings) ||
        !add_to_closed(d, n, ConstraintGraph::kZeroNode, node, -pins[i].value, warnings)) {
      return r;
    }
  }
  const std::vector<Interval> marginals = read_marginals(d, graph.settings_count());
  r.feasible = true;
  for (std::size_t i = 0; i < graph.settings_count(); ++i) {
    if (std::find(pinned.begin(), pinned.end(), i) != pinned.end()) continue;
    // Closure marginals are exact, so this intersection only trims noise.
    const Interval& m = base.marginals[i];
    Interval c = marginals[i];
    c.lower = std::clamp(c.lower, m.lower, m.upper);
    c.upper = std::clamp(c.upper, c.lower, m.upper);
    r.conditional.push_back({graph.estimates()[i].setting, c});
  }
  return r;
}

PinResult pin(const ConstraintGraph& graph, const std::string& setting, double value) {
  return pin_many(graph, {Pin{setting, value}});
}

PinResult pin_at_fraction(const ConstraintGraph& graph, const std::string& setting,
                          double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw InvalidInput("pin fraction must lie in [0, 1]");
  }
  const std::size_t i = graph.index_of(setting);
  const SolvedPolytope s = close(graph);
  if (!s.feasible) throw InfeasibleError("the joint identified set is empty");
  const Interval& m = s.marginals[i];
  // Exact endpoints at 0 and 1 rather than lower + 1 * width.
  const double value = fraction == 1.0 ? m.upper : m.lower + fraction * m.width();
  return pin(s.graph, setting, value);
}

std::vector<SharpeningRecord> sharpening_report(const SolvedPolytope& solved) {
  if (!solved.feasible) throw InfeasibleError("sharpening needs a feasible polytope");
  return sharpening_records(solved.graph, solved.marginals);
}

}  // namespace hetbounds
