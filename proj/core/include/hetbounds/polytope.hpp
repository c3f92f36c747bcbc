#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hetbounds/bounds.hpp"
#include "hetbounds/interval.hpp"
#include "hetbounds/rho_matrix.hpp"

namespace hetbounds {

/// Closed self-distances below -kFeasibilityTolerance mean the polytope is
/// empty; those in [-tol, 0) are clamped to zero and reported as warnings.
inline constexpr double kFeasibilityTolerance = 1e-9;

/// One difference constraint x_from - x_to <= weight.
struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  double weight = 0.0;
};

/// Difference constraint contributed by one ordered pair (j, k), anchored on
/// setting k's bias bound.
struct PairConstraint {
  std::size_t j = 0;
  std::size_t k = 0;
  DifferenceBound c;
  Interval theta_difference;  ///< admissible theta^j - theta^k
};

/// Difference-bound representation of the joint identified polytope.
///
/// Node 0 is a virtual zero; setting i (0-based) is node i + 1. A box
/// theta^i in [L, U] is the pair of edges (i+1 -> 0, U) and (0 -> i+1, -L).
/// Parallel edges are allowed; the effective weight of a slot is the
/// minimum over them.
class ConstraintGraph {
 public:
  static constexpr std::size_t kZeroNode = 0;

  ConstraintGraph() = default;
  /// Adds the individual-set box for every setting.
  ConstraintGraph(std::vector<SettingEstimate> estimates,
                  std::vector<BiasBound> nus);

  std::size_t settings_count() const noexcept { return estimates_.size(); }
  std::size_t node_count() const noexcept { return estimates_.size() + 1; }
  static std::size_t node_of(std::size_t setting) noexcept { return setting + 1; }
  std::size_t index_of(const std::string& label) const;

  const std::vector<SettingEstimate>& estimates() const noexcept { return estimates_; }
  const std::vector<BiasBound>& nus() const noexcept { return nus_; }
  /// Individual identified sets, before any cross-setting information.
  const std::vector<Interval>& original() const noexcept { return original_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<PairConstraint>& pair_constraints() const noexcept {
    return pairs_;
  }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  /// Tightest upper bound on x_a - x_b among present edges.
  std::optional<double> weight(std::size_t a, std::size_t b) const;

  /// Adds x_from - x_to <= weight. Throws InvalidInput on a non-finite
  /// weight or an out-of-range node.
  void add_edge(std::size_t from, std::size_t to, double weight);
  /// Adds theta^j - theta^k in `range` as two edges.
  void add_difference(std::size_t j, std::size_t k, const Interval& range);
  /// Records a pair constraint and adds its two edges.
  void add_pair_constraint(const PairConstraint& pc);
  /// Fixes theta^setting = value with two edges.
  void add_pin(std::size_t setting, double value);

  /// Dense (node_count x node_count) matrix of slot weights; nullopt marks
  /// an absent slot. The diagonal is 0.
  std::vector<std::optional<double>> weight_matrix() const;

  /// Replaces the edges with one edge per present off-diagonal slot. The
  /// graph counts as closed when no diagonal entry is negative.
  void assign_closed(const std::vector<std::optional<double>>& matrix);
  /// True after assign_closed of a feasible closure and until the next edge
  /// is added; close() then skips the cubic pass.
  bool is_closed() const noexcept { return closed_; }

 private:
  std::vector<SettingEstimate> estimates_;
  std::vector<BiasBound> nus_;
  std::vector<Interval> original_;
  std::vector<Edge> edges_;
  std::vector<PairConstraint> pairs_;
  bool closed_ = false;
};

/// Per-setting comparison of the projected marginal with the individual set.
struct SharpeningRecord {
  std::string setting;
  Interval original;
  Interval projected;
  bool lower_raised = false;
  bool upper_lowered = false;
  double lower_raise = 0.0;   ///< projected.lower - original.lower
  double upper_lower = 0.0;   ///< original.upper - projected.upper
  /// Partners k whose pairwise sharpening condition holds on their own:
  /// nu^k_u + c^{jk}_u < nu^j_u (lower) or nu^k_l + c^{jk}_l > nu^j_l (upper).
  std::vector<std::string> lower_partners;
  std::vector<std::string> upper_partners;
};

struct SolvedPolytope {
  ConstraintGraph graph;  ///< closed
  bool feasible = false;
  /// Per setting, in input order; empty when infeasible.
  std::vector<Interval> marginals;
  std::vector<SharpeningRecord> sharpening;
  std::vector<std::string> warnings;

  const Interval& marginal(const std::string& label) const;
};

struct SettingInterval {
  std::string setting;
  Interval interval;
};

struct PinResult {
  std::string pinned_setting;
  double pinned_value = 0.0;
  bool feasible = false;
  /// Conditional sets of every other setting, in input order; empty when
  /// infeasible.
  std::vector<SettingInterval> conditional;

  std::optional<Interval> conditional_for(const std::string& label) const;
};

/// Boxes from individual_set plus, for every ordered pair with a restricted
/// rho, the difference constraint from bias_difference_bounds anchored on
/// the second setting. Throws InvalidInput when labels disagree.
ConstraintGraph build(const std::vector<SettingEstimate>& estimates,
                      const std::vector<BiasBound>& nus, const RhoMatrix& rhos,
                      bool symmetric);

/// All-pairs shortest-path closure. Every marginal of the closed system is
/// the exact min/max of that coordinate over the polytope.
SolvedPolytope close(const ConstraintGraph& graph);

/// Marginal of one setting. Throws InfeasibleError for an empty polytope.
Interval project(const ConstraintGraph& graph, const std::string& setting);

/// Conditional identified sets given theta^setting = value. A value outside
/// the marginal yields feasible = false. Throws InvalidInput for an unknown
/// label.
PinResult pin(const ConstraintGraph& graph, const std::string& setting,
              double value);

/// Pins at lower + fraction * (upper - lower) of the setting's marginal.
/// Throws InfeasibleError when the unpinned polytope is already empty.
PinResult pin_at_fraction(const ConstraintGraph& graph,
                          const std::string& setting, double fraction);

struct Pin {
  std::string setting;
  double value = 0.0;
};

/// Several simultaneous pins. `conditional` then covers the unpinned
/// settings and pinned_setting lists the first pin.
PinResult pin_many(const ConstraintGraph& graph, const std::vector<Pin>& pins);

/// Recomputes the sharpening records of a feasible solved polytope.
std::vector<SharpeningRecord> sharpening_report(const SolvedPolytope& solved);

}  // namespace hetbounds
