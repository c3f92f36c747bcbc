#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hetbounds/bounds.hpp"
#include "hetbounds/interval.hpp"

namespace hetbounds {

/// Pairwise proportionality bounds over an ordered list of settings.
///
/// Setting the (j, k) entry also sets (k, j) to its reciprocal, so the
/// matrix is reciprocally coherent by construction. The diagonal is [1, 1].
class RhoMatrix {
 public:
  RhoMatrix() = default;
  /// All off-diagonal pairs start Unrestricted. Labels must be unique.
  explicit RhoMatrix(std::vector<std::string> settings);

  std::size_t size() const noexcept { return settings_.size(); }
  const std::vector<std::string>& settings() const noexcept { return settings_; }
  std::size_t index_of(const std::string& label) const;

  const RhoBound& at(std::size_t j, std::size_t k) const;
  const RhoBound& at(const std::string& j, const std::string& k) const {
    return at(index_of(j), index_of(k));
  }

  /// Sets (j, k) to `bound` and (k, j) to its reciprocal.
  void set(std::size_t j, std::size_t k, const RhoBound& bound);
  void set(const std::string& j, const std::string& k, const RhoBound& bound) {
    set(index_of(j), index_of(k), bound);
  }

  std::size_t restricted_pairs() const noexcept;

  /// True when every (k, j) equals the reciprocal of (j, k) within `tol`.
  bool is_coherent(double tol = 1e-12) const;

  friend bool operator==(const RhoMatrix&, const RhoMatrix&) = default;

 private:
  std::vector<std::string> settings_;
  std::vector<RhoBound> cells_;
};

/// Fills every pair with supershort_rho(b_ss[j], b_ss[k]).
RhoMatrix supershort_matrix(const std::vector<std::string>& settings,
                            const std::vector<double>& b_ss,
                            double epsilon = 1e-6,
                            EpsilonMode mode = EpsilonMode::Relative);

/// Pair (j, k) gets rho_from_decay(base, |position_j - position_k|).
RhoMatrix decay_matrix(const std::vector<std::string>& settings,
                       const std::vector<int>& positions, double base);

/// Listed pairs get [1/value, value] (or the exact ratio `value` oriented
/// as first-over-second when `point` is set); all others stay unrestricted.
RhoMatrix adjacency_matrix(
    const std::vector<std::string>& settings,
    const std::vector<std::pair<std::string, std::string>>& adjacent_pairs,
    double value, bool point = false);

/// A triple whose direct ratio bound misses the chained product bound.
struct TransitivityViolation {
  std::string j, k, m;
  Interval direct;   ///< rho^{jm}
  Interval product;  ///< [rho^{jk}_l rho^{km}_l, rho^{jk}_u rho^{km}_u]
};

/// Checks every ordered triple of distinct, fully restricted pairs.
/// Triples touching an unrestricted pair are skipped.
std::vector<TransitivityViolation> transitivity_audit(const RhoMatrix& m);

}  // namespace hetbounds
