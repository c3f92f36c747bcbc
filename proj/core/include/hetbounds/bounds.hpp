#pragma once

#include <array>
#include <optional>
#include <string>

#include "hetbounds/interval.hpp"

namespace hetbounds {

/// Short-regression estimate for one setting.
struct SettingEstimate {
  std::string setting;
  double theta_s = 0.0;
  std::optional<long long> n;
};

/// Assumed interval for a setting's omitted variable bias.
struct BiasBound {
  double nu_l = 0.0;
  double nu_u = 0.0;

  /// Throws InvalidInput unless finite and nu_l <= nu_u.
  static BiasBound checked(double nu_l, double nu_u);
  friend bool operator==(const BiasBound&, const BiasBound&) = default;
};

/// Interval for the bias ratio B^j / B^k of an ordered pair, or no
/// relationship at all.
class RhoBound {
 public:
  /// No modeled relationship between the pair.
  static RhoBound unrestricted() noexcept { return RhoBound{}; }

  /// A proportionality interval with 0 < rho_l <= rho_u, both finite.
  /// Whether it brackets 1 is checked separately (brackets_one) because
  /// exact-ratio restrictions and audit fixtures legitimately do not.
  static RhoBound restricted(double rho_l, double rho_u);

  /// The interval [rho_l, rho_u] required to satisfy rho_l <= 1 <= rho_u.
  static RhoBound bracketing(double rho_l, double rho_u);

  /// Exact ratio rho (point interval).
  static RhoBound exact(double rho) { return restricted(rho, rho); }

  bool is_restricted() const noexcept { return restricted_; }
  double lower() const;
  double upper() const;
  bool brackets_one(double tol = 1e-12) const noexcept;

  /// Bound on the reversed ratio B^k / B^j: [1/rho_u, 1/rho_l].
  RhoBound reciprocal() const;

  friend bool operator==(const RhoBound&, const RhoBound&) = default;

 private:
  RhoBound() = default;
  RhoBound(double l, double u) : restricted_(true), lower_(l), upper_(u) {}

  bool restricted_ = false;
  double lower_ = 0.0;
  double upper_ = 0.0;
};

/// Bounds on D^{jk} = B^j - B^k.
struct DifferenceBound {
  double c_l = 0.0;
  double c_u = 0.0;
  /// The four extremes of (rho - 1) * B^k, in the order
  /// (rho_l, nu_l), (rho_u, nu_l), (rho_l, nu_u), (rho_u, nu_u).
  std::array<double, 4> candidates{};
};

/// [theta_s - nu_u, theta_s - nu_l].
Interval individual_set(const SettingEstimate& est, const BiasBound& nu);

/// Extremes of (rho - 1) * B over rho in the rho interval and B in nu_k.
/// With `symmetric`, the lower ratio bound is replaced by 1 / rho_u.
/// Returns nullopt for an unrestricted pair.
std::optional<DifferenceBound> bias_difference_bounds(const BiasBound& nu_k,
                                                      const RhoBound& rho,
                                                      bool symmetric);

/// Interval for theta^j - theta^k:
/// [(theta_s^j - theta_s^k) - c_u, (theta_s^j - theta_s^k) - c_l].
Interval difference_interval(const SettingEstimate& est_j,
                             const SettingEstimate& est_k,
                             const DifferenceBound& c);

enum class EpsilonMode { Relative, Absolute };

/// Proportionality bound implied by the ratio of observed covariate-induced
/// bias shifts. Unrestricted when the signs differ or the smaller magnitude
/// falls under the guard (epsilon * max magnitude in Relative mode,
/// epsilon itself in Absolute mode).
RhoBound supershort_rho(double b_ss_j, double b_ss_k, double epsilon = 1e-6,
                        EpsilonMode mode = EpsilonMode::Relative);

/// [base^distance, base^-distance]; base in (0, 1).
RhoBound rho_from_decay(double base, int distance);

/// [1/rho_value, rho_value] for adjacent pairs, unrestricted otherwise.
RhoBound rho_from_adjacency(bool adjacent, double rho_value);

}  // namespace hetbounds
