#include "hetbounds/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "hetbounds/error.hpp"

namespace hetbounds {

BiasBound BiasBound::checked(double nu_l, double nu_u) {
  if (!std::isfinite(nu_l) || !std::isfinite(nu_u)) {
    throw InvalidInput("bias bound endpoints must be finite");
  }
  if (nu_l > nu_u) throw InvalidInput("bias bound has nu_l > nu_u");
  return BiasBound{nu_l, nu_u};
}

RhoBound RhoBound::restricted(double rho_l, double rho_u) {
  if (!std::isfinite(rho_l) || !std::isfinite(rho_u)) {
    throw InvalidInput("rho bounds must be finite; use an unrestricted pair instead");
  }
  if (!(rho_l > 0.0)) throw InvalidInput("rho lower bound must be positive");
  if (rho_l > rho_u) throw InvalidInput("rho lower bound exceeds upper bound");
  return RhoBound{rho_l, rho_u};
}

RhoBound RhoBound::bracketing(double rho_l, double rho_u) {
  RhoBound b = restricted(rho_l, rho_u);
  if (!b.brackets_one()) {
    throw InvalidInput("rho interval must satisfy rho_l <= 1 <= rho_u");
  }
  return b;
}

double RhoBound::lower() const {
  if (!restricted_) throw InvalidInput("unrestricted rho has no lower bound");
  return lower_;
}

double RhoBound::upper() const {
  if (!restricted_) throw InvalidInput("unrestricted rho has no upper bound");
  return upper_;
}

bool RhoBound::brackets_one(double tol) const noexcept {
  return restricted_ && lower_ <= 1.0 + tol && upper_ >= 1.0 - tol;
}

RhoBound RhoBound::reciprocal() const {
  if (!restricted_) return unrestricted();
  return RhoBound{1.0 / upper_, 1.0 / lower_};
}

Interval individual_set(const SettingEstimate& est, const BiasBound& nu) {
  if (!std::isfinite(est.theta_s)) {
    throw InvalidInput("theta_s of setting '" + est.setting + "' is not finite");
  }
  BiasBound::checked(nu.nu_l, nu.nu_u);
  return Interval{est.theta_s - nu.nu_u, est.theta_s - nu.nu_l};
}

std::optional<DifferenceBound> bias_difference_bounds(const BiasBound& nu_k,
                                                      const RhoBound& rho,
                                                      bool symmetric) {
  if (!rho.is_restricted()) return std::nullopt;
  const double rho_u = rho.upper();
  const double rho_l = symmetric ? 1.0 / rho_u : rho.lower();
  DifferenceBound d;
  d.candidates = {(rho_l - 1.0) * nu_k.nu_l, (rho_u - 1.0) * nu_k.nu_l,
                  (rho_l - 1.0) * nu_k.nu_u, (rho_u - 1.0) * nu_k.nu_u};
  const auto [lo, hi] = std::minmax_element(d.candidates.begin(), d.candidates.end());
  d.c_l = *lo;
  d.c_u = *hi;
  return d;
}

Interval difference_interval(const SettingEstimate& est_j, const SettingEstimate& est_k,
                             const DifferenceBound& c) {
  const double delta = est_j.theta_s - est_k.theta_s;
  return Interval{delta - c.c_u, delta - c.c_l};
}

RhoBound supershort_rho(double b_ss_j, double b_ss_k, double epsilon, EpsilonMode mode) {
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  if (!std::isfinite(b_ss_j) || !std::isfinite(b_ss_k)) return RhoBound::unrestricted();
  const double aj = std::abs(b_ss_j);
  const double ak = std::abs(b_ss_k);
  const double guard = mode == EpsilonMode::Relative ? epsilon * std::max(aj, ak) : epsilon;
  if (std::min(aj, ak) < guard || std::min(aj, ak) == 0.0) return RhoBound::unrestricted();
  if (std::signbit(b_ss_j) != std::signbit(b_ss_k)) return RhoBound::unrestricted();
  const double r = b_ss_j / b_ss_k;
  const double lo = std::min(r, 1.0 / r);
  // Taking the reciprocal of the lower end keeps rho_l * rho_u = 1 tight.
  return RhoBound::restricted(lo, 1.0 / lo);
}

RhoBound rho_from_decay(double base, int distance) {
  if (!(base > 0.0 && base < 1.0)) throw InvalidInput("decay base must lie in (0, 1)");
  if (distance < 0) throw InvalidInput("decay distance must be nonnegative");
  if (distance == 0) return RhoBound::restricted(1.0, 1.0);
  const double lo = std::pow(base, distance);
  return RhoBound::restricted(lo, 1.0 / lo);
}

RhoBound rho_from_adjacency(bool adjacent, double rho_value) {
  if (!(rho_value >= 1.0) || !std::isfinite(rho_value)) {
    throw InvalidInput("adjacency rho value must be finite and >= 1");
  }
  if (!adjacent) return RhoBound::unrestricted();
  return RhoBound::restricted(1.0 / rho_value, rho_value);
}

}  // namespace hetbounds
