#include "hetbounds/rho_matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <set>

#include "hetbounds/error.hpp"

namespace hetbounds {

RhoMatrix::RhoMatrix(std::vector<std::string> settings) : settings_(std::move(settings)) {
  std::set<std::string> seen;
  for (const auto& s : settings_) {
    if (!seen.insert(s).second) throw InvalidInput("duplicate setting label '" + s + "'");
  }
  const std::size_t k = settings_.size();
  cells_.assign(k * k, RhoBound::unrestricted());
  for (std::size_t i = 0; i < k; ++i) cells_[i * k + i] = RhoBound::restricted(1.0, 1.0);
}

std::size_t RhoMatrix::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < settings_.size(); ++i) {
    if (settings_[i] == label) return i;
  }
  throw InvalidInput("unknown setting '" + label + "'");
}

const RhoBound& RhoMatrix::at(std::size_t j, std::size_t k) const {
  if (j >= size() || k >= size()) throw InvalidInput("rho matrix index out of range");
  return cells_[j * size() + k];
}

void RhoMatrix::set(std::size_t j, std::size_t k, const RhoBound& bound) {
  if (j >= size() || k >= size()) throw InvalidInput("rho matrix index out of range");
  if (j == k) throw InvalidInput("the rho diagonal is fixed at [1, 1]");
  cells_[j * size() + k] = bound;
  cells_[k * size() + j] = bound.reciprocal();
}

std::size_t RhoMatrix::restricted_pairs() const noexcept {
  std::size_t n = 0;
  for (std::size_t j = 0; j < size(); ++j) {
    for (std::size_t k = j + 1; k < size(); ++k) {
      if (cells_[j * size() + k].is_restricted()) ++n;
    }
  }
  return n;
}

bool RhoMatrix::is_coherent(double tol) const {
  for (std::size_t j = 0; j < size(); ++j) {
    for (std::size_t k = j + 1; k < size(); ++k) {
      const RhoBound& a = at(j, k);
      const RhoBound& b = at(k, j);
      if (a.is_restricted() != b.is_restricted()) return false;
      if (!a.is_restricted()) continue;
      if (std::abs(b.lower() - 1.0 / a.upper()) > tol ||
          std::abs(b.upper() - 1.0 / a.lower()) > tol) {
        return false;
      }
    }
  }
  return true;
}

RhoMatrix supershort_matrix(const std::vector<std::string>& settings,
                            const std::vector<double>& b_ss, double epsilon,
                            EpsilonMode mode) {
  if (settings.size() != b_ss.size()) {
    throw InvalidInput("supershort: one b_ss value per setting is required");
  }
  RhoMatrix m(settings);
  for (std::size_t j = 0; j < settings.size(); ++j) {
    for (std::size_t k = j + 1; k < settings.size(); ++k) {
      m.set(j, k, supershort_rho(b_ss[j], b_ss[k], epsilon, mode));
    }
  }
  return m;
}

RhoMatrix decay_matrix(const std::vector<std::string>& settings,
                       const std::vector<int>& positions, double base) {
  if (settings.size() != positions.size()) {
    throw InvalidInput("decay: one position per setting is required");
  }
  RhoMatrix m(settings);
  for (std::size_t j = 0; j < settings.size(); ++j) {
    for (std::size_t k = j + 1; k < settings.size(); ++k) {
      m.set(j, k, rho_from_decay(base, std::abs(positions[j] - positions[k])));
    }
  }
  return m;
}

RhoMatrix adjacency_matrix(const std::vector<std::string>& settings,
                           const std::vector<std::pair<std::string, std::string>>& adjacent_pairs,
                           double value, bool point) {
  RhoMatrix m(settings);
  for (const auto& [a, b] : adjacent_pairs) {
    const std::size_t j = m.index_of(a);
    const std::size_t k = m.index_of(b);
    if (j == k) throw InvalidInput("a setting cannot be adjacent to itself");
    if (point) {
      if (!(value > 0.0) || !std::isfinite(value)) {
        throw InvalidInput("point rho value must be finite and positive");
      }
      m.set(j, k, RhoBound::exact(value));
    } else {
      m.set(j, k, rho_from_adjacency(true, value));
    }
  }
  return m;
}

std::vector<TransitivityViolation> transitivity_audit(const RhoMatrix& m) {
  constexpr double kRelTol = 1e-12;
  std::vector<TransitivityViolation> out;
  const std::size_t n = m.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      const RhoBound& jk = m.at(j, k);
      if (!jk.is_restricted()) continue;
      for (std::size_t q = 0; q < n; ++q) {
        if (q == j || q == k) continue;
        const RhoBound& kq = m.at(k, q);
        const RhoBound& jq = m.at(j, q);
        if (!kq.is_restricted() || !jq.is_restricted()) continue;
        const Interval product{jk.lower() * kq.lower(), jk.upper() * kq.upper()};
        const Interval direct{jq.lower(), jq.upper()};
        const double slack = kRelTol * std::max(1.0, product.upper);
        if (direct.lower > product.upper + slack || product.lower > direct.upper + slack) {
          out.push_back({m.settings()[j], m.settings()[k], m.settings()[q], direct, product});
        }
      }
    }
  }
  return out;
}

}  // namespace hetbounds
