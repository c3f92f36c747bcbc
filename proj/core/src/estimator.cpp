#include "hetbounds/estimator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "hetbounds/error.hpp"

namespace hetbounds {
namespace {

constexpr const char* kIntercept = "(Intercept)";
// Relative pivot threshold on the equilibrated design.
constexpr double kRankThreshold = 1e-10;

struct Design {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd w;
  std::vector<std::string> names;
  std::size_t treatment_col = 0;  // meaningful only when a treatment is given
  std::vector<std::size_t> rows;
  std::size_t dropped = 0;
};

const NumericValues& numeric_column(const Dataset& data, const std::string& name,
                                    const char* role) {
  const Column& col = data.column(name);
  if (!col.is_numeric()) {
    throw InvalidInput(std::string(role) + " column '" + name +
                       "' must be numeric");
  }
  return std::get<NumericValues>(col.values);
}

std::vector<double> resolve_weights(const Dataset& data,
                                    const std::optional<std::string>& weight_column,
                                    std::span<const double> explicit_weights,
                                    std::vector<char>& usable) {
  const std::size_t n = data.rows();
  std::vector<double> w(n, 1.0);
  if (!explicit_weights.empty()) {
    if (explicit_weights.size() != n) {
      throw InvalidInput("weights length differs from row count");
    }
    w.assign(explicit_weights.begin(), explicit_weights.end());
  } else if (weight_column) {
    const auto& col = numeric_column(data, *weight_column, "weight");
    for (std::size_t i = 0; i < n; ++i) {
      if (!col[i]) {
        usable[i] = 0;
        continue;
      }
      w[i] = *col[i];
    }
  } else if (data.weights()) {
    w = *data.weights();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (usable[i] && (!std::isfinite(w[i]) || w[i] < 0.0)) {
      throw InvalidInput("weights must be finite and nonnegative");
    }
  }
  return w;
}

// Builds the listwise-complete WLS design. `regressors` are entered in
// order after the intercept; `outcome` must be numeric.
Design build_design(const Dataset& data, const std::string& outcome,
                    const std::vector<std::string>& regressors,
                    const std::optional<std::string>& weight_column,
                    std::span<const double> explicit_weights,
                    const std::vector<std::string>& also_require,
                    bool first_is_treatment) {
  first_is_treatment = first_is_treatment && !regressors.empty();
  std::vector<std::string> used{outcome};
  used.insert(used.end(), regressors.begin(), regressors.end());
  {
    std::set<std::string> seen;
    for (const auto& name : used) {
      if (!data.has_column(name)) {
        throw InvalidInput("unknown column '" + name + "'");
      }
      if (!seen.insert(name).second) {
        throw InvalidInput("column '" + name + "' is used more than once");
      }
    }
  }
  if (weight_column && std::find(used.begin(), used.end(), *weight_column) != used.end()) {
    throw InvalidInput("weight column '" + *weight_column + "' is also a regressor");
  }
  for (const auto& name : also_require) {
    if (!data.has_column(name)) throw InvalidInput("unknown column '" + name + "'");
  }

  const std::size_t n = data.rows();
  std::vector<char> usable(n, 1);
  std::vector<double> w = resolve_weights(data, weight_column, explicit_weights, usable);

  auto require_complete = [&](const std::string& name) {
    const Column& col = data.column(name);
    for (std::size_t i = 0; i < n; ++i) {
      if (col.missing(i)) usable[i] = 0;
    }
  };
  for (const auto& name : used) require_complete(name);
  for (const auto& name : also_require) require_complete(name);

  Design d;
  for (std::size_t i = 0; i < n; ++i) {
    if (usable[i]) d.rows.push_back(i);
  }
  d.dropped = n - d.rows.size();
  if (d.rows.empty()) {
    throw InvalidInput("no complete rows remain after dropping missing values");
  }

  // Non-finite values in used numeric columns are errors, not missing data.
  for (const auto& name : used) {
    const Column& col = data.column(name);
    if (const auto* num = std::get_if<NumericValues>(&col.values)) {
      for (std::size_t r : d.rows) {
        if (!std::isfinite(*(*num)[r])) {
          throw InvalidInput("non-finite value in column '" + name + "'");
        }
      }
    }
  }

  const std::size_t m = d.rows.size();
  std::vector<std::vector<double>> cols;
  d.names.push_back(kIntercept);
  cols.emplace_back(m, 1.0);
  for (const auto& name : regressors) {
    const Column& col = data.column(name);
    if (const auto* num = std::get_if<NumericValues>(&col.values)) {
      std::vector<double> v(m);
      for (std::size_t i = 0; i < m; ++i) v[i] = *(*num)[d.rows[i]];
      if (first_is_treatment && name == regressors.front()) {
        d.treatment_col = cols.size();
      }
      d.names.push_back(name);
      cols.push_back(std::move(v));
    } else {
      if (first_is_treatment && name == regressors.front()) {
        throw InvalidInput("treatment column '" + name + "' must be numeric");
      }
      const auto& cat = std::get<CategoricalValues>(col.values);
      std::set<std::string> levels;
      for (std::size_t r : d.rows) levels.insert(*cat[r]);
      // First level in sorted order is the reference.
      for (auto it = std::next(levels.begin()); it != levels.end(); ++it) {
        std::vector<double> v(m);
        for (std::size_t i = 0; i < m; ++i) v[i] = (*cat[d.rows[i]] == *it) ? 1.0 : 0.0;
        d.names.push_back(name + "[" + *it + "]");
        cols.push_back(std::move(v));
      }
    }
  }

  const auto& y = numeric_column(data, outcome, "outcome");
  d.x.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(cols.size()));
  d.y.resize(static_cast<Eigen::Index>(m));
  d.w.resize(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    d.y(row) = *y[d.rows[i]];
    d.w(row) = w[d.rows[i]];
    for (std::size_t c = 0; c < cols.size(); ++c) {
      d.x(row, static_cast<Eigen::Index>(c)) = cols[c][i];
    }
  }
  if (d.w.sum() <= 0.0) throw InvalidInput("weights of the used rows are all zero");
  return d;
}

struct Solution {
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
  double ssr = 0.0;  // sum w e^2
  std::size_t rank = 0;
};

Solution solve_wls(const Design& d) {
  const Eigen::Index p = d.x.cols();
  const Eigen::Index positive =
      static_cast<Eigen::Index>((d.w.array() > 0.0).count());
  if (positive <= p) {
    throw InvalidInput("design has " + std::to_string(p) +
                       " columns but only " + std::to_string(positive) +
                       " positively weighted rows");
  }
  const Eigen::VectorXd sw = d.w.array().sqrt();
  Eigen::MatrixXd xs = sw.asDiagonal() * d.x;
  const Eigen::VectorXd ys = sw.cwiseProduct(d.y);

  Eigen::VectorXd scale(p);
  std::vector<std::string> zero_cols;
  for (Eigen::Index c = 0; c < p; ++c) {
    scale(c) = xs.col(c).norm();
    if (scale(c) == 0.0) zero_cols.push_back(d.names[static_cast<std::size_t>(c)]);
  }
  if (!zero_cols.empty()) {
    throw RankDeficientError("design column(s) identically zero in the weighted sample",
                             zero_cols);
  }
  xs = xs * scale.cwiseInverse().asDiagonal();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
  qr.setThreshold(kRankThreshold);
  const auto rank = static_cast<std::size_t>(qr.rank());
  if (rank < static_cast<std::size_t>(p)) {
    std::vector<std::size_t> bad;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = static_cast<Eigen::Index>(rank); i < p; ++i) {
      bad.push_back(static_cast<std::size_t>(perm(i)));
    }
    std::sort(bad.begin(), bad.end());
    std::vector<std::string> names;
    std::string list;
    for (std::size_t c : bad) {
      names.push_back(d.names[c]);
      list += (list.empty() ? "" : ", ") + d.names[c];
    }
    throw RankDeficientError("rank-deficient design (rank " + std::to_string(rank) +
                                 " of " + std::to_string(p) +
                                 "); linearly dependent column(s): " + list,
                             std::move(names));
  }

  Solution s;
  s.beta = qr.solve(ys).cwiseQuotient(scale);
  s.residuals = d.y - d.x * s.beta;
  s.ssr = (d.w.array() * s.residuals.array().square()).sum();
  s.rank = rank;
  return s;
}

FitResult make_fit(const Design& d, const Solution& s) {
  FitResult fit;
  for (std::size_t c = 0; c < d.names.size(); ++c) {
    fit.coefficients[d.names[c]] = s.beta(static_cast<Eigen::Index>(c));
  }
  const double sw = d.w.sum();
  const auto n = static_cast<double>((d.w.array() > 0.0).count());
  const auto p = static_cast<double>(d.x.cols());
  fit.residual_variance = s.ssr / sw * n / (n - p);
  fit.n_effective = sw * sw / d.w.squaredNorm();
  fit.treatment_coefficient = s.beta(static_cast<Eigen::Index>(d.treatment_col));
  fit.design_rank = s.rank;
  fit.rows_used = d.rows.size();
  fit.rows_dropped = d.dropped;
  return fit;
}

struct Fitted {
  FitResult fit;
  double ssr = 0.0;
};

Fitted fit_model(const Dataset& data, const std::string& outcome,
                 const std::vector<std::string>& regressors,
                 const std::optional<std::string>& weight_column,
                 const std::vector<std::string>& also_require,
                 bool first_is_treatment = true) {
  Design d = build_design(data, outcome, regressors, weight_column, {}, also_require,
                          first_is_treatment);
  Solution s = solve_wls(d);
  return {make_fit(d, s), s.ssr};
}

std::vector<std::string> concat(std::initializer_list<const std::vector<std::string>*> parts) {
  std::vector<std::string> out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

void check_partitions(const RegressionSpec& spec) {
  for (const auto& a : spec.controls_core) {
    if (std::find(spec.controls_bench.begin(), spec.controls_bench.end(), a) !=
        spec.controls_bench.end()) {
      throw InvalidInput("column '" + a + "' is in both control partitions");
    }
  }
}

}  // namespace

FitResult wols_fit(const Dataset& data, const RegressionSpec& spec) {
  check_partitions(spec);
  std::vector<std::string> regressors{spec.treatment};
  regressors.insert(regressors.end(), spec.controls_core.begin(), spec.controls_core.end());
  regressors.insert(regressors.end(), spec.controls_bench.begin(), spec.controls_bench.end());
  return fit_model(data, spec.outcome, regressors, spec.weight_column, {}).fit;
}

Residuals residualize(const Dataset& data, const std::string& target,
                      const std::vector<std::string>& controls,
                      std::span<const double> weights,
                      const std::vector<std::string>& also_require) {
  Design d = build_design(data, target, controls, std::nullopt, weights, also_require, false);
  Solution s = solve_wls(d);
  Residuals out;
  out.values.assign(s.residuals.data(), s.residuals.data() + s.residuals.size());
  out.weights.assign(d.w.data(), d.w.data() + d.w.size());
  out.rows = std::move(d.rows);
  return out;
}

double residual_slope(std::span<const double> y, std::span<const double> x,
                      std::span<const double> weights) {
  if (y.size() != x.size() || y.size() != weights.size()) {
    throw InvalidInput("residual_slope: length mismatch");
  }
  long double sxy = 0.0L;
  long double sxx = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += static_cast<long double>(weights[i]) * x[i] * y[i];
    sxx += static_cast<long double>(weights[i]) * x[i] * x[i];
  }
  if (sxx == 0.0L) throw InvalidInput("residual_slope: regressor has no variation");
  return static_cast<double>(sxy / sxx);
}

SupershortResult short_supershort(const Dataset& data, const RegressionSpec& spec,
                                  std::string setting) {
  check_partitions(spec);
  if (spec.controls_bench.empty()) {
    throw InvalidInput("supershort regression needs a nonempty benchmark partition");
  }
  const std::vector<std::string> treatment{spec.treatment};
  const auto long_regs = concat({&treatment, &spec.controls_core, &spec.controls_bench});
  const auto short_regs = concat({&treatment, &spec.controls_core});

  const Fitted long_fit = fit_model(data, spec.outcome, long_regs, spec.weight_column, {});
  const Fitted short_fit =
      fit_model(data, spec.outcome, short_regs, spec.weight_column, spec.controls_bench);

  SupershortResult r;
  r.setting = std::move(setting);
  r.theta_s = long_fit.fit.treatment_coefficient;
  r.theta_ss = short_fit.fit.treatment_coefficient;
  r.b_ss = r.theta_s - r.theta_ss;
  r.rows_used = long_fit.fit.rows_used;
  return r;
}

PartitionSensitivity partition_sensitivity(const Dataset& data, const RegressionSpec& spec,
                                           std::string setting) {
  RegressionSpec swapped = spec;
  std::swap(swapped.controls_core, swapped.controls_bench);
  return {short_supershort(data, spec, setting), short_supershort(data, swapped, setting)};
}

BiasBound partial_r2_bias_bound(double r2_d, double r2_y, double sd_y_resid,
                                double sd_d_resid, double strength_multiplier) {
  const double k = strength_multiplier;
  if (!(r2_d >= 0.0 && r2_d < 1.0)) throw InvalidInput("r2_d must lie in [0, 1)");
  if (!(r2_y >= 0.0 && r2_y <= 1.0)) throw InvalidInput("r2_y must lie in [0, 1]");
  if (!(sd_y_resid > 0.0) || !(sd_d_resid > 0.0)) {
    throw InvalidInput("residual standard deviations must be positive");
  }
  if (!(k >= 0.0) || !std::isfinite(k)) {
    throw InvalidInput("strength multiplier must be finite and nonnegative");
  }
  if (k * r2_d >= 1.0) {
    throw InvalidInput("strength_multiplier * r2_d >= 1: the confounder would "
                       "fully explain the treatment");
  }
  const double b = std::sqrt((k * r2_y) * (k * r2_d) / (1.0 - k * r2_d)) *
                   (sd_y_resid / sd_d_resid);
  return BiasBound{-b, b};
}

BenchmarkComponents benchmark_components(const Dataset& data, const RegressionSpec& spec) {
  check_partitions(spec);
  if (spec.controls_bench.empty()) {
    throw InvalidInput("benchmark partition is empty");
  }
  const std::vector<std::string> treatment{spec.treatment};
  const std::vector<std::string> outcome{spec.outcome};
  const auto all_cols = concat({&outcome, &treatment, &spec.controls_core, &spec.controls_bench});
  const auto all_controls = concat({&spec.controls_core, &spec.controls_bench});

  const Fitted d_core = fit_model(data, spec.treatment, spec.controls_core, spec.weight_column,
                                  all_cols, false);
  const Fitted d_all = fit_model(data, spec.treatment, all_controls, spec.weight_column, all_cols,
                                 false);
  const Fitted y_short = fit_model(data, spec.outcome, concat({&treatment, &spec.controls_core}),
                                   spec.weight_column, all_cols);
  const Fitted y_long = fit_model(data, spec.outcome, concat({&treatment, &all_controls}),
                                  spec.weight_column, all_cols);

  BenchmarkComponents c;
  c.r2_d = d_core.ssr > 0.0 ? std::max(0.0, (d_core.ssr - d_all.ssr) / d_core.ssr) : 0.0;
  c.r2_y = y_short.ssr > 0.0 ? std::max(0.0, (y_short.ssr - y_long.ssr) / y_short.ssr) : 0.0;
  c.sd_y_resid = std::sqrt(y_long.fit.residual_variance);
  c.sd_d_resid = std::sqrt(d_all.fit.residual_variance);
  return c;
}

}  // namespace hetbounds
