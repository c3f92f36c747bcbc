#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hetbounds/bounds.hpp"
#include "hetbounds/dataset.hpp"

namespace hetbounds {

/// Which columns enter a regression. controls_core is the always-included
/// partition; controls_bench is the benchmark partition dropped by the
/// supershort regression.
struct RegressionSpec {
  std::string outcome;
  std::string treatment;
  std::vector<std::string> controls_core;
  std::vector<std::string> controls_bench;
  std::optional<std::string> weight_column;
};

struct FitResult {
  /// Keyed by expanded design column name. The intercept is "(Intercept)",
  /// categorical indicators are "column[level]".
  std::map<std::string, double> coefficients;
  /// Weighted residual variance: sum(w e^2) / sum(w) * n / (n - p).
  double residual_variance = 0.0;
  /// Kish effective sample size (sum w)^2 / sum w^2.
  double n_effective = 0.0;
  double treatment_coefficient = 0.0;
  std::size_t design_rank = 0;
  std::size_t rows_used = 0;
  std::size_t rows_dropped = 0;
};

struct SupershortResult {
  std::string setting;
  double theta_s = 0.0;
  double theta_ss = 0.0;
  double b_ss = 0.0;  // theta_s - theta_ss
  std::size_t rows_used = 0;
};

/// Weighted least squares of the outcome on intercept, treatment and both
/// control partitions, by column-pivoted Householder QR on the
/// sqrt(w)-scaled, column-equilibrated design.
///
/// Rows missing any used column are dropped (count in rows_dropped).
/// Throws RankDeficientError naming the dependent columns, InvalidInput for
/// non-finite values, unknown or duplicated columns, or an empty sample.
FitResult wols_fit(const Dataset& data, const RegressionSpec& spec);

/// Target minus its weighted projection on intercept + controls.
struct Residuals {
  std::vector<double> values;
  std::vector<double> weights;
  std::vector<std::size_t> rows;  ///< source row of each value
};

/// Residualizes `target` on `controls` (plus intercept). An empty
/// `weights` span means the dataset's own weights (or ones). Rows missing
/// any of `also_require` are dropped too, so several residualizations can
/// share a sample.
Residuals residualize(const Dataset& data, const std::string& target,
                      const std::vector<std::string>& controls,
                      std::span<const double> weights = {},
                      const std::vector<std::string>& also_require = {});

/// Weighted no-intercept slope of y on x: sum(w x y) / sum(w x^2).
double residual_slope(std::span<const double> y, std::span<const double> x,
                      std::span<const double> weights);

/// theta_s from treatment + core + bench, theta_ss from treatment + core,
/// both on the same listwise-complete sample. Requires nonempty
/// controls_bench.
SupershortResult short_supershort(const Dataset& data,
                                  const RegressionSpec& spec,
                                  std::string setting = {});

/// The same fit with the two control partitions swapped. The long model
/// (theta_s) is identical; b_ss generally is not.
struct PartitionSensitivity {
  SupershortResult as_given;
  SupershortResult swapped;
};
PartitionSensitivity partition_sensitivity(const Dataset& data,
                                           const RegressionSpec& spec,
                                           std::string setting = {});

/// Symmetric omitted-variable bias bound from partial R^2 benchmarks:
///   b = sqrt(k r2_y * k r2_d / (1 - k r2_d)) * sd_y_resid / sd_d_resid
/// and the bound is [-b, b]. Throws InvalidInput when k * r2_d >= 1.
BiasBound partial_r2_bias_bound(double r2_d, double r2_y, double sd_y_resid,
                                double sd_d_resid, double strength_multiplier);

/// Ingredients for partial_r2_bias_bound measured on the benchmark
/// partition. All R^2 values use weighted sums of squares:
///   r2_d: partial R^2 of bench with treatment, given core
///   r2_y: partial R^2 of bench with outcome, given treatment and core
///   sd_y_resid: weighted sd of the long-model residual
///   sd_d_resid: weighted sd of treatment residualized on all controls
struct BenchmarkComponents {
  double r2_d = 0.0;
  double r2_y = 0.0;
  double sd_y_resid = 0.0;
  double sd_d_resid = 0.0;
};
BenchmarkComponents benchmark_components(const Dataset& data,
                                         const RegressionSpec& spec);

}  // namespace hetbounds
