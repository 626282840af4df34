#pragma once

// Pairwise rank-correlation matrices and the linear algebra around them.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kemeny/rank_core.hpp"

namespace kemeny {

/// n observations by p variables, stored column-major. No NaN.
class DataMatrix {
 public:
  DataMatrix(std::vector<std::string> names, std::vector<std::vector<double>> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return columns_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<double>& column(std::size_t j) const { return columns_.at(j); }
  /// Index of a named column; ShapeError when absent.
  std::size_t column_index(std::string_view name) const;
  ScoreVector score_vector(std::size_t j) const { return ScoreVector(columns_.at(j)); }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  std::size_t rows_ = 0;
};

enum class CorrelationMethod { kemeny_tau, spearman, arcsine_r, kendall_b };

std::string_view method_name(CorrelationMethod method);
CorrelationMethod parse_method(std::string_view name);

struct RankCorrMatrix {
  Eigen::MatrixXd matrix;
  CorrelationMethod method = CorrelationMethod::kemeny_tau;
  /// Per-variable spreads: sqrt of the Kemeny variance (untied pair count).
  Eigen::VectorXd spreads;
};

/// Pairwise estimates with unit diagonal. Column pairs are spread over
/// `workers` threads; the result does not depend on it.
RankCorrMatrix correlation_matrix(const DataMatrix& data, CorrelationMethod method, int workers = 1);

/// D Xi D with D = diag(sds).
Eigen::MatrixXd scale_to_covariance(const Eigen::MatrixXd& xi, const Eigen::VectorXd& sds);

constexpr double kPdTolerance = 1e-10;

double min_eigenvalue(const Eigen::MatrixXd& sym);
bool is_pd(const Eigen::MatrixXd& sym);

/// Plain covariance of the columns with divisor n.
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& observations);

/// K = -log|Sigma| - tr(Sigma^{-1} S).
double loglik_kernel(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& s);
/// -pn/2 log(2 pi) + n/2 K.
double gaussian_loglik(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& s, std::int64_t n);

struct LoadingsSolution {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double error_variance = 0.0;
};

/// Two-indicator loadings with lambda1 lambda2 = rho, |lambda| = sqrt|rho|.
LoadingsSolution polychoric_loadings(double rho);
/// The display as typeset: lambda2 = -lambda1, error term 1 - sqrt(rho^2).
LoadingsSolution polychoric_loadings_as_printed(double rho);

/// cos(pi / (1 + sqrt(ad / bc))) for the 2x2 table [[a, b], [c, d]].
double tetrachoric_from_table(double a, double b, double c, double d);

struct HoeffdingResult {
  double h = 0.0;
  double p_value = 1.0;
  int permutations = 0;
};

/// Plug-in (1/n) sum_i (F12 - F1 F2)^2 over the sample points.
double hoeffding_statistic(const ScoreVector& x, const ScoreVector& y);
/// Statistic plus a permutation p-value (1 + #{H* >= H}) / (B + 1).
HoeffdingResult hoeffding_h(const ScoreVector& x, const ScoreVector& y, int permutations,
                            std::uint64_t seed);

}  // namespace kemeny
