#include "kemeny/multivar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "kemeny/errors.hpp"

namespace kemeny {

DataMatrix::DataMatrix(std::vector<std::string> names, std::vector<std::vector<double>> columns)
    : names_(std::move(names)), columns_(std::move(columns)) {
  if (names_.size() != columns_.size()) throw ShapeError("DataMatrix: names and columns differ in count");
  if (columns_.empty()) throw SizeError("DataMatrix: no columns");
  rows_ = columns_.front().size();
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].size() != rows_) throw ShapeError("DataMatrix: ragged column '" + names_[j] + "'");
    for (std::size_t i = 0; i < rows_; ++i) {
      if (std::isnan(columns_[j][i])) {
        throw InvalidInputError("DataMatrix: NaN in column '" + names_[j] + "' at row " +
                                std::to_string(i + 1));
      }
    }
  }
  if (rows_ < 2) throw SizeError("DataMatrix: need at least 2 rows");
}

std::size_t DataMatrix::column_index(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw ShapeError("no column named '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

std::string_view method_name(CorrelationMethod method) {
  switch (method) {
    case CorrelationMethod::kemeny_tau: return "kemeny";
    case CorrelationMethod::spearman: return "spearman";
    case CorrelationMethod::arcsine_r: return "arcsine";
    case CorrelationMethod::kendall_b: return "kendall-b";
  }
  return "unknown";
}

CorrelationMethod parse_method(std::string_view name) {
  if (name == "kemeny" || name == "kemeny_tau") return CorrelationMethod::kemeny_tau;
  if (name == "spearman") return CorrelationMethod::spearman;
  if (name == "arcsine" || name == "arcsine_r") return CorrelationMethod::arcsine_r;
  if (name == "kendall-b" || name == "kendall_b") return CorrelationMethod::kendall_b;
  throw InvalidInputError("unknown correlation method '" + std::string(name) + "'");
}

namespace {

double estimate(CorrelationMethod method, const ScoreVector& x, const ScoreVector& y) {
  switch (method) {
    case CorrelationMethod::kemeny_tau: return kemeny_tau(x, y);
    case CorrelationMethod::spearman: return spearman_rho(x, y);
    case CorrelationMethod::arcsine_r: return arcsine_r(x, y);
    case CorrelationMethod::kendall_b: return kendall_tau_b(x, y);
  }
  return 0.0;
}

void require_square(const Eigen::MatrixXd& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) throw ShapeError(std::string(what) + ": matrix must be square");
}

}  // namespace

RankCorrMatrix correlation_matrix(const DataMatrix& data, CorrelationMethod method, int workers) {
  const std::size_t p = data.cols();
  if (data.rows() <= p) {
    throw SizeError("correlation_matrix: need more rows than columns (" + std::to_string(data.rows()) +
                    " <= " + std::to_string(p) + ")");
  }
  std::vector<ScoreVector> cols;
  cols.reserve(p);
  RankCorrMatrix out;
  out.method = method;
  out.spreads.resize(static_cast<Eigen::Index>(p));
  for (std::size_t j = 0; j < p; ++j) {
    cols.push_back(data.score_vector(j));
    const double v = kemeny_variance(cols.back());
    if (v == 0.0) throw DegenerateError("column '" + data.names()[j] + "' is constant");
    out.spreads[static_cast<Eigen::Index>(j)] = std::sqrt(v);
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> values(pairs.size());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(std::max<std::size_t>(1, pairs.size()))));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = static_cast<std::size_t>(w); k < pairs.size(); k += static_cast<std::size_t>(workers)) {
        values[k] = estimate(method, cols[pairs[k].first], cols[pairs[k].second]);
      }
    });
  }
  for (auto& t : pool) t.join();

  out.matrix = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(pairs[k].first);
    const auto j = static_cast<Eigen::Index>(pairs[k].second);
    out.matrix(i, j) = values[k];
    out.matrix(j, i) = values[k];
  }
  return out;
}

Eigen::MatrixXd scale_to_covariance(const Eigen::MatrixXd& xi, const Eigen::VectorXd& sds) {
  require_square(xi, "scale_to_covariance");
  if (sds.size() != xi.rows()) throw ShapeError("scale_to_covariance: sds length differs from matrix order");
  for (Eigen::Index i = 0; i < sds.size(); ++i) {
    if (!(sds[i] > 0.0)) throw DomainError("scale_to_covariance: standard deviations must be positive");
  }
  return sds.asDiagonal() * xi * sds.asDiagonal();
}

double min_eigenvalue(const Eigen::MatrixXd& sym) {
  require_square(sym, "min_eigenvalue");
  if ((sym - sym.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ShapeError("min_eigenvalue: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DecompositionError("min_eigenvalue: eigensolver failed");
  return solver.eigenvalues().minCoeff();
}

bool is_pd(const Eigen::MatrixXd& sym) { return min_eigenvalue(sym) > kPdTolerance; }

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& observations) {
  if (observations.rows() < 1) throw SizeError("sample_covariance: no observations");
  const Eigen::RowVectorXd mean = observations.colwise().mean();
  const Eigen::MatrixXd centred = observations.rowwise() - mean;
  return centred.transpose() * centred / static_cast<double>(observations.rows());
}

double loglik_kernel(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& s) {
  require_square(sigma, "loglik_kernel");
  require_square(s, "loglik_kernel");
  if (sigma.rows() != s.rows()) throw ShapeError("loglik_kernel: order mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw DecompositionError("loglik_kernel: Sigma is not positive definite");
  if (!is_pd(s)) throw DecompositionError("loglik_kernel: S is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  return -log_det - llt.solve(s).trace();
}

double gaussian_loglik(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& s, std::int64_t n) {
  const double p = static_cast<double>(sigma.rows());
  const double nd = static_cast<double>(n);
  return -0.5 * p * nd * std::log(2.0 * std::numbers::pi) + 0.5 * nd * loglik_kernel(sigma, s);
}

LoadingsSolution polychoric_loadings(double rho) {
  if (!(std::abs(rho) <= 1.0)) throw DomainError("polychoric_loadings: |rho| must be <= 1");
  const double mag = std::sqrt(std::abs(rho));
  return {mag, rho < 0.0 ? -mag : mag, 1.0 - std::abs(rho)};
}

LoadingsSolution polychoric_loadings_as_printed(double rho) {
  if (!(std::abs(rho) <= 1.0)) throw DomainError("polychoric_loadings: |rho| must be <= 1");
  const double l1 = std::sqrt(rho * rho);
  return {l1, -l1, 1.0 - std::sqrt(rho * rho)};
}

double tetrachoric_from_table(double a, double b, double c, double d) {
  for (const double v : {a, b, c, d}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("tetrachoric_from_table: counts must be finite and >= 0");
  }
  if (a + b + c + d == 0.0) throw DomainError("tetrachoric_from_table: empty table");
  if (b == 0.0 && c == 0.0) return 1.0;
  if (a == 0.0 && d == 0.0) return -1.0;
  const double ad = a * d;
  const double bc = b * c;
  if (ad == 0.0 && bc == 0.0) throw DomainError("tetrachoric_from_table: odds ratio undefined");
  if (bc == 0.0) return 1.0;
  return std::cos(std::numbers::pi / (1.0 + std::sqrt(ad / bc)));
}

double hoeffding_statistic(const ScoreVector& x, const ScoreVector& y) {
  if (x.size() != y.size()) throw ShapeError("hoeffding: length mismatch");
  const std::size_t n = x.size();
  // Midrank step weights: 1 below, 1/2 on a tie, 0 above.
  auto weight = [](double a, double b) { return a < b ? 1.0 : (a == b ? 0.5 : 0.0); };
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f1 = 0.0, f2 = 0.0, f12 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double wx = weight(x[j], x[i]);
      const double wy = weight(y[j], y[i]);
      f1 += wx;
      f2 += wy;
      f12 += wx * wy;
    }
    const double nd = static_cast<double>(n);
    const double gap = f12 / nd - (f1 / nd) * (f2 / nd);
    acc += gap * gap;
  }
  return acc / static_cast<double>(n);
}

HoeffdingResult hoeffding_h(const ScoreVector& x, const ScoreVector& y, int permutations, std::uint64_t seed) {
  if (x.size() != y.size()) throw ShapeError("hoeffding: length mismatch");
  if (x.size() < 5) throw SizeError("hoeffding: need n >= 5");
  if (permutations < 99) throw DomainError("hoeffding: need at least 99 permutations");
  HoeffdingResult r;
  r.permutations = permutations;
  r.h = hoeffding_statistic(x, y);
  std::mt19937_64 rng(seed);
  std::vector<double> shuffled(y.values().begin(), y.values().end());
  int exceed = 0;
  for (int b = 0; b < permutations; ++b) {
    // Fisher-Yates with an explicit draw so streams match across standard libraries.
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(shuffled[i], shuffled[j]);
    }
    if (hoeffding_statistic(x, ScoreVector(shuffled)) >= r.h - 1e-15) ++exceed;
  }
  r.p_value = (1.0 + exceed) / (permutations + 1.0);
  return r;
}

}  // namespace kemeny
