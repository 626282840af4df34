#include "kemeny/null_models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>

#include <nlohmann/json.hpp>

#include "kemeny/errors.hpp"

namespace kemeny {

namespace {

// Lattice sizes above these fall back to the normal approximation.
constexpr std::int64_t kMaxKemenyLattice = 5'000'000;
constexpr std::int64_t kMaxSpearmanLattice = 4'000'000;

constexpr std::array<double, 18> kSpearmanKurtosisTable = {
    1.0,      1.5,      1.84182,  2.077129, 2.234365, 2.34464,  2.42575,  2.489407, 2.539668,
    2.580637, 2.619854, 2.643464, 2.671357, 2.695132, 2.713222, 2.728253, 2.745692, 2.762238,
};

void require_n(int n, int minimum, const char* what) {
  if (n < minimum) {
    throw DomainError(std::string(what) + ": n must be >= " + std::to_string(minimum) + ", got " +
                      std::to_string(n));
  }
}

// One-sided mid-p and the matching two-sided value.
void set_p_values(TestResult& r, double one_sided) {
  r.p_one_sided = std::clamp(one_sided, 0.0, 1.0);
  r.p_two_sided = std::clamp(2.0 * std::min(r.p_one_sided, 1.0 - r.p_one_sided), 0.0, 1.0);
}

template <class Table>
std::shared_ptr<const Table> memoized(int n, Table (*build)(int)) {
  static std::shared_mutex mutex;
  static std::map<int, std::shared_ptr<const Table>> cache;
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  auto table = std::make_shared<const Table>(build(n));
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(n, std::move(table));
  return it->second;
}

double central_moment(const std::vector<double>& pmf, std::int64_t offset, int order) {
  // Symmetric pairs are accumulated together so odd orders cancel exactly.
  const auto centre = static_cast<std::size_t>(offset);
  double acc = order == 0 ? pmf[centre] : 0.0;
  for (std::size_t k = 1; k <= centre; ++k) {
    const double xk = std::pow(static_cast<double>(k), order);
    const double sign = order % 2 == 0 ? 1.0 : -1.0;
    acc += pmf[centre + k] * xk + sign * pmf[centre - k] * xk;
  }
  return acc;
}

}  // namespace

Rational population_variance(int n) {
  require_n(n, 2, "population_variance");
  const BigInt nn = n;
  return Rational((nn - 1) * (nn - 1) * (nn + 4) * (2 * nn - 1), 18 * nn);
}

double variance_poly(int n) {
  require_n(n, 9, "variance_poly");
  const double x = n;
  return 11.82 - 2.31825 * x + 0.207355 * x * x + 0.110824 * x * x * x;
}

double kurtosis_poly(int n) {
  require_n(n, 9, "kurtosis_poly");
  const double x = n;
  return -std::exp(0.0002939 * x * x - 0.05537 * x - 1.149);
}

Rational alpha_of_n(int n) {
  require_n(n, 3, "alpha_of_n");
  const BigInt nn = n;
  const BigInt num = (nn - 1) * (9 * nn * nn * nn - 4 * nn * nn - 14 * nn + 8);
  const BigInt den = 2 * (nn - 2) * (4 * nn * nn + 9 * nn - 4);
  return Rational(num, den);
}

double alpha_from_kurtosis(double k4) {
  if (!(k4 < 3.0)) throw DomainError("alpha_from_kurtosis: kurtosis must be < 3");
  return (9.0 - 5.0 * k4) / (2.0 * (k4 - 3.0));
}

double kurtosis_from_alpha(double alpha) {
  if (!(alpha > -2.5)) throw DomainError("kurtosis_from_alpha: alpha must exceed -5/2");
  return 3.0 * (2.0 * alpha + 3.0) / (2.0 * alpha + 5.0);
}

double q_from_moments(double mu2, double mu4) {
  if (!(mu2 > 0.0) || !(mu4 > 0.0) || !(3.0 * mu2 * mu2 > mu4)) {
    throw DomainError("q_from_moments: requires mu2 > 0 and 0 < mu4 < 3 mu2^2");
  }
  return std::sqrt(2.0) * std::sqrt(mu2 * mu4 / (3.0 * mu2 * mu2 - mu4));
}

double NullTable::probability(std::int64_t x) const {
  if (x < -m || x > m) return 0.0;
  return pmf[static_cast<std::size_t>(x + m)];
}

std::vector<std::int64_t> NullTable::support() const {
  std::vector<std::int64_t> xs(pmf.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<std::int64_t>(i) - m;
  return xs;
}

double NullTable::upper_tail(std::int64_t x) const {
  if (x > m) return 0.0;
  double acc = 0.0;
  for (std::int64_t v = m; v >= std::max(x, -m); --v) acc += probability(v);
  return std::min(acc, 1.0);
}

double NullTable::mid_upper_tail(std::int64_t x) const {
  return upper_tail(x) - 0.5 * probability(x);
}

std::int64_t NullTable::quantile(double p) const {
  double acc = 0.0;
  for (std::int64_t x = -m; x <= m; ++x) {
    acc += probability(x);
    if (acc >= p) return x;
  }
  return m;
}

double NullTable::variance() const { return central_moment(pmf, m, 2); }

double NullTable::standardized_kurtosis() const {
  const double v = variance();
  return central_moment(pmf, m, 4) / (v * v);
}

double NullTable::max_abs_odd_moment() const {
  double worst = 0.0;
  for (int order : {1, 3, 5}) worst = std::max(worst, std::abs(central_moment(pmf, m, order)));
  return worst;
}

NullTable null_pmf(int n) {
  require_n(n, 3, "null_pmf");
  NullTable t;
  t.n = n;
  t.m = pair_count(static_cast<std::size_t>(n));
  if (t.m > kMaxKemenyLattice) throw RangeError("null_pmf: lattice too large for n=" + std::to_string(n));
  t.alpha = to_double(alpha_of_n(n));
  t.sigma2 = to_double(population_variance(n));
  const double k4 = kurtosis_from_alpha(t.alpha);
  t.q = q_from_moments(t.sigma2, k4 * t.sigma2 * t.sigma2);

  // Log-space weights relative to x = 0, filled symmetrically.
  const auto m = static_cast<std::size_t>(t.m);
  t.pmf.assign(2 * m + 1, 0.0);
  const double q2 = t.q * t.q;
  double half = 0.0;
  for (std::size_t x = 1; x <= m; ++x) {
    const double xd = static_cast<double>(x);
    const double gap = 1.0 - xd * xd / q2;
    const double w = gap > 0.0 ? std::exp(t.alpha * std::log(gap)) : 0.0;
    t.pmf[m + x] = w;
    t.pmf[m - x] = w;
    half += w;
  }
  t.pmf[m] = 1.0;
  const double total = 1.0 + 2.0 * half;
  for (auto& p : t.pmf) p /= total;
  return t;
}

std::shared_ptr<const NullTable> cached_null_pmf(int n) { return memoized<NullTable>(n, &null_pmf); }

std::string null_table_json(const NullTable& table) {
  nlohmann::ordered_json j;
  j["n"] = table.n;
  j["m"] = table.m;
  j["alpha"] = table.alpha;
  j["q"] = table.q;
  j["support"] = table.support();
  j["probabilities"] = table.pmf;
  return j.dump();
}

RiffledMoments riffled_moments(double m, double alpha1, double alpha2, double w) {
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw DomainError("riffled_moments: shapes must be positive");
  if (!(w >= 0.0 && w <= 1.0)) throw DomainError("riffled_moments: weight must lie in [0, 1]");
  if (!(m >= 0.0)) throw DomainError("riffled_moments: midpoint must be non-negative");
  RiffledMoments r;
  r.m = m;
  r.alpha1 = alpha1;
  r.alpha2 = alpha2;
  r.w = w;
  const double a1 = alpha1;
  const double a2 = alpha2;
  r.mu2 = (1.0 - 2.0 * m + m * m - w + 2.0 * m * w +
           2.0 * a2 * (-1.0 + m + w - m * w + m * m * w) -
           2.0 * a1 * (-1.0 + m * (2.0 - 3.0 * w) + m * m * (w - 1.0) + w - 2.0 * a2 * (w + m - 1.0))) /
          ((1.0 + 2.0 * a1) * (1.0 + 2.0 * a2));
  r.mu3 = 0.0;
  r.mu4 = 5.0 - 8.0 * m + 3.0 * m * m - 5.0 * w + 6.0 * m * w +
          (m - 1.0) * m * w * (2.0 + 3.0 * (m - 1.0)) / (2.0 + 4.0 * a1) -
          3.0 * m * w * (m - 3.0) * (m - 2.0) * (m - 1.0) / (6.0 + 4.0 * a1) -
          m * (m - 2.0) * (m - 1.0) * (8.0 + 3.0 * (m - 3.0)) * (w - 1.0) / (2.0 + a2) +
          3.0 * (w - 1.0) * (m - 1.0) * (m - 2.0) * (m - 3.0) * (m - 4.0) / (6.0 + a2);
  r.sigma2 = 0.5 * (m * (m - 1.0) / (1.0 + 2.0 * a1) + (m - 1.0) * (m - 2.0) / (1.0 + 2.0 * a2) +
                    2.0 * m - 1.0);
  return r;
}

double riffled_kurtosis_ratio(double m, double alpha) {
  const double a = alpha;
  const double num = 2.0 * (1.0 + a) *
                     (3.0 + 6.0 * (m - 1.0) * m * (2.0 + m * (m - 1.0)) +
                      4.0 * a * (-4.0 + m * (11.0 + m * (6.0 * m - 11.0))) +
                      4.0 * a * a * (5.0 + 2.0 * m * (3.0 * m - 5.0)));
  const double base = 1.0 - 2.0 * a + 2.0 * m * (2.0 * a + m - 1.0);
  return num / ((3.0 + 2.0 * a) * base * base);
}

double riffled_mu4_of_n(int n, double alpha) {
  const double a = alpha;
  const double N = static_cast<double>(n) * n - n;
  const double h = 0.5 * N;
  const double inner = 4.0 * a * a * (N * (1.5 * N - 5.0) + 5.0) +
                       4.0 * a * (h * (h * (3.0 * N - 11.0) + 11.0) - 4.0) +
                       3.0 * N * (h - 1.0) * (h * (h - 1.0) + 2.0) + 3.0;
  const double num = 2.0 * (a + 1.0) * inner;
  const double base = -2.0 * a + N * (2.0 * a + h - 1.0) + 1.0;
  const double den = 0.5 * ((2.0 * a + 3.0) * base * base);
  return 2.0 * num / den;
}

double spearman_kurtosis(int n) {
  require_n(n, 2, "spearman_kurtosis");
  const double x = n;
  return -0.7561593 + 1.1482686 * x - 0.1240335 * x * x + 0.0044051 * x * x * x;
}

double spearman_kurtosis_table(int n) {
  if (n < 2 || n > 19) throw RangeError("spearman_kurtosis_table: n must lie in [2, 19]");
  return kSpearmanKurtosisTable[static_cast<std::size_t>(n - 2)];
}

double spearman_kurtosis_classical(int n) {
  require_n(n, 2, "spearman_kurtosis_classical");
  const double x = n;
  return 3.0 * (25.0 * x * x * x - 38.0 * x * x - 35.0 * x + 72.0) /
         (25.0 * x * (x + 1.0) * (x - 1.0));
}

double symmetric_beta_binomial_kurtosis(std::int64_t K, double a) {
  const double n = static_cast<double>(K);
  const double s = 2.0 * a;
  const double ab = a * a;
  return s * s * (1.0 + s) / (n * ab * (s + 2.0) * (s + 3.0) * (s + n)) *
         (s * (s - 1.0 + 6.0 * n) + 3.0 * ab * (n - 2.0) + 6.0 * n * n - 3.0 * ab * n * (6.0 - n) / s -
          18.0 * ab * n * n / (s * s));
}

double SpearmanNull::mid_upper_tail(double z0) const {
  const double eps = 1e-9;
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] > z0 + eps) {
      acc += pmf[i];
    } else if (z[i] >= z0 - eps) {
      acc += 0.5 * pmf[i];
    }
  }
  return std::min(acc, 1.0);
}

double SpearmanNull::variance() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) acc += pmf[i] * z[i] * z[i];
  return acc;
}

double SpearmanNull::standardized_kurtosis() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) acc += pmf[i] * std::pow(z[i], 4);
  const double v = variance();
  return acc / (v * v);
}

SpearmanNull spearman_null(int n) {
  require_n(n, 3, "spearman_null");
  SpearmanNull s;
  s.n = n;
  const std::int64_t nn = n;
  s.K = (nn * nn * nn - nn) / 6;
  if (s.K > kMaxSpearmanLattice) throw RangeError("spearman_null: lattice too large for n=" + std::to_string(n));
  s.target_kurtosis = n <= 19 ? spearman_kurtosis_table(n) : spearman_kurtosis_classical(n);

  // Kurtosis rises monotonically from 1 (a -> 0) to 3 - 2/K (a -> inf).
  double lo = std::log(1e-9);
  double hi = std::log(1e9);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (symmetric_beta_binomial_kurtosis(s.K, std::exp(mid)) < s.target_kurtosis) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  s.shape = std::exp(0.5 * (lo + hi));

  const double a = s.shape;
  const double K = static_cast<double>(s.K);
  const double sd = std::sqrt(K * (2.0 * a + K) / (4.0 * (2.0 * a + 1.0)));
  const auto size = static_cast<std::size_t>(s.K) + 1;
  s.z.resize(size);
  s.pmf.resize(size);
  // log C(K, k) + log B(k + a, K - k + a) - log B(a, a); mirrored for symmetry.
  const double log_norm = std::lgamma(K + 1.0) + std::lgamma(2.0 * a) - 2.0 * std::lgamma(a) -
                          std::lgamma(K + 2.0 * a);
  double total = 0.0;
  for (std::size_t k = 0; k < size; ++k) {
    const double kd = static_cast<double>(k);
    s.z[k] = (kd - K / 2.0) / sd;
    if (k > size - 1 - k) {
      s.pmf[k] = s.pmf[size - 1 - k];
    } else {
      s.pmf[k] = std::exp(log_norm - std::lgamma(kd + 1.0) - std::lgamma(K - kd + 1.0) +
                          std::lgamma(kd + a) + std::lgamma(K - kd + a));
    }
    total += s.pmf[k];
  }
  for (auto& p : s.pmf) p /= total;
  return s;
}

std::shared_ptr<const SpearmanNull> cached_spearman_null(int n) {
  return memoized<SpearmanNull>(n, &spearman_null);
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

TestResult z_kemeny(const ScoreVector& x, const ScoreVector& y, KemenyTestOptions options) {
  if (x.size() != y.size()) throw ShapeError("z_kemeny: length mismatch");
  if (x.size() < 3) throw SizeError("z_kemeny: need n >= 3");
  const int n = static_cast<int>(x.size());
  const auto c = pair_stats(x, y);
  const double var_x = kemeny_variance(x);
  const double var_y = kemeny_variance(y);
  if (var_x == 0.0 || var_y == 0.0) throw DegenerateError("z_kemeny: constant input");

  TestResult r;
  r.method = "kemeny";
  r.estimate = static_cast<double>(c.concordant - c.discordant) / static_cast<double>(c.pairs);
  const std::int64_t centred = c.concordant - c.discordant;
  double sigma = std::sqrt(to_double(population_variance(n)));
  if (options.scale == KemenyScale::per_sample) {
    sigma *= std::sqrt(var_x * var_y) / static_cast<double>(c.pairs);
  }
  r.statistic = static_cast<double>(centred) / sigma;

  const bool lattice = options.null == NullKind::lattice && options.scale == KemenyScale::population &&
                       c.pairs <= kMaxKemenyLattice;
  if (lattice) {
    r.null = NullKind::lattice;
    r.kemeny_null = cached_null_pmf(n);
    set_p_values(r, r.kemeny_null->mid_upper_tail(centred));
  } else {
    r.null = NullKind::normal;
    set_p_values(r, normal_upper_tail(r.statistic));
  }
  return r;
}

double kendall_b_variance(const ScoreVector& x, const ScoreVector& y) {
  const double n = static_cast<double>(x.size());
  double vt = 0.0, vu = 0.0, t1 = 0.0, u1 = 0.0, t2 = 0.0, u2 = 0.0;
  for (const auto b : tie_blocks(x)) {
    const double t = static_cast<double>(b);
    vt += t * (t - 1.0) * (2.0 * t + 5.0);
    t1 += t * (t - 1.0);
    t2 += t * (t - 1.0) * (t - 2.0);
  }
  for (const auto b : tie_blocks(y)) {
    const double u = static_cast<double>(b);
    vu += u * (u - 1.0) * (2.0 * u + 5.0);
    u1 += u * (u - 1.0);
    u2 += u * (u - 1.0) * (u - 2.0);
  }
  const double v0 = n * (n - 1.0) * (2.0 * n + 5.0);
  const double v1 = t1 * u1 / (2.0 * n * (n - 1.0));
  const double v2 = n > 2.0 ? t2 * u2 / (9.0 * n * (n - 1.0) * (n - 2.0)) : 0.0;
  return (v0 - vt - vu) / 18.0 + v1 + v2;
}

TestResult z_kendall_b(const ScoreVector& x, const ScoreVector& y) {
  const auto c = pair_stats(x, y);
  TestResult r;
  r.method = "kendall-b";
  r.estimate = kendall_tau_b(x, y);  // throws on constant input
  const double v = kendall_b_variance(x, y);
  if (!(v > 0.0)) throw DegenerateError("z_kendall_b: zero null variance");
  r.statistic = static_cast<double>(c.concordant - c.discordant) / std::sqrt(v);
  r.null = NullKind::normal;
  set_p_values(r, normal_upper_tail(r.statistic));
  return r;
}

TestResult z_spearman(const ScoreVector& x, const ScoreVector& y, SpearmanTestOptions options) {
  if (x.size() != y.size()) throw ShapeError("z_spearman: length mismatch");
  if (x.size() < 3) throw SizeError("z_spearman: need n >= 3");
  const int n = static_cast<int>(x.size());
  TestResult r;
  r.method = options.as_printed ? "spearman-as-printed" : "spearman";
  r.estimate = spearman_rho(x, y);
  const double root = std::sqrt(static_cast<double>(n - 1));
  const double z = r.estimate * root;
  r.statistic = options.as_printed ? r.estimate / root : z;

  // p-values always refer to the unit-variance scale rho_S sqrt(n - 1).
  const std::int64_t K = (static_cast<std::int64_t>(n) * n * n - n) / 6;
  if (options.null == NullKind::lattice && K <= kMaxSpearmanLattice) {
    r.null = NullKind::lattice;
    r.spearman_null = cached_spearman_null(n);
    set_p_values(r, r.spearman_null->mid_upper_tail(z));
  } else {
    r.null = NullKind::normal;
    set_p_values(r, normal_upper_tail(z));
  }
  return r;
}

}  // namespace kemeny
