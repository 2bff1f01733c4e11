#include "elsis/screening.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "elsis/parallel.hpp"

namespace elsis {

int default_top_d(Eigen::Index n, Eigen::Index p) {
  const int d = static_cast<int>(std::floor(static_cast<double>(n) /
                                            (2.0 * std::log(static_cast<double>(n)))));
  return std::max(1, std::min<int>(d, static_cast<int>(p)));
}

bool ranks_before(const ScreenStat& a, const ScreenStat& b) {
  if (a.unrankable != b.unrankable) return !a.unrankable;
  if (!a.unrankable) {
    if (a.statistic != b.statistic) return a.statistic > b.statistic;
    if (a.tie_break != b.tie_break) return a.tie_break > b.tie_break;
  }
  return a.feature < b.feature;
}

void assign_ranks(std::vector<ScreenStat>& stats) {
  std::vector<const ScreenStat*> order(stats.size());
  for (size_t i = 0; i < stats.size(); ++i) order[i] = &stats[i];
  std::sort(order.begin(), order.end(),
            [](const ScreenStat* a, const ScreenStat* b) { return ranks_before(*a, *b); });
  for (size_t r = 0; r < order.size(); ++r) {
    stats[order[r]->feature].rank = static_cast<int>(r + 1);
  }
}

Dataset standardize(const Dataset& data) {
  validate(data);
  Dataset out = data;
  const Eigen::Index n = data.n();
  const double denom = static_cast<double>(n - 1);
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    const double mean = out.X.col(j).mean();
    out.X.col(j).array() -= mean;
    const double sd = std::sqrt(out.X.col(j).squaredNorm() / denom);
    if (!(sd > 0)) throw ConstantColumn(static_cast<long>(j));
    out.X.col(j) /= sd;
  }
  const double ymean = out.y.mean();
  out.y.array() -= ymean;
  out.y_offset = data.y_offset + ymean;
  out.standardized = true;
  return out;
}

namespace {

double studentized_magnitude(const Eigen::VectorXd& g) {
  const Eigen::Index n = g.size();
  const double mean = g.mean();
  const double sd = std::sqrt((g.array() - mean).square().sum() /
                              static_cast<double>(n - 1));
  return sd > 0 ? std::abs(mean) / sd : 0.0;
}

void require_standardized(const Dataset& data) {
  if (!data.standardized) throw DataError("screening requires a standardized dataset");
}

}  // namespace

std::vector<ScreenStat> marginal_el_stats(const Dataset& data, const ElConfig& config,
                                          int threads) {
  require_standardized(data);
  const Eigen::Index p = data.p();
  std::vector<ScreenStat> stats(p);
  parallel_for(0, p, threads, [&](Eigen::Index j) {
    ScreenStat& s = stats[j];
    s.feature = j;
    const Eigen::VectorXd g = data.X.col(j).cwiseProduct(data.y);
    s.tie_break = studentized_magnitude(g);
    try {
      s.statistic = solve_lambda_uni(g, config).log_ratio;
    } catch (const DegenerateInput&) {
      s.statistic = std::numeric_limits<double>::quiet_NaN();
      s.unrankable = true;
      s.flagged = true;
    }
  });
  return stats;
}

std::vector<ScreenStat> ls_sis_stats(const Dataset& data) {
  require_standardized(data);
  const Eigen::Index n = data.n(), p = data.p();
  std::vector<ScreenStat> stats(p);
  const Eigen::VectorXd cov = (data.X.transpose() * data.y) / static_cast<double>(n);
  for (Eigen::Index j = 0; j < p; ++j) {
    stats[j].feature = j;
    stats[j].statistic = std::abs(cov(j));
    stats[j].tie_break = studentized_magnitude(data.X.col(j).cwiseProduct(data.y));
  }
  return stats;
}

namespace {

// Knight's O(n log n) Kendall tau_b: sort by (x, y), count exchanges needed
// to sort the y sequence, correct for ties.
long long merge_count(std::vector<double>& v, std::vector<double>& buf,
                      size_t lo, size_t hi) {
  if (hi - lo < 2) return 0;
  const size_t mid = (lo + hi) / 2;
  long long swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<long long>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
  return swaps;
}

long long tie_pairs(const std::vector<double>& sorted) {
  long long total = 0;
  size_t run = 1;
  for (size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
      ++run;
    } else {
      total += static_cast<long long>(run) * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

}  // namespace

double kendall_tau(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size();
  if (n != y.size()) throw DimensionMismatch("kendall_tau: length mismatch");
  if (n < 2) throw DegenerateInput("kendall_tau needs n >= 2");
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (x(a) != x(b)) return x(a) < x(b);
    return y(a) < y(b);
  });

  const long long n0 = static_cast<long long>(n) * (n - 1) / 2;
  long long n1 = 0, n3 = 0;  // pairs tied in x; tied in both
  {
    size_t i = 0;
    while (i < idx.size()) {
      size_t j = i + 1;
      while (j < idx.size() && x(idx[j]) == x(idx[i])) ++j;
      const long long t = static_cast<long long>(j - i);
      n1 += t * (t - 1) / 2;
      size_t a = i;
      while (a < j) {
        size_t b = a + 1;
        while (b < j && y(idx[b]) == y(idx[a])) ++b;
        const long long u = static_cast<long long>(b - a);
        n3 += u * (u - 1) / 2;
        a = b;
      }
      i = j;
    }
  }

  std::vector<double> ys(n), buf(n), ysorted(n);
  for (Eigen::Index i = 0; i < n; ++i) ys[i] = y(idx[i]);
  ysorted = ys;
  std::sort(ysorted.begin(), ysorted.end());
  const long long n2 = tie_pairs(ysorted);
  const long long swaps = merge_count(ys, buf, 0, ys.size());

  // concordant minus discordant
  const long long diff = n0 - n1 - n2 + n3 - 2 * swaps;
  const double denom = std::sqrt(static_cast<double>(n0 - n1)) *
                       std::sqrt(static_cast<double>(n0 - n2));
  if (!(denom > 0)) throw DegenerateInput("kendall_tau: constant input");
  return static_cast<double>(diff) / denom;
}

std::vector<ScreenStat> rrc_sis_stats(const Dataset& data) {
  validate(data);
  const Eigen::Index p = data.p();
  std::vector<ScreenStat> stats(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    stats[j].feature = j;
    stats[j].tie_break = studentized_magnitude(data.X.col(j).cwiseProduct(data.y));
    try {
      stats[j].statistic = std::abs(kendall_tau(data.X.col(j), data.y));
    } catch (const DegenerateInput&) {
      stats[j].statistic = std::numeric_limits<double>::quiet_NaN();
      stats[j].unrankable = true;
      stats[j].flagged = true;
    }
  }
  return stats;
}

namespace {

// Marginal logistic fit y ~ intercept + x by Newton-Raphson with step
// halving.  Returns |slope|; separation reported through the flag.
double marginal_logistic(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         bool& separated) {
  const Eigen::Index n = x.size();
  const double ymean = y.mean();
  double b0 = std::log(std::max(ymean, 1e-12) / std::max(1.0 - ymean, 1e-12));
  double b1 = 0.0;
  Eigen::VectorXd eta(n), mu(n), w(n);
  auto loglik = [&](double a0, double a1) {
    double ll = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double e = std::clamp(a0 + a1 * x(i), -35.0, 35.0);
      ll += y(i) * e - std::log1p(std::exp(e));
    }
    return ll;
  };
  double ll = loglik(b0, b1);
  for (int it = 0; it < 50; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      eta(i) = std::clamp(b0 + b1 * x(i), -35.0, 35.0);
      mu(i) = 1.0 / (1.0 + std::exp(-eta(i)));
      w(i) = std::max(mu(i) * (1.0 - mu(i)), 1e-12);
    }
    const double g0 = (y - mu).sum();
    const double g1 = x.dot(y - mu);
    const double h00 = w.sum();
    const double h01 = x.dot(w);
    const double h11 = x.cwiseProduct(w).dot(x);
    const double det = h00 * h11 - h01 * h01;
    if (!(std::abs(det) > 1e-300)) break;
    double s0 = (h11 * g0 - h01 * g1) / det;
    double s1 = (h00 * g1 - h01 * g0) / det;
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving) {
      const double t0 = b0 + step * s0, t1 = b1 + step * s1;
      const double trial = loglik(t0, t1);
      if (trial >= ll - 1e-14) {
        b0 = t0;
        b1 = t1;
        accepted = trial > ll;
        ll = trial;
        break;
      }
      step /= 2;
    }
    if (std::abs(step * s0) < 1e-8 && std::abs(step * s1) < 1e-8) break;
    if (std::abs(b1) > 30.0) {
      separated = true;
      return std::numeric_limits<double>::infinity();
    }
    if (!accepted) break;
  }
  if (std::abs(b1) > 30.0) {
    separated = true;
    return std::numeric_limits<double>::infinity();
  }
  return std::abs(b1);
}

}  // namespace

std::vector<ScreenStat> glm_sis_stats(const Dataset& data, Family family, int threads) {
  require_standardized(data);
  if (family == Family::Gaussian) return ls_sis_stats(data);

  // Binomial: the marginal logistic fit uses the raw 0/1 response.
  const Eigen::Index p = data.p();
  Eigen::VectorXd yraw = data.y.array() + data.y_offset;
  for (Eigen::Index i = 0; i < yraw.size(); ++i) {
    const double r = std::round(yraw(i));
    if (std::abs(yraw(i) - r) > 1e-6 || (r != 0.0 && r != 1.0)) {
      throw DataError("binomial screening requires a 0/1 response");
    }
    yraw(i) = r;
  }
  std::vector<ScreenStat> stats(p);
  parallel_for(0, p, threads, [&](Eigen::Index j) {
    ScreenStat& s = stats[j];
    s.feature = j;
    s.tie_break = studentized_magnitude(data.X.col(j).cwiseProduct(data.y));
    bool separated = false;
    s.statistic = marginal_logistic(data.X.col(j), yraw, separated);
    s.flagged = separated;
  });
  return stats;
}

std::vector<Eigen::Index> select_top_d(const std::vector<ScreenStat>& stats, int d) {
  const int p = static_cast<int>(stats.size());
  if (d < 1 || d > p) throw DataError("top-d must satisfy 1 <= d <= p");
  std::vector<const ScreenStat*> order(stats.size());
  for (size_t i = 0; i < stats.size(); ++i) order[i] = &stats[i];
  std::sort(order.begin(), order.end(),
            [](const ScreenStat* a, const ScreenStat* b) { return ranks_before(*a, *b); });
  std::vector<Eigen::Index> out;
  out.reserve(d);
  for (int i = 0; i < d; ++i) out.push_back(order[i]->feature);
  return out;
}

std::vector<Eigen::Index> select_threshold(const std::vector<ScreenStat>& stats,
                                           double gamma) {
  if (!(gamma > 0)) throw DataError("threshold must be positive");
  std::vector<const ScreenStat*> order(stats.size());
  for (size_t i = 0; i < stats.size(); ++i) order[i] = &stats[i];
  std::sort(order.begin(), order.end(),
            [](const ScreenStat* a, const ScreenStat* b) { return ranks_before(*a, *b); });
  std::vector<Eigen::Index> out;
  for (const ScreenStat* s : order) {
    if (!s->unrankable && s->statistic >= gamma) out.push_back(s->feature);
  }
  return out;
}

ScreeningReport screen(const Dataset& data, Method method, SelectionRule rule,
                       const ScreenConfig& config) {
  const Dataset std_data = data.standardized ? data : standardize(data);
  ScreeningReport report;
  report.method = method;
  report.family = config.family;
  report.n = std_data.n();
  report.p = std_data.p();
  switch (method) {
    case Method::EL:
      report.stats = marginal_el_stats(std_data, config.el, config.threads);
      break;
    case Method::LS:
      report.stats = ls_sis_stats(std_data);
      break;
    case Method::RRC:
      report.stats = rrc_sis_stats(std_data);
      break;
    case Method::GLM:
      report.stats = glm_sis_stats(std_data, config.family, config.threads);
      break;
  }
  assign_ranks(report.stats);
  if (rule.kind == SelectionRule::Kind::TopD && rule.d == 0) {
    rule.d = default_top_d(report.n, report.p);
  }
  report.rule = rule;
  report.selected = rule.kind == SelectionRule::Kind::TopD
                        ? select_top_d(report.stats, rule.d)
                        : select_threshold(report.stats, rule.gamma);
  return report;
}

}  // namespace elsis
