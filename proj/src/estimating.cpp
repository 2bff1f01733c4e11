#include "elsis/estimating.hpp"

#include <cmath>

#include "elsis/parallel.hpp"

namespace elsis {

Eigen::MatrixXd basis_identity(Eigen::Index m) {
  if (m < 1) throw DataError("basis_identity needs m >= 1");
  return Eigen::MatrixXd::Identity(m, m);
}

Eigen::MatrixXd basis_ar1_adjacency(Eigen::Index m) {
  if (m < 2) throw DataError("basis_ar1_adjacency needs m >= 2");
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    M(i, i + 1) = 1.0;
    M(i + 1, i) = 1.0;
  }
  return M;
}

Eigen::VectorXd qif_marginal_g(const SubjectBlock& subject, Eigen::Index feature,
                               const BasisSet& bases) {
  const Eigen::Index m = subject.X.rows();
  if (feature < 0 || feature >= subject.X.cols()) {
    throw DimensionMismatch("feature index out of range");
  }
  if (bases.matrices.empty()) throw DimensionMismatch("empty basis set");
  Eigen::VectorXd out(static_cast<Eigen::Index>(bases.matrices.size()));
  for (size_t k = 0; k < bases.matrices.size(); ++k) {
    const Eigen::MatrixXd& M = bases.matrices[k];
    if (M.rows() != m || M.cols() != m) {
      throw DimensionMismatch("basis matrix size != number of measurements");
    }
    out(static_cast<Eigen::Index>(k)) = subject.X.col(feature).dot(M * subject.y);
  }
  return out;
}

MarginalEstimatingFunction qif_estimating_function(const BasisSet& bases) {
  MarginalEstimatingFunction fn;
  fn.dim = static_cast<Eigen::Index>(bases.matrices.size());
  fn.evaluator = [bases](const SubjectBlock& subject, Eigen::Index feature) {
    return qif_marginal_g(subject, feature, bases);
  };
  return fn;
}

LongitudinalDataset standardize_longitudinal(const LongitudinalDataset& data) {
  validate(data);
  const Eigen::Index p = data.p();
  const Eigen::Index rows = data.total_rows();
  if (rows < 2) throw DataError("need at least two stacked measurements");

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
  double ymean = 0;
  for (const auto& s : data.subjects) {
    mean += s.X.colwise().sum().transpose();
    ymean += s.y.sum();
  }
  mean /= static_cast<double>(rows);
  ymean /= static_cast<double>(rows);

  Eigen::VectorXd ss = Eigen::VectorXd::Zero(p);
  for (const auto& s : data.subjects) {
    ss += (s.X.rowwise() - mean.transpose()).colwise().squaredNorm().transpose();
  }
  LongitudinalDataset out;
  out.feature_names = data.feature_names;
  out.subjects.reserve(data.subjects.size());
  Eigen::VectorXd sd = (ss / static_cast<double>(rows - 1)).cwiseSqrt();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(sd(j) > 0)) throw ConstantColumn(static_cast<long>(j));
  }
  for (const auto& s : data.subjects) {
    SubjectBlock b;
    b.X = (s.X.rowwise() - mean.transpose()).array().rowwise() /
          sd.transpose().array();
    b.y = s.y.array() - ymean;
    out.subjects.push_back(std::move(b));
  }
  return out;
}

std::vector<ScreenStat> marginal_el_stats_ee(const LongitudinalDataset& data,
                                             const MarginalEstimatingFunction& fn,
                                             const ElConfig& config, int threads) {
  const LongitudinalDataset std_data = standardize_longitudinal(data);
  const Eigen::Index n = std_data.n();
  const Eigen::Index p = std_data.p();
  const Eigen::Index r = fn.dim;
  if (r < 1) throw DimensionMismatch("estimating function dimension must be >= 1");
  if (n <= r) throw DegenerateInput("need more subjects than estimating-function components");

  std::vector<ScreenStat> stats(p);
  parallel_for(0, p, threads, [&](Eigen::Index j) {
    ScreenStat& s = stats[j];
    s.feature = j;
    Eigen::MatrixXd G(n, r);
    for (Eigen::Index i = 0; i < n; ++i) {
      G.row(i) = fn.evaluator(std_data.subjects[static_cast<size_t>(i)], j).transpose();
    }
    double tb = 0;
    for (Eigen::Index k = 0; k < r; ++k) {
      const double mean = G.col(k).mean();
      const double sd = std::sqrt((G.col(k).array() - mean).square().sum() /
                                  static_cast<double>(n - 1));
      if (sd > 0) tb = std::max(tb, std::abs(mean) / sd);
    }
    s.tie_break = tb;
    try {
      s.statistic = r == 1 ? solve_lambda_uni(G.col(0), config).log_ratio
                           : solve_lambda_multi(G, config).log_ratio;
    } catch (const DegenerateInput&) {
      s.statistic = std::numeric_limits<double>::quiet_NaN();
      s.unrankable = true;
      s.flagged = true;
    }
  });
  return stats;
}

}  // namespace elsis
