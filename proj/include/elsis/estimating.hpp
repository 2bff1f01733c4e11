#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "elsis/dataset.hpp"
#include "elsis/el_core.hpp"
#include "elsis/screening.hpp"

namespace elsis {

// Known working-correlation basis matrices for the QIF construction.
struct BasisSet {
  std::vector<Eigen::MatrixXd> matrices;  // K symmetric m x m matrices
};

Eigen::MatrixXd basis_identity(Eigen::Index m);
// 0/1 matrix with ones exactly on the first super- and sub-diagonals.
Eigen::MatrixXd basis_ar1_adjacency(Eigen::Index m);

// Marginal estimating function evaluated at beta = 0: maps a subject block
// and a feature index to an r-dimensional value.
struct MarginalEstimatingFunction {
  std::function<Eigen::VectorXd(const SubjectBlock&, Eigen::Index)> evaluator;
  Eigen::Index dim = 1;
};

// k-th component is (column j of Xi)' M_k yi: the j-th coordinate of each QIF
// block under the identity link with unit conditional variance.
Eigen::VectorXd qif_marginal_g(const SubjectBlock& subject, Eigen::Index feature,
                               const BasisSet& bases);

MarginalEstimatingFunction qif_estimating_function(const BasisSet& bases);

// Column standardization over the stacked per-subject design plus response
// centering, applied block-wise.
LongitudinalDataset standardize_longitudinal(const LongitudinalDataset& data);

// Screening statistics for general estimating functions: per feature, stacks
// g^(j)(Z_i; 0) over subjects and evaluates the multivariate EL ratio at
// zero.  The input is standardized internally (see above).  Multivariate
// tie_break is the largest componentwise studentized magnitude.
std::vector<ScreenStat> marginal_el_stats_ee(const LongitudinalDataset& data,
                                             const MarginalEstimatingFunction& fn,
                                             const ElConfig& config = {},
                                             int threads = 1);

}  // namespace elsis
