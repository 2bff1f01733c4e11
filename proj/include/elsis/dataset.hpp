#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "elsis/errors.hpp"

namespace elsis {

// Dense regression dataset: rows are observations.  Binary responses are
// stored as 0/1 reals.  After standardize() each X column has sample mean 0
// and variance 1 (divisor n-1), y is centered and y_offset records the mean
// that was removed (so methods needing the raw response can restore it).
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> feature_names;
  bool standardized = false;
  double y_offset = 0.0;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

// Per-subject repeated measurements. Rows within a block are time-ordered.
struct SubjectBlock {
  Eigen::MatrixXd X;  // m_i x p
  Eigen::VectorXd y;  // m_i
};

struct LongitudinalDataset {
  std::vector<SubjectBlock> subjects;
  std::vector<std::string> feature_names;

  Eigen::Index n() const { return static_cast<Eigen::Index>(subjects.size()); }
  Eigen::Index p() const { return subjects.empty() ? 0 : subjects.front().X.cols(); }
  Eigen::Index total_rows() const {
    Eigen::Index t = 0;
    for (const auto& s : subjects) t += s.X.rows();
    return t;
  }
};

void validate(const Dataset& data);
void validate(const LongitudinalDataset& data);

// Stacks all measurements into an ordinary dataset (one row per measurement;
// used by the measurement-level baselines and post-screening regression).
Dataset flatten(const LongitudinalDataset& data);

}  // namespace elsis
