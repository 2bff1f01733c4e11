#include "elsis/dataset.hpp"

namespace elsis {

void validate(const Dataset& data) {
  if (data.n() < 2) throw DataError("dataset needs at least two observations");
  if (data.p() < 1) throw DataError("dataset needs at least one feature");
  if (data.y.size() != data.n()) throw DimensionMismatch("response length != rows of X");
  if (!data.X.allFinite() || !data.y.allFinite()) {
    throw DataError("dataset contains non-finite entries");
  }
  if (!data.feature_names.empty() &&
      static_cast<Eigen::Index>(data.feature_names.size()) != data.p()) {
    throw DimensionMismatch("feature name count != number of columns");
  }
}

void validate(const LongitudinalDataset& data) {
  if (data.subjects.empty()) throw DataError("no subjects");
  const Eigen::Index p = data.p();
  if (p < 1) throw DataError("dataset needs at least one feature");
  for (const auto& s : data.subjects) {
    if (s.X.rows() < 1) throw DataError("subject with no measurements");
    if (s.X.cols() != p) throw DimensionMismatch("inconsistent feature count across subjects");
    if (s.y.size() != s.X.rows()) throw DimensionMismatch("block response length != rows");
    if (!s.X.allFinite() || !s.y.allFinite()) {
      throw DataError("dataset contains non-finite entries");
    }
  }
}

Dataset flatten(const LongitudinalDataset& data) {
  validate(data);
  Dataset out;
  const Eigen::Index rows = data.total_rows();
  out.X.resize(rows, data.p());
  out.y.resize(rows);
  Eigen::Index at = 0;
  for (const auto& s : data.subjects) {
    out.X.middleRows(at, s.X.rows()) = s.X;
    out.y.segment(at, s.y.size()) = s.y;
    at += s.X.rows();
  }
  out.feature_names = data.feature_names;
  return out;
}

}  // namespace elsis
