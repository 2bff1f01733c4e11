#pragma once

#include <Eigen/Dense>

#include <vector>

#include "elsis/dataset.hpp"
#include "elsis/el_core.hpp"

namespace elsis {

enum class Method { EL, LS, RRC, GLM };
enum class Family { Gaussian, Binomial };

// Top-d keeps the d best-ranked features; Threshold keeps every feature with
// statistic >= gamma.  d == 0 resolves to floor(n / (2 log n)) at use time.
struct SelectionRule {
  enum class Kind { TopD, Threshold };
  Kind kind = Kind::TopD;
  int d = 0;
  double gamma = 0.0;

  static SelectionRule top_d(int d) { return {Kind::TopD, d, 0.0}; }
  static SelectionRule threshold(double gamma) { return {Kind::Threshold, 0, gamma}; }
};

int default_top_d(Eigen::Index n, Eigen::Index p);

// Per-feature screening statistic.  statistic is +inf for hull-boundary
// cases; unrankable features (degenerate estimating functions) sort last.
// tie_break is the studentized magnitude |mean(g)| / sd(g).
struct ScreenStat {
  Eigen::Index feature = 0;
  double statistic = 0.0;
  double tie_break = 0.0;
  int rank = 0;
  bool unrankable = false;
  bool flagged = false;  // e.g. separation in the marginal logistic fit
};

struct ScreeningReport {
  std::vector<ScreenStat> stats;          // indexed by feature
  std::vector<Eigen::Index> selected;     // rank order
  Method method = Method::EL;
  SelectionRule rule;
  Family family = Family::Gaussian;
  Eigen::Index n = 0, p = 0;
};

// Strict ranking order: rankable before unrankable, then statistic
// descending (+inf first), tie_break descending, feature index ascending.
bool ranks_before(const ScreenStat& a, const ScreenStat& b);

// Sets stat.rank = 1..p; stats stay in feature order.
void assign_ranks(std::vector<ScreenStat>& stats);

// Centers and scales X columns (sd divisor n-1), centers y, accumulates the
// removed mean into y_offset.  Throws ConstantColumn for zero-variance
// features.
Dataset standardize(const Dataset& data);

std::vector<ScreenStat> marginal_el_stats(const Dataset& data,
                                          const ElConfig& config = {},
                                          int threads = 1);
std::vector<ScreenStat> ls_sis_stats(const Dataset& data);
std::vector<ScreenStat> rrc_sis_stats(const Dataset& data);
std::vector<ScreenStat> glm_sis_stats(const Dataset& data, Family family,
                                      int threads = 1);

// |Kendall tau_b| helper (merge-sort inversion count, O(n log n)).
double kendall_tau(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

std::vector<Eigen::Index> select_top_d(const std::vector<ScreenStat>& stats, int d);
std::vector<Eigen::Index> select_threshold(const std::vector<ScreenStat>& stats,
                                           double gamma);

struct ScreenConfig {
  ElConfig el;
  Family family = Family::Gaussian;
  int threads = 1;
};

// Standardizes if needed, computes the chosen statistics, applies the rule.
ScreeningReport screen(const Dataset& data, Method method, SelectionRule rule,
                       const ScreenConfig& config = {});

}  // namespace elsis
