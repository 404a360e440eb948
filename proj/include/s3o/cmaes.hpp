#pragma once

#include <utility>
#include <vector>

#include "s3o/rng.hpp"

namespace s3o {

struct CmaConfig {
  int lambda_pop = 10;       // samples per generation
  int max_generations = 20;  // ask() budget
  double initial_sigma = 1.0;
  // Optional per-coordinate spread; when set it overrides initial_sigma
  // (sigma becomes the RMS, the covariance diagonal carries the shape).
  std::vector<double> initial_std;
  // Per-coordinate bounds; leave empty for an unconstrained search.
  std::vector<double> lower;
  std::vector<double> upper;
};

struct CmaTraceRow {
  int generation = 0;
  double sigma = 0.0;
  double best = 0.0;
};

// Covariance Matrix Adaptation Evolution Strategy with the standard
// rank-mu + rank-1 update and cumulative step-size control. Fitness is
// maximized; samples are drawn with ask() and scored with tell().
class CmaEs {
 public:
  CmaEs(std::vector<double> mean, const CmaConfig& config);

  // One generation of candidate solutions. A coordinate outside its bounds
  // triggers one resample of the vector, then clamping. Throws
  // BudgetExhausted once max_generations generations have been asked.
  std::vector<std::vector<double>> ask(Rng& rng);

  // Consumes the fitnesses (to be maximized) of the vectors returned by the
  // matching ask. Throws std::invalid_argument on a non-finite fitness.
  void tell(const std::vector<std::vector<double>>& samples,
            const std::vector<double>& fitnesses);

  // Best-ever sample and its fitness; throws std::logic_error before the
  // first tell.
  std::pair<std::vector<double>, double> best() const;

  int generation() const { return generation_; }
  bool exhausted() const { return generation_ >= config_.max_generations; }
  double sigma() const { return sigma_; }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<CmaTraceRow>& trace() const { return trace_; }

  // Largest / smallest covariance eigenvalue ratio, for conditioning checks.
  double condition_number() const;

 private:
  struct Impl;

  CmaConfig config_;
  int n_ = 0;
  std::vector<double> mean_;
  double sigma_ = 1.0;
  int generation_ = 0;
  bool has_best_ = false;
  std::vector<double> best_x_;
  double best_f_ = 0.0;
  std::vector<CmaTraceRow> trace_;

  // Strategy constants (standard defaults).
  int mu_ = 0;
  std::vector<double> weights_;
  double mu_eff_ = 0.0, c_sigma_ = 0.0, d_sigma_ = 0.0, c_c_ = 0.0, c_1_ = 0.0, c_mu_ = 0.0,
         chi_n_ = 0.0;

  // Flattened row-major matrices to keep Eigen out of the header.
  std::vector<double> C_, inv_sqrt_C_, sample_basis_;  // n x n
  std::vector<double> p_sigma_, p_c_;                  // n

  void refresh_decomposition();
};

}  // namespace s3o
