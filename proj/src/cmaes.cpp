#include "s3o/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "s3o/errors.hpp"

namespace s3o {

namespace {

Eigen::MatrixXd to_matrix(const std::vector<double>& flat, int n) {
  Eigen::MatrixXd m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = flat[r * n + c];
  return m;
}

std::vector<double> from_matrix(const Eigen::MatrixXd& m) {
  std::vector<double> flat(m.rows() * m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) flat[r * m.cols() + c] = m(r, c);
  return flat;
}

}  // namespace

CmaEs::CmaEs(std::vector<double> mean, const CmaConfig& config)
    : config_(config), n_(static_cast<int>(mean.size())), mean_(std::move(mean)) {
  if (n_ == 0) throw std::invalid_argument("cma-es: empty start mean");
  if (config_.lambda_pop < 2) throw std::invalid_argument("cma-es: population must be >= 2");
  if (config_.max_generations < 1)
    throw std::invalid_argument("cma-es: max_generations must be >= 1");
  if (!config_.lower.empty()) {
    if (static_cast<int>(config_.lower.size()) != n_ ||
        static_cast<int>(config_.upper.size()) != n_)
      throw std::invalid_argument("cma-es: bounds do not match dimension");
    for (int i = 0; i < n_; ++i)
      if (!(config_.lower[i] < config_.upper[i]))
        throw std::invalid_argument("cma-es: lower bound must be below upper bound");
  }

  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(n_, n_);
  sigma_ = config_.initial_sigma;
  if (!config_.initial_std.empty()) {
    if (static_cast<int>(config_.initial_std.size()) != n_)
      throw std::invalid_argument("cma-es: initial_std does not match dimension");
    double mean_square = 0.0;
    for (double s : config_.initial_std) mean_square += s * s;
    sigma_ = std::sqrt(mean_square / n_);
    for (int i = 0; i < n_; ++i) {
      const double ratio = config_.initial_std[i] / sigma_;
      C(i, i) = ratio * ratio;
    }
  }
  if (!(sigma_ > 0.0)) throw std::invalid_argument("cma-es: step size must be positive");

  // Standard strategy constants: log-linear recombination weights over the
  // better half, then the usual cumulation and learning rates.
  const int lambda = config_.lambda_pop;
  mu_ = lambda / 2;
  weights_.resize(mu_);
  double sum = 0.0;
  for (int i = 0; i < mu_; ++i) {
    weights_[i] = std::log((lambda + 1) / 2.0) - std::log(i + 1.0);
    sum += weights_[i];
  }
  double square_sum = 0.0;
  for (double& w : weights_) {
    w /= sum;
    square_sum += w * w;
  }
  mu_eff_ = 1.0 / square_sum;

  const double n = n_;
  c_sigma_ = (mu_eff_ + 2.0) / (n + mu_eff_ + 5.0);
  d_sigma_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n + 1.0)) - 1.0) + c_sigma_;
  c_c_ = (4.0 + mu_eff_ / n) / (n + 4.0 + 2.0 * mu_eff_ / n);
  c_1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff_);
  c_mu_ = std::min(1.0 - c_1_,
                   2.0 * (mu_eff_ - 2.0 + 1.0 / mu_eff_) / ((n + 2.0) * (n + 2.0) + mu_eff_));
  chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  p_sigma_.assign(n_, 0.0);
  p_c_.assign(n_, 0.0);
  C_ = from_matrix(C);
  refresh_decomposition();
}

void CmaEs::refresh_decomposition() {
  Eigen::MatrixXd C = to_matrix(C_, n_);
  C = 0.5 * (C + C.transpose().eval());  // keep exact symmetry
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(C);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("cma-es: covariance eigendecomposition failed");
  const Eigen::VectorXd eigenvalues = solver.eigenvalues().cwiseMax(1e-14);
  const Eigen::MatrixXd& B = solver.eigenvectors();
  const Eigen::VectorXd d = eigenvalues.cwiseSqrt();

  C_ = from_matrix(B * eigenvalues.asDiagonal() * B.transpose());
  sample_basis_ = from_matrix(B * d.asDiagonal());
  inv_sqrt_C_ = from_matrix(B * d.cwiseInverse().asDiagonal() * B.transpose());
}

std::vector<std::vector<double>> CmaEs::ask(Rng& rng) {
  if (exhausted()) throw BudgetExhausted("cma-es: generation budget spent");

  const auto draw = [&]() {
    std::vector<double> x(n_);
    std::vector<double> z(n_);
    for (int i = 0; i < n_; ++i) z[i] = rng.normal();
    for (int r = 0; r < n_; ++r) {
      double step = 0.0;
      for (int c = 0; c < n_; ++c) step += sample_basis_[r * n_ + c] * z[c];
      x[r] = mean_[r] + sigma_ * step;
    }
    return x;
  };
  const auto in_bounds = [&](const std::vector<double>& x) {
    if (config_.lower.empty()) return true;
    for (int i = 0; i < n_; ++i)
      if (x[i] < config_.lower[i] || x[i] > config_.upper[i]) return false;
    return true;
  };

  std::vector<std::vector<double>> samples;
  samples.reserve(config_.lambda_pop);
  for (int k = 0; k < config_.lambda_pop; ++k) {
    std::vector<double> x = draw();
    if (!in_bounds(x)) {
      x = draw();  // one fresh attempt, then clamp what remains outside
      for (int i = 0; i < n_; ++i) x[i] = std::clamp(x[i], config_.lower[i], config_.upper[i]);
    }
    samples.push_back(std::move(x));
  }
  return samples;
}

void CmaEs::tell(const std::vector<std::vector<double>>& samples,
                 const std::vector<double>& fitnesses) {
  if (static_cast<int>(samples.size()) != config_.lambda_pop ||
      samples.size() != fitnesses.size())
    throw std::invalid_argument("cma-es: tell expects one fitness per asked sample");
  for (size_t i = 0; i < fitnesses.size(); ++i)
    if (!std::isfinite(fitnesses[i]))
      throw std::invalid_argument("cma-es: non-finite fitness at sample index " +
                                  std::to_string(i));

  std::vector<int> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return fitnesses[a] > fitnesses[b]; });

  if (!has_best_ || fitnesses[order[0]] > best_f_) {
    has_best_ = true;
    best_f_ = fitnesses[order[0]];
    best_x_ = samples[order[0]];
  }

  // y_i = (x_i - m) / sigma for the mu best, and their recombination y_w.
  Eigen::MatrixXd y(n_, mu_);
  for (int i = 0; i < mu_; ++i)
    for (int r = 0; r < n_; ++r) y(r, i) = (samples[order[i]][r] - mean_[r]) / sigma_;
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights_.data(), mu_);
  const Eigen::VectorXd y_w = y * w;

  for (int r = 0; r < n_; ++r) mean_[r] += sigma_ * y_w(r);

  const Eigen::MatrixXd inv_sqrt = to_matrix(inv_sqrt_C_, n_);
  Eigen::VectorXd p_sigma = Eigen::Map<const Eigen::VectorXd>(p_sigma_.data(), n_);
  p_sigma = (1.0 - c_sigma_) * p_sigma +
            std::sqrt(c_sigma_ * (2.0 - c_sigma_) * mu_eff_) * (inv_sqrt * y_w);
  const double ps_norm = p_sigma.norm();

  const double decay = 1.0 - std::pow(1.0 - c_sigma_, 2.0 * (generation_ + 1));
  const bool h_sigma = ps_norm / std::sqrt(decay) / chi_n_ < 1.4 + 2.0 / (n_ + 1.0);

  Eigen::VectorXd p_c = Eigen::Map<const Eigen::VectorXd>(p_c_.data(), n_);
  p_c = (1.0 - c_c_) * p_c;
  if (h_sigma) p_c += std::sqrt(c_c_ * (2.0 - c_c_) * mu_eff_) * y_w;

  Eigen::MatrixXd C = to_matrix(C_, n_);
  const double delta_h = h_sigma ? 0.0 : c_c_ * (2.0 - c_c_);
  Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < mu_; ++i) rank_mu += w(i) * (y.col(i) * y.col(i).transpose());
  C = (1.0 - c_1_ - c_mu_) * C + c_1_ * (p_c * p_c.transpose() + delta_h * C) + c_mu_ * rank_mu;

  sigma_ *= std::exp((c_sigma_ / d_sigma_) * (ps_norm / chi_n_ - 1.0));

  for (int r = 0; r < n_; ++r) {
    p_sigma_[r] = p_sigma(r);
    p_c_[r] = p_c(r);
  }
  C_ = from_matrix(C);
  refresh_decomposition();
  ++generation_;
  trace_.push_back({generation_, sigma_, best_f_});
}

std::pair<std::vector<double>, double> CmaEs::best() const {
  if (!has_best_) throw std::logic_error("cma-es: best() before any tell");
  return {best_x_, best_f_};
}

double CmaEs::condition_number() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_matrix(C_, n_));
  const Eigen::VectorXd ev = solver.eigenvalues();
  return ev(n_ - 1) / std::max(ev(0), 1e-300);
}

}  // namespace s3o
