// Copyright 2026 The mpstomo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mpstomo/training.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace mpstomo {

void TrainConfig::validate() const {
  if (!(lambda0 >= 0.0)) throw ParameterError("train.lambda0 must be non-negative");
  if (!(lambda_decay > 0.0 && lambda_decay < 1.0)) {
    throw ParameterError("train.lambda_decay must lie in (0, 1)");
  }
  if (!(step_size >= 0.0)) throw ParameterError("train.step_size must be non-negative");
  if (!(step_backoff > 0.0 && step_backoff < 1.0)) {
    throw ParameterError("train.step_backoff must lie in (0, 1)");
  }
  if (grad_steps_per_bond < 0) throw ParameterError("train.grad_steps_per_bond must be >= 0");
  if (sweeps_per_stage < 1) throw ParameterError("train.sweeps_per_stage must be >= 1");
  if (d_cap < 1) throw ParameterError("train.d_cap must be >= 1");
  if (!(eta >= 0.0)) throw ParameterError("train.eta must be non-negative");
  if (!(eta_max >= 0.0)) throw ParameterError("train.eta_max must be non-negative");
  if (!(shot_cutoff >= 0.0)) throw ParameterError("train.shot_cutoff must be non-negative");
  if (warmup_sweeps < 0) throw ParameterError("train.warmup_sweeps must be >= 0");
  if (!(psi_floor > 0.0 && psi_floor <= 1e-8)) {
    throw ParameterError("train.psi_floor must lie in (0, 1e-8]");
  }
  if (!(convergence_tol > 0.0)) throw ParameterError("train.convergence_tol must be positive");
}

// ---------------------------------------------------------------------------

RotatedData::RotatedData(const Dataset& data, int n_sites, int local_dim)
    : rows_(n_sites, Eigen::MatrixXcd(local_dim, static_cast<Index>(data.size()))),
      shots_(static_cast<Index>(data.size())) {
  const int two_s = local_dim - 1;
  for (Index s = 0; s < shots_; ++s) {
    const Shot& shot = data[static_cast<std::size_t>(s)];
    if (shot.levels.size() != static_cast<std::size_t>(n_sites) ||
        shot.basis.size() != static_cast<std::size_t>(n_sites)) {
      throw ParameterError("shot length does not match the number of sites");
    }
    for (int k = 0; k < n_sites; ++k) {
      const int level = shot.levels[k];
      if (level < 0 || level >= local_dim) throw ParameterError("outcome symbol out of range");
      const Direction& n = shot.basis[k];
      validate(n);
      // Row `level` of U(n): exp(i m_in phi) d_{m_in, m}(theta).
      const int two_m = level_to_two_m(two_s, level);
      for (int in = 0; in < local_dim; ++in) {
        const int two_m_in = level_to_two_m(two_s, in);
        const double d = wigner_d<double>(two_s, two_m_in, two_m, n.theta);
        rows_[k](in, s) =
            (n.phi == 0.0) ? std::complex<double>(d) : std::polar(d, 0.5 * two_m_in * n.phi);
      }
    }
  }
}

namespace {

// Environment of sites [0, k] given the one of [0, k): columns are shots.
Eigen::MatrixXcd extend_left(const Eigen::MatrixXcd& env, const SiteTensor& t,
                             const Eigen::MatrixXcd& rot) {
  Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(t.right_dim(), env.cols());
  for (int v = 0; v < t.local_dim(); ++v) {
    next.array() += (t[v].transpose() * env).array().rowwise() * rot.row(v).array();
  }
  return next;
}

// Environment of sites [k, N) given the one of (k, N).
Eigen::MatrixXcd extend_right(const Eigen::MatrixXcd& env, const SiteTensor& t,
                              const Eigen::MatrixXcd& rot) {
  Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(t.left_dim(), env.cols());
  for (int v = 0; v < t.local_dim(); ++v) {
    next.array() += (t[v] * env).array().rowwise() * rot.row(v).array();
  }
  return next;
}

Eigen::VectorXcd shot_amplitudes(const Mps& mps, const RotatedData& rot) {
  Eigen::MatrixXcd env = Eigen::MatrixXcd::Ones(1, rot.shots());
  for (int k = 0; k < mps.size(); ++k) env = extend_left(env, mps.site(k), rot.site(k));
  return env.row(0).transpose();
}

double mean_neg_log(const Eigen::VectorXcd& psi, double norm, double floor,
                    std::size_t* clamped = nullptr) {
  double sum = 0.0;
  std::size_t hits = 0;
  for (Index s = 0; s < psi.size(); ++s) {
    const double p = std::norm(psi(s)) / norm;
    if (p < floor) ++hits;
    sum -= std::log(std::max(p, floor));
  }
  if (clamped) *clamped = hits;
  return sum / static_cast<double>(psi.size());
}

// a(v * D + l, s) = rot(v, s) * env(l, s).
Eigen::MatrixXcd kron_columns(const Eigen::MatrixXcd& rot, const Eigen::MatrixXcd& env) {
  const Index d = env.rows();
  Eigen::MatrixXcd out(rot.rows() * d, env.cols());
  for (Index v = 0; v < rot.rows(); ++v) {
    out.middleRows(v * d, d) = env.array().rowwise() * rot.row(v).array();
  }
  return out;
}

}  // namespace

double nll(const Mps& mps, const Dataset& data, double psi_floor) {
  if (data.empty()) throw ParameterError("nll: empty dataset");
  const RotatedData rot(data, mps.size(), mps.local_dim());
  return mean_neg_log(shot_amplitudes(mps, rot), squared_norm(mps), psi_floor);
}

LossReport loss_with_penalty(const Mps& mps, const Dataset& data, int bond, double lambda,
                             double psi_floor) {
  LossReport r;
  r.nll = nll(mps, data, psi_floor);
  r.penalty = renyi2_entropy(mps, bond);
  r.lambda = lambda;
  r.total = r.nll + lambda * r.penalty;
  return r;
}

// ---------------------------------------------------------------------------

TwoSiteObjective::TwoSiteObjective(const Eigen::MatrixXcd& left_env,
                                   const Eigen::MatrixXcd& right_env,
                                   const Eigen::MatrixXcd& rotated_left,
                                   const Eigen::MatrixXcd& rotated_right, int local_dim,
                                   double lambda, double psi_floor)
    : a_(kron_columns(rotated_left, left_env)),
      b_(kron_columns(rotated_right, right_env)),
      local_dim_(local_dim),
      lambda_(lambda),
      psi_floor_(psi_floor) {
  if (left_env.cols() == 0) throw ParameterError("training objective needs a non-empty dataset");
}

TwoSiteObjective TwoSiteObjective::from_mps(const Mps& mps, int bond, const Dataset& data,
                                            double lambda, double psi_floor) {
  if (bond < 0 || bond + 1 >= mps.size()) throw ParameterError("bond index out of range");
  const auto c = mps.center();
  if (!c || (*c != bond && *c != bond + 1)) {
    throw StateError("canonical center must sit on one of the merged sites");
  }
  if (data.empty()) throw ParameterError("training objective needs a non-empty dataset");
  const RotatedData rot(data, mps.size(), mps.local_dim());
  Eigen::MatrixXcd left = Eigen::MatrixXcd::Ones(1, rot.shots());
  for (int k = 0; k < bond; ++k) left = extend_left(left, mps.site(k), rot.site(k));
  Eigen::MatrixXcd right = Eigen::MatrixXcd::Ones(1, rot.shots());
  for (int k = mps.size() - 1; k > bond + 1; --k) right = extend_right(right, mps.site(k), rot.site(k));
  return TwoSiteObjective(left, right, rot.site(bond), rot.site(bond + 1), mps.local_dim(), lambda,
                          psi_floor);
}

TwoSiteObjective::Evaluation TwoSiteObjective::evaluate(const Eigen::MatrixXcd& theta) const {
  Evaluation e;
  const double norm = theta.squaredNorm();
  if (!(norm > 0)) throw DegenerateStateError("merged tensor has zero norm");
  e.psi = a_.cwiseProduct(theta * b_).colwise().sum().transpose();
  e.nll = mean_neg_log(e.psi, norm, psi_floor_, &e.clamped);
  const Eigen::MatrixXcd gram =
      (theta.rows() <= theta.cols()) ? Eigen::MatrixXcd(theta * theta.adjoint())
                                     : Eigen::MatrixXcd(theta.adjoint() * theta);
  e.penalty = std::max(0.0, -std::log(gram.squaredNorm() / (norm * norm)));
  e.total = e.nll + lambda_ * e.penalty;
  return e;
}

Eigen::MatrixXcd TwoSiteObjective::gradient(const Eigen::MatrixXcd& theta,
                                            const Evaluation& at) const {
  const double norm = theta.squaredNorm();
  const Index shots = a_.cols();
  // d ln|Psi_s|^2 / dTheta^* = conj(a_s b_s^T) / Psi_s^*; clamped shots keep
  // the floor in the denominator.
  Eigen::RowVectorXcd weight(shots);
  for (Index s = 0; s < shots; ++s) {
    const double p = std::max(std::norm(at.psi(s)) / norm, psi_floor_);
    weight(s) = at.psi(s) / (norm * p);
  }
  Eigen::MatrixXcd grad =
      (a_.conjugate().array().rowwise() * weight.array()).matrix() * b_.adjoint();
  grad /= static_cast<double>(shots);
  grad -= theta / norm;  // -N'/N
  if (lambda_ != 0.0) {
    const Eigen::MatrixXcd gram = theta * theta.adjoint();
    const double purity = gram.squaredNorm();  // Tr (Theta Theta^dagger)^2
    grad += lambda_ * (2.0 * (gram * theta) / purity - 2.0 * theta / norm);
  }
  return grad;
}

GradientResult two_site_gradient(const Mps& mps, int bond, const Dataset& data, double lambda,
                                 double psi_floor) {
  const TwoSiteObjective objective =
      TwoSiteObjective::from_mps(mps, bond, data, lambda, psi_floor);
  const TwoSiteTensor merged = merge_adjacent(mps, bond);
  const auto eval = objective.evaluate(merged.data);
  GradientResult r;
  r.gradient.bond = bond;
  r.gradient.local_dim = mps.local_dim();
  r.gradient.data = objective.gradient(merged.data, eval);
  r.clamped = eval.clamped;
  return r;
}

// ---------------------------------------------------------------------------

namespace {

// Keeps per-shot environments in sync with the MPS while sweeping.
class SweepEngine {
 public:
  SweepEngine(Mps mps, const Dataset& data, const TrainConfig& config)
      : mps_(std::move(mps)),
        rot_(data, mps_.size(), mps_.local_dim()),
        config_(config),
        left_(mps_.size()),
        right_(mps_.size()) {
    eta_ = std::max(config.eta, std::min(config.eta_max, std::sqrt(config.shot_cutoff /
                                                              static_cast<double>(data.size()))));
    if (data.empty()) throw ParameterError("training needs a non-empty dataset");
    if (mps_.size() < 2) throw ParameterError("training needs at least two sites");
    if (mps_.center() != 0) mps_.canonicalize(0);
  }

  // `eta` overrides the truncation cutoff for this pass.
  SweepResult run(double lambda, std::optional<double> eta = std::nullopt) {
    clamped_ = 0;
    split_eta_ = eta.value_or(eta_);
    const int n = mps_.size();
    left_[0] = Eigen::MatrixXcd::Ones(1, rot_.shots());
    right_[n - 1] = Eigen::MatrixXcd::Ones(1, rot_.shots());
    for (int k = n - 2; k >= 1; --k) update_right(k);

    for (int bond = 0; bond + 1 < n; ++bond) {
      optimize_bond(bond, lambda, SweepDirection::right);
      update_left(bond);
    }
    for (int bond = n - 2; bond >= 0; --bond) {
      optimize_bond(bond, lambda, SweepDirection::left);
      update_right(bond);
    }

    SweepResult r{mps_, {}, clamped_};
    const Eigen::VectorXcd psi = extend_right(right_[0], mps_.site(0), rot_.site(0)).row(0).transpose();
    r.loss.nll = mean_neg_log(psi, 1.0, config_.psi_floor);
    r.loss.penalty = renyi2_entropy(mps_, 0);
    r.loss.lambda = lambda;
    r.loss.total = r.loss.nll + lambda * r.loss.penalty;
    return r;
  }

  const Mps& mps() const { return mps_; }

 private:
  // left_[k + 1] from left_[k] and site k.
  void update_left(int k) { left_[k + 1] = extend_left(left_[k], mps_.site(k), rot_.site(k)); }
  // right_[k] from right_[k + 1] and site k + 1.
  void update_right(int k) {
    right_[k] = extend_right(right_[k + 1], mps_.site(k + 1), rot_.site(k + 1));
  }

  void optimize_bond(int bond, double lambda, SweepDirection toward) {
    const TwoSiteObjective objective(left_[bond], right_[bond + 1], rot_.site(bond),
                                     rot_.site(bond + 1), mps_.local_dim(), lambda,
                                     config_.psi_floor);
    Eigen::MatrixXcd theta = merge_adjacent(mps_, bond).data;
    auto current = objective.evaluate(theta);
    double step = config_.step_size;
    for (int i = 0; i < config_.grad_steps_per_bond; ++i) {
      Eigen::MatrixXcd trial = theta + step * objective.gradient(theta, current);
      trial /= trial.norm();
      auto next = objective.evaluate(trial);
      if (next.total <= current.total) {
        theta = std::move(trial);
        current = std::move(next);
        step = std::min(step * 1.2, config_.step_size);
      } else {
        step *= config_.step_backoff;
      }
    }
    clamped_ += current.clamped;
    theta /= theta.norm();
    TwoSiteTensor merged{theta, bond, mps_.local_dim()};
    SplitResult split = split_two_site(merged, config_.d_cap, split_eta_, toward);
    mps_.replace_pair(bond, std::move(split.left), std::move(split.right), toward);
  }

  Mps mps_;
  RotatedData rot_;
  TrainConfig config_;
  std::vector<Eigen::MatrixXcd> left_;   // left_[k]: sites [0, k), D_{k-1} x |V|
  std::vector<Eigen::MatrixXcd> right_;  // right_[k]: sites (k, N), D_k x |V|
  std::size_t clamped_ = 0;
  double eta_ = 0.0;
  double split_eta_ = 0.0;
};

}  // namespace

SweepResult sweep(Mps mps, const Dataset& data, const TrainConfig& config, double lambda) {
  config.validate();
  SweepEngine engine(std::move(mps), data, config);
  return engine.run(lambda);
}

StageResult train_stage(Mps mps, const Dataset& data, const TrainConfig& config) {
  config.validate();
  SweepEngine engine(std::move(mps), data, config);
  StageResult result;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int t = 0; t < config.sweeps_per_stage; ++t) {
    const double lambda = config.lambda0 * std::pow(config.lambda_decay, t);
    const bool warmup = t < config.warmup_sweeps && t + 1 < config.sweeps_per_stage;
    SweepResult r = warmup ? engine.run(lambda, config.eta) : engine.run(lambda);
    result.history.push_back(r.loss);
    result.clamped += r.clamped;
    const double total = r.loss.total;
    if (t > 0 && std::abs(total - previous) <= config.convergence_tol * std::abs(previous)) break;
    previous = total;
  }
  result.mps = engine.mps();
  const LossReport& last = result.history.back();
  result.final_loss = {last.nll, last.penalty, last.nll, 0.0};
  return result;
}

}  // namespace mpstomo
