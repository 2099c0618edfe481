#include "ocrnn/convergence.hpp"

#include "ocrnn/foc_solver.hpp"
#include "ocrnn/format.hpp"
#include "ocrnn/matrix_kit.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ocrnn {

namespace mk = matrix_kit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct RatioParts {
  double beta_sq;
  double norm_q;
  double ratio;
};

RatioParts ratio_term(const Vector& beta, double norm_q) {
  const double btb = beta.squaredNorm();
  if (btb == 0.0) throw DomainError("convergence condition undefined: beta'beta = 0");
  if (norm_q == 0.0) throw DomainError("convergence condition undefined: ||Q|| = 0");
  return {btb, norm_q, (1.0 + btb + norm_q) / (btb * norm_q)};
}

// I + beta beta' (x) Q has eigenvalues 1 + beta'beta lambda_j(Q), plus 1
// when there is more than one neuron.
double kappa_G_X_beta(const QOperator& q, const Vector& beta) {
  const double btb = beta.squaredNorm();
  const double lo = beta.size() > 1 ? 0.0 : q.min_eigenvalue();
  return (1.0 + btb * q.norm()) / (1.0 + btb * lo);
}

}  // namespace

BoundsReport variable_bounds(const Dataset& data, const ModelConfig& config) {
  data.validate();
  const double theta = config.theta_W;
  const Eigen::Index n_obs = data.n_obs();
  BoundsReport rep;
  rep.sup_W = 1.0 / theta;

  const Matrix f0 = config.activation.apply(Matrix::Zero(n_obs, config.n_neurons));
  const double f0_norm = mk::spectral_norm(f0);
  if (theta <= 1.0) {
    rep.finite = false;
    rep.sup_mu = rep.sup_U = rep.sup_FU = kInf;
    rep.warnings.emplace_back("theta_W <= 1: mu and U bounds are infinite");
    return rep;
  }
  const double resid0 =
      (data.Y - Vector::Constant(n_obs, config.b.dot(config.beta))).norm();
  const double beta_norm = config.beta.norm();
  const double r = theta / (theta - 1.0);
  const double x_norm = mk::spectral_norm(data.X);
  const double ones_b = std::sqrt(static_cast<double>(n_obs)) * config.b.norm();  // ||1 b'||

  rep.sup_mu = r * resid0 * beta_norm;
  rep.sup_U = r * r * (x_norm * x_norm / config.theta_V) * resid0 * beta_norm + r * ones_b +
              f0_norm / (theta - 1.0);
  rep.sup_FU = rep.sup_U + f0_norm;
  return rep;
}

double symmetric_2x2_norm(double a, double c, double d) {
  const double mean = 0.5 * (a + d);
  const double half = 0.5 * (a - d);
  const double root = std::sqrt(half * half + c * c);
  return std::max(std::abs(mean + root), std::abs(mean - root));
}

ConditionReport general_condition_report(const Dataset& data, const ModelConfig& config) {
  const BoundsReport bounds = variable_bounds(data, config);
  const QOperator q(data.X, config.theta_V, config.beta.squaredNorm());
  const auto parts = ratio_term(config.beta, q.norm());

  ConditionReport rep;
  rep.theta_W = config.theta_W;
  rep.beta_sq = parts.beta_sq;
  rep.norm_Q = parts.norm_q;
  rep.ratio_term = parts.ratio;
  rep.kappa_GXbeta = kappa_G_X_beta(q, config.beta);
  const double sf = bounds.sup_FU;
  const double sm = bounds.sup_mu;
  rep.norm_GUmu = bounds.finite ? symmetric_2x2_norm(sf * sf + 1.0, sf * sm, sm * sm + 1.0) : kInf;
  rep.threshold = rep.kappa_GXbeta * rep.ratio_term * rep.norm_GUmu;
  rep.satisfied = rep.theta_W > rep.threshold;
  return rep;
}

ConditionReport omega_condition_report(const Dataset& data, const ModelConfig& config,
                                const Matrix& omega, const std::optional<Matrix>& trained_W) {
  if (omega.rows() != omega.cols() || omega.rows() != config.n_neurons) {
    throw InvalidArgument("Omega must be n_neurons x n_neurons, got " + shape_str(omega));
  }
  const double kappa_omega = mk::condition_number_or_throw(omega, "Omega");
  const QOperator q(data.X, config.theta_V, config.beta.squaredNorm());
  const auto parts = ratio_term(config.beta, q.norm());

  ConditionReport rep;
  rep.theta_W = config.theta_W;
  rep.beta_sq = parts.beta_sq;
  rep.norm_Q = parts.norm_q;
  rep.ratio_term = parts.ratio;
  rep.kappa_GXbeta = kappa_G_X_beta(q, config.beta);
  rep.norm_GUmu = 1.0;
  rep.kappa_omega = kappa_omega;
  rep.threshold = rep.kappa_GXbeta * kappa_omega * rep.ratio_term;
  rep.satisfied = rep.theta_W > rep.threshold;
  if (trained_W) rep.omega_check = verify_omega(omega, *trained_W);
  return rep;
}

Matrix constrained_G_X_beta(const QOperator& q_hat, const Vector& beta) {
  const Eigen::Index n_obs = q_hat.size();
  const Eigen::Index n = beta.size();
  const Eigen::Index block = n_obs * n;
  const Matrix q = q_hat.dense();
  const Matrix bbt = beta * beta.transpose();
  Matrix g = Matrix::Identity(2 * block, 2 * block);
  // Top right: -(I_n (x) Q^); bottom left: (beta beta') (x) I_nobs.
  for (Eigen::Index k = 0; k < n; ++k) {
    g.block(k * n_obs, block + k * n_obs, n_obs, n_obs) = -q;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      g.block(block + i * n_obs, j * n_obs, n_obs, n_obs).diagonal().setConstant(bbt(i, j));
    }
  }
  return g;
}

ConditionReport constrained_condition_report(const Dataset& data, const ModelConfig& config,
                                             const ConstraintSet& cs,
                                             const std::optional<Matrix>& omega) {
  if (!cs.feasible(config.theta_W)) {
    throw DomainError("constrained condition needs ||W2||_F < 1/theta_W");
  }
  const BoundsReport bounds = variable_bounds(data, config);
  const Matrix factor = cs.n_is_identity() ? data.X : Matrix(data.X * cs.n_basis());
  const QOperator q_hat(factor, config.theta_V, config.beta.squaredNorm());
  const auto parts = ratio_term(config.beta, q_hat.norm());

  ConditionReport rep;
  rep.theta_W = config.theta_W;
  rep.beta_sq = parts.beta_sq;
  rep.norm_Q = parts.norm_q;
  rep.ratio_term = parts.ratio;
  rep.kappa_GXbeta =
      mk::condition_number(constrained_G_X_beta(q_hat, config.beta)).value_or(kInf);
  const double proj = mk::spectral_norm(cs.P());
  rep.projector_norm = proj;
  const double w2 = cs.w2_norm();
  const double factor_uw =
      std::sqrt(1.0 - config.theta_W * config.theta_W * w2 * w2) * proj;
  const double sf = bounds.sup_FU;
  const double sm = bounds.sup_mu;
  if (!bounds.finite) {
    rep.norm_GUmu = kInf;
  } else {
    rep.norm_GUmu = symmetric_2x2_norm(1.0 + factor_uw * sf * sf, factor_uw * sf * sm,
                                       1.0 + factor_uw * sm * sm);
  }
  if (omega) {
    if (omega->rows() != omega->cols() || omega->rows() != config.n_neurons) {
      throw InvalidArgument("Omega must be n_neurons x n_neurons, got " + shape_str(*omega));
    }
    rep.kappa_omega = mk::condition_number_or_throw(*omega, "Omega");
    rep.threshold = rep.kappa_GXbeta * *rep.kappa_omega * rep.ratio_term;
  } else {
    rep.threshold = rep.kappa_GXbeta * rep.ratio_term * rep.norm_GUmu;
  }
  rep.satisfied = rep.theta_W > rep.threshold;
  return rep;
}

Matrix sample_in_ball(Eigen::Index rows, Eigen::Index cols, double radius,
                      std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = gauss(rng);
  }
  const double norm = m.norm();
  if (norm == 0.0) return Matrix::Zero(rows, cols);
  const double dim = static_cast<double>(rows * cols);
  const double rho = radius * std::pow(unit(rng), 1.0 / dim);
  return m * (rho / norm);
}

double empirical_contraction_factor(const Dataset& data, const ModelConfig& config,
                                    const ConstraintSet* constraints, std::size_t n_pairs,
                                    std::uint64_t seed) {
  if (n_pairs < 1) throw InvalidArgument("empirical_contraction_factor: n_pairs must be >= 1");
  const BoundsReport bounds = variable_bounds(data, config);
  if (!bounds.finite) {
    throw DomainError("empirical_contraction_factor: sampling box is unbounded (theta_W <= 1)");
  }
  const ContractionMap map(data, config, constraints);
  std::mt19937_64 rng(seed);
  const Eigen::Index n_obs = data.n_obs();
  const Eigen::Index n = config.n_neurons;
  auto sample = [&]() {
    return IterState{sample_in_ball(n_obs, n, bounds.sup_U, rng),
                     sample_in_ball(n_obs, n, bounds.sup_mu, rng)};
  };

  double q = 0.0;
  for (std::size_t k = 0; k < n_pairs; ++k) {
    IterState p1 = sample();
    IterState p2 = sample();
    double dist = std::sqrt((p1.U - p2.U).squaredNorm() + (p1.mu - p2.mu).squaredNorm());
    for (int retry = 0; dist == 0.0 && retry < 100; ++retry) {
      p2 = sample();
      dist = std::sqrt((p1.U - p2.U).squaredNorm() + (p1.mu - p2.mu).squaredNorm());
    }
    if (dist == 0.0) throw DomainError("empirical_contraction_factor: degenerate sampling box");
    const IterState t1 = map.step(p1, config.delta);
    const IterState t2 = map.step(p2, config.delta);
    const double image =
        std::sqrt((t1.U - t2.U).squaredNorm() + (t1.mu - t2.mu).squaredNorm());
    q = std::max(q, image / dist);
  }
  return q;
}

namespace {

void condition_text(std::ostringstream& os, const char* title, const ConditionReport& r) {
  os << title << "\n";
  os << "  theta_W            " << format_double(r.theta_W) << "\n";
  os << "  threshold          " << format_double(r.threshold) << "\n";
  os << "  satisfied          " << (r.satisfied ? "yes" : "no") << "\n";
  os << "  kappa(G_X,beta)    " << format_double(r.kappa_GXbeta) << "\n";
  os << "  ||G_U,mu||         " << format_double(r.norm_GUmu) << "\n";
  os << "  ratio term         " << format_double(r.ratio_term) << "\n";
  os << "  ||Q||              " << format_double(r.norm_Q) << "\n";
  os << "  beta'beta          " << format_double(r.beta_sq) << "\n";
  if (r.kappa_omega) os << "  kappa(Omega)       " << format_double(*r.kappa_omega) << "\n";
  if (r.projector_norm) os << "  ||P||              " << format_double(*r.projector_norm) << "\n";
  if (r.omega_check) {
    const auto& o = *r.omega_check;
    os << "  Omega invertible   " << (o.invertible ? "yes" : "no") << "\n";
    os << "  Omega W >= 0       " << (o.left_ok ? "yes" : "no") << "\n";
    os << "  W Omega >= 0       " << (o.right_ok ? "yes" : "no") << "\n";
  }
}

void condition_kv(std::ostringstream& os, const std::string& prefix, const ConditionReport& r) {
  os << prefix << ".theta_W=" << format_double(r.theta_W) << "\n";
  os << prefix << ".threshold=" << format_double(r.threshold) << "\n";
  os << prefix << ".satisfied=" << (r.satisfied ? "true" : "false") << "\n";
  os << prefix << ".kappa_GXbeta=" << format_double(r.kappa_GXbeta) << "\n";
  os << prefix << ".norm_GUmu=" << format_double(r.norm_GUmu) << "\n";
  os << prefix << ".ratio_term=" << format_double(r.ratio_term) << "\n";
  os << prefix << ".norm_Q=" << format_double(r.norm_Q) << "\n";
  os << prefix << ".beta_sq=" << format_double(r.beta_sq) << "\n";
  if (r.kappa_omega) os << prefix << ".kappa_omega=" << format_double(*r.kappa_omega) << "\n";
  if (r.projector_norm) {
    os << prefix << ".projector_norm=" << format_double(*r.projector_norm) << "\n";
  }
  if (r.omega_check) {
    const auto& o = *r.omega_check;
    os << prefix << ".omega_invertible=" << (o.invertible ? "true" : "false") << "\n";
    os << prefix << ".omega_left_ok=" << (o.left_ok ? "true" : "false") << "\n";
    os << prefix << ".omega_right_ok=" << (o.right_ok ? "true" : "false") << "\n";
  }
}

}  // namespace

std::string diagnostics_text(const Diagnostics& d) {
  std::ostringstream os;
  os << "Variable bounds\n";
  os << "  sup W              " << format_double(d.bounds.sup_W) << "\n";
  os << "  sup mu             " << format_double(d.bounds.sup_mu) << "\n";
  os << "  sup U              " << format_double(d.bounds.sup_U) << "\n";
  os << "  sup F(U)           " << format_double(d.bounds.sup_FU) << "\n";
  for (const auto& w : d.bounds.warnings) os << "  warning: " << w << "\n";
  if (d.general) condition_text(os, "General contraction condition", *d.general);
  if (d.omega) condition_text(os, "Omega-restricted contraction condition", *d.omega);
  if (d.constrained) condition_text(os, "Constrained contraction condition", *d.constrained);
  if (d.contraction_factor) {
    os << "Empirical contraction factor\n";
    os << "  q                  " << format_double(*d.contraction_factor) << "\n";
  }
  for (const auto& n : d.notes) os << "note: " << n << "\n";
  return os.str();
}

std::string diagnostics_kv(const Diagnostics& d) {
  std::ostringstream os;
  os << "bounds.sup_W=" << format_double(d.bounds.sup_W) << "\n";
  os << "bounds.sup_mu=" << format_double(d.bounds.sup_mu) << "\n";
  os << "bounds.sup_U=" << format_double(d.bounds.sup_U) << "\n";
  os << "bounds.sup_FU=" << format_double(d.bounds.sup_FU) << "\n";
  if (d.general) condition_kv(os, "general", *d.general);
  if (d.omega) condition_kv(os, "omega", *d.omega);
  if (d.constrained) condition_kv(os, "constrained", *d.constrained);
  if (d.contraction_factor) {
    os << "contraction.q=" << format_double(*d.contraction_factor) << "\n";
  }
  return os.str();
}

}  // namespace ocrnn
