#include "fixtures.hpp"
#include "oracles.hpp"

#include "ocrnn/foc_solver.hpp"
#include "ocrnn/model.hpp"

#include <doctest.h>

using namespace ocrnn;

namespace {

WeightSet random_weights(Eigen::Index n_in, Eigen::Index n, double w_norm, std::mt19937_64& rng) {
  WeightSet w;
  w.W = oracle::random_matrix(n, n, rng);
  w.W *= w_norm / oracle::svd_norm(w.W);
  w.V = oracle::random_matrix(n_in, n, rng);
  w.b = oracle::random_vector(n, rng);
  return w;
}

}  // namespace

TEST_CASE("dataset validation") {
  Dataset d{Matrix::Ones(3, 2), Vector::Ones(3)};
  CHECK_NOTHROW(d.validate());
  d.Y = Vector::Ones(2);
  CHECK_THROWS_AS(d.validate(), InvalidArgument);
  d.Y = Vector::Ones(3);
  d.X(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(d.validate(), InvalidArgument);
}

TEST_CASE("model config validation") {
  ModelConfig c = fixtures::cubic_config();
  CHECK(c.validate().empty());
  c.theta_W = 0.9;
  CHECK_FALSE(c.validate().empty());
  c.theta_W = 1.2;
  c.beta = Vector::Zero(3);
  CHECK_FALSE(c.validate().empty());
  c.beta = Vector::Ones(2);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = fixtures::cubic_config();
  c.delta = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.delta = 1.5;
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("model.delta") != std::string::npos);
  }
  c = fixtures::cubic_config();
  c.theta_V = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("forward solve") {
  std::mt19937_64 rng(3);
  const Matrix X = oracle::random_matrix(7, 2, rng);

  SUBCASE("W = 0, V = 0 gives 1b' in one step") {
    WeightSet w{Matrix::Zero(3, 3), Matrix::Zero(2, 3), Vector(3)};
    w.b << 0, 1, 2;
    const auto sol = solve_U_forward_traced(X, w, ActivationSpec::softplus(0.05), 1e-12, 100);
    CHECK(sol.iterations == 1);
    CHECK((sol.U - ones_times(w.b, 7)).norm() == 0.0);
  }

  SUBCASE("identity activation matches the linear closed form") {
    for (int t = 0; t < 10; ++t) {
      const WeightSet w = random_weights(2, 3, 0.85, rng);
      const Matrix U = solve_U_forward(X, w, ActivationSpec::identity(), 1e-13, 10000);
      const Matrix base = X * w.V + ones_times(w.b, 7);
      const Matrix exact = base * (Matrix::Identity(3, 3) - w.W).inverse();
      CHECK((U - exact).norm() < 1e-8);
    }
  }

  SUBCASE("residual contracts geometrically for the linear case") {
    const WeightSet w = random_weights(2, 3, 0.8, rng);
    const auto sol = solve_U_forward_traced(X, w, ActivationSpec::identity(), 1e-13, 10000);
    REQUIRE(sol.residuals.size() > 3);
    for (std::size_t k = 0; k + 1 < sol.residuals.size(); ++k) {
      CHECK(sol.residuals[k + 1] <= 0.8 * sol.residuals[k] + 1e-12);
    }
  }

  SUBCASE("independent of the start point") {
    const WeightSet w = random_weights(2, 3, 0.7, rng);
    const auto act = ColumnActivations(ActivationSpec::softplus(0.5));
    const double tol = 1e-11;
    const Matrix a = solve_U_forward(X, w, act, tol, 10000);
    const Matrix b =
        solve_U_forward(X, w, act, tol, 10000, oracle::random_matrix(7, 3, rng, 50.0));
    CHECK((a - b).norm() < 10 * tol);
  }

  SUBCASE("errors") {
    WeightSet w = random_weights(2, 3, 1.0, rng);
    CHECK_THROWS_AS(solve_U_forward(X, w, ActivationSpec::identity(), 1e-10, 100), DomainError);
    w = random_weights(2, 3, 0.99, rng);
    try {
      solve_U_forward(X, w, ActivationSpec::identity(), 1e-14, 3);
      FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
      CHECK(e.last_residual() > 0.0);
    }
  }
}

TEST_CASE("loss") {
  const Dataset d = fixtures::cubic_data();
  const ModelConfig c = fixtures::cubic_config();
  WeightSet w{Matrix::Zero(3, 3), Matrix::Zero(2, 3), c.b};
  const Matrix U = ones_times(c.b, d.n_obs());
  const double expected = 0.5 * (d.Y - Vector::Constant(50, c.b.dot(c.beta))).squaredNorm();
  CHECK(loss(U, w, d, c) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(semicircle_penalty(Matrix::Zero(3, 3), 1.2) == 0.0);

  w.W = Matrix::Constant(3, 3, 1.0);
  CHECK_THROWS_AS(loss(U, w, d, c), DomainError);

  SUBCASE("row permutation invariance") {
    std::mt19937_64 rng(8);
    WeightSet r{oracle::random_matrix(3, 3, rng, 0.1), oracle::random_matrix(2, 3, rng), c.b};
    const Matrix Ur = oracle::random_matrix(50, 3, rng, 10.0);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(50);
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + 50, rng);
    Dataset p{perm * d.X, perm * d.Y};
    CHECK(loss(perm * Ur, r, p, c) == doctest::Approx(loss(Ur, r, d, c)).epsilon(1e-12));
  }
}

TEST_CASE("semicircle gradient") {
  std::mt19937_64 rng(9);
  const double theta = 1.3;
  Matrix W = oracle::random_matrix(3, 3, rng);
  W *= 0.6 / (theta * W.norm());
  const Matrix g = semicircle_gradient(W, theta);
  Matrix fd(3, 3);
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < 9; ++i) {
    Matrix p = W, m = W;
    p(i) += h;
    m(i) -= h;
    fd(i) = (semicircle_penalty(p, theta) - semicircle_penalty(m, theta)) / (2 * h);
  }
  CHECK((g - fd).norm() < 1e-6);

  // The stationarity condition for W uses theta (1 - theta^2 tr W'W)^{-1/2} W,
  // exactly twice the derivative of the penalty as written.
  const Matrix stationarity = theta / std::sqrt(1 - theta * theta * W.squaredNorm()) * W;
  CHECK((stationarity - 2.0 * fd).norm() < 1e-6);
  CHECK((stationarity - fd).norm() > 1e-3);

  CHECK_THROWS_AS(semicircle_gradient(Matrix::Identity(2, 2), 1.0), DomainError);
}

TEST_CASE("predict") {
  std::mt19937_64 rng(10);
  const Matrix X = oracle::random_matrix(6, 2, rng);
  const WeightSet w = random_weights(2, 3, 0.5, rng);
  const auto act = ActivationSpec::softplus(1.0);
  CHECK(predict(X, w, Vector::Zero(3), act).norm() == 0.0);

  WeightSet zero{Matrix::Zero(3, 3), Matrix::Zero(2, 3), w.b};
  const Vector beta = oracle::random_vector(3, rng);
  CHECK((predict(X, zero, beta, act) - Vector::Constant(6, w.b.dot(beta))).norm() < 1e-14);
  CHECK_THROWS_AS(predict(X, w, Vector::Ones(2), act), InvalidArgument);
}

TEST_CASE("foc residuals") {
  const Dataset d = fixtures::cubic_data();
  const ModelConfig c = fixtures::cubic_config();

  SUBCASE("the W = 0 point leaves only the last condition") {
    const IterState s{ones_times(c.b, 50), Matrix::Zero(50, 3)};
    const WeightSet w{Matrix::Zero(3, 3), Matrix::Zero(2, 3), c.b};
    const auto rep = foc_residuals(s, w, d, c);
    for (int i = 0; i < 5; ++i) CHECK(rep.residuals[i] < 1e-12);
    const Vector eps = d.Y - Vector::Constant(50, c.b.dot(c.beta));
    CHECK(rep.residuals[5] == doctest::Approx((eps * c.beta.transpose()).norm()));
    CHECK(rep.aggregate == doctest::Approx(rep.residuals[5] / (1 + d.Y.norm())));
  }

  SUBCASE("fixed point of the training loop, and a perturbation of it") {
    const Dataset td = fixtures::tiny_data();
    const ModelConfig tc = fixtures::tiny_config();
    const TrainResult r = train(td, tc);
    REQUIRE(r.converged);
    CHECK(r.foc_report.aggregate < 1e-3);
    std::mt19937_64 rng(12);
    IterState bumped = r.state;
    bumped.U += 0.1 * oracle::random_matrix(5, 1, rng).normalized();
    CHECK(foc_residuals(bumped, r.weights, td, tc).aggregate > r.foc_report.aggregate);
  }

  CHECK_THROWS_AS(foc_residuals(IterState{Matrix::Zero(4, 3), Matrix::Zero(4, 3)},
                                WeightSet{Matrix::Zero(3, 3), Matrix::Zero(2, 3), c.b}, d, c),
                  InvalidArgument);
}
