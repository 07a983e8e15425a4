#include "arakel/hessian.hpp"

#include <random>

#include "doctest.h"

using namespace arakel;

namespace {

// Random family with nonincreasing ranks and small integer data.
FlagFamily random_family(std::mt19937_64& rng, std::size_t g, std::size_t d) {
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  FlagFamily fam;
  fam.g = g;
  fam.d = d;
  Eigen::MatrixXd R(g, g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) R(i, j) = entry(rng);
  fam.Y0 = R * R.transpose() + 0.5 * Eigen::MatrixXd::Identity(g, g) * double(g);
  std::size_t rank = g;
  for (std::size_t j = 0; j < d; ++j) {
    std::uniform_int_distribution<std::size_t> rd(1, rank);
    rank = rd(rng);
    fam.ranks.push_back(rank);
    Eigen::MatrixXd Rb(rank, rank);
    for (std::size_t i = 0; i < rank; ++i)
      for (std::size_t k = 0; k < rank; ++k) Rb(i, k) = entry(rng);
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(g, g);
    Y.topLeftCorner(rank, rank) =
        Rb * Rb.transpose() + 0.25 * Eigen::MatrixXd::Identity(rank, rank);
    fam.Yj.push_back(Y);
  }
  fam.alpha = Eigen::MatrixXd(d + 1, g);
  for (std::size_t j = 0; j <= d; ++j)
    for (std::size_t k = 0; k < g; ++k) fam.alpha(j, k) = entry(rng);
  fam.validate();
  return fam;
}

// The structured g = 2, d = 3 family used by the acceptance bound sweep.
FlagFamily structured_family() {
  FlagFamily fam;
  fam.g = 2;
  fam.d = 3;
  fam.Y0 = (Eigen::MatrixXd(2, 2) << 2, 1, 1, 2).finished();
  fam.Yj = {(Eigen::MatrixXd(2, 2) << 1, 0, 0, 1).finished(),
            (Eigen::MatrixXd(2, 2) << 1, 0, 0, 0).finished(),
            (Eigen::MatrixXd(2, 2) << 3, 0, 0, 0).finished()};
  fam.ranks = {2, 1, 1};
  fam.alpha = (Eigen::MatrixXd(4, 2) << 1, -1, 0.5, 1, 1, 0, -0.25, 0.5).finished();
  fam.validate();
  return fam;
}

}  // namespace

TEST_CASE("phi closed form for the 1x1 family") {
  // g = d = 1, Y0 = Y1 = 1, beta0 = 0, beta1 = b: phi = b^2 y^2 / (1 + y)
  RationalFlagFamily fam;
  fam.g = fam.d = 1;
  fam.Y0 = RationalMatrix::Constant(1, 1, Rational(1));
  fam.Yj = {RationalMatrix::Constant(1, 1, Rational(1))};
  const Rational b(3, 2);
  fam.alpha = RationalMatrix(2, 1);
  fam.alpha(0, 0) = Rational(0);
  fam.alpha(1, 0) = b;
  for (const Rational y : {Rational(1), Rational(2), Rational(5, 3)}) {
    RationalVector yv(1);
    yv(0) = y;
    Rational expect = b * b * y * y / (Rational(1) + y);
    CHECK(phi_exact(fam, yv) == expect);
    RationalMatrix H = hessian_gram_exact(fam, yv);
    Rational hexp = Rational(2) * b * b /
                    ((Rational(1) + y) * (Rational(1) + y) * (Rational(1) + y));
    CHECK(H(0, 0) == hexp);
  }
}

TEST_CASE("phi vanishes when all beta vanish") {
  std::mt19937_64 rng(3);
  FlagFamily fam = random_family(rng, 2, 3);
  fam.alpha.setZero();
  Eigen::VectorXd y = Eigen::VectorXd::Constant(3, 2.0);
  CHECK(phi(fam, y) == 0.0);
  CHECK(hessian_gram(fam, y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("phi matches a dense solve at the floor point") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    FlagFamily fam = random_family(rng, 3, 4);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(4, 1.0);
    Eigen::MatrixXd Y = y_matrix(fam, y);
    Eigen::RowVectorXd b = beta_vector(fam, y);
    double direct = b * Y.fullPivLu().solve(b.transpose());
    CHECK(std::abs(phi(fam, y) - direct) < 1e-10 * (1 + std::abs(direct)));
    CHECK(phi(fam, y) >= -1e-12);
  }
}

TEST_CASE("gram hessian agrees with central finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> yd(1.0, 50.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<std::size_t> gd(1, 3), dd(1, 6);
    std::size_t g = gd(rng), d = dd(rng);
    FlagFamily fam = random_family(rng, g, d);
    Eigen::VectorXd y(d);
    for (std::size_t j = 0; j < d; ++j) y(j) = yd(rng);
    Eigen::MatrixXd H = hessian_gram(fam, y);
    Eigen::MatrixXd F = finite_difference_hessian(
        [&](const Eigen::VectorXd& v) { return phi(fam, v); }, y);
    double scale = std::max(1e-12, H.cwiseAbs().maxCoeff());
    CHECK((H - F).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, scale));
    CHECK(H.isApprox(H.transpose(), 1e-10));
    // PSD and rank <= g via singular values
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(H);
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = static_cast<Eigen::Index>(g); i < sv.size(); ++i)
      CHECK(sv(i) <= 1e-8 * sv(0) + 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * std::max(1.0, H.trace()));
  }
}

TEST_CASE("linear relation among the W vectors") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    FlagFamily fam = random_family(rng, 3, 5);
    Eigen::VectorXd y = Eigen::VectorXd::Random(5).cwiseAbs() * 10 +
                        Eigen::VectorXd::Constant(5, 1.0);
    Eigen::MatrixXd W = w_vectors(fam, y);
    Eigen::RowVectorXd rel = W.row(0);
    for (std::size_t j = 0; j < 5; ++j) rel += y(j) * W.row(j + 1);
    CHECK(rel.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("verify_bounds on the structured family is finite and stable") {
  FlagFamily fam = structured_family();
  BoundsReport coarse = verify_bounds(fam, log_grid(3, 1.0, 1e6, 9));
  BoundsReport fine = verify_bounds(fam, log_grid(3, 1.0, 1e6, 17));
  REQUIRE(coarse.items.size() == fine.items.size());
  for (std::size_t i = 0; i < coarse.items.size(); ++i) {
    CAPTURE(coarse.items[i].name);
    CHECK(coarse.items[i].finite);
    CHECK(fine.items[i].finite);
    if (coarse.items[i].c_hat > 0)
      CHECK(fine.items[i].c_hat <= 1.05 * coarse.items[i].c_hat);
  }
  CHECK(coarse.w_zero_pattern_error < 1e-10);
  CHECK(coarse.linear_relation_error < 1e-10);
}

TEST_CASE("verify_bounds 1x1 family reproduces the closed-form constant") {
  // W1 Y^{-1} W1^t (1 + y) = b^2 (1+y) / (1+y)^2 <= b^2
  FlagFamily fam;
  fam.g = fam.d = 1;
  fam.Y0 = Eigen::MatrixXd::Constant(1, 1, 1.0);
  fam.Yj = {Eigen::MatrixXd::Constant(1, 1, 1.0)};
  fam.ranks = {1};
  const double b = 1.5;
  fam.alpha = (Eigen::MatrixXd(2, 1) << 0.0, b).finished();
  // closed form: W1 Y^{-1} W1^t (1 + y) = b^2 / (1+y)^2, sup at the grid floor
  BoundsReport rep = verify_bounds(fam, log_grid(1, 1.0, 1e6, 100));
  for (const auto& item : rep.items)
    if (item.name == "hessian_entries") CHECK(std::abs(item.c_hat - b * b / 4) < 1e-9);
  // over a grid reaching toward y = 0 the supremum climbs to b^2
  BoundsReport rep0 = verify_bounds(fam, log_grid(1, 1e-8, 1e6, 200));
  for (const auto& item : rep0.items)
    if (item.name == "hessian_entries") CHECK(std::abs(item.c_hat - b * b) < 1e-3);
}

TEST_CASE("flag violation is detected") {
  FlagFamily fam = structured_family();
  fam.ranks = {1, 2, 1};  // increasing somewhere
  std::swap(fam.Yj[0], fam.Yj[1]);
  CHECK_THROWS_AS(verify_bounds(fam, log_grid(3, 1.0, 10.0, 2)), FlagViolated);
}

TEST_CASE("inequality_19 boundary and random cases") {
  // m = n = 1, eps = 1: equality at s t <= 1 * t * s
  Ineq19Result r1 = inequality_19({2.0}, {5.0}, 1.0);
  CHECK(r1.C == 1.0);
  CHECK(r1.lhs == r1.rhs);
  CHECK(r1.holds());
  // m = 2, n = 1, eps = 1, s = (1,1), t = (5): equality at the boundary
  Ineq19Result r2 = inequality_19({1.0, 1.0}, {5.0}, 1.0);
  CHECK(r2.C == 2.0);
  CHECK(r2.lhs == 10.0);
  CHECK(r2.rhs == 10.0);
  CHECK(r2.holds());
  // random vectors above eps = 1/2
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> v(0.5, 30.0);
  std::uniform_int_distribution<std::size_t> len(1, 5);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> s(len(rng)), t(len(rng));
    for (auto& x : s) x = v(rng);
    for (auto& x : t) x = v(rng);
    Ineq19Result r = inequality_19(s, t, 0.5);
    CHECK(r.holds());
  }
}

TEST_CASE("integrand bound: exponents, stability, negative control") {
  IntegrandReport rep = integrand_bound_check(1, 2, {0}, {0});
  CHECK(rep.exp_I == Rational(5, 4));
  CHECK(rep.exp_Idp == Rational(5, 4));
  CHECK(rep.exp_Ip == Rational(7, 4));
  CHECK(rep.exponents_match);
  CHECK(rep.stable);
  CHECK(rep.control_diverges);

  // g = 2 with partial overlap: |I| = 1 keeps the 1 + 1/4n bookkeeping
  IntegrandReport rep2 = integrand_bound_check(2, 5, {0, 1}, {1, 2});
  CHECK(rep2.exp_I == Rational(5, 4));
  CHECK(rep2.exponents_match);
  IntegrandReport rep3 = integrand_bound_check(2, 5, {0, 1}, {0, 1});
  CHECK(rep3.exp_I == Rational(9, 8));
  CHECK(rep3.stable);
}
