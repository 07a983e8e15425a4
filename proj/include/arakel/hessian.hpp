#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "arakel/eigen_rational.hpp"
#include "arakel/rational.hpp"

namespace arakel {

// Family of matrices behind the norm-like function phi(y) = beta Y^{-1} beta^t
// with Y = Y0 + sum y_j Y_j and beta = beta0 + sum y_j beta_j. Each Y_j is
// positive semidefinite in block form (leading rank_j block positive
// definite), the kernels are nested (flag condition), and each beta_j lies in
// the row space of Y_j via beta_j = alpha_j Y_j.
struct FlagFamily {
  std::size_t g = 1, d = 1;
  Eigen::MatrixXd Y0;                  // g x g, SPD
  std::vector<Eigen::MatrixXd> Yj;     // d matrices, g x g PSD block form
  std::vector<std::size_t> ranks;      // rank of Y_j, nonincreasing
  Eigen::MatrixXd alpha;               // (d+1) x g; beta_j = alpha_j Y_j (Y_0 for j = 0)

  Eigen::RowVectorXd beta(std::size_t j) const;  // j = 0..d
  bool flag_ok() const;
  void validate() const;
};

// Y(y), beta(y), phi(y) and the Gram Hessian 2 W_i Y^{-1} W_j^t.
Eigen::MatrixXd y_matrix(const FlagFamily& fam, const Eigen::VectorXd& y);
Eigen::RowVectorXd beta_vector(const FlagFamily& fam, const Eigen::VectorXd& y);
double phi(const FlagFamily& fam, const Eigen::VectorXd& y);
// Rows W_0..W_d with W_j = beta_j - beta Y^{-1} Y_j; W_0 + sum y_j W_j = 0.
Eigen::MatrixXd w_vectors(const FlagFamily& fam, const Eigen::VectorXd& y);
Eigen::MatrixXd hessian_gram(const FlagFamily& fam, const Eigen::VectorXd& y);

// Central finite differences of a scalar field; the independent oracle for
// the Gram formula.
Eigen::MatrixXd finite_difference_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& y, double rel_step = 1e-4);

// Exact rational path (intended for small g, d).
struct RationalFlagFamily {
  std::size_t g = 1, d = 1;
  RationalMatrix Y0;
  std::vector<RationalMatrix> Yj;
  RationalMatrix alpha;  // (d+1) x g

  RationalRowVector beta(std::size_t j) const;
};
Rational phi_exact(const RationalFlagFamily& fam, const RationalVector& y);
RationalMatrix hessian_gram_exact(const RationalFlagFamily& fam, const RationalVector& y);

// Empirical constants for the five bound statements, each the supremum over
// the grid of quantity times reciprocal bound.
struct BoundsReport {
  struct Item {
    std::string name;
    double c_hat;
    bool finite;
  };
  std::vector<Item> items;
  double w_zero_pattern_error;  // max |(W_j)_l| over l > rank_j (must vanish)
  double linear_relation_error;  // max |W_0 + sum y_j W_j|
};
struct FlagViolated : std::runtime_error {
  FlagViolated() : std::runtime_error("family does not satisfy the flag condition") {}
};
BoundsReport verify_bounds(const FlagFamily& fam, const std::vector<Eigen::VectorXd>& grid);

// Log-spaced tensor grid in [lo, hi]^d with n points per axis.
std::vector<Eigen::VectorXd> log_grid(std::size_t d, double lo, double hi, std::size_t n);

// Elementary inequality sum s_j (prod t_k)^{1/n} <= C sum t_k prod s_j with
// the proof constant C = m / (n eps^{m-1}).
struct Ineq19Result {
  double lhs, rhs, C;
  bool holds() const { return lhs <= rhs * (1 + 1e-12); }
};
Ineq19Result inequality_19(const std::vector<double>& s, const std::vector<double>& t,
                           double eps);

// Integrability bookkeeping of the boundary bound: exponents carried by the
// I, I'' and I' factors, radial quadrature of one factor, and the exponent-1
// negative control.
struct IntegrandReport {
  Rational exp_I, exp_Idp, exp_Ip;  // 1 + 1/(4n), 1 + 1/4, 1 + 3/4
  bool exponents_match;             // bookkeeping vs transfer derivation
  double quad_coarse, quad_fine;    // assembled-bound quadrature, two levels
  bool stable;                      // within 2 percent
  double control_coarse, control_fine;  // exponent-1 factor on the I-part
  bool control_diverges;
};
IntegrandReport integrand_bound_check(std::size_t g, std::size_t d,
                                      const std::vector<std::size_t>& J,
                                      const std::vector<std::size_t>& K);

}  // namespace arakel
