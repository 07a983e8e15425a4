#include "arakel/hessian.hpp"

#include <cmath>

namespace arakel {

RationalMatrix rational_solve(RationalMatrix A, RationalMatrix B) {
  const auto n = A.rows();
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = col; r < n; ++r)
      if (!A(r, col).is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) throw std::domain_error("rational_solve: singular matrix");
    if (piv != col) {
      A.row(piv).swap(A.row(col));
      B.row(piv).swap(B.row(col));
    }
    Rational inv = Rational(1) / A(col, col);
    A.row(col) *= inv;
    B.row(col) *= inv;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col || A(r, col).is_zero()) continue;
      Rational f = A(r, col);
      A.row(r) -= f * A.row(col);
      B.row(r) -= f * B.row(col);
    }
  }
  return B;
}

Eigen::RowVectorXd FlagFamily::beta(std::size_t j) const {
  if (j == 0) return alpha.row(0) * Y0;
  return alpha.row(static_cast<Eigen::Index>(j)) * Yj[j - 1];
}

bool FlagFamily::flag_ok() const {
  // nested kernels in block form: ranks nonincreasing, rank_0 = g
  std::size_t prev = g;
  for (std::size_t r : ranks) {
    if (r > prev) return false;
    prev = r;
  }
  return true;
}

void FlagFamily::validate() const {
  if (Y0.rows() != static_cast<Eigen::Index>(g) || Y0.cols() != static_cast<Eigen::Index>(g))
    throw std::invalid_argument("FlagFamily: Y0 must be g x g");
  if (Yj.size() != d || ranks.size() != d)
    throw std::invalid_argument("FlagFamily: need d matrices with declared ranks");
  if (alpha.rows() != static_cast<Eigen::Index>(d + 1) ||
      alpha.cols() != static_cast<Eigen::Index>(g))
    throw std::invalid_argument("FlagFamily: alpha must be (d+1) x g");
  Eigen::LLT<Eigen::MatrixXd> llt(Y0);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("FlagFamily: Y0 must be positive definite");
  for (std::size_t j = 0; j < d; ++j) {
    const auto& Y = Yj[j];
    const auto r = static_cast<Eigen::Index>(ranks[j]);
    if (Y.rows() != static_cast<Eigen::Index>(g) || Y.cols() != static_cast<Eigen::Index>(g))
      throw std::invalid_argument("FlagFamily: Y_j must be g x g");
    if (!Y.isApprox(Y.transpose(), 1e-12))
      throw std::invalid_argument("FlagFamily: Y_j must be symmetric");
    if (r < Y.rows() &&
        (Y.bottomRightCorner(Y.rows() - r, Y.cols() - r).cwiseAbs().maxCoeff() > 1e-14 ||
         Y.topRightCorner(r, Y.cols() - r).cwiseAbs().maxCoeff() > 1e-14))
      throw std::invalid_argument("FlagFamily: Y_j must vanish outside the leading block");
    if (r > 0) {
      Eigen::LLT<Eigen::MatrixXd> bl(Y.topLeftCorner(r, r));
      if (bl.info() != Eigen::Success)
        throw std::invalid_argument("FlagFamily: leading block of Y_j must be positive definite");
    }
  }
}

Eigen::MatrixXd y_matrix(const FlagFamily& fam, const Eigen::VectorXd& y) {
  Eigen::MatrixXd Y = fam.Y0;
  for (std::size_t j = 0; j < fam.d; ++j) Y += y(static_cast<Eigen::Index>(j)) * fam.Yj[j];
  return Y;
}

Eigen::RowVectorXd beta_vector(const FlagFamily& fam, const Eigen::VectorXd& y) {
  Eigen::RowVectorXd b = fam.beta(0);
  for (std::size_t j = 0; j < fam.d; ++j)
    b += y(static_cast<Eigen::Index>(j)) * fam.beta(j + 1);
  return b;
}

double phi(const FlagFamily& fam, const Eigen::VectorXd& y) {
  Eigen::MatrixXd Y = y_matrix(fam, y);
  Eigen::RowVectorXd b = beta_vector(fam, y);
  Eigen::VectorXd x = Y.ldlt().solve(b.transpose());
  return b * x;
}

Eigen::MatrixXd w_vectors(const FlagFamily& fam, const Eigen::VectorXd& y) {
  Eigen::MatrixXd Y = y_matrix(fam, y);
  Eigen::RowVectorXd b = beta_vector(fam, y);
  Eigen::VectorXd byinv = Y.ldlt().solve(b.transpose());
  Eigen::MatrixXd W(fam.d + 1, fam.g);
  for (std::size_t j = 0; j <= fam.d; ++j) {
    const Eigen::MatrixXd& Yj = j == 0 ? fam.Y0 : fam.Yj[j - 1];
    W.row(static_cast<Eigen::Index>(j)) = fam.beta(j) - byinv.transpose() * Yj;
  }
  return W;
}

Eigen::MatrixXd hessian_gram(const FlagFamily& fam, const Eigen::VectorXd& y) {
  Eigen::MatrixXd Y = y_matrix(fam, y);
  Eigen::MatrixXd W = w_vectors(fam, y);
  Eigen::MatrixXd Wtail = W.bottomRows(static_cast<Eigen::Index>(fam.d));
  // 2 W_i Y^{-1} W_j^t
  Eigen::MatrixXd X = Y.ldlt().solve(Wtail.transpose());
  return 2.0 * (Wtail * X);
}

Eigen::MatrixXd finite_difference_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& y, double rel_step) {
  const auto d = y.size();
  Eigen::MatrixXd H(d, d);
  Eigen::VectorXd h = rel_step * y.cwiseAbs().cwiseMax(1.0);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      double v;
      if (i == j) {
        Eigen::VectorXd yp = y, ym = y;
        yp(i) += h(i);
        ym(i) -= h(i);
        v = (f(yp) - 2 * f(y) + f(ym)) / (h(i) * h(i));
      } else {
        Eigen::VectorXd ypp = y, ypm = y, ymp = y, ymm = y;
        ypp(i) += h(i);
        ypp(j) += h(j);
        ypm(i) += h(i);
        ypm(j) -= h(j);
        ymp(i) -= h(i);
        ymp(j) += h(j);
        ymm(i) -= h(i);
        ymm(j) -= h(j);
        v = (f(ypp) - f(ypm) - f(ymp) + f(ymm)) / (4 * h(i) * h(j));
      }
      H(i, j) = v;
      H(j, i) = v;
    }
  }
  return H;
}

RationalRowVector RationalFlagFamily::beta(std::size_t j) const {
  if (j == 0) return alpha.row(0) * Y0;
  return alpha.row(static_cast<Eigen::Index>(j)) * Yj[j - 1];
}

Rational phi_exact(const RationalFlagFamily& fam, const RationalVector& y) {
  RationalMatrix Y = fam.Y0;
  for (std::size_t j = 0; j < fam.d; ++j) Y += y(static_cast<Eigen::Index>(j)) * fam.Yj[j];
  RationalRowVector b = fam.beta(0);
  for (std::size_t j = 0; j < fam.d; ++j)
    b += y(static_cast<Eigen::Index>(j)) * fam.beta(j + 1);
  RationalMatrix x = rational_solve(Y, b.transpose());
  Rational out(0);
  for (Eigen::Index i = 0; i < b.cols(); ++i) out += b(i) * x(i, 0);
  return out;
}

RationalMatrix hessian_gram_exact(const RationalFlagFamily& fam, const RationalVector& y) {
  RationalMatrix Y = fam.Y0;
  for (std::size_t j = 0; j < fam.d; ++j) Y += y(static_cast<Eigen::Index>(j)) * fam.Yj[j];
  RationalRowVector b = fam.beta(0);
  for (std::size_t j = 0; j < fam.d; ++j)
    b += y(static_cast<Eigen::Index>(j)) * fam.beta(j + 1);
  RationalMatrix byinv = rational_solve(Y, b.transpose());  // Y^{-1} b^t
  RationalMatrix W(fam.d, fam.g);
  for (std::size_t j = 1; j <= fam.d; ++j) {
    RationalRowVector w = fam.beta(j);
    RationalRowVector corr = (byinv.transpose() * fam.Yj[j - 1]);
    W.row(static_cast<Eigen::Index>(j - 1)) = w - corr;
  }
  RationalMatrix X = rational_solve(Y, W.transpose());
  RationalMatrix H = W * X;
  for (Eigen::Index i = 0; i < H.rows(); ++i)
    for (Eigen::Index j = 0; j < H.cols(); ++j) H(i, j) = Rational(2) * H(i, j);
  return H;
}

std::vector<Eigen::VectorXd> log_grid(std::size_t d, double lo, double hi, std::size_t n) {
  std::vector<double> axis(n);
  for (std::size_t i = 0; i < n; ++i)
    axis[i] = lo * std::pow(hi / lo, n == 1 ? 0.0
                                            : static_cast<double>(i) / static_cast<double>(n - 1));
  std::vector<Eigen::VectorXd> pts;
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(d));
    for (std::size_t a = 0; a < d; ++a) y(static_cast<Eigen::Index>(a)) = axis[idx[a]];
    pts.push_back(y);
    std::size_t a = 0;
    while (a < d && ++idx[a] == n) {
      idx[a] = 0;
      ++a;
    }
    if (a == d) break;
  }
  return pts;
}

BoundsReport verify_bounds(const FlagFamily& fam, const std::vector<Eigen::VectorXd>& grid) {
  fam.validate();
  if (!fam.flag_ok()) throw FlagViolated();
  BoundsReport rep;
  const std::size_t d = fam.d, g = fam.g;
  double c1 = 0, c2 = 0, c2b = 0, c3 = 0, c4 = 0, c5 = 0;
  rep.w_zero_pattern_error = 0;
  rep.linear_relation_error = 0;

  // subsets of {1..d} (indexed 0-based) for the W_I bound
  std::vector<std::vector<std::size_t>> subsets;
  for (std::size_t mask = 1; mask < (std::size_t(1) << d); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < d; ++j)
      if (mask & (std::size_t(1) << j)) s.push_back(j);
    subsets.push_back(std::move(s));
  }
  // index subsets of fixed cardinality r for the minor bound
  auto subsets_of_size = [&](std::size_t r) {
    std::vector<std::vector<std::size_t>> out;
    for (const auto& s : subsets)
      if (s.size() == r) out.push_back(s);
    return out;
  };

  for (const Eigen::VectorXd& y : grid) {
    Eigen::MatrixXd Y = y_matrix(fam, y);
    Eigen::MatrixXd Yinv = Y.ldlt().solve(Eigen::MatrixXd::Identity(Y.rows(), Y.cols()));
    Eigen::RowVectorXd b = beta_vector(fam, y);
    Eigen::RowVectorXd byinv = b * Yinv;
    Eigen::MatrixXd W = w_vectors(fam, y);

    // linear relation W_0 + sum y_j W_j = 0, relative to the term scale
    Eigen::RowVectorXd rel = W.row(0);
    double rel_scale = W.row(0).cwiseAbs().maxCoeff();
    for (std::size_t j = 0; j < d; ++j) {
      Eigen::RowVectorXd term =
          y(static_cast<Eigen::Index>(j)) * W.row(static_cast<Eigen::Index>(j + 1));
      rel += term;
      rel_scale = std::max(rel_scale, term.cwiseAbs().maxCoeff());
    }
    rep.linear_relation_error =
        std::max(rep.linear_relation_error, rel.cwiseAbs().maxCoeff() / (1 + rel_scale));

    // (1) inverse-entry bound
    for (std::size_t k = 0; k < g; ++k)
      for (std::size_t l = 0; l < g; ++l) {
        double denom = 1.0;
        for (std::size_t j = 0; j < d; ++j)
          if (fam.ranks[j] >= std::min(k, l) + 1) denom += y(static_cast<Eigen::Index>(j));
        c1 = std::max(c1, std::abs(Yinv(static_cast<Eigen::Index>(k),
                                        static_cast<Eigen::Index>(l))) * denom);
      }

    // (2) W entries: zero pattern above the rank, bounded below it; beta Y^{-1}
    for (std::size_t j = 0; j <= d; ++j) {
      const std::size_t rk = j == 0 ? g : fam.ranks[j - 1];
      for (std::size_t l = 0; l < g; ++l) {
        double w = std::abs(W(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)));
        if (l + 1 > rk)
          rep.w_zero_pattern_error = std::max(rep.w_zero_pattern_error, w);
        else
          c2 = std::max(c2, w);
      }
    }
    c2b = std::max(c2b, byinv.cwiseAbs().maxCoeff());

    // (3) Hessian-entry bound
    Eigen::MatrixXd WY = Yinv * W.bottomRows(static_cast<Eigen::Index>(d)).transpose();
    Eigen::MatrixXd G = W.bottomRows(static_cast<Eigen::Index>(d)) * WY;  // W_i Y^{-1} W_j^t
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        double q = std::abs(G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        c3 = std::max(c3, q * (1.0 + std::sqrt(y(static_cast<Eigen::Index>(i)) *
                                               y(static_cast<Eigen::Index>(j)))));
      }

    // (4) W_I bound
    double ytot = 1.0;
    for (std::size_t j = 0; j < d; ++j) ytot += y(static_cast<Eigen::Index>(j));
    for (const auto& I : subsets) {
      Eigen::RowVectorXd WI = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(g));
      double yI = 0;
      for (std::size_t j : I) {
        WI += y(static_cast<Eigen::Index>(j)) * W.row(static_cast<Eigen::Index>(j + 1));
        yI += y(static_cast<Eigen::Index>(j));
      }
      double q = WI * Yinv * WI.transpose();
      double yIc = ytot - yI;  // sum over I_0^c includes y_0 = 1
      if (yI > 0 && yIc > 0) c4 = std::max(c4, q * ytot / (yI * yIc));
    }

    // (5) minor determinant bound
    Eigen::MatrixXd H = 2.0 * G;
    for (std::size_t r = 1; r <= std::min(g, d); ++r) {
      auto Js = subsets_of_size(r);
      for (const auto& J : Js)
        for (const auto& K : Js) {
          Eigen::MatrixXd M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
          for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b2 = 0; b2 < r; ++b2)
              M(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b2)) =
                  H(static_cast<Eigen::Index>(J[a]), static_cast<Eigen::Index>(K[b2]));
          double det = std::abs(M.determinant());
          // I = J cap K
          double yIc = ytot;
          std::vector<std::size_t> inter;
          for (std::size_t a : J)
            if (std::find(K.begin(), K.end(), a) != K.end()) inter.push_back(a);
          for (std::size_t a : inter) yIc -= y(static_cast<Eigen::Index>(a));
          double prod = 1.0;
          for (std::size_t a : J) prod *= std::sqrt(y(static_cast<Eigen::Index>(a)));
          for (std::size_t a : K) prod *= std::sqrt(y(static_cast<Eigen::Index>(a)));
          if (yIc > 0) c5 = std::max(c5, det * (ytot / yIc) * prod);
        }
    }
  }

  auto fin = [](double v) { return std::isfinite(v); };
  rep.items = {{"inverse_entries", c1, fin(c1)},
               {"w_entries", c2, fin(c2)},
               {"beta_yinv_entries", c2b, fin(c2b)},
               {"hessian_entries", c3, fin(c3)},
               {"w_subset", c4, fin(c4)},
               {"minor_determinant", c5, fin(c5)}};
  return rep;
}

Ineq19Result inequality_19(const std::vector<double>& s, const std::vector<double>& t,
                           double eps) {
  const auto m = static_cast<double>(s.size());
  const auto n = static_cast<double>(t.size());
  for (double v : s)
    if (v < eps) throw std::invalid_argument("inequality_19: entries must be >= eps");
  for (double v : t)
    if (v < eps) throw std::invalid_argument("inequality_19: entries must be >= eps");
  double sum_s = 0, sum_t = 0, prod_s = 1, prod_t = 1;
  for (double v : s) {
    sum_s += v;
    prod_s *= v;
  }
  for (double v : t) {
    sum_t += v;
    prod_t *= v;
  }
  Ineq19Result r;
  r.C = m / (n * std::pow(eps, m - 1));
  r.lhs = sum_s * std::pow(prod_t, 1.0 / n);
  r.rhs = r.C * sum_t * prod_s;
  return r;
}

namespace {

// Radial quadrature of dr / (r |log r|^{1+a}) over (0, 1/2]. Substituting
// x = 1/|log r| turns it into the proper integral of x^{a-1} over
// (0, 1/log 2], evaluated with a geometric midpoint rule; refinement deepens
// the grid toward the puncture.
double radial_quadrature(double a, std::size_t cells) {
  const double x0 = 1.0 / std::log(2.0);
  const double rho = 0.9;
  double acc = 0, hi = x0;
  for (std::size_t i = 0; i < cells; ++i) {
    double lo = hi * rho;
    double mid = 0.5 * (hi + lo);
    acc += std::pow(mid, a - 1.0) * (hi - lo);
    hi = lo;
  }
  return acc;
}

std::size_t cells_for(double a) {
  if (a <= 0) return 256;
  return static_cast<std::size_t>(std::ceil(64.0 / a));
}

}  // namespace

IntegrandReport integrand_bound_check(std::size_t g, std::size_t d,
                                      const std::vector<std::size_t>& J,
                                      const std::vector<std::size_t>& K) {
  if (J.size() != g || K.size() != g)
    throw std::invalid_argument("integrand_bound_check: need |J| = |K| = g");
  (void)d;
  std::vector<std::size_t> I;
  for (std::size_t a : J)
    if (std::find(K.begin(), K.end(), a) != K.end()) I.push_back(a);
  const auto n = static_cast<std::int64_t>(std::max<std::size_t>(I.size(), 1));

  IntegrandReport rep;
  // direct bookkeeping
  rep.exp_I = Rational(1) + Rational(1, 4 * n);
  rep.exp_Idp = Rational(1) + Rational(1, 4);
  rep.exp_Ip = Rational(1) + Rational(3, 4);
  // transfer derivation: start from (1, 3/2, 2), move 1/4 of the excess onto
  // the I factors through the elementary inequality
  Rational tI = Rational(1) + Rational(1, 4) / Rational(n);
  Rational tIdp = Rational(3, 2) - Rational(1, 4);
  Rational tIp = Rational(2) - Rational(1, 4);
  rep.exponents_match = rep.exp_I == tI && rep.exp_Idp == tIdp && rep.exp_Ip == tIp;

  // assembled bound: product over one representative factor of each class
  auto assembled = [&](std::size_t scale) {
    double v = 1;
    for (const Rational* e : {&rep.exp_I, &rep.exp_Idp, &rep.exp_Ip}) {
      double a = e->to_double() - 1.0;
      v *= radial_quadrature(a, scale * cells_for(a));
    }
    return v;
  };
  rep.quad_coarse = assembled(1);
  rep.quad_fine = assembled(2);
  rep.stable = std::abs(rep.quad_fine - rep.quad_coarse) <= 0.02 * std::abs(rep.quad_coarse);

  // negative control: exponent 1 on the I factors (a = 0)
  rep.control_coarse = radial_quadrature(0.0, cells_for(0));
  rep.control_fine = radial_quadrature(0.0, 2 * cells_for(0));
  rep.control_diverges = rep.control_fine > rep.control_coarse * 1.05;
  return rep;
}

}  // namespace arakel
