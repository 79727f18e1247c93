#pragma once

#include <vector>

#include <Eigen/Dense>

#include "snls/control.hpp"
#include "snls/sensitivity.hpp"

namespace snls {

// Least-squares projection onto Hermite polynomials He_0..He_d of
// z = W / sqrt(t), optionally extended by linear state features. Fit once
// per time slice, then applied to any number of response columns.
class HermiteRegression {
 public:
  // Rows of `features` are paths. Throws RegressionIllConditioned when the
  // normalized Gram matrix has condition number above max_condition. With
  // rank_revealing, collinear columns are dropped instead (no check).
  HermiteRegression(const Eigen::MatrixXd& features, double ridge, double max_condition,
                    bool rank_revealing = false);

  // Fitted values (conditional expectations) for each column of `y`.
  Eigen::MatrixXd project(const Eigen::MatrixXd& y) const;
  double condition() const noexcept { return condition_; }
  int n_basis() const noexcept { return static_cast<int>(features_.cols()); }

 private:
  Eigen::MatrixXd features_;
  Eigen::LDLT<Eigen::MatrixXd> gram_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_;
  bool rank_revealing_ = false;
  double condition_ = 1.0;
};

// He_0(z) .. He_degree(z), probabilists' normalization.
Eigen::VectorXd hermite_basis(double z, int degree);

struct BsdeOptions {
  int degree = 4;
  double ridge = 1e-10;
  double max_condition = 1e12;
  // Validated mode: uniform sigma and additive noise, where the state at t_n
  // is a function of W(t_n). Otherwise the basis also gets state features.
  bool validated = true;
};

struct BsdeSolution {
  // Indexed [path][level]; P is the (rho, S) costate, Y = -T^{-T} P its
  // complex form, Z the martingale integrand (levels 0..N-1).
  std::vector<std::vector<Eigen::VectorXd>> p;
  std::vector<std::vector<ComplexState>> y;
  std::vector<std::vector<ComplexState>> z;
  double max_condition = 0.0;
};

// NonConstantSigma / UnsupportedModel in validated mode.
void require_validated(const ControlPath& control, const ControlSetup& setup);

BsdeSolution bsde_solve(const LinearizedEnsemble& lin, const CostFunctional& cost,
                        const ControlSetup& setup, const BsdeOptions& opts = {});

// Discrete gradient density: G_in = E[P_{n+1} . r_n e_i] / dt + dg/dv.
Eigen::MatrixXd gradient_from_bsde(const BsdeSolution& bsde, const LinearizedEnsemble& lin,
                                   const CostFunctional& cost, const ControlSetup& setup);

// Continuous pairing for potential control: G_in = E[Im(conj(u_i) Y_i)](t_n)
// + dg/dv. Agrees with the discrete form up to O(dt).
Eigen::MatrixXd gradient_from_bsde_continuous(const BsdeSolution& bsde, const LinearizedEnsemble& lin,
                                              const CostFunctional& cost, const ControlSetup& setup);

struct DualityCheck {
  double lhs = 0.0;  // E Re<X(T), Y(T)>
  double rhs = 0.0;  // sum_n E[-P_{n+1} . r_n d_n] + dt sum_n E[Re<dg/du, X_n>]
  double rel_error = 0.0;
};

DualityCheck duality_check(const BsdeSolution& bsde, const LinearizedEnsemble& lin,
                           const Eigen::MatrixXd& direction, const CostFunctional& cost,
                           const ControlSetup& setup);

}  // namespace snls
