#pragma once

#include "crfv/spaces.hpp"

#include <functional>
#include <memory>
#include <string>

namespace crfv {

/// Barotropic pressure law p(rho) with its Helmholtz function H, rho H' - H = p.
///
/// The isentropic law p = a rho^gamma has closed forms. A general law is given by p and p';
/// H and H' are then evaluated by tanh-sinh quadrature of int_1^rho p(z)/z^2 dz.
class PressureLaw {
 public:
  static PressureLaw isentropic(double a, double gamma);
  static PressureLaw general(std::function<double(double)> p, std::function<double(double)> dp, double a_under,
                             double a_bar, std::string name = "general");

  double p(double rho) const;
  double dp(double rho) const;
  double H(double rho) const;
  double dH(double rho) const;
  /// H'' = p'/rho.
  double d2H(double rho) const;

  bool is_isentropic() const noexcept { return isentropic_; }
  double coefficient() const noexcept { return a_; }
  double gamma() const noexcept { return gamma_; }
  /// Structural constants with H - a_under p and a_bar p - H convex.
  double a_under() const noexcept { return a_under_; }
  double a_bar() const noexcept { return a_bar_; }
  void set_structural(double a_under, double a_bar);
  const std::string& name() const noexcept { return name_; }

  /// p'(rho)/rho nonincreasing (known in closed form for isentropic laws only).
  bool p_prime_over_rho_nonincreasing() const { return isentropic_ && gamma_ <= 2.0; }

 private:
  bool isentropic_ = true;
  double a_ = 1.0;
  double gamma_ = 2.0;
  double a_under_ = 1.0;
  double a_bar_ = 1.0;
  std::string name_ = "isentropic";
  std::function<double(double)> p_, dp_;
  double integral_from_one(double rho) const;
};

/// Artificial diffusion and pressure regularization parameters at mesh size h.
struct RegularizationParams {
  int kappa_tilde = 0;  // pressure regularization switch
  double eta = 0.5;
  int kappa = 0;        // density diffusion switch
  double omega = 1.0;
  double h = 1.0;

  /// kappa_tilde h^eta.
  double pressure_coefficient() const;
  /// kappa h^omega.
  double diffusion_coefficient() const;
  /// Admissible eta interval upper bound; empty string when eta is in range.
  std::string range_warning() const;
};

struct Regularized {
  double p;
  double H;
};

Regularized regularized(const PressureLaw& law, const RegularizationParams& reg, double rho);
double p_h(const PressureLaw& law, const RegularizationParams& reg, double rho);
double H_h(const PressureLaw& law, const RegularizationParams& reg, double rho);
double dH_h(const PressureLaw& law, const RegularizationParams& reg, double rho);

/// E_B(rho|r) = B(rho) - B'(r)(rho - r) - B(r).
double rel_entropy_B(const std::function<double(double)>& B, const std::function<double(double)>& dB, double rho,
                     double r);
/// E(rho|r) with B = H. Throws DomainError for r <= 0 or rho < 0.
double rel_entropy(const PressureLaw& law, double rho, double r);
/// E_{H_h}(rho|r).
double rel_entropy_h(const PressureLaw& law, const RegularizationParams& reg, double rho, double r);

struct RelativeEnergy {
  double value;    // int 1/2 rho |w - V|^2 + E(rho|r)
  double value_h;  // plus kappa_tilde h^eta int (rho - r)^2
};

/// Relative energy of a piecewise-constant pair (rho, w) with respect to smooth (r, V).
RelativeEnergy relative_energy(const QField& rho, const QVecField& w, const ScalarFunction& r, const VectorFunction& V,
                               const PressureLaw& law, const RegularizationParams& reg, int degree = 4);

/// Smallest ratio E(rho|r) / (1_res (1 + rho + p(rho)) + 1_ess (rho - r)^2) over rho in
/// [0, rho_max] and r in [a, b], with O_ess = [a/2, 2b]. Sampled on a grid that includes both
/// sides of the O_ess endpoints, where the indicator jumps.
double coercivity_constant(const PressureLaw& law, double a, double b, double rho_max = 100.0, int samples = 400);

/// Minimum over a uniform grid of second differences of f on [lo, hi], scaled by 1/dx^2.
double min_second_difference(const std::function<double(double)>& f, double lo, double hi, int n = 2000);

}  // namespace crfv
