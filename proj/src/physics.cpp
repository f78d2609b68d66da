#include "crfv/physics.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace crfv {

namespace {

void check_density(double rho) {
  if (!(rho >= 0.0)) {
    std::ostringstream os;
    os << "negative density " << rho;
    throw DomainError(os.str());
  }
}

// One rule per thread: node tables are built lazily and reused.
boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  return rule;
}

}  // namespace

PressureLaw PressureLaw::isentropic(double a, double gamma) {
  if (!(a > 0.0)) throw DomainError("isentropic law needs a > 0");
  if (!(gamma > 1.0)) throw DomainError("isentropic law needs gamma > 1");
  PressureLaw law;
  law.isentropic_ = true;
  law.a_ = a;
  law.gamma_ = gamma;
  law.a_under_ = law.a_bar_ = 1.0 / (gamma - 1.0);
  return law;
}

PressureLaw PressureLaw::general(std::function<double(double)> p, std::function<double(double)> dp, double a_under,
                                 double a_bar, std::string name) {
  PressureLaw law;
  law.isentropic_ = false;
  law.p_ = std::move(p);
  law.dp_ = std::move(dp);
  law.name_ = std::move(name);
  law.gamma_ = std::numeric_limits<double>::quiet_NaN();
  law.set_structural(a_under, a_bar);
  return law;
}

void PressureLaw::set_structural(double a_under, double a_bar) {
  if (!(a_under > 0.0) || !(a_bar >= a_under)) throw DomainError("structural constants need 0 < a_under <= a_bar");
  a_under_ = a_under;
  a_bar_ = a_bar;
}

double PressureLaw::p(double rho) const {
  check_density(rho);
  return isentropic_ ? a_ * std::pow(rho, gamma_) : p_(rho);
}

double PressureLaw::dp(double rho) const {
  check_density(rho);
  return isentropic_ ? a_ * gamma_ * std::pow(rho, gamma_ - 1.0) : dp_(rho);
}

// int_1^rho p(z)/z^2 dz
double PressureLaw::integral_from_one(double rho) const {
  if (rho == 1.0) return 0.0;
  const auto f = [this](double z) { return z > 0.0 ? p_(z) / (z * z) : dp_(0.0) / std::max(z, 1e-300); };
  const double tol = 1e-12;
  if (rho > 1.0) return tanh_sinh_rule().integrate(f, 1.0, rho, tol);
  return -tanh_sinh_rule().integrate(f, rho, 1.0, tol);
}

double PressureLaw::H(double rho) const {
  check_density(rho);
  if (isentropic_) return a_ * (std::pow(rho, gamma_) - rho) / (gamma_ - 1.0);
  if (rho == 0.0) return 0.0;
  return rho * integral_from_one(rho);
}

double PressureLaw::dH(double rho) const {
  check_density(rho);
  if (isentropic_) return a_ * (gamma_ * std::pow(rho, gamma_ - 1.0) - 1.0) / (gamma_ - 1.0);
  if (rho == 0.0) return integral_from_one(0.0) + dp_(0.0);
  return integral_from_one(rho) + p_(rho) / rho;
}

double PressureLaw::d2H(double rho) const {
  check_density(rho);
  if (rho == 0.0) throw DomainError("H'' is singular at zero density");
  return dp(rho) / rho;
}

double RegularizationParams::pressure_coefficient() const {
  return kappa_tilde != 0 ? std::pow(h, eta) : 0.0;
}

double RegularizationParams::diffusion_coefficient() const {
  return kappa != 0 ? std::pow(h, omega) : 0.0;
}

std::string RegularizationParams::range_warning() const {
  if (kappa_tilde == 0) return {};
  const double upper = kappa != 0 ? std::min(2.0 * omega, 2.0 / 3.0) : 2.0 / 3.0;
  if (eta > 0.0 && eta < upper) return {};
  std::ostringstream os;
  os << "eta = " << eta << " outside the admissible range (0, " << upper << ")";
  if (kappa != 0) os << " = (0, min{2 omega, 2/3})";
  os << " for kappa_tilde = 1, kappa = " << kappa;
  return os.str();
}

Regularized regularized(const PressureLaw& law, const RegularizationParams& reg, double rho) {
  const double extra = reg.pressure_coefficient() * rho * rho;
  return {law.p(rho) + extra, law.H(rho) + extra};
}

double p_h(const PressureLaw& law, const RegularizationParams& reg, double rho) {
  return law.p(rho) + reg.pressure_coefficient() * rho * rho;
}

double H_h(const PressureLaw& law, const RegularizationParams& reg, double rho) {
  return law.H(rho) + reg.pressure_coefficient() * rho * rho;
}

double dH_h(const PressureLaw& law, const RegularizationParams& reg, double rho) {
  return law.dH(rho) + 2.0 * reg.pressure_coefficient() * rho;
}

double rel_entropy_B(const std::function<double(double)>& B, const std::function<double(double)>& dB, double rho,
                     double r) {
  return B(rho) - dB(r) * (rho - r) - B(r);
}

double rel_entropy(const PressureLaw& law, double rho, double r) {
  if (!(r > 0.0)) throw DomainError("relative entropy needs r > 0");
  return law.H(rho) - law.dH(r) * (rho - r) - law.H(r);
}

double rel_entropy_h(const PressureLaw& law, const RegularizationParams& reg, double rho, double r) {
  return rel_entropy(law, rho, r) + reg.pressure_coefficient() * (rho - r) * (rho - r);
}

RelativeEnergy relative_energy(const QField& rho, const QVecField& w, const ScalarFunction& r, const VectorFunction& V,
                               const PressureLaw& law, const RegularizationParams& reg, int degree) {
  const TetMesh& mesh = rho.mesh();
  const double c = reg.pressure_coefficient();
  RelativeEnergy e{0.0, 0.0};
  for (std::size_t kk = 0; kk < mesh.num_elements(); ++kk) {
    const int k = static_cast<int>(kk);
    const double rk = rho[kk];
    const Vec3& wk = w[kk];
    const Vec3 both = integrate_element(
        mesh, k,
        [&](const Vec3& x) {
          const double rx = r(x);
          if (!(rx > 0.0)) throw DomainError("reference density must be positive");
          return Vec3(0.5 * rk * (wk - V(x)).squaredNorm(), rel_entropy(law, rk, rx), (rk - rx) * (rk - rx));
        },
        degree);
    e.value += both[0] + both[1];
    e.value_h += both[0] + both[1] + c * both[2];
  }
  return e;
}

double coercivity_constant(const PressureLaw& law, double a, double b, double rho_max, int samples) {
  if (!(a > 0.0) || !(b > a)) throw DomainError("coercivity needs 0 < a < b");
  const double lo = 0.5 * a, hi = 2.0 * b;
  std::vector<double> rhos;
  for (int i = 0; i <= samples; ++i) rhos.push_back(rho_max * i / samples);
  for (int i = 0; i <= samples; ++i) rhos.push_back(lo + (hi - lo) * i / samples);
  for (double x : {lo, hi}) {
    rhos.push_back(std::nextafter(x, 0.0));
    rhos.push_back(std::nextafter(x, rho_max));
  }
  double best = std::numeric_limits<double>::infinity();
  const int nr = std::max(8, samples / 10);
  for (int j = 0; j <= nr; ++j) {
    const double r = a + (b - a) * j / nr;
    for (double rho : rhos) {
      const bool ess = rho >= lo && rho <= hi;
      double ratio;
      if (ess) {
        const double d = rho - r;
        ratio = std::abs(d) < 1e-6 * r ? 0.5 * law.d2H(r) : rel_entropy(law, rho, r) / (d * d);
      } else {
        ratio = rel_entropy(law, rho, r) / (1.0 + rho + law.p(rho));
      }
      best = std::min(best, ratio);
    }
  }
  return best;
}

double min_second_difference(const std::function<double(double)>& f, double lo, double hi, int n) {
  const double dx = (hi - lo) / n;
  double m = std::numeric_limits<double>::infinity();
  for (int i = 1; i < n; ++i) {
    const double x = lo + i * dx;
    m = std::min(m, (f(x - dx) - 2.0 * f(x) + f(x + dx)) / (dx * dx));
  }
  return m;
}

}  // namespace crfv
