#include "lrdx/heavy_tails.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lrdx {

double iterated_exp(int depth, double x) {
  for (int i = 0; i < depth; ++i) x = std::exp(x);
  return x;
}

double iterated_log(int depth, double x) {
  for (int i = 0; i < depth; ++i) x = std::log(x);
  return x;
}

TailModel::TailModel(TailFamily family, int depth, double gamma, double scale)
    : family_(family), depth_(depth), gamma_(gamma), scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("tail scale must be positive");
}

TailModel TailModel::log_normal(double gamma, double scale) {
  if (!(gamma > 1.0) || !std::isfinite(gamma)) throw std::invalid_argument("log-normal tail needs gamma > 1");
  return TailModel(TailFamily::LogNormal, 0, gamma, scale);
}

TailModel TailModel::super_log_normal(int depth, double gamma, double scale) {
  if (depth < 1) throw std::invalid_argument("super-log-normal tail needs depth >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("super-log-normal tail needs gamma in (0,1)");
  return TailModel(TailFamily::SuperLogNormal, depth, gamma, scale);
}

double TailModel::threshold() const {
  return family_ == TailFamily::LogNormal ? 1.0 : iterated_exp(depth_, 0.0);
}

double TailModel::quantile_threshold() const {
  return family_ == TailFamily::LogNormal ? 1.0 : iterated_exp(depth_ + 1, 0.0);
}

double TailModel::alpha() const { return family_ == TailFamily::LogNormal ? 1.0 / gamma_ : 0.0; }

double TailModel::growth_delta() const {
  // For super-log-normal tails zeta grows like (log u)^(1/gamma - 1), so the
  // exponent has to sit strictly below that for the ratio to diverge.
  if (family_ == TailFamily::LogNormal) return std::min(1.0, 1.0 / (2.0 * gamma_));
  return std::min(1.0, (1.0 / gamma_ - 1.0) / 2.0);
}

double TailModel::log_tail(double x) const {
  const double x0 = threshold();
  if (!(x >= x0)) throw std::domain_error("log_tail: x below support threshold");
  if (family_ == TailFamily::LogNormal) return std::pow(std::log(x), gamma_);
  return iterated_exp(depth_, std::pow(iterated_log(depth_, x), gamma_));
}

double TailModel::log_tail_derivative(double x) const {
  if (!(x > threshold())) throw std::domain_error("log_tail_derivative: x must be inside the support");
  if (family_ == TailFamily::LogNormal) {
    return gamma_ * std::pow(std::log(x), gamma_ - 1.0) / x;
  }
  // log g' = sum_{i<d} E_i(s) + log gamma + (gamma-1) log y - sum_{i=1..d} L_i(x),
  // with y = L_d(x), s = y^gamma.
  const double y = iterated_log(depth_, x);
  const double s = std::pow(y, gamma_);
  double lg = std::log(gamma_) + (gamma_ - 1.0) * std::log(y);
  double e = s;
  for (int i = 0; i < depth_; ++i) {
    lg += e;
    e = std::exp(e);
  }
  double l = x;
  for (int i = 1; i <= depth_; ++i) {
    l = std::log(l);
    lg -= l;
  }
  return std::exp(lg);
}

double TailModel::tail(double x) const {
  if (x <= threshold()) return 1.0;
  return std::exp(-log_tail(x));
}

double TailModel::levy_tail(double x) const { return scale_ * tail(x); }

double TailModel::auxiliary_h(double u) const {
  if (!(u > threshold()) || !std::isfinite(u)) throw std::domain_error("auxiliary_h: u must be strictly inside the support");
  if (family_ == TailFamily::LogNormal) {
    return u / (gamma_ * std::pow(std::log(u), gamma_ - 1.0));
  }
  return 1.0 / log_tail_derivative(u);
}

double TailModel::zeta(double u) const {
  if (family_ == TailFamily::LogNormal) {
    if (!(u > 0.0)) throw std::domain_error("zeta: argument must be positive");
    return std::pow(u, 1.0 / gamma_) / gamma_;
  }
  if (!(u > iterated_exp(depth_, 0.0))) throw std::domain_error("zeta: argument below the representation threshold");
  // log zeta = -log gamma + (1/gamma-1) log w + sum_{i<=d-2} E_i(s) - sum_{i=2..d} L_i(u),
  // with w = L_d(u), s = w^(1/gamma).
  const double w = iterated_log(depth_, u);
  const double s = std::pow(w, 1.0 / gamma_);
  double lz = -std::log(gamma_) + (1.0 / gamma_ - 1.0) * std::log(w);
  double e = s;
  for (int i = 0; i + 2 <= depth_; ++i) {
    lz += e;
    e = std::exp(e);
  }
  double l = std::log(u);
  for (int i = 2; i <= depth_; ++i) {
    l = std::log(l);
    lz -= l;
  }
  return std::exp(lz);
}

double TailModel::quantile_sharp(double z) const {
  if (z <= quantile_threshold()) return threshold();
  const double lz = std::log(z);
  if (family_ == TailFamily::LogNormal) return std::exp(std::pow(lz, 1.0 / gamma_));
  // g(x) = log z  <=>  (L_d x)^gamma = L_{d+1} z
  return iterated_exp(depth_, std::pow(iterated_log(depth_, lz), 1.0 / gamma_));
}

double TailModel::quantile_sharp_numeric(double z) const {
  const double x0 = threshold();
  if (z <= quantile_threshold()) return x0;
  const double target = std::log(z);
  double lo = x0;
  double hi = 2.0 * x0;
  int guard = 0;
  while (log_tail(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 2000 || !std::isfinite(hi)) throw std::runtime_error("quantile bracket failed");
  }
  for (int it = 0; it < 4000 && (hi - lo) > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (log_tail(mid) < target) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double TailModel::quantile_V(double z) const {
  if (!(z > z0())) return 0.0;
  return quantile_sharp(scale_ * z);
}

double pitman_integral(const TailModel& model, double x_max) {
  const double x0 = model.threshold();
  if (!(x_max > x0)) return 0.0;
  // Integrate in y = log x for better conditioning over many decades.
  auto f = [&](double y) {
    const double x = std::exp(y);
    if (!(x > x0)) return 0.0;
    const double gp = model.log_tail_derivative(x);
    return std::exp(x * gp - model.log_tail(x)) * gp * x;
  };
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, std::log(x0), std::log(x_max), 20, 1e-12, &err);
  if (!std::isfinite(value) || err > 1e-6 * std::max(1.0, std::fabs(value))) {
    throw std::runtime_error("pitman_integral: quadrature did not converge (error " + std::to_string(err) + ")");
  }
  return value;
}

GumbelNorming iid_gumbel_norming(const TailModel& model, double n) {
  if (!(n >= 2.0) || !(n > model.z0())) throw std::domain_error("iid_gumbel_norming: n below z0");
  const double b = model.quantile_V(n);
  if (!(b > model.threshold())) throw std::domain_error("iid_gumbel_norming: level n inside the threshold atom");
  return {model.auxiliary_h(b), b};
}

NormSeq lrd_norming(const TailModel& model, const MemoryParams& mem, double w_n, double theta_n) {
  if (!(w_n > 0.0) || !(theta_n > 0.0)) throw std::domain_error("lrd_norming: w_n and theta_n must be positive");
  const double vw = model.quantile_V(w_n);
  if (!(vw > model.threshold())) throw std::domain_error("n too small for norming");
  NormSeq out;
  out.w_n = w_n;
  out.theta_n = theta_n;
  out.b_n = mem.m() * vw + model.quantile_V(theta_n);
  out.a_n = model.auxiliary_h(vw);
  return out;
}

std::vector<TailCheck> tail_diagnostics(const TailModel& model) {
  std::vector<TailCheck> out;
  const double c = model.scale();

  double worst = 0.0;
  const double z_lo = 10.0 * std::max(model.z0(), model.quantile_threshold() / c);
  for (int i = 0; i <= 120; ++i) {
    const double z = z_lo * std::pow(10.0, i / 10.0);
    worst = std::max(worst, std::fabs(z * model.levy_tail(model.quantile_V(z)) - 1.0));
  }
  out.push_back({"inverse_pair_max_rel_error", worst, 1e-9, true, worst <= 1e-9});

  // Hbar(2t)/Hbar(t) in log space; must shrink as t grows.
  const double x0 = std::max(model.threshold(), 1.0);
  double prev = 2.0;
  bool falling = true;
  for (double t : {1e2, 1e4, 1e8, 1e16}) {
    const double u = x0 * t;
    const double r = std::exp(model.log_tail(u) - model.log_tail(2.0 * u));
    falling = falling && r < prev;
    prev = r;
    out.push_back({"rapid_variation_ratio_x2_t" + std::to_string(static_cast<int>(std::log10(t))), r, 0.0, false, true});
  }
  out.push_back({"rapid_variation_decreasing", falling ? 1.0 : 0.0, 1.0, true, falling});

  const double t = model.quantile_V(1e12);
  const double ht = model.auxiliary_h(t);
  for (double x : {0.5, 1.0, 2.0}) {
    const double r = std::exp(model.log_tail(t + x * ht) - model.log_tail(t));
    out.push_back({"gamma_variation_rel_error_x" + std::to_string(x).substr(0, 3), std::fabs(r / std::exp(x) - 1.0),
                   0.0, false, true});
  }
  const double vt = model.quantile_V(1e12);
  const double hv = model.auxiliary_h(vt);
  for (double x : {2.0, std::exp(1.0)}) {
    const double r = (model.quantile_V(1e12 * x) - vt) / hv;
    out.push_back({"pi_variation_rel_error_x" + std::to_string(x).substr(0, 4), std::fabs(r / std::log(x) - 1.0), 0.0,
                   false, true});
  }
  const double big_l = std::log(1e12);
  const double pert = (model.quantile_V(1e12 * big_l) - vt) / hv / std::log(big_l);
  out.push_back({"perturbation_ratio_over_log_L", pert, 1.0, false, true});
  return out;
}

}  // namespace lrdx
