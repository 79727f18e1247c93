#include "snls/geometry.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "snls/errors.hpp"

namespace snls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_domain(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) {
    fail(ErrorKind::kOutOfDomain,
         "theta needs positive arguments, got (" + std::to_string(x) + ", " + std::to_string(y) + ")");
  }
}

// Logarithmic mean written as m g(e) with m = (x+y)/2, e = (x-y)/(x+y) and
// g(e) = e / atanh(e). Series below |e| = 1e-2.
constexpr double kSeriesCut = 1e-2;

double log_g(double e) {
  if (std::abs(e) < kSeriesCut) {
    const double e2 = e * e;
    return 1.0 - e2 * (1.0 / 3.0 + e2 * (4.0 / 45.0 + e2 * (44.0 / 945.0 + e2 * 0.030194)));
  }
  return e / std::atanh(e);
}

double log_dg(double e) {
  if (std::abs(e) < kSeriesCut) {
    const double e2 = e * e;
    return -e * (2.0 / 3.0 + e2 * (16.0 / 45.0 + e2 * (264.0 / 945.0 + e2 * 8.0 * 0.030194)));
  }
  const double a = std::atanh(e);
  return (a - e / (1.0 - e * e)) / (a * a);
}

inline double theta_unchecked(double x, double y, ThetaKind kind) {
  switch (kind) {
    case ThetaKind::kAveraged: return 0.5 * (x + y);
    case ThetaKind::kHarmonic: return 2.0 * x * y / (x + y);
    case ThetaKind::kLogarithmic: {
      const double m = 0.5 * (x + y);
      return m * log_g((x - y) / (x + y));
    }
  }
  return 0.0;
}

inline void dtheta_unchecked(double x, double y, ThetaKind kind, double& dx, double& dy) {
  switch (kind) {
    case ThetaKind::kAveraged:
      dx = 0.5;
      dy = 0.5;
      return;
    case ThetaKind::kHarmonic: {
      const double inv = 1.0 / ((x + y) * (x + y));
      dx = 2.0 * y * y * inv;
      dy = 2.0 * x * x * inv;
      return;
    }
    case ThetaKind::kLogarithmic: {
      const double e = (x - y) / (x + y);
      const double g0 = log_g(e);
      const double g1 = log_dg(e);
      dx = 0.5 * (g0 + (1.0 - e) * g1);
      dy = 0.5 * (g0 - (1.0 + e) * g1);
      return;
    }
  }
}

double phase_diff(const Graph& g, const Eigen::VectorXd& s, const std::vector<int>& winding,
                  int k) {
  const auto& e = g.edges()[k];
  double d = s[e.a] - s[e.b];
  if (!winding.empty() && winding[k] != 0) d += kTwoPi * winding[k];
  return d;
}

}  // namespace

double theta(double x, double y, ThetaKind kind) {
  check_domain(x, y);
  return theta_unchecked(x, y, kind);
}

std::pair<double, double> dtheta(double x, double y, ThetaKind kind) {
  check_domain(x, y);
  double dx = 0.0;
  double dy = 0.0;
  dtheta_unchecked(x, y, kind, dx, dy);
  return {dx, dy};
}

Eigen::VectorXd grad_G(const Eigen::VectorXd& s, const Graph& g) {
  Eigen::VectorXd out(g.n_edges());
  for (int k = 0; k < g.n_edges(); ++k) {
    const auto& e = g.edges()[k];
    out[k] = std::sqrt(e.omega) * (s[e.a] - s[e.b]);
  }
  return out;
}

double edge_value(const Graph& g, const Eigen::VectorXd& field, int i, int j) {
  const auto k = g.edge_index(i, j);
  if (!k) return 0.0;
  return g.edges()[*k].a == i ? field[*k] : -field[*k];
}

Eigen::VectorXd div_theta(const Eigen::VectorXd& rho, const Eigen::VectorXd& s, const Graph& g,
                          ThetaKind kind, const std::vector<int>& winding) {
  require_interior(rho);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.n_nodes());
  for (int k = 0; k < g.n_edges(); ++k) {
    const auto& e = g.edges()[k];
    const double flux = e.omega * theta_unchecked(rho[e.a], rho[e.b], kind) *
                        phase_diff(g, s, winding, k);
    out[e.a] -= flux;
    out[e.b] += flux;
  }
  return out;
}

double kinetic_energy(const Eigen::VectorXd& rho, const Eigen::VectorXd& s, const Graph& g,
                      ThetaKind kind, const std::vector<int>& winding) {
  require_interior(rho);
  double k_sum = 0.0;
  for (int k = 0; k < g.n_edges(); ++k) {
    const auto& e = g.edges()[k];
    const double d = phase_diff(g, s, winding, k);
    k_sum += e.omega * d * d * theta_unchecked(rho[e.a], rho[e.b], kind);
  }
  return 0.5 * k_sum;
}

KineticGradient kinetic_gradient(const Eigen::VectorXd& rho, const Eigen::VectorXd& s,
                                 const Graph& g, ThetaKind kind,
                                 const std::vector<int>& winding) {
  require_interior(rho);
  KineticGradient out{Eigen::VectorXd::Zero(g.n_nodes()), Eigen::VectorXd::Zero(g.n_nodes())};
  for (int k = 0; k < g.n_edges(); ++k) {
    const auto& e = g.edges()[k];
    const double d = phase_diff(g, s, winding, k);
    double da = 0.0;
    double db = 0.0;
    dtheta_unchecked(rho[e.a], rho[e.b], kind, da, db);
    const double flux = e.omega * d * theta_unchecked(rho[e.a], rho[e.b], kind);
    out.d_s[e.a] += flux;
    out.d_s[e.b] -= flux;
    out.d_rho[e.a] += 0.5 * e.omega * d * d * da;
    out.d_rho[e.b] += 0.5 * e.omega * d * d * db;
  }
  return out;
}

double fisher_information(const Eigen::VectorXd& rho, const Graph& g, ThetaKind tilde_kind) {
  require_interior(rho);
  double sum = 0.0;
  for (const auto& e : g.edges()) {
    const double l = std::log(rho[e.a]) - std::log(rho[e.b]);
    if (tilde_kind == ThetaKind::kLogarithmic) {
      sum += e.omega_tilde * l * (rho[e.a] - rho[e.b]);
    } else {
      sum += e.omega_tilde * l * l * theta_unchecked(rho[e.a], rho[e.b], tilde_kind);
    }
  }
  return sum;
}

Eigen::VectorXd fisher_gradient(const Eigen::VectorXd& rho, const Graph& g, ThetaKind tilde_kind) {
  require_interior(rho);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.n_nodes());
  for (const auto& e : g.edges()) {
    const double ra = rho[e.a];
    const double rb = rho[e.b];
    const double l = std::log(ra) - std::log(rb);
    if (tilde_kind == ThetaKind::kLogarithmic) {
      out[e.a] += e.omega_tilde * ((ra - rb) / ra + l);
      out[e.b] += e.omega_tilde * ((rb - ra) / rb - l);
    } else {
      const double th = theta_unchecked(ra, rb, tilde_kind);
      double da = 0.0;
      double db = 0.0;
      dtheta_unchecked(ra, rb, tilde_kind, da, db);
      out[e.a] += e.omega_tilde * (2.0 * l * th / ra + l * l * da);
      out[e.b] += e.omega_tilde * (-2.0 * l * th / rb + l * l * db);
    }
  }
  return out;
}

ScalarPotentials scalar_potentials(const Eigen::VectorXd& rho, const ModelParams& p) {
  require_interior(rho);
  ScalarPotentials out;
  out.potential = p.V.dot(rho);
  out.interaction = 0.5 * rho.dot(p.W * rho);
  out.noise = p.sigma.dot(rho);
  for (int i = 0; i < rho.size(); ++i) out.entropy += rho[i] * std::log(rho[i]) - rho[i];
  return out;
}

ScalarPotentialGradients scalar_potential_gradients(const Eigen::VectorXd& rho,
                                                    const ModelParams& p) {
  require_interior(rho);
  return {p.V, p.W * rho, rho.array().log().matrix(), p.sigma};
}

EnergyTerms energy_terms(const MadelungState& st, const Graph& g, const ModelParams& p) {
  require_compatible(st, g);
  EnergyTerms t;
  t.kinetic = kinetic_energy(st.rho, st.s, g, p.theta_kind, st.winding);
  t.fisher = fisher_information(st.rho, g, p.theta_tilde_kind);
  t.scalars = scalar_potentials(st.rho, p);
  return t;
}

double combine(const EnergyTerms& t, const HamiltonianCoeffs& c) {
  return c.kinetic * t.kinetic + c.fisher * t.fisher + c.potential * t.scalars.potential +
         c.interaction * t.scalars.interaction + c.entropy * t.scalars.entropy +
         c.noise * t.scalars.noise;
}

Hamiltonians hamiltonians(const MadelungState& st, const Graph& g, const ModelParams& p) {
  const EnergyTerms t = energy_terms(st, g, p);
  return {combine(t, coefficients(p, Which::kH0)), combine(t, coefficients(p, Which::kH1))};
}

double hamiltonian(const MadelungState& st, const Graph& g, const ModelParams& p, Which which) {
  return combine(energy_terms(st, g, p), coefficients(p, which));
}

void eval_field(const Graph& g, const ModelParams& p, const HamiltonianCoeffs& c,
                const Eigen::VectorXd& rho, const Eigen::VectorXd& s,
                const std::vector<int>& winding, Eigen::VectorXd& drho, Eigen::VectorXd& ds) {
  const int n = g.n_nodes();
  drho.setZero(n);
  ds.setZero(n);
  // ds accumulates dH/drho and is negated at the end.
  if (c.kinetic != 0.0) {
    for (int k = 0; k < g.n_edges(); ++k) {
      const auto& e = g.edges()[k];
      const double d = phase_diff(g, s, winding, k);
      const double ra = rho[e.a];
      const double rb = rho[e.b];
      double da = 0.0;
      double db = 0.0;
      dtheta_unchecked(ra, rb, p.theta_kind, da, db);
      const double flux = c.kinetic * e.omega * d * theta_unchecked(ra, rb, p.theta_kind);
      drho[e.a] += flux;
      drho[e.b] -= flux;
      const double half = 0.5 * c.kinetic * e.omega * d * d;
      ds[e.a] += half * da;
      ds[e.b] += half * db;
    }
  }
  if (c.fisher != 0.0) {
    for (const auto& e : g.edges()) {
      const double ra = rho[e.a];
      const double rb = rho[e.b];
      const double l = std::log(ra) - std::log(rb);
      const double w = c.fisher * e.omega_tilde;
      if (p.theta_tilde_kind == ThetaKind::kLogarithmic) {
        ds[e.a] += w * ((ra - rb) / ra + l);
        ds[e.b] += w * ((rb - ra) / rb - l);
      } else {
        const double th = theta_unchecked(ra, rb, p.theta_tilde_kind);
        double da = 0.0;
        double db = 0.0;
        dtheta_unchecked(ra, rb, p.theta_tilde_kind, da, db);
        ds[e.a] += w * (2.0 * l * th / ra + l * l * da);
        ds[e.b] += w * (-2.0 * l * th / rb + l * l * db);
      }
    }
  }
  if (c.potential != 0.0) ds.noalias() += c.potential * p.V;
  if (c.interaction != 0.0) ds.noalias() += c.interaction * (p.W * rho);
  if (c.entropy != 0.0) ds.array() += c.entropy * rho.array().log();
  if (c.noise != 0.0) ds.noalias() += c.noise * p.sigma;
  ds = -ds;
}

VectorField hamiltonian_vector_field(const MadelungState& st, const Graph& g,
                                     const ModelParams& p, Which which) {
  require_compatible(st, g);
  VectorField f;
  eval_field(g, p, coefficients(p, which), st.rho, st.s, st.winding, f.drho, f.ds);
  return f;
}

Eigen::MatrixXd field_jacobian(const MadelungState& st, const Graph& g, const ModelParams& p,
                               Which which) {
  require_compatible(st, g);
  const int n = g.n_nodes();
  const HamiltonianCoeffs c = coefficients(p, which);
  const double norm = std::sqrt(st.rho.squaredNorm() + st.s.squaredNorm());
  const double h = 1e-6 * (1.0 + norm);
  Eigen::MatrixXd jac(2 * n, 2 * n);
  Eigen::VectorXd rho = st.rho;
  Eigen::VectorXd s = st.s;
  Eigen::VectorXd fr_p, fs_p, fr_m, fs_m;
  for (int col = 0; col < 2 * n; ++col) {
    double& x = col < n ? rho[col] : s[col - n];
    const double saved = x;
    x = saved + h;
    eval_field(g, p, c, rho, s, st.winding, fr_p, fs_p);
    x = saved - h;
    eval_field(g, p, c, rho, s, st.winding, fr_m, fs_m);
    x = saved;
    jac.col(col).head(n) = (fr_p - fr_m) / (2.0 * h);
    jac.col(col).tail(n) = (fs_p - fs_m) / (2.0 * h);
  }
  return jac;
}

ComplexState madelung_to_complex(const MadelungState& st) {
  require_interior(st.rho);
  ComplexState u(st.rho.size());
  for (int j = 0; j < st.rho.size(); ++j) u[j] = std::polar(std::sqrt(st.rho[j]), st.s[j]);
  return u;
}

MadelungState complex_to_madelung(const ComplexState& u, const MadelungState* hint) {
  const int n = static_cast<int>(u.size());
  if (hint != nullptr && hint->s.size() != n) {
    fail(ErrorKind::kShapeMismatch, "branch hint has wrong length");
  }
  MadelungState st;
  st.rho.resize(n);
  st.s.resize(n);
  for (int j = 0; j < n; ++j) {
    const double amp = std::abs(u[j]);
    if (amp < 1e-14) fail(ErrorKind::kZeroAmplitude, "u[" + std::to_string(j) + "] vanishes");
    st.rho[j] = std::norm(u[j]);
    double phase = std::arg(u[j]);
    if (hint != nullptr) phase += kTwoPi * std::round((hint->s[j] - phase) / kTwoPi);
    st.s[j] = phase;
  }
  if (hint != nullptr) {
    st.winding = hint->winding;
    st.t = hint->t;
  }
  return st;
}

Eigen::MatrixXd madelung_tangent_map(const MadelungState& st) {
  const int n = st.n_nodes();
  const ComplexState u = madelung_to_complex(st);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    t(j, j) = u[j].real() / (2.0 * st.rho[j]);
    t(j, n + j) = -u[j].imag();
    t(n + j, j) = u[j].imag() / (2.0 * st.rho[j]);
    t(n + j, n + j) = u[j].real();
  }
  return t;
}

Eigen::MatrixXd complex_linearization(const MadelungState& st, const Eigen::MatrixXd& a,
                                      const VectorField& f) {
  const int n = st.n_nodes();
  const Eigen::MatrixXd t = madelung_tangent_map(st);
  if (a.rows() != 2 * n || a.cols() != 2 * n) {
    fail(ErrorKind::kShapeMismatch, "linearization must be 2N x 2N");
  }
  Eigen::MatrixXd lhs = t * a;
  const ComplexState u = madelung_to_complex(st);
  const std::complex<double> i(0.0, 1.0);
  for (int j = 0; j < n; ++j) {
    const double r = st.rho[j];
    const std::complex<double> by_rho = u[j] * (-f.drho[j] / (4.0 * r * r) + i * f.ds[j] / (2.0 * r));
    const std::complex<double> by_s = i * u[j] * (f.drho[j] / (2.0 * r) + i * f.ds[j]);
    lhs(j, j) += by_rho.real();
    lhs(n + j, j) += by_rho.imag();
    lhs(j, n + j) += by_s.real();
    lhs(n + j, n + j) += by_s.imag();
  }
  return lhs * t.inverse();
}

Eigen::MatrixXd complex_linearization(const MadelungState& st, const Graph& g,
                                      const ModelParams& params, Which which) {
  return complex_linearization(st, field_jacobian(st, g, params, which),
                               hamiltonian_vector_field(st, g, params, which));
}

ComplexState nonlinear_laplacian(const MadelungState& st, const Graph& g, ThetaKind kind,
                                 ThetaKind tilde_kind) {
  require_compatible(st, g);
  const int n = g.n_nodes();
  // Per node: flux_j = sum omega theta D^S, press_j = sum omega~ theta~ D^R,
  // curv_j = sum omega dtheta (D^S)^2 + omega~ dtheta~ (D^R)^2.
  Eigen::VectorXd flux = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd press = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd curv = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < g.n_edges(); ++k) {
    const auto& e = g.edges()[k];
    const double ra = st.rho[e.a];
    const double rb = st.rho[e.b];
    const double ds = phase_diff(g, st.s, st.winding, k);
    const double dr = 0.5 * (std::log(ra) - std::log(rb));
    const double th = theta_unchecked(ra, rb, kind);
    const double tt = theta_unchecked(ra, rb, tilde_kind);
    double da = 0.0, db = 0.0, ta = 0.0, tb = 0.0;
    dtheta_unchecked(ra, rb, kind, da, db);
    dtheta_unchecked(ra, rb, tilde_kind, ta, tb);
    flux[e.a] += e.omega * th * ds;
    flux[e.b] -= e.omega * th * ds;
    press[e.a] += e.omega_tilde * tt * dr;
    press[e.b] -= e.omega_tilde * tt * dr;
    curv[e.a] += e.omega * da * ds * ds + e.omega_tilde * ta * dr * dr;
    curv[e.b] += e.omega * db * ds * ds + e.omega_tilde * tb * dr * dr;
  }
  const ComplexState u = madelung_to_complex(st);
  ComplexState out(n);
  for (int j = 0; j < n; ++j) {
    const std::complex<double> bracket =
        std::complex<double>(press[j], flux[j]) / st.rho[j] + curv[j];
    out[j] = -u[j] * bracket;
  }
  return out;
}

ComplexState nonlinear_laplacian(const ComplexState& u, const Graph& g, ThetaKind kind,
                                 ThetaKind tilde_kind, const MadelungState* hint) {
  return nonlinear_laplacian(complex_to_madelung(u, hint), g, kind, tilde_kind);
}

}  // namespace snls
