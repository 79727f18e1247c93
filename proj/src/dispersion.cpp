#include "snls/dispersion.hpp"

#include <cmath>
#include <numbers>

#include "snls/errors.hpp"
#include "snls/geometry.hpp"

namespace snls {

namespace {

void require_ring(const Graph& g) {
  if (!g.is_ring_lattice()) fail(ErrorKind::kNotALattice, "dispersion needs a periodic ring lattice");
}

}  // namespace

double wavenumber(const PlaneWaveSpec& spec, const Graph& ring) {
  require_ring(ring);
  return 2.0 * std::numbers::pi * spec.mode / (ring.n_nodes() * ring.spacing());
}

double frequency(const PlaneWaveSpec& spec, const Graph& ring) {
  const double k = wavenumber(spec, ring);
  return 0.5 * k * k;
}

MadelungState plane_wave_state(const PlaneWaveSpec& spec, const Graph& ring) {
  require_ring(ring);
  const int n = ring.n_nodes();
  const double amp = spec.amplitude > 0.0 ? spec.amplitude : 1.0 / std::sqrt(static_cast<double>(n));
  const double k = wavenumber(spec, ring);
  MadelungState st;
  st.rho = Eigen::VectorXd::Constant(n, amp * amp);
  st.s.resize(n);
  for (int j = 0; j < n; ++j) st.s[j] = k * ring.coords()[j];
  st.winding.assign(ring.n_edges(), 0);
  st.winding[*ring.edge_index(0, n - 1)] = spec.mode;
  return st;
}

NonlinearResidual nonlinear_dispersion_residual(const PlaneWaveSpec& spec, const Graph& ring,
                                                double sigma, Equation which) {
  const MadelungState st = plane_wave_state(spec, ring);
  const int n = ring.n_nodes();
  const double mu = frequency(spec, ring);
  ModelParams p = which == Equation::kSnls1 ? snls1_params(n) : snls2_params(n);
  p.sigma.setConstant(sigma);
  // The averaged weight is what makes omega = 1/dx^2 the lattice weight.
  p.theta_kind = ThetaKind::kAveraged;
  const VectorField f = hamiltonian_vector_field(st, ring, p, which == Equation::kSnls1 ? Which::kH0 : Which::kH1);
  return {f.drho.lpNorm<Eigen::Infinity>(), (f.ds.array() + mu).abs().maxCoeff()};
}

LinearStencil second_difference_stencil(double dx) {
  const double c = 1.0 / (dx * dx);
  return {"second_difference", {-1, 0, 1}, {c, -2.0 * c, c}};
}

std::complex<double> linear_dispersion_defect(const LinearStencil& stencil,
                                              const PlaneWaveSpec& spec, const Graph& ring) {
  if (stencil.offsets.size() != stencil.coeffs.size()) {
    fail(ErrorKind::kShapeMismatch, "stencil offsets and coefficients differ in length");
  }
  const double k = wavenumber(spec, ring);
  std::complex<double> sum = 0.0;
  for (std::size_t l = 0; l < stencil.offsets.size(); ++l) {
    sum += stencil.coeffs[l] * std::polar(1.0, k * stencil.offsets[l] * ring.spacing());
  }
  return 0.5 * k * k + 0.5 * sum;
}

double linear_dispersion_residual(const LinearStencil& stencil, const PlaneWaveSpec& spec,
                                  const Graph& ring) {
  return std::abs(linear_dispersion_defect(stencil, spec, ring));
}

std::vector<DispersionRow> scan_wavenumbers(const Graph& ring, double sigma,
                                            const std::vector<LinearStencil>& stencils,
                                            const std::vector<int>& modes, Equation which) {
  require_ring(ring);
  std::vector<DispersionRow> rows;
  for (int m : modes) {
    const PlaneWaveSpec spec{m, 0.0};
    const double k = wavenumber(spec, ring);
    const double mu = 0.5 * k * k;
    const NonlinearResidual nl = nonlinear_dispersion_residual(spec, ring, sigma, which);
    rows.push_back({m, k, mu, "nonlinear", nl.s, nl.rho});
    for (const auto& st : stencils) {
      const std::complex<double> d = linear_dispersion_defect(st, spec, ring);
      rows.push_back({m, k, mu, st.name, d.real(), d.imag()});
    }
  }
  return rows;
}

}  // namespace snls
