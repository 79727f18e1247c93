#pragma once

#include <complex>
#include <string>
#include <vector>

#include "snls/graph.hpp"
#include "snls/model.hpp"
#include "snls/state.hpp"

namespace snls {

struct PlaneWaveSpec {
  int mode = 0;
  double amplitude = 0.0;  // 0 selects the normalized 1/sqrt(N)
};

double wavenumber(const PlaneWaveSpec& spec, const Graph& ring);
double frequency(const PlaneWaveSpec& spec, const Graph& ring);  // K^2 / 2

// rho_j = A^2, S_j = K x_j (unwrapped); the seam edge carries winding `mode`
// so every edge sees the same phase step K dx. NotALattice on general graphs.
MadelungState plane_wave_state(const PlaneWaveSpec& spec, const Graph& ring);

enum class Equation { kSnls1, kSnls2 };

struct NonlinearResidual {
  double rho = 0.0;  // |d rho|_inf
  double s = 0.0;    // |d S + mu|_inf
};

// Madelung field of the plane wave against the exact relation: drift part for
// snls1 (noise enters S additively and cancels), Stratonovich coefficient for
// snls2.
NonlinearResidual nonlinear_dispersion_residual(const PlaneWaveSpec& spec, const Graph& ring,
                                                double sigma, Equation which);

// Coefficients C_l on integer neighbor offsets l (positions x_j + l dx).
struct LinearStencil {
  std::string name;
  std::vector<int> offsets;
  std::vector<double> coeffs;
};

LinearStencil second_difference_stencil(double dx);

// K^2/2 + 1/2 sum_l C_l exp(i K l dx); zero iff the plane wave solves the
// linear scheme with mu = K^2/2.
std::complex<double> linear_dispersion_defect(const LinearStencil& stencil,
                                              const PlaneWaveSpec& spec, const Graph& ring);
double linear_dispersion_residual(const LinearStencil& stencil, const PlaneWaveSpec& spec,
                                  const Graph& ring);

struct DispersionRow {
  int mode = 0;
  double k = 0.0;
  double mu = 0.0;
  std::string scheme;
  double residual_real = 0.0;
  double residual_imag = 0.0;
};

// One row per (mode, scheme). The nonlinear row reports the S residual as the
// real part and the rho residual as the imaginary part.
std::vector<DispersionRow> scan_wavenumbers(const Graph& ring, double sigma,
                                            const std::vector<LinearStencil>& stencils,
                                            const std::vector<int>& modes,
                                            Equation which = Equation::kSnls1);

}  // namespace snls
