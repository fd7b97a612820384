#pragma once

#include <vector>

#include "openqx/density.hpp"
#include "openqx/greens.hpp"
#include "openqx/types.hpp"

namespace openqx {

// Green functions at one instant dressed by the bath occupation:
// A~ = I - u^dag (1 +/- v)^{-1} u, u~ = (1 +/- v)^{-1} u, w = v (1 +/- v)^{-1}.
struct DressedMatrices {
  Statistics statistics = Statistics::Fermion;
  ComplexMatrix u;
  ComplexMatrix v;
  ComplexMatrix a_tilde;
  ComplexMatrix u_tilde;
  ComplexMatrix thermal_weight;
};

DressedMatrices dress(const ComplexMatrix& u, const ComplexMatrix& v,
                      Statistics statistics);

struct ThermalState {
  DensityMatrix state;      // trace renormalized to 1 after truncation
  ComplexMatrix raw;        // un-renormalized populations, used in assembly
  double truncation_mass = 0.0;
};

// Gaussian state exp(a^dag ln(v/(1 +/- v)) a) / |1 +/- v|^{+/-1} over the
// truncated basis: diagonalize v, fill the rotated-mode occupations, rotate
// back through the Fock representation of the eigenvector unitary.
ThermalState thermal_like_state(const ComplexMatrix& v, const FockBasis& basis);

struct EvolutionReport {
  double trace_deviation = 0.0;        // before symmetrization/renormalization
  double hermiticity_deviation = 0.0;  // asymmetry removed by the final fix
  double thermal_truncation_mass = 0.0;
};

// Exact reduced density matrix: stream subsequence splits for every nonzero
// rho_IJ(0), weight them with the permanent/determinant of the replicated
// A~ submatrix, and apply the dressed creation/annihilation strings to the
// thermal-like core.
DensityMatrix evolve_exact(const DensityMatrix& rho0,
                           const DressedMatrices& dressed,
                           EvolutionReport* report = nullptr);

// <eta*| rho |eta> from the assembled matrix (unnormalized coherent states).
Complex coherent_overlap(const DensityMatrix& rho, const ComplexVector& eta);

// Same element from the closed form, bypassing the Fock assembly. Bosons
// only; the two routes are mutual oracles.
Complex coherent_matrix_element(const DensityMatrix& rho0,
                                const DressedMatrices& dressed,
                                const ComplexVector& eta);

struct MasterEqCoefficients {
  TimeGrid grid;
  std::vector<ComplexMatrix> eps_tilde;
  std::vector<ComplexMatrix> gamma;
  std::vector<ComplexMatrix> gamma_tilde;
};

// Time-local coefficients from kappa = du/dt u^{-1}: eps~ = (i/2)(k - k^dag),
// gamma = -(k + k^dag)/2, gamma~ = dv/dt - k v - v k^dag. Centered finite
// differences, one-sided at the ends.
MasterEqCoefficients extract_me_coefficients(const GreenPair& pair);

// RK4 over the truncated-basis superoperator; returns the state at every
// index in `indices` (the full grid when empty).
std::vector<DensityMatrix> integrate_master_equation(
    const DensityMatrix& rho0, const MasterEqCoefficients& coeffs,
    const std::vector<int>& indices = {});

}  // namespace openqx
