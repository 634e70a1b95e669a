#pragma once

// Analytical model of the capacitive L-network: a shunt capacitor Cp at
// the source side followed by a series capacitor Cs toward the load.
// All quantities are SI (farads, hertz, ohms); picofarads appear only at
// I/O boundaries elsewhere in the project.

#include <complex>
#include <vector>

namespace ltune::circuit {

using Complex = std::complex<double>;

struct CircuitParams {
  double cp = 0.0;  // shunt capacitance [F]
  double cs = 0.0;  // series capacitance [F]
  double f = 0.0;   // operating frequency [Hz]
  double rs = 50.0; // source resistance [ohm]

  bool valid() const { return cp > 0.0 && cs > 0.0 && f > 0.0 && rs > 0.0; }
};

struct CapPair {
  double cp = 0.0;  // [F]
  double cs = 0.0;  // [F]
};

struct GammaGradient {
  double d_cp = 0.0;  // d|Gamma|/dCp [1/F]
  double d_cs = 0.0;  // d|Gamma|/dCs [1/F]
};

// Input impedance seen from the source:
//   Z_in = 1 / (jBp + 1 / (Z_L + 1/(jBs))),  Bp = w*Cp, Bs = w*Cs.
// Throws std::domain_error when a denominator degenerates.
Complex input_impedance(const CircuitParams& params, Complex zl);

// (Z_in - Rs) / (Z_in + Rs). Throws std::domain_error on a zero denominator.
Complex reflection_coefficient(Complex zin, double rs);

// Load impedance that is perfectly matched by (cp, cs) at frequency f:
//   Z_L = 1/(1/Rs - jBp) + j/Bs.
Complex load_from_optimal_caps(double cp_opt, double cs_opt, double f,
                               double rs = 50.0);

// Real positive (cp, cs) solutions of the conjugate-matching equations.
// Returns 0-2 pairs; empty when the load is outside the matching range or
// already matched (R_L = Rs, X_L = 0, where the expressions degenerate).
std::vector<CapPair> closed_form_caps(Complex zl, double f, double rs = 50.0);

// |reflection_coefficient(input_impedance(...))| convenience.
double gamma_magnitude(const CircuitParams& params, Complex zl);

// Exact first derivatives of |Gamma| w.r.t. the capacitances, computed by
// forward-mode dual-number arithmetic through the circuit equations.
// Throws std::domain_error when |Gamma| < 1e-12 (magnitude not
// differentiable at zero).
GammaGradient gamma_magnitude_gradient(const CircuitParams& params,
                                       Complex zl);

}  // namespace ltune::circuit
