#include "ltune/circuit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ltune::circuit {

namespace {

constexpr double kDenominatorFloor = 1e-300;

// Two-tangent dual number: value plus partials w.r.t. (cp, cs).
struct Dual2 {
  double v = 0.0;
  double dp = 0.0;
  double ds = 0.0;
};

Dual2 operator+(Dual2 a, Dual2 b) { return {a.v + b.v, a.dp + b.dp, a.ds + b.ds}; }
Dual2 operator-(Dual2 a, Dual2 b) { return {a.v - b.v, a.dp - b.dp, a.ds - b.ds}; }
Dual2 operator*(Dual2 a, Dual2 b) {
  return {a.v * b.v, a.dp * b.v + a.v * b.dp, a.ds * b.v + a.v * b.ds};
}
Dual2 operator/(Dual2 a, Dual2 b) {
  const double inv = 1.0 / b.v;
  const double q = a.v * inv;
  return {q, (a.dp - q * b.dp) * inv, (a.ds - q * b.ds) * inv};
}
Dual2 constant(double v) { return {v, 0.0, 0.0}; }
Dual2 sqrt(Dual2 a) {
  const double r = std::sqrt(a.v);
  const double half = 0.5 / r;
  return {r, a.dp * half, a.ds * half};
}

// Complex number with dual-valued components.
struct DualComplex {
  Dual2 re, im;
};

DualComplex operator+(DualComplex a, DualComplex b) {
  return {a.re + b.re, a.im + b.im};
}
DualComplex operator-(DualComplex a, DualComplex b) {
  return {a.re - b.re, a.im - b.im};
}
DualComplex operator/(DualComplex a, DualComplex b) {
  const Dual2 den = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}
DualComplex dc_constant(Complex z) {
  return {constant(z.real()), constant(z.imag())};
}
Dual2 abs(DualComplex z) { return sqrt(z.re * z.re + z.im * z.im); }

// |Gamma| as a dual function of (cp, cs) with seeded tangents.
Dual2 gamma_mag_dual(const CircuitParams& params, Complex zl) {
  const double w = 2.0 * std::numbers::pi * params.f;
  const Dual2 bp{w * params.cp, w, 0.0};
  const Dual2 bs{w * params.cs, 0.0, w};
  const DualComplex one = dc_constant(Complex{1.0, 0.0});
  const DualComplex j_bp{constant(0.0), bp};
  const DualComplex j_bs{constant(0.0), bs};
  const DualComplex zin = one / (j_bp + one / (dc_constant(zl) + one / j_bs));
  const DualComplex rs = dc_constant(Complex{params.rs, 0.0});
  return abs((zin - rs) / (zin + rs));
}

void check_params(const CircuitParams& params) {
  if (!params.valid()) {
    throw std::domain_error("circuit: parameters must be positive");
  }
}

}  // namespace

Complex input_impedance(const CircuitParams& params, Complex zl) {
  check_params(params);
  if (!std::isfinite(zl.real()) || !std::isfinite(zl.imag())) {
    throw std::domain_error("circuit: load impedance must be finite");
  }
  const double w = 2.0 * std::numbers::pi * params.f;
  const Complex j_bs{0.0, w * params.cs};
  if (std::abs(j_bs) < kDenominatorFloor) {
    throw std::domain_error("circuit: degenerate series branch");
  }
  const Complex series = zl + 1.0 / j_bs;
  if (std::abs(series) < kDenominatorFloor) {
    throw std::domain_error("circuit: degenerate series impedance");
  }
  const Complex admittance = Complex{0.0, w * params.cp} + 1.0 / series;
  if (std::abs(admittance) < kDenominatorFloor) {
    throw std::domain_error("circuit: degenerate input admittance");
  }
  return 1.0 / admittance;
}

Complex reflection_coefficient(Complex zin, double rs) {
  const Complex den = zin + rs;
  if (std::abs(den) == 0.0) {
    throw std::domain_error("circuit: reflection coefficient undefined");
  }
  return (zin - rs) / den;
}

Complex load_from_optimal_caps(double cp_opt, double cs_opt, double f,
                               double rs) {
  if (cp_opt <= 0.0 || cs_opt <= 0.0 || f <= 0.0 || rs <= 0.0) {
    throw std::domain_error("circuit: parameters must be positive");
  }
  const double w = 2.0 * std::numbers::pi * f;
  const double bp = w * cp_opt;
  const double bs = w * cs_opt;
  return 1.0 / Complex{1.0 / rs, -bp} + Complex{0.0, 1.0 / bs};
}

std::vector<CapPair> closed_form_caps(Complex zl, double f, double rs) {
  const double rl = zl.real();
  const double xl = zl.imag();
  const double w = 2.0 * std::numbers::pi * f;

  std::vector<CapPair> out;
  double disc = rl * rs - rl * rl;  // R_L*Rs - R_L^2
  if (std::abs(disc) <= 1e-15 * rl * rs) disc = 0.0;
  if (disc < 0.0 || rl <= 0.0) return out;

  // Already matched load: both closed-form denominators vanish.
  if (disc == 0.0 && std::abs(xl) < 1e-12 * rs) return out;

  const double root = std::sqrt(disc);
  const double cs_den = w * (rl * rl + xl * xl - rl * rs);
  for (double sign : {+1.0, -1.0}) {
    const double cp_num = disc + sign * xl * root;
    const double cp_den = w * (rl * xl * rs + sign * rl * rs * root);
    if (std::abs(cp_den) < kDenominatorFloor ||
        std::abs(cs_den) < kDenominatorFloor) {
      continue;
    }
    const CapPair pair{cp_num / cp_den, (xl + sign * root) / cs_den};
    if (pair.cp > 0.0 && pair.cs > 0.0 && std::isfinite(pair.cp) &&
        std::isfinite(pair.cs)) {
      out.push_back(pair);
    }
    if (disc == 0.0) break;  // both branches coincide
  }

  // Deduplicate branches closer than 1e-12 relative.
  if (out.size() == 2) {
    const auto close = [](double a, double b) {
      return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
    };
    if (close(out[0].cp, out[1].cp) && close(out[0].cs, out[1].cs)) {
      out.pop_back();
    }
  }
  return out;
}

double gamma_magnitude(const CircuitParams& params, Complex zl) {
  return std::abs(reflection_coefficient(input_impedance(params, zl),
                                         params.rs));
}

GammaGradient gamma_magnitude_gradient(const CircuitParams& params,
                                       Complex zl) {
  check_params(params);
  const Dual2 g = gamma_mag_dual(params, zl);
  if (g.v < 1e-12) {
    throw std::domain_error(
        "circuit: |Gamma| gradient undefined at the matched point");
  }
  return {g.dp, g.ds};
}

}  // namespace ltune::circuit
