#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace trimer {

enum class ElementPhase { zero, real_plus, real_minus, imag_plus, imag_minus };
const char* phase_name(ElementPhase p);

// One occupation matrix element in the idealized oscillator picture of a
// ladder family: a magnitude plus a pure phase tag. exact elements are real
// up to a global eigenvector sign, so only these five phases occur.
struct MatrixElementResult {
  double modulus = 0.0;
  ElementPhase phase = ElementPhase::zero;

  std::complex<double> value() const;
};

// Chaotic-border ladder: both wells share the load, the stretch mode
// carries the transition. Diagonal N/3 on every site; one-rung stretch
// transitions with the middle site twice as strong and opposite in phase.
// A transverse rung change is outside this picture and throws.
MatrixElementResult ideal_element_E1(int taud_to, int taua_to, int taud_from,
                                     int taua_from, int site, double m_eff,
                                     double omega_d, int N);

// Pair ladder with well 3 frozen at lambda; alpha holds the mean
// occupations of wells 1 and 2 on the bottom rung.
MatrixElementResult ideal_element_C(int lambda_to, int tau_to, int lambda_from,
                                    int tau_from, int site,
                                    const std::array<int, 2>& alpha,
                                    double m_eff, double omega);

// Mirror image of C with well 1 frozen; alpha holds wells 2 and 3.
MatrixElementResult ideal_element_B(int lambda_to, int tau_to, int lambda_from,
                                    int tau_from, int site,
                                    const std::array<int, 2>& alpha,
                                    double m_eff, double omega);

// Middle well frozen at N - lambda, outer wells split lambda evenly.
MatrixElementResult ideal_element_D(int lambda_to, int tau_to, int lambda_from,
                                    int tau_from, int site, double m_eff,
                                    double omega, int N);

// Peak-to-mean beat amplitude of n_site for a superposition with the given
// term magnitudes.
double predicted_amplitude(const MatrixElementResult& elem, double mag_a,
                           double mag_b);

// Normalized eigenfunction chi_tau(x) of a harmonic oscillator with mass
// m_eff and frequency omega.
double oscillator_eigenfunction(int tau, double m_eff, double omega, double x);

// Same, generic in the scalar so tests can differentiate it with a complex
// step. momega is the product m_eff * omega.
template <typename Scalar>
Scalar oscillator_wave(int tau, double momega, Scalar x) {
  if (tau < 0)
    throw std::invalid_argument("oscillator_wave: tau must be non-negative");
  if (!(momega > 0.0) || !std::isfinite(momega))
    throw std::invalid_argument("oscillator_wave: m * omega must be positive");
  using std::exp;
  using std::sqrt;
  const Scalar xi = sqrt(momega) * x;
  Scalar psi = std::pow(momega / std::numbers::pi, 0.25) * exp(-xi * xi / 2.0);
  if (tau == 0) return psi;
  Scalar prev = psi;
  psi = sqrt(2.0) * xi * prev;
  for (int n = 1; n < tau; ++n) {
    const Scalar next =
        sqrt(2.0 / (n + 1)) * xi * psi - sqrt(double(n) / (n + 1)) * prev;
    prev = psi;
    psi = next;
  }
  return psi;
}

}  // namespace trimer
