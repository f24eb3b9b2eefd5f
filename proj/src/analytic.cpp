#include "trimer/analytic.hpp"

namespace trimer {

namespace {

int sgn(int x) { return x > 0 ? 1 : x < 0 ? -1 : 0; }

void check_scales(double m_eff, double omega) {
  if (!(m_eff > 0.0) || !std::isfinite(m_eff))
    throw std::invalid_argument("ideal element: m_eff must be positive");
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw std::invalid_argument("ideal element: omega must be positive");
}

void check_site(int site) {
  if (site < 1 || site > 3)
    throw std::invalid_argument("ideal element: site must be 1..3");
}

double rung_modulus(double m_eff, double omega, int tau_bar) {
  return std::sqrt(m_eff * omega * tau_bar / 2.0);
}

MatrixElementResult diag(double value) {
  if (value == 0.0) return {0.0, ElementPhase::zero};
  return {std::abs(value),
          value > 0.0 ? ElementPhase::real_plus : ElementPhase::real_minus};
}

}  // namespace

const char* phase_name(ElementPhase p) {
  switch (p) {
    case ElementPhase::zero: return "0";
    case ElementPhase::real_plus: return "+1";
    case ElementPhase::real_minus: return "-1";
    case ElementPhase::imag_plus: return "+i";
    case ElementPhase::imag_minus: return "-i";
  }
  return "?";
}

std::complex<double> MatrixElementResult::value() const {
  switch (phase) {
    case ElementPhase::zero: return {0.0, 0.0};
    case ElementPhase::real_plus: return {modulus, 0.0};
    case ElementPhase::real_minus: return {-modulus, 0.0};
    case ElementPhase::imag_plus: return {0.0, modulus};
    case ElementPhase::imag_minus: return {0.0, -modulus};
  }
  return {0.0, 0.0};
}

MatrixElementResult ideal_element_E1(int taud_to, int taua_to, int taud_from,
                                     int taua_from, int site, double m_eff,
                                     double omega_d, int N) {
  check_site(site);
  check_scales(m_eff, omega_d);
  if (taua_to != taua_from)
    throw std::invalid_argument(
        "ideal_element_E1: transverse rung change is outside the "
        "stretch-mode picture");
  const int d = taud_to - taud_from;
  if (d == 0) return diag(N / 3.0);
  if (std::abs(d) > 1) return {0.0, ElementPhase::zero};
  const double mod = rung_modulus(m_eff, omega_d, std::max(taud_to, taud_from));
  if (site == 2)
    return {2.0 * mod,
            d > 0 ? ElementPhase::imag_minus : ElementPhase::imag_plus};
  return {mod, d > 0 ? ElementPhase::imag_plus : ElementPhase::imag_minus};
}

MatrixElementResult ideal_element_C(int lambda_to, int tau_to, int lambda_from,
                                    int tau_from, int site,
                                    const std::array<int, 2>& alpha,
                                    double m_eff, double omega) {
  check_site(site);
  check_scales(m_eff, omega);
  if (lambda_to != lambda_from || std::abs(tau_to - tau_from) > 1)
    return {0.0, ElementPhase::zero};
  if (tau_to == tau_from) {
    if (site == 3) return diag(double(lambda_from));
    return diag(double(alpha[site - 1]));
  }
  if (site == 3) return {0.0, ElementPhase::zero};
  const double mod = rung_modulus(m_eff, omega, std::max(tau_to, tau_from));
  const int sign = (site == 1 ? -1 : 1) * sgn(tau_from - tau_to);
  return {mod, sign > 0 ? ElementPhase::real_plus : ElementPhase::real_minus};
}

MatrixElementResult ideal_element_B(int lambda_to, int tau_to, int lambda_from,
                                    int tau_from, int site,
                                    const std::array<int, 2>& alpha,
                                    double m_eff, double omega) {
  // mirror of C under the 1 <-> 3 well relabeling; alpha is (well 2, well 3)
  return ideal_element_C(lambda_to, tau_to, lambda_from, tau_from, 4 - site,
                         {alpha[1], alpha[0]}, m_eff, omega);
}

MatrixElementResult ideal_element_D(int lambda_to, int tau_to, int lambda_from,
                                    int tau_from, int site, double m_eff,
                                    double omega, int N) {
  check_site(site);
  check_scales(m_eff, omega);
  if (lambda_to != lambda_from || std::abs(tau_to - tau_from) > 1)
    return {0.0, ElementPhase::zero};
  if (tau_to == tau_from) {
    if (site == 2) return diag(double(N - lambda_from));
    return diag(lambda_from / 2.0);
  }
  if (site == 2) return {0.0, ElementPhase::zero};
  const double mod = rung_modulus(m_eff, omega, std::max(tau_to, tau_from));
  const int sign = (2 - site) * sgn(tau_to - tau_from);
  return {mod, sign > 0 ? ElementPhase::imag_plus : ElementPhase::imag_minus};
}

double predicted_amplitude(const MatrixElementResult& elem, double mag_a,
                           double mag_b) {
  if (!(mag_a >= 0.0) || !(mag_b >= 0.0))
    throw std::invalid_argument("predicted_amplitude: magnitudes must be non-negative");
  return 2.0 * mag_a * mag_b * elem.modulus;
}

double oscillator_eigenfunction(int tau, double m_eff, double omega, double x) {
  check_scales(m_eff, omega);
  return oscillator_wave(tau, m_eff * omega, x);
}

}  // namespace trimer
