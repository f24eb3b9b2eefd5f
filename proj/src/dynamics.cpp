#include "trimer/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace trimer {

void SuperpositionSpec::validate(int spectrum_size) const {
  for (int k : {a, b})
    if (k < 0 || k >= spectrum_size)
      throw std::invalid_argument("SuperpositionSpec: eigenstate index out of range");
  if (!(mag_a >= 0.0) || !(mag_b >= 0.0))
    throw std::invalid_argument("SuperpositionSpec: magnitudes must be non-negative");
  if (a == b && mag_b != 0.0)
    throw std::invalid_argument("SuperpositionSpec: repeated eigenstate in a two-term superposition");
  if (std::abs(mag_a * mag_a + mag_b * mag_b - 1.0) > 1e-6)
    throw std::invalid_argument("SuperpositionSpec: magnitudes must be normalized");
  for (double g : {gamma_a, gamma_b})
    if (!std::isfinite(g))
      throw std::invalid_argument("SuperpositionSpec: non-finite phase");
}

std::vector<double> sample_times(double tmax, int samples) {
  if (!(tmax > 0.0))
    throw std::invalid_argument("sample_times: tmax must be positive");
  if (samples < 2)
    throw std::invalid_argument("sample_times: need at least two samples");
  std::vector<double> t(samples);
  for (int i = 0; i < samples; ++i) t[i] = tmax * i / (samples - 1);
  return t;
}

Trajectory closed_form_trajectory(const SuperpositionSpec& spec,
                                  const EigenSolution& eig,
                                  const FockBasis& basis,
                                  const std::vector<double>& times,
                                  double period) {
  spec.validate(static_cast<int>(eig.energies.size()));
  if (!(period > 0.0))
    throw std::invalid_argument("closed_form_trajectory: period must be positive");
  if (eig.vectors.rows() != basis.size())
    throw std::invalid_argument("closed_form_trajectory: basis mismatch");

  const Eigen::VectorXd va = eig.vectors.col(spec.a);
  const Eigen::VectorXd vb = eig.vectors.col(spec.b);
  double Maa[3], Mbb[3], Mab[3];
  for (int s = 0; s < 3; ++s) {
    Maa[s] = number_matrix_element(va, va, basis, s + 1);
    Mbb[s] = number_matrix_element(vb, vb, basis, s + 1);
    Mab[s] = number_matrix_element(va, vb, basis, s + 1);
  }

  Trajectory traj;
  traj.beat = eig.energies[spec.a] - eig.energies[spec.b];
  traj.period = period;
  traj.t_over_T.reserve(times.size());
  traj.n.reserve(times.size());
  const double wa = spec.mag_a * spec.mag_a;
  const double wb = spec.mag_b * spec.mag_b;
  const double cross = 2.0 * spec.mag_a * spec.mag_b;
  const double dgamma = spec.gamma_a - spec.gamma_b;
  for (double t : times) {
    const double c = std::cos(traj.beat * t + dgamma);
    traj.t_over_T.push_back(t / period);
    traj.n.push_back({wa * Maa[0] + wb * Mbb[0] + cross * Mab[0] * c,
                      wa * Maa[1] + wb * Mbb[1] + cross * Mab[1] * c,
                      wa * Maa[2] + wb * Mbb[2] + cross * Mab[2] * c});
  }
  return traj;
}

Eigen::VectorXcd build_superposition(const SuperpositionSpec& spec,
                                     const EigenSolution& eig) {
  spec.validate(static_cast<int>(eig.energies.size()));
  const std::complex<double> ca = std::polar(spec.mag_a, -spec.gamma_a);
  const std::complex<double> cb = std::polar(spec.mag_b, -spec.gamma_b);
  Eigen::VectorXcd psi =
      ca * eig.vectors.col(spec.a).cast<std::complex<double>>();
  if (spec.mag_b != 0.0)
    psi += cb * eig.vectors.col(spec.b).cast<std::complex<double>>();
  return psi;
}

Eigen::VectorXcd spectral_propagate(const Eigen::VectorXcd& initial,
                                    const EigenSolution& eig, double t) {
  const int L = static_cast<int>(eig.energies.size());
  if (eig.vectors.rows() != L || eig.vectors.cols() != L)
    throw std::invalid_argument("spectral_propagate: needs the complete eigenbasis");
  if (initial.size() != L)
    throw std::invalid_argument("spectral_propagate: dimension mismatch");
  Eigen::VectorXcd g = eig.vectors.transpose() * initial;
  for (int k = 0; k < L; ++k)
    g[k] *= std::polar(1.0, -eig.energies[k] * t);
  return eig.vectors * g;
}

std::array<double, 3> occupations(const Eigen::VectorXcd& psi,
                                  const FockBasis& basis) {
  if (psi.size() != basis.size())
    throw std::invalid_argument("occupations: dimension mismatch");
  std::array<double, 3> n{};
  for (int i = 0; i < basis.size(); ++i) {
    const double p = std::norm(psi[i]);
    const FockState& s = basis.state(i);
    n[0] += p * s.n1;
    n[1] += p * s.n2;
    n[2] += p * s.n3;
  }
  return n;
}

CosineFit fit_cosine(const std::vector<double>& series,
                     const std::vector<double>& times, double omega) {
  if (series.size() != times.size())
    throw std::invalid_argument("fit_cosine: series and times differ in length");
  if (series.size() < 8)
    throw std::invalid_argument("fit_cosine: need at least 8 samples");
  if (!std::isfinite(omega) || omega == 0.0)
    throw std::invalid_argument("fit_cosine: omega must be finite and nonzero");
  const auto [tmin, tmax] = std::minmax_element(times.begin(), times.end());
  if ((*tmax - *tmin) * std::abs(omega) < 2.0 * std::numbers::pi * (1.0 - 1e-9))
    throw std::invalid_argument("fit_cosine: samples must span a full cycle");

  Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < times.size(); ++i) {
    const Eigen::Vector3d row(std::cos(omega * times[i]),
                              std::sin(omega * times[i]), 1.0);
    M += row * row.transpose();
    rhs += series[i] * row;
  }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(M);
  if (!lu.isInvertible())
    throw std::invalid_argument("fit_cosine: degenerate sample times");
  const Eigen::Vector3d sol = lu.solve(rhs);

  CosineFit fit;
  fit.amplitude = std::hypot(sol[0], sol[1]);
  fit.phase = std::atan2(-sol[1], sol[0]);
  fit.offset = sol[2];
  return fit;
}

}  // namespace trimer
