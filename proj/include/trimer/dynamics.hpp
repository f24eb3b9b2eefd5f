#pragma once

#include <array>
#include <vector>

#include "trimer/model.hpp"

namespace trimer {

// Two-eigenstate superposition |psi> = sum_x mag_x e^{-i gamma_x} |x>.
struct SuperpositionSpec {
  int a = 0;
  int b = 0;
  double mag_a = 0.70710678118654752;
  double mag_b = 0.70710678118654752;
  double gamma_a = 0.0;
  double gamma_b = 0.0;

  void validate(int spectrum_size) const;
};

struct Trajectory {
  double beat = 0.0;    // E_a - E_b
  double period = 0.0;  // time unit of the t_over_T column
  std::vector<double> t_over_T;
  std::vector<std::array<double, 3>> n;  // site occupations per sample
};

// Uniform grid of `samples` times from 0 to tmax inclusive.
std::vector<double> sample_times(double tmax, int samples);

// Occupation beat evaluated from the three matrix elements of the pair:
// n_k(t) = mag_a^2 M_aa + mag_b^2 M_bb
//        + 2 mag_a mag_b M_ab cos(beat t + gamma_a - gamma_b).
Trajectory closed_form_trajectory(const SuperpositionSpec& spec,
                                  const EigenSolution& eig,
                                  const FockBasis& basis,
                                  const std::vector<double>& times,
                                  double period);

Eigen::VectorXcd build_superposition(const SuperpositionSpec& spec,
                                     const EigenSolution& eig);

// Full spectral propagation of an arbitrary initial vector; needs the
// complete eigenbasis.
Eigen::VectorXcd spectral_propagate(const Eigen::VectorXcd& initial,
                                    const EigenSolution& eig, double t);

std::array<double, 3> occupations(const Eigen::VectorXcd& psi,
                                  const FockBasis& basis);

struct CosineFit {
  double offset = 0.0;
  double amplitude = 0.0;  // >= 0
  double phase = 0.0;      // series ~ offset + amplitude cos(omega t + phase)
};

// Linear least squares against {cos(omega t), sin(omega t), 1}. Requires at
// least 8 samples spanning a full cycle and non-degenerate sampling.
CosineFit fit_cosine(const std::vector<double>& series,
                     const std::vector<double>& times, double omega);

}  // namespace trimer
