#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace trimer {

// Parameters of the three-well model, hbar = 1. Well energies are
// epsilon(k) = epsilon_bar + (k - 2) * delta for k = 1, 2, 3.
struct ModelParams {
  int N = 30;
  double epsilon_bar = 0.0;
  double delta = 0.1;
  double kappa12 = 0.25;
  double kappa23 = 0.25;
  double zeta = 0.1;

  double epsilon(int site) const { return epsilon_bar + (site - 2) * delta; }
  void validate() const;
};

struct FockState {
  int n1 = 0;
  int n2 = 0;
  int n3 = 0;

  int total() const { return n1 + n2 + n3; }
  bool operator==(const FockState&) const = default;
};

// All occupations (n1, n2, n3) with n1 + n2 + n3 = N, ordered
// lexicographically descending in (n1, n2). Size (N+1)(N+2)/2.
class FockBasis {
 public:
  explicit FockBasis(int N);

  int N() const { return N_; }
  int size() const { return static_cast<int>(states_.size()); }
  const FockState& state(int i) const { return states_[i]; }
  const std::vector<FockState>& states() const { return states_; }

  // Index of the state with the given (n1, n2); -1 if outside the simplex.
  int index_of(int n1, int n2) const;
  int index_of(const FockState& s) const;

 private:
  int N_;
  std::vector<FockState> states_;
  std::vector<int> lookup_;
};

// Single matrix element <m|H|n>. Throws if the two states have different
// particle number.
double hamiltonian_element(const FockState& m, const FockState& n,
                           const ModelParams& p);

Eigen::MatrixXd build_hamiltonian(const FockBasis& basis, const ModelParams& p);

struct EigenSolution {
  std::vector<double> energies;  // ascending
  Eigen::MatrixXd vectors;       // column k is eigenvector k, real
  double residual = 0.0;         // max_k ||H v_k - E_k v_k||_2
};

struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what, double worst)
      : std::runtime_error(what), worst_residual(worst) {}
  double worst_residual;
};

// Dense symmetric diagonalization. Eigenvectors are normalized with the
// largest-magnitude component positive (first such index on ties). Throws
// ConvergenceError if the worst residual exceeds tol.
EigenSolution diagonalize(const Eigen::MatrixXd& H, double tol = 1e-10);

// <a| n_site |b> with site in {1, 2, 3}.
double number_matrix_element(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                             const FockBasis& basis, int site);

}  // namespace trimer
