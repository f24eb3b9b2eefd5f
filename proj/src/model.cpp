#include "trimer/model.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace trimer {

void ModelParams::validate() const {
  if (N < 1) throw std::invalid_argument("ModelParams: N must be >= 1");
  for (double x : {epsilon_bar, delta, kappa12, kappa23, zeta}) {
    if (!std::isfinite(x))
      throw std::invalid_argument("ModelParams: non-finite parameter");
  }
}

FockBasis::FockBasis(int N) : N_(N) {
  if (N < 1) throw std::invalid_argument("FockBasis: N must be >= 1");
  states_.reserve((N + 1) * (N + 2) / 2);
  for (int n1 = N; n1 >= 0; --n1)
    for (int n2 = N - n1; n2 >= 0; --n2)
      states_.push_back({n1, n2, N - n1 - n2});
  lookup_.assign((N + 1) * (N + 1), -1);
  for (int i = 0; i < size(); ++i)
    lookup_[states_[i].n1 * (N + 1) + states_[i].n2] = i;
}

int FockBasis::index_of(int n1, int n2) const {
  if (n1 < 0 || n2 < 0 || n1 + n2 > N_) return -1;
  return lookup_[n1 * (N_ + 1) + n2];
}

int FockBasis::index_of(const FockState& s) const {
  if (s.n3 < 0 || s.total() != N_) return -1;
  return index_of(s.n1, s.n2);
}

double hamiltonian_element(const FockState& m, const FockState& n,
                           const ModelParams& p) {
  if (m.total() != n.total())
    throw std::invalid_argument("hamiltonian_element: particle number mismatch");
  if (m == n) {
    double e = 0.0;
    const int occ[3] = {n.n1, n.n2, n.n3};
    for (int k = 1; k <= 3; ++k) {
      const double nk = occ[k - 1] + 0.5;
      e += p.epsilon(k) * nk + p.zeta * nk * nk;
    }
    return e;
  }
  if (m.n3 == n.n3) {
    if (m.n1 == n.n1 + 1 && m.n2 == n.n2 - 1)
      return -p.kappa12 * std::sqrt(double(n.n1 + 1) * n.n2);
    if (m.n1 == n.n1 - 1 && m.n2 == n.n2 + 1)
      return -p.kappa12 * std::sqrt(double(n.n1) * (n.n2 + 1));
  }
  if (m.n1 == n.n1) {
    if (m.n2 == n.n2 + 1 && m.n3 == n.n3 - 1)
      return -p.kappa23 * std::sqrt(double(n.n2 + 1) * n.n3);
    if (m.n2 == n.n2 - 1 && m.n3 == n.n3 + 1)
      return -p.kappa23 * std::sqrt(double(n.n2) * (n.n3 + 1));
  }
  return 0.0;
}

Eigen::MatrixXd build_hamiltonian(const FockBasis& basis, const ModelParams& p) {
  p.validate();
  const int L = basis.size();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(L, L);
  for (int i = 0; i < L; ++i) {
    const FockState& s = basis.state(i);
    H(i, i) = hamiltonian_element(s, s, p);
    if (s.n2 >= 1) {
      const int j = basis.index_of(s.n1 + 1, s.n2 - 1);
      const double v = -p.kappa12 * std::sqrt(double(s.n1 + 1) * s.n2);
      H(i, j) = H(j, i) = v;
    }
    if (s.n3 >= 1) {
      const int j = basis.index_of(s.n1, s.n2 + 1);
      const double v = -p.kappa23 * std::sqrt(double(s.n2 + 1) * s.n3);
      H(i, j) = H(j, i) = v;
    }
  }
  return H;
}

EigenSolution diagonalize(const Eigen::MatrixXd& H, double tol) {
  if (H.rows() != H.cols())
    throw std::invalid_argument("diagonalize: matrix must be square");
  if (!(tol > 0.0))
    throw std::invalid_argument("diagonalize: tol must be positive");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("diagonalize: eigensolver did not converge", -1.0);

  const int L = static_cast<int>(H.rows());
  EigenSolution out;
  out.energies.assign(solver.eigenvalues().data(),
                      solver.eigenvalues().data() + L);
  out.vectors = solver.eigenvectors();

  for (int k = 0; k < L; ++k) {
    int imax = 0;
    double best = std::abs(out.vectors(0, k));
    for (int i = 1; i < L; ++i) {
      const double a = std::abs(out.vectors(i, k));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    if (out.vectors(imax, k) < 0.0) out.vectors.col(k) = -out.vectors.col(k);
  }

  Eigen::MatrixXd HV = H * out.vectors;
  double worst = 0.0;
  for (int k = 0; k < L; ++k) {
    const double r = (HV.col(k) - out.energies[k] * out.vectors.col(k)).norm();
    if (r > worst) worst = r;
  }
  out.residual = worst;
  if (worst > tol)
    throw ConvergenceError(
        "diagonalize: worst eigenpair residual " + std::to_string(worst) +
            " exceeds tolerance " + std::to_string(tol),
        worst);
  return out;
}

double number_matrix_element(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                             const FockBasis& basis, int site) {
  if (site < 1 || site > 3)
    throw std::invalid_argument("number_matrix_element: site must be 1..3");
  if (a.size() != basis.size() || b.size() != basis.size())
    throw std::invalid_argument("number_matrix_element: dimension mismatch");
  double sum = 0.0;
  for (int i = 0; i < basis.size(); ++i) {
    const FockState& s = basis.state(i);
    const int n = site == 1 ? s.n1 : site == 2 ? s.n2 : s.n3;
    sum += a[i] * b[i] * n;
  }
  return sum;
}

}  // namespace trimer
