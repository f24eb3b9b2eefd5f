#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "trimer/model.hpp"

using namespace trimer;

namespace {

// Plain cyclic Jacobi sweep, kept independent of the library solver.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd A) {
  const int n = static_cast<int>(A.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off < 1e-26) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (A(p, q) == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = A(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

const ModelParams kDefaults{};

}  // namespace

TEST_CASE("basis enumeration order and size") {
  FockBasis b2(2);
  REQUIRE(b2.size() == 6);
  const FockState want[6] = {{2, 0, 0}, {1, 1, 0}, {1, 0, 1},
                             {0, 2, 0}, {0, 1, 1}, {0, 0, 2}};
  for (int i = 0; i < 6; ++i) CHECK(b2.state(i) == want[i]);

  FockBasis b1(1);
  REQUIRE(b1.size() == 3);
  CHECK(b1.state(0) == FockState{1, 0, 0});
  CHECK(b1.state(1) == FockState{0, 1, 0});
  CHECK(b1.state(2) == FockState{0, 0, 1});

  FockBasis b30(30);
  CHECK(b30.size() == 496);
  CHECK(b30.state(0) == FockState{30, 0, 0});
  CHECK(b30.state(495) == FockState{0, 0, 30});
}

TEST_CASE("index lookup round-trips and rejects outsiders") {
  FockBasis b(5);
  for (int i = 0; i < b.size(); ++i) {
    CHECK(b.index_of(b.state(i)) == i);
    CHECK(b.index_of(b.state(i).n1, b.state(i).n2) == i);
  }
  CHECK(b.index_of(-1, 0) == -1);
  CHECK(b.index_of(3, 3) == -1);
  CHECK(b.index_of(6, 0) == -1);
  CHECK(b.index_of(FockState{2, 2, 2}) == -1);  // total 6 != 5
}

TEST_CASE("hamiltonian elements at N=2 defaults") {
  FockBasis b(2);
  // (2,0,0): -0.1*2.5 + 0.1*0.5 + 0.1*(6.25 + 0.25 + 0.25) = 0.475
  CHECK(hamiltonian_element(b.state(0), b.state(0), kDefaults) ==
        doctest::Approx(0.475).epsilon(1e-14));
  // (2,0,0) <-> (1,1,0): -kappa12 sqrt(2)
  CHECK(hamiltonian_element(b.state(0), b.state(1), kDefaults) ==
        doctest::Approx(-0.25 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(hamiltonian_element(b.state(1), b.state(0), kDefaults) ==
        doctest::Approx(-0.25 * std::sqrt(2.0)).epsilon(1e-14));
  // distant states do not couple
  CHECK(hamiltonian_element(b.state(0), b.state(5), kDefaults) == 0.0);
  CHECK_THROWS_AS(hamiltonian_element(b.state(0), FockState{1, 0, 0}, kDefaults),
                  std::invalid_argument);
}

TEST_CASE("build_hamiltonian matches the elementwise definition") {
  FockBasis b(4);
  const Eigen::MatrixXd H = build_hamiltonian(b, kDefaults);
  for (int i = 0; i < b.size(); ++i)
    for (int j = 0; j < b.size(); ++j)
      CHECK(H(i, j) ==
            doctest::Approx(hamiltonian_element(b.state(i), b.state(j), kDefaults))
                .epsilon(1e-15));
  CHECK((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hopping stays within a sparse band") {
  FockBasis b(6);
  const Eigen::MatrixXd H = build_hamiltonian(b, kDefaults);
  for (int i = 0; i < b.size(); ++i) {
    int nz = 0;
    for (int j = 0; j < b.size(); ++j)
      if (H(i, j) != 0.0) ++nz;
    CHECK(nz <= 5);  // diagonal plus at most four hops
  }
}

TEST_CASE("N=1 spectrum has the closed form") {
  FockBasis b(1);
  const Eigen::MatrixXd H = build_hamiltonian(b, kDefaults);
  CHECK(H(0, 0) == doctest::Approx(0.175).epsilon(1e-15));
  CHECK(H(1, 1) == doctest::Approx(0.275).epsilon(1e-15));
  CHECK(H(2, 2) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(H(0, 1) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(H(1, 2) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(H(0, 2) == 0.0);

  const EigenSolution eig = diagonalize(H);
  // center +- sqrt(delta^2 + kappa12^2 + kappa23^2), center exact
  const double split = std::sqrt(0.1 * 0.1 + 2 * 0.25 * 0.25);
  CHECK(eig.energies[0] == doctest::Approx(0.275 - split).epsilon(1e-12));
  CHECK(eig.energies[1] == doctest::Approx(0.275).epsilon(1e-12));
  CHECK(eig.energies[2] == doctest::Approx(0.275 + split).epsilon(1e-12));
}

TEST_CASE("diagonalize on a diagonal matrix is the identity") {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(3, 3);
  H(0, 0) = 3.0;
  H(1, 1) = 1.0;
  H(2, 2) = 2.0;
  const EigenSolution eig = diagonalize(H);
  CHECK(eig.energies[0] == 1.0);
  CHECK(eig.energies[1] == 2.0);
  CHECK(eig.energies[2] == 3.0);
  CHECK(eig.vectors(1, 0) == 1.0);
  CHECK(eig.vectors(2, 1) == 1.0);
  CHECK(eig.vectors(0, 2) == 1.0);
}

TEST_CASE("N=2 spectrum against an independent Jacobi solve") {
  FockBasis b(2);
  const Eigen::MatrixXd H = build_hamiltonian(b, kDefaults);
  const EigenSolution eig = diagonalize(H);
  const std::vector<double> ref = jacobi_eigenvalues(H);
  REQUIRE(ref.size() == 6);
  for (int k = 0; k < 6; ++k)
    CHECK(eig.energies[k] == doctest::Approx(ref[k]).epsilon(1e-10));

  const double frozen[6] = {-0.190200060995, 0.204629901240, 0.526885140421,
                            0.639017120176, 0.970435769832, 1.299232129325};
  for (int k = 0; k < 6; ++k)
    CHECK(eig.energies[k] == doctest::Approx(frozen[k]).epsilon(1e-9));
}

TEST_CASE("full spectrum at N=30") {
  FockBasis b(30);
  const Eigen::MatrixXd H = build_hamiltonian(b, kDefaults);
  const EigenSolution eig = diagonalize(H, 1e-10);
  REQUIRE(static_cast<int>(eig.energies.size()) == 496);
  CHECK(eig.residual <= 1e-10);

  SUBCASE("energies are sorted and reproduce the trace") {
    double sum = 0.0;
    for (size_t k = 1; k < eig.energies.size(); ++k)
      CHECK(eig.energies[k] >= eig.energies[k - 1]);
    for (double e : eig.energies) sum += e;
    CHECK(sum == doctest::Approx(H.trace()).epsilon(1e-12));
    CHECK(H.trace() == doctest::Approx(24589.2).epsilon(1e-10));
  }

  SUBCASE("spot energies") {
    const std::pair<int, double> frozen[] = {
        {0, 23.9071044611},  {1, 24.9266417656},  {2, 25.7359364221},
        {3, 25.9498170081},  {129, 40.1039342795}, {155, 41.869196491},
        {186, 43.5662319324}, {216, 45.1924080214}, {239, 46.7410758194},
        {303, 50.9667416055}, {267, 48.2737627757}, {271, 48.7341958116},
        {277, 49.1529457314}, {282, 49.3591354892}, {293, 49.9966687484},
        {294, 50.0083344166}, {420, 63.6964934395}, {425, 64.583756168},
        {429, 65.3670870749}, {432, 66.0251157429}, {435, 66.5802243415},
        {437, 66.8629911053}, {456, 72.2419750779}, {457, 72.2486022287},
        {458, 72.6539127241}, {459, 72.6596881926}, {461, 73.4753723323}};
    for (const auto& [k, e] : frozen)
      CHECK(eig.energies[k] == doctest::Approx(e).epsilon(5e-11));
  }

  SUBCASE("eigenvectors are orthonormal and sign-fixed") {
    const Eigen::MatrixXd G =
        eig.vectors.transpose() * eig.vectors - Eigen::MatrixXd::Identity(496, 496);
    CHECK(G.cwiseAbs().maxCoeff() < 1e-12);
    for (int k = 0; k < 496; ++k) {
      int imax = 0;
      for (int i = 1; i < 496; ++i)
        if (std::abs(eig.vectors(i, k)) > std::abs(eig.vectors(imax, k)))
          imax = i;
      CHECK(eig.vectors(imax, k) > 0.0);
    }
    double mx = eig.vectors.col(0).cwiseAbs().maxCoeff();
    CHECK(mx == doctest::Approx(0.295904007425).epsilon(1e-8));
  }

  SUBCASE("occupation elements: diagonal means") {
    const std::pair<int, std::array<double, 3>> frozen[] = {
        {0, {10.1359280941, 10.6718665758, 9.1922053301}},
        {2, {10.1569546501, 10.6328527184, 9.21019263151}},
        {129, {15.2018527074, 14.6094789466, 0.18866834608}},
        {216, {15.205515902, 14.5991005757, 0.195383522338}},
        {239, {15.1947528791, 14.5583945761, 0.246852544736}},
        {435, {2.46943978245, 3.6900426991, 23.8405175184}},
        {437, {4.98111879181, 1.11023783902, 23.9086433692}},
        {456, {2.44978013575, 25.8153292964, 1.73489056782}},
        {457, {2.75228394934, 25.7994762506, 1.44823980004}},
        {277, {15.3972194315, 0.233017210775, 14.3697633578}},
        {282, {15.2909721997, 0.364423225746, 14.3446045746}}};
    for (const auto& [k, m] : frozen) {
      const Eigen::VectorXd v = eig.vectors.col(k);
      for (int s = 0; s < 3; ++s)
        CHECK(number_matrix_element(v, v, b, s + 1) ==
              doctest::Approx(m[s]).epsilon(1e-9));
    }
  }

  SUBCASE("occupation elements: signed pair values") {
    const std::tuple<int, int, std::array<double, 3>> frozen[] = {
        {0, 2, {0.79660412799, -1.54102990088, 0.744425772895}},
        {216, 239, {-2.69568251025, 2.71603947554, -0.0203569652843}},
        {435, 437, {1.27837990241, -1.31005280079, 0.0316728983813}},
        {456, 457, {-0.486938023526, -0.00166248240369, 0.48860050593}},
        {277, 282, {1.2482262583, -0.000114892924327, -1.24811136538}}};
    for (const auto& [i, j, m] : frozen) {
      const Eigen::VectorXd vi = eig.vectors.col(i);
      const Eigen::VectorXd vj = eig.vectors.col(j);
      for (int s = 0; s < 3; ++s)
        CHECK(number_matrix_element(vi, vj, b, s + 1) ==
              doctest::Approx(m[s]).epsilon(1e-7));
    }
  }

  SUBCASE("total number is conserved in every eigenstate") {
    for (int k = 0; k < 496; ++k) {
      const Eigen::VectorXd v = eig.vectors.col(k);
      double tot = 0.0;
      for (int s = 1; s <= 3; ++s) tot += number_matrix_element(v, v, b, s);
      CHECK(tot == doctest::Approx(30.0).epsilon(1e-12));
    }
    // and sums to zero between orthogonal eigenstates
    const Eigen::VectorXd v0 = eig.vectors.col(0);
    const Eigen::VectorXd v1 = eig.vectors.col(1);
    double cross = 0.0;
    for (int s = 1; s <= 3; ++s) cross += number_matrix_element(v0, v1, b, s);
    CHECK(std::abs(cross) < 1e-9);
  }

  SUBCASE("unreachable tolerance raises a convergence error") {
    CHECK_THROWS_AS(diagonalize(H, 1e-30), ConvergenceError);
    try {
      diagonalize(H, 1e-30);
    } catch (const ConvergenceError& e) {
      CHECK(e.worst_residual > 1e-30);
      CHECK(e.worst_residual <= 1e-10);
    }
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(FockBasis(0), std::invalid_argument);
  ModelParams p;
  p.N = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ModelParams{};
  p.zeta = std::nan("");
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_THROWS_AS(diagonalize(Eigen::MatrixXd::Zero(2, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(diagonalize(Eigen::MatrixXd::Zero(2, 2), -1.0),
                  std::invalid_argument);
}
