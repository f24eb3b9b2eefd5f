#pragma once

#include <array>
#include <complex>
#include <limits>
#include <vector>

#include "trimer/model.hpp"

namespace trimer {

// Uniform torus grid over [-pi, pi) in each angle.
struct TorusGrid {
  int resolution = 256;

  void validate() const;
  double node(int i) const;
};

// Phase-space amplitude on the reduced chart (u, v) with u = phi1 - phi3 and
// v = phi2 - phi3. The full three-angle amplitude is exp(i * global_mode *
// phi3) times this field, so one chart carries everything.
struct DynRepField {
  int resolution = 0;
  int global_mode = 0;
  std::vector<std::complex<double>> F;  // row-major, F[iu * resolution + iv]

  std::complex<double> at(int iu, int iv) const {
    return F[iu * resolution + iv];
  }
  // |F|^2 / (2 pi)^2; integrates to 1 over the chart.
  double density(int iu, int iv) const;
  // Trapezoid-free periodic quadrature of the density; 1 for a normalized
  // coefficient vector.
  double quadrature_norm() const;
};

DynRepField evaluate_dynrep(const Eigen::VectorXd& coeffs,
                            const FockBasis& basis, const TorusGrid& grid);

// Direct sums, usable off-grid.
std::complex<double> evaluate_chart_point(const Eigen::VectorXd& coeffs,
                                          const FockBasis& basis, double u,
                                          double v);
std::complex<double> evaluate_torus_point(const Eigen::VectorXd& coeffs,
                                          const FockBasis& basis, double phi1,
                                          double phi2, double phi3);

// -i d/dangle along one chart axis (0 = u, 1 = v) of a sampled field,
// computed spectrally. Returned in the same row-major layout.
std::vector<std::complex<double>> spectral_derivative(const DynRepField& field,
                                                      int axis);

struct SiteStatistics {
  std::array<double, 3> mean{};
  std::array<double, 3> var{};
  std::array<std::array<double, 3>, 3> cov{};
};

SiteStatistics site_statistics(const Eigen::VectorXd& coeffs,
                               const FockBasis& basis);

// Fraction of the chart area the density effectively occupies (inverse
// participation ratio of |F|^2, evaluated exactly from the coefficients).
double participation_fraction(const Eigen::VectorXd& coeffs,
                              const FockBasis& basis);

// Angle combinations x = s . phi used for the marginal densities. Their
// conjugate momenta are n1, n3, (n1 - n3)/2 and (N - n2)/2 respectively.
inline constexpr std::array<int, 3> kShiftC{1, -1, 0};   // phi1 - phi2
inline constexpr std::array<int, 3> kShiftB{0, -1, 1};   // phi3 - phi2
inline constexpr std::array<int, 3> kShiftA{1, 0, -1};   // phi1 - phi3
inline constexpr std::array<int, 3> kShiftD{1, -2, 1};   // phi1 + phi3 - 2 phi2

// Characteristic function <e^{i q x}> of the marginal along x = s . phi,
// for q = 0 .. N (real by time-reversal symmetry). Entries after the first
// empty overlap are zero.
std::vector<double> marginal_charfun(const Eigen::VectorXd& coeffs,
                                     const FockBasis& basis,
                                     const std::array<int, 3>& shift);

// Second moment of that marginal about x = 0 and about x = pi.
std::array<double, 2> marginal_x2(const Eigen::VectorXd& coeffs,
                                  const FockBasis& basis,
                                  const std::array<int, 3>& shift);
// The smaller of the two: the spread about whichever center the density
// actually sits on.
double marginal_x2_min(const Eigen::VectorXd& coeffs, const FockBasis& basis,
                       const std::array<int, 3>& shift);

enum class StateLabel { A, B, C, D, E1, E2 };
const char* label_name(StateLabel label);

struct EigenstateClass {
  StateLabel label = StateLabel::E2;
  // A: (lambda1, lambda2). B/C/D: (lambda, tau). E1: (tau_d, tau_a).
  // E2: unused (-1).
  int qn1 = -1;
  int qn2 = -1;
  double confidence = 0.0;
};

struct ClassifyThresholds {
  double v_abs = 0.45;        // site variance below this is frozen out
  double v_rel = 0.4;         // ... or below this fraction of the largest
  double v_ceil = 1.5;        // cap on the relative rule
  double loc_frac = 0.2;      // chart-area fraction separating E1 from E2
  double doublet_eps = 0.05;  // energy window for near-degenerate partners
  double mean_tol = 0.35;     // occupation match for partner absorption

  void validate() const;
};

// Label every eigenstate. B/C/D get lambda in qn1 (tau filled by
// build_ladders); E1 get (tau_d, tau_a); partners of near-degenerate
// B/C/D states are absorbed into the same family at confidence 0.5.
std::vector<EigenstateClass> classify_eigenstates(
    const EigenSolution& eig, const FockBasis& basis,
    const ClassifyThresholds& thr = {});

struct LadderFamily {
  StateLabel label = StateLabel::E2;
  char axis = 0;    // E1 families: 'd' or 'a'
  int lambda = -1;  // B/C/D: lambda; E1 'd': tau_a; E1 'a': tau_d
  std::vector<int> members;  // eigenstate indices, energy ascending
  std::vector<int> taus;
  std::array<int, 2> alpha{-1, -1};  // B/C: occupations of the entangled pair
  bool incomplete = false;
  double omega = std::numeric_limits<double>::quiet_NaN();
  double m_eff = std::numeric_limits<double>::quiet_NaN();
};

// Group classified states into ladder families and backfill tau quantum
// numbers into classes. Gaps against the collapsed level spacing set the
// incomplete flag.
std::vector<LadderFamily> build_ladders(std::vector<EigenstateClass>& classes,
                                        const EigenSolution& eig,
                                        const FockBasis& basis);

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class FitBranch { harmonic, x_saturated, x_split };
const char* branch_name(FitBranch b);

struct OscillatorFit {
  double m_eff = 0.0;
  double omega = 0.0;
  FitBranch branch = FitBranch::harmonic;
  double ratio = 0.0;  // diagnostic: x-width vs momentum-width consistency
};

// Effective-oscillator (m, Omega) for one family at the requested rung.
// Throws FitError when the family has too few usable members.
OscillatorFit fit_oscillator(const LadderFamily& family,
                             const EigenSolution& eig, const FockBasis& basis,
                             int tau = 0);

struct Classification {
  std::vector<EigenstateClass> classes;
  std::vector<LadderFamily> families;
};

// classify_eigenstates + build_ladders + a default fit per family (left NaN
// where the fit is not defined).
Classification classify_full(const EigenSolution& eig, const FockBasis& basis,
                             const ClassifyThresholds& thr = {});

}  // namespace trimer
