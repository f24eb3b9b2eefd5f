#include "trimer/dynrep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace trimer {

namespace {

constexpr double kPi = std::numbers::pi;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

int round_i(double x) { return static_cast<int>(std::lround(x)); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Merge levels whose spacing collapses against the typical spacing
// (near-degenerate doublet partners sit on one rung).
std::vector<std::vector<int>> collapse_levels(const std::vector<double>& es) {
  if (es.empty()) return {};
  if (es.size() == 1) return {{0}};
  std::vector<double> sp(es.size() - 1);
  for (size_t i = 0; i + 1 < es.size(); ++i) sp[i] = es[i + 1] - es[i];
  const double med = median(sp);
  std::vector<std::vector<int>> groups{{0}};
  for (size_t i = 0; i < sp.size(); ++i) {
    if (sp[i] < 0.25 * med)
      groups.back().push_back(static_cast<int>(i) + 1);
    else
      groups.push_back({static_cast<int>(i) + 1});
  }
  return groups;
}

std::vector<double> group_means(const std::vector<double>& es,
                                const std::vector<std::vector<int>>& groups) {
  std::vector<double> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    double s = 0.0;
    for (int i : g) s += es[i];
    out.push_back(s / g.size());
  }
  return out;
}

void check_solution(const EigenSolution& eig, const FockBasis& basis) {
  const int L = basis.size();
  if (eig.vectors.rows() != L || static_cast<int>(eig.energies.size()) == 0 ||
      eig.vectors.cols() != static_cast<int>(eig.energies.size()))
    throw std::invalid_argument("eigen solution does not match the basis");
}

}  // namespace

void TorusGrid::validate() const {
  if (resolution < 32)
    throw std::invalid_argument("TorusGrid: resolution must be at least 32");
}

double TorusGrid::node(int i) const { return -kPi + 2.0 * kPi * i / resolution; }

double DynRepField::density(int iu, int iv) const {
  return std::norm(at(iu, iv)) / (4.0 * kPi * kPi);
}

double DynRepField::quadrature_norm() const {
  double s = 0.0;
  for (const auto& z : F) s += std::norm(z);
  return s / (double(resolution) * resolution);
}

DynRepField evaluate_dynrep(const Eigen::VectorXd& coeffs,
                            const FockBasis& basis, const TorusGrid& grid) {
  grid.validate();
  if (coeffs.size() != basis.size())
    throw std::invalid_argument("evaluate_dynrep: coefficient size mismatch");
  using cd = std::complex<double>;
  const int G = grid.resolution;
  const int N = basis.N();

  // ph[n * G + j] = exp(i n phi_j)
  std::vector<cd> ph(size_t(N + 1) * G);
  for (int j = 0; j < G; ++j) {
    const double a = grid.node(j);
    const cd w(std::cos(a), std::sin(a));
    ph[j] = cd(1.0, 0.0);
    for (int n = 1; n <= N; ++n) ph[size_t(n) * G + j] = ph[size_t(n - 1) * G + j] * w;
  }

  // inner sum over n2 for each fixed n1
  std::vector<cd> partial(size_t(N + 1) * G, cd(0.0, 0.0));
  for (int i = 0; i < basis.size(); ++i) {
    const double ci = coeffs[i];
    if (ci == 0.0) continue;
    const FockState& s = basis.state(i);
    const cd* row = &ph[size_t(s.n2) * G];
    cd* out = &partial[size_t(s.n1) * G];
    for (int j = 0; j < G; ++j) out[j] += ci * row[j];
  }

  DynRepField f;
  f.resolution = G;
  f.global_mode = N;
  f.F.assign(size_t(G) * G, cd(0.0, 0.0));
  for (int iu = 0; iu < G; ++iu) {
    cd* dst = &f.F[size_t(iu) * G];
    for (int n1 = 0; n1 <= N; ++n1) {
      const cd w = ph[size_t(n1) * G + iu];
      const cd* src = &partial[size_t(n1) * G];
      for (int iv = 0; iv < G; ++iv) dst[iv] += w * src[iv];
    }
  }
  return f;
}

std::complex<double> evaluate_chart_point(const Eigen::VectorXd& coeffs,
                                          const FockBasis& basis, double u,
                                          double v) {
  if (coeffs.size() != basis.size())
    throw std::invalid_argument("evaluate_chart_point: coefficient size mismatch");
  std::complex<double> sum(0.0, 0.0);
  for (int i = 0; i < basis.size(); ++i) {
    const FockState& s = basis.state(i);
    sum += coeffs[i] * std::polar(1.0, s.n1 * u + s.n2 * v);
  }
  return sum;
}

std::complex<double> evaluate_torus_point(const Eigen::VectorXd& coeffs,
                                          const FockBasis& basis, double phi1,
                                          double phi2, double phi3) {
  if (coeffs.size() != basis.size())
    throw std::invalid_argument("evaluate_torus_point: coefficient size mismatch");
  std::complex<double> sum(0.0, 0.0);
  for (int i = 0; i < basis.size(); ++i) {
    const FockState& s = basis.state(i);
    sum += coeffs[i] * std::polar(1.0, s.n1 * phi1 + s.n2 * phi2 + s.n3 * phi3);
  }
  return sum;
}

std::vector<std::complex<double>> spectral_derivative(const DynRepField& field,
                                                      int axis) {
  if (axis != 0 && axis != 1)
    throw std::invalid_argument("spectral_derivative: axis must be 0 or 1");
  const int G = field.resolution;
  if (G < 2 || static_cast<int>(field.F.size()) != G * G)
    throw std::invalid_argument("spectral_derivative: malformed field");
  using cd = std::complex<double>;

  // T[mm * G + j] = exp(i m phi_j) with phi_j = -pi + 2 pi j / G and the
  // signed mode m folded from row mm.
  std::vector<cd> root(G);
  for (int k = 0; k < G; ++k)
    root[k] = std::polar(1.0, 2.0 * kPi * k / G);
  std::vector<cd> T(size_t(G) * G);
  std::vector<int> mode(G);
  for (int mm = 0; mm < G; ++mm) {
    const int m = mm < (G + 1) / 2 ? mm : mm - G;
    mode[mm] = m;
    const double parity = (m % 2 == 0) ? 1.0 : -1.0;
    for (int j = 0; j < G; ++j) {
      const long long r = ((long long)m * j) % G;
      T[size_t(mm) * G + j] = parity * root[(r + G) % G];
    }
  }

  std::vector<cd> out(size_t(G) * G);
  std::vector<cd> line(G), amps(G);
  for (int l = 0; l < G; ++l) {
    for (int j = 0; j < G; ++j)
      line[j] = axis == 0 ? field.at(j, l) : field.at(l, j);
    for (int mm = 0; mm < G; ++mm) {
      cd a(0.0, 0.0);
      const cd* row = &T[size_t(mm) * G];
      for (int j = 0; j < G; ++j) a += line[j] * std::conj(row[j]);
      amps[mm] = a / double(G);
    }
    for (int j = 0; j < G; ++j) {
      cd s(0.0, 0.0);
      for (int mm = 0; mm < G; ++mm)
        s += double(mode[mm]) * amps[mm] * T[size_t(mm) * G + j];
      if (axis == 0)
        out[size_t(j) * G + l] = s;
      else
        out[size_t(l) * G + j] = s;
    }
  }
  return out;
}

SiteStatistics site_statistics(const Eigen::VectorXd& coeffs,
                               const FockBasis& basis) {
  if (coeffs.size() != basis.size())
    throw std::invalid_argument("site_statistics: coefficient size mismatch");
  double m[3] = {0.0, 0.0, 0.0};
  double mm[3][3] = {};
  for (int i = 0; i < basis.size(); ++i) {
    const double p = coeffs[i] * coeffs[i];
    const FockState& s = basis.state(i);
    const double n[3] = {double(s.n1), double(s.n2), double(s.n3)};
    for (int a = 0; a < 3; ++a) {
      m[a] += p * n[a];
      for (int b = a; b < 3; ++b) mm[a][b] += p * n[a] * n[b];
    }
  }
  SiteStatistics st;
  for (int a = 0; a < 3; ++a) st.mean[a] = m[a];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const double raw = b >= a ? mm[a][b] : mm[b][a];
      st.cov[a][b] = raw - m[a] * m[b];
    }
  for (int a = 0; a < 3; ++a) st.var[a] = st.cov[a][a];
  return st;
}

double participation_fraction(const Eigen::VectorXd& coeffs,
                              const FockBasis& basis) {
  if (coeffs.size() != basis.size())
    throw std::invalid_argument("participation_fraction: coefficient size mismatch");
  const int N = basis.N();
  const int W = 2 * N + 1;
  const int L = basis.size();
  std::vector<double> A(size_t(W) * W, 0.0);
  for (int i = 0; i < L; ++i) {
    const double ci = coeffs[i];
    if (ci == 0.0) continue;
    const FockState& si = basis.state(i);
    for (int j = 0; j < L; ++j) {
      const FockState& sj = basis.state(j);
      A[size_t(si.n1 - sj.n1 + N) * W + (si.n2 - sj.n2 + N)] += ci * coeffs[j];
    }
  }
  double s = 0.0;
  for (double a : A) s += a * a;
  return 1.0 / s;
}

std::vector<double> marginal_charfun(const Eigen::VectorXd& coeffs,
                                     const FockBasis& basis,
                                     const std::array<int, 3>& shift) {
  if (coeffs.size() != basis.size())
    throw std::invalid_argument("marginal_charfun: coefficient size mismatch");
  if (shift[0] + shift[1] + shift[2] != 0)
    throw std::invalid_argument("marginal_charfun: shift must conserve particle number");
  const int N = basis.N();
  std::vector<double> out(N + 1, 0.0);
  out[0] = 1.0;
  for (int q = 1; q <= N; ++q) {
    double tot = 0.0;
    bool any = false;
    for (int i = 0; i < basis.size(); ++i) {
      const FockState& s = basis.state(i);
      const int j = basis.index_of(s.n1 - q * shift[0], s.n2 - q * shift[1]);
      if (j >= 0) {
        tot += coeffs[i] * coeffs[j];
        any = true;
      }
    }
    if (!any) break;
    out[q] = tot;
  }
  return out;
}

std::array<double, 2> marginal_x2(const Eigen::VectorXd& coeffs,
                                  const FockBasis& basis,
                                  const std::array<int, 3>& shift) {
  const std::vector<double> rho = marginal_charfun(coeffs, basis, shift);
  double s_alt = 0.0, s_flat = 0.0;
  for (int q = 1; q < static_cast<int>(rho.size()); ++q) {
    const double w = rho[q] / (double(q) * q);
    s_alt += (q % 2 ? -w : w);
    s_flat += w;
  }
  const double base = kPi * kPi / 3.0;
  return {base + 4.0 * s_alt, base + 4.0 * s_flat};
}

double marginal_x2_min(const Eigen::VectorXd& coeffs, const FockBasis& basis,
                       const std::array<int, 3>& shift) {
  const auto p = marginal_x2(coeffs, basis, shift);
  return std::min(p[0], p[1]);
}

const char* label_name(StateLabel label) {
  switch (label) {
    case StateLabel::A: return "A";
    case StateLabel::B: return "B";
    case StateLabel::C: return "C";
    case StateLabel::D: return "D";
    case StateLabel::E1: return "E1";
    case StateLabel::E2: return "E2";
  }
  return "?";
}

void ClassifyThresholds::validate() const {
  for (double x : {v_abs, v_rel, v_ceil, loc_frac, doublet_eps, mean_tol})
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::invalid_argument("ClassifyThresholds: thresholds must be positive");
  if (v_rel >= 1.0)
    throw std::invalid_argument("ClassifyThresholds: v_rel must be below 1");
  if (loc_frac >= 1.0)
    throw std::invalid_argument("ClassifyThresholds: loc_frac must be below 1");
}

namespace {

double site_margin(double vk, double mx, const ClassifyThresholds& t) {
  const double a = (t.v_abs - vk) / t.v_abs;
  const double rel = mx > 0.0 ? (t.v_rel * mx - vk) / (t.v_rel * mx) : -1.0;
  const double r = std::min(rel, (t.v_ceil - vk) / t.v_ceil);
  return clamp01(std::max(a, r));
}

}  // namespace

std::vector<EigenstateClass> classify_eigenstates(const EigenSolution& eig,
                                                  const FockBasis& basis,
                                                  const ClassifyThresholds& thr) {
  thr.validate();
  check_solution(eig, basis);
  const int L = static_cast<int>(eig.energies.size());
  const int N = basis.N();

  std::vector<SiteStatistics> st(L);
  std::vector<double> pr(L);
  for (int k = 0; k < L; ++k) {
    const Eigen::VectorXd v = eig.vectors.col(k);
    st[k] = site_statistics(v, basis);
    pr[k] = participation_fraction(v, basis);
  }

  std::vector<EigenstateClass> cls(L);
  for (int k = 0; k < L; ++k) {
    const auto& v = st[k].var;
    const double mx = std::max({v[0], v[1], v[2]});
    bool dec[3];
    int nd = 0;
    for (int s = 0; s < 3; ++s) {
      dec[s] = v[s] < thr.v_abs || (v[s] <= thr.v_rel * mx && v[s] < thr.v_ceil);
      nd += dec[s];
    }
    EigenstateClass& c = cls[k];
    if (nd == 3) {
      c.label = StateLabel::A;
      c.qn1 = round_i(st[k].mean[0]);
      c.qn2 = round_i(st[k].mean[2]);
      c.confidence = std::min({site_margin(v[0], mx, thr),
                               site_margin(v[1], mx, thr),
                               site_margin(v[2], mx, thr)});
    } else if (nd == 1) {
      const int s = dec[0] ? 0 : dec[1] ? 1 : 2;
      if (s == 0) {
        c.label = StateLabel::B;
        c.qn1 = round_i(st[k].mean[0]);
      } else if (s == 2) {
        c.label = StateLabel::C;
        c.qn1 = round_i(st[k].mean[2]);
      } else {
        c.label = StateLabel::D;
        c.qn1 = round_i(st[k].mean[0] + st[k].mean[2]);
      }
      c.qn2 = -1;
      c.confidence = site_margin(v[s], mx, thr);
    } else if (nd == 0) {
      if (pr[k] <= thr.loc_frac) {
        c.label = StateLabel::E1;
        c.confidence = clamp01((thr.loc_frac - pr[k]) / thr.loc_frac);
      } else {
        c.label = StateLabel::E2;
        c.confidence = clamp01((pr[k] - thr.loc_frac) / thr.loc_frac);
      }
    } else {
      c.label = StateLabel::E2;
      c.confidence = 0.0;
    }
  }

  // Near-degenerate partners of a sharp state belong to the same torus even
  // when their own marginals are mixed; fold them into the neighbor family.
  for (int k = 0; k < L; ++k) {
    if (cls[k].label != StateLabel::E1 && cls[k].label != StateLabel::E2)
      continue;
    for (int nb : {k - 1, k + 1}) {
      if (nb < 0 || nb >= L) continue;
      if (std::abs(eig.energies[nb] - eig.energies[k]) >= thr.doublet_eps)
        continue;
      const StateLabel nl = cls[nb].label;
      if (nl != StateLabel::B && nl != StateLabel::C && nl != StateLabel::D)
        continue;
      const int site = nl == StateLabel::B ? 0 : nl == StateLabel::C ? 2 : 1;
      const double target =
          nl == StateLabel::D ? N - cls[nb].qn1 : cls[nb].qn1;
      if (std::abs(st[k].mean[site] - target) < thr.mean_tol) {
        cls[k].label = nl;
        cls[k].qn1 = cls[nb].qn1;
        cls[k].qn2 = -1;
        cls[k].confidence = 0.5;
        break;
      }
    }
  }

  // E1 rung assignment: tau_d from the stretch-mode second moment, tau_a
  // from the residual against the two-frequency energy lattice.
  std::vector<int> e1s;
  for (int k = 0; k < L; ++k)
    if (cls[k].label == StateLabel::E1) e1s.push_back(k);
  // With fewer than three such states the rung lattice cannot be
  // calibrated; their quantum numbers then stay unset.
  if (e1s.size() >= 3) {
    const Eigen::VectorXd v0 = eig.vectors.col(e1s[0]);
    const double base_d = marginal_x2_min(v0, basis, kShiftD);
    const double om_d = eig.energies[e1s[2]] - eig.energies[e1s[0]];
    const double om_a = eig.energies[e1s[1]] - eig.energies[e1s[0]];
    const double E0 = eig.energies[e1s[0]];
    std::vector<std::pair<int, int>> assign(e1s.size());
    std::vector<double> resid(e1s.size());
    for (size_t idx = 0; idx < e1s.size(); ++idx) {
      const int k = e1s[idx];
      const Eigen::VectorXd vk = eig.vectors.col(k);
      const double md = marginal_x2_min(vk, basis, kShiftD);
      const int td = std::max(round_i((md / base_d - 1.0) / 2.0), 0);
      const int ta =
          std::max(round_i((eig.energies[k] - E0 - td * om_d) / om_a), 0);
      const double rr =
          std::abs(eig.energies[k] - E0 - td * om_d - ta * om_a);
      assign[idx] = {td, ta};
      resid[idx] = rr;
      if (rr > 0.5) cls[k].confidence = 0.0;
    }
    std::map<std::pair<int, int>, size_t> seen;
    for (size_t idx = 0; idx < e1s.size(); ++idx) {
      if (cls[e1s[idx]].confidence == 0.0) continue;
      auto [it, fresh] = seen.try_emplace(assign[idx], idx);
      if (!fresh) {
        const size_t loser = resid[idx] >= resid[it->second] ? idx : it->second;
        const size_t winner = loser == idx ? it->second : idx;
        cls[e1s[loser]].confidence = 0.0;
        it->second = winner;
      }
    }
    for (size_t idx = 0; idx < e1s.size(); ++idx) {
      cls[e1s[idx]].qn1 = assign[idx].first;
      cls[e1s[idx]].qn2 = assign[idx].second;
    }
  }
  return cls;
}

std::vector<LadderFamily> build_ladders(std::vector<EigenstateClass>& classes,
                                        const EigenSolution& eig,
                                        const FockBasis& basis) {
  check_solution(eig, basis);
  const int L = static_cast<int>(classes.size());
  std::vector<LadderFamily> out;

  for (StateLabel lbl : {StateLabel::B, StateLabel::C, StateLabel::D}) {
    std::map<int, std::vector<int>> by_lambda;
    for (int k = 0; k < L; ++k)
      if (classes[k].label == lbl) by_lambda[classes[k].qn1].push_back(k);
    for (auto& [lv, mem] : by_lambda) {
      LadderFamily f;
      f.label = lbl;
      f.lambda = lv;
      f.members = mem;  // index order is energy order
      f.taus.resize(mem.size());
      for (size_t t = 0; t < mem.size(); ++t) {
        f.taus[t] = static_cast<int>(t);
        classes[mem[t]].qn2 = static_cast<int>(t);
      }
      std::vector<double> es;
      for (int k : mem) es.push_back(eig.energies[k]);
      const auto groups = collapse_levels(es);
      const auto coll = group_means(es, groups);
      if (coll.size() >= 2) {
        std::vector<double> csp(coll.size() - 1);
        for (size_t i = 0; i + 1 < coll.size(); ++i) csp[i] = coll[i + 1] - coll[i];
        f.incomplete = *std::max_element(csp.begin(), csp.end()) >
                       2.2 * median(csp);
      }
      if (lbl == StateLabel::B || lbl == StateLabel::C) {
        const auto st = site_statistics(eig.vectors.col(mem[0]), basis);
        if (lbl == StateLabel::C)
          f.alpha = {round_i(st.mean[0]), round_i(st.mean[1])};
        else
          f.alpha = {round_i(st.mean[1]), round_i(st.mean[2])};
      }
      out.push_back(std::move(f));
    }
  }

  std::vector<int> surv;
  for (int k = 0; k < L; ++k)
    if (classes[k].label == StateLabel::E1 && classes[k].confidence > 0.0)
      surv.push_back(k);
  for (char axis : {'d', 'a'}) {
    std::map<int, std::vector<int>> by_fixed;
    for (int k : surv) {
      const int fixed = axis == 'd' ? classes[k].qn2 : classes[k].qn1;
      by_fixed[fixed].push_back(k);
    }
    for (auto& [fx, mem] : by_fixed) {
      LadderFamily f;
      f.label = StateLabel::E1;
      f.axis = axis;
      f.lambda = fx;
      f.members = mem;
      for (int k : mem)
        f.taus.push_back(axis == 'd' ? classes[k].qn1 : classes[k].qn2);
      for (size_t t = 0; t < f.taus.size(); ++t)
        if (f.taus[t] != static_cast<int>(t)) {
          f.incomplete = true;
          break;
        }
      out.push_back(std::move(f));
    }
  }
  return out;
}

const char* branch_name(FitBranch b) {
  switch (b) {
    case FitBranch::harmonic: return "harmonic";
    case FitBranch::x_saturated: return "x-saturated";
    case FitBranch::x_split: return "x-split";
  }
  return "?";
}

namespace {

struct OscFrame {
  std::array<int, 3> shift;
  int kind;  // 0: var n1; 1: var n3; 2: relative pair (n1 - n3)/2; 3: var n2 / 4
};

OscFrame frame_of(const LadderFamily& f) {
  switch (f.label) {
    case StateLabel::C: return {kShiftC, 0};
    case StateLabel::B: return {kShiftB, 1};
    case StateLabel::D: return {kShiftA, 2};
    case StateLabel::E1:
      return f.axis == 'd' ? OscFrame{kShiftD, 3} : OscFrame{kShiftA, 2};
    default:
      throw FitError("fit_oscillator: family kind carries no oscillator frame");
  }
}

double momentum_var(const SiteStatistics& st, int kind) {
  switch (kind) {
    case 0: return st.var[0];
    case 1: return st.var[2];
    case 2:
      return (st.cov[0][0] + st.cov[2][2] - 2.0 * st.cov[0][2]) / 4.0;
    default: return st.var[1] / 4.0;
  }
}

}  // namespace

OscillatorFit fit_oscillator(const LadderFamily& family,
                             const EigenSolution& eig, const FockBasis& basis,
                             int tau) {
  check_solution(eig, basis);
  if (family.members.size() < 2)
    throw FitError("fit_oscillator: family needs at least two members");
  const OscFrame fr = frame_of(family);
  const auto it = std::find(family.taus.begin(), family.taus.end(), tau);
  if (it == family.taus.end())
    throw FitError("fit_oscillator: no member at the requested rung");
  const int i = static_cast<int>(it - family.taus.begin());
  const int k0 = family.members[i];

  const Eigen::VectorXd v0 = eig.vectors.col(k0);
  const double x2 = marginal_x2_min(v0, basis, fr.shift);
  const double width_rate = (2.0 * tau + 1.0) / (2.0 * x2);
  const double pvar0 =
      2.0 * momentum_var(site_statistics(v0, basis), fr.kind) / (2.0 * tau + 1.0);
  const double r = width_rate / pvar0;

  std::vector<double> es;
  for (int k : family.members) es.push_back(eig.energies[k]);
  const auto groups = collapse_levels(es);
  const auto coll = group_means(es, groups);
  int gi = 0;
  for (size_t g = 0; g < groups.size(); ++g)
    if (std::find(groups[g].begin(), groups[g].end(), i) != groups[g].end()) {
      gi = static_cast<int>(g);
      break;
    }

  OscillatorFit out;
  out.ratio = r;
  if (r >= 2.0 / 3.0 && r <= 1.5) {
    if (coll.size() < 2)
      throw FitError("fit_oscillator: no level spacing available");
    out.omega = coll[1] - coll[0];
    out.m_eff = (2.0 * tau + 1.0) / (2.0 * out.omega * x2);
    out.branch = FitBranch::harmonic;
    return out;
  }

  // anharmonic ends need the momentum width of the next rung as well
  const auto it1 = std::find(family.taus.begin(), family.taus.end(), tau + 1);
  if (it1 == family.taus.end())
    throw FitError("fit_oscillator: no member above the requested rung");
  const int k1 = family.members[it1 - family.taus.begin()];
  const double pvar1 =
      2.0 * momentum_var(site_statistics(eig.vectors.col(k1), basis), fr.kind) /
      (2.0 * (tau + 1) + 1.0);

  if (r > 1.5) {
    // marginal width saturated by the chart: spacing local to the rung
    if (gi + 1 >= static_cast<int>(coll.size()))
      throw FitError("fit_oscillator: no level spacing above the requested rung");
    out.omega = coll[gi + 1] - coll[gi];
    out.branch = FitBranch::x_saturated;
  } else {
    // doublet-split ladder: spacing from the whole sharp-site sector
    int site;
    switch (family.label) {
      case StateLabel::B: site = 0; break;
      case StateLabel::C: site = 2; break;
      case StateLabel::D: site = 1; break;
      default:
        throw FitError("fit_oscillator: split branch undefined for this family");
    }
    const int target = family.label == StateLabel::D ? basis.N() - family.lambda
                                                     : family.lambda;
    std::vector<double> ses;
    for (int k = 0; k < static_cast<int>(eig.energies.size()); ++k) {
      const auto st = site_statistics(eig.vectors.col(k), basis);
      if (round_i(st.mean[site]) == target && st.var[site] < 1.2)
        ses.push_back(eig.energies[k]);
    }
    const auto scoll = group_means(ses, collapse_levels(ses));
    if (scoll.size() < 2)
      throw FitError("fit_oscillator: sector too small to set a spacing");
    out.omega = (scoll.back() - scoll.front()) / (scoll.size() - 1);
    out.branch = FitBranch::x_split;
  }
  out.m_eff = std::sqrt(pvar0 * pvar1) / out.omega;
  return out;
}

Classification classify_full(const EigenSolution& eig, const FockBasis& basis,
                             const ClassifyThresholds& thr) {
  Classification out;
  out.classes = classify_eigenstates(eig, basis, thr);
  out.families = build_ladders(out.classes, eig, basis);
  for (auto& f : out.families) {
    if (f.members.size() < 2) continue;
    try {
      const OscillatorFit fit = fit_oscillator(f, eig, basis, f.taus.front());
      f.omega = fit.omega;
      f.m_eff = fit.m_eff;
    } catch (const FitError&) {
    }
  }
  return out;
}

}  // namespace trimer
