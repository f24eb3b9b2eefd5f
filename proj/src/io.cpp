#include "trimer/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "trimer/analytic.hpp"

namespace trimer {

namespace {

constexpr char kCacheMagic[8] = {'T', 'R', 'I', 'M', 'E', 'I', 'G', '1'};
constexpr std::uint32_t kCacheVersion = 1;

std::string shortest(double x) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, p);
}

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e && std::isfinite(out);
}

bool parse_int(const std::string& s, int& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

[[noreturn]] void config_fail(int lineno, const std::string& msg) {
  throw ConfigError("line " + std::to_string(lineno) + ": " + msg);
}

}  // namespace

void RunConfig::validate() const {
  try {
    model.validate();
    thresholds.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(tol > 0.0) || !std::isfinite(tol))
    throw ConfigError("tol must be positive");
  if (grid_resolution < 32)
    throw ConfigError("grid_resolution must be at least 32");
  if (!(tmax_periods > 0.0) || !std::isfinite(tmax_periods))
    throw ConfigError("tmax_periods must be positive");
  if (samples < 2) throw ConfigError("samples must be at least 2");
  if (cache_path.empty()) throw ConfigError("cache_path must not be empty");
  if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_fail(lineno, "expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) config_fail(lineno, "empty key");
    if (val.empty()) config_fail(lineno, "empty value for key '" + key + "'");

    auto as_double = [&](double& dst) {
      if (!parse_double(val, dst))
        config_fail(lineno, "invalid value for key '" + key + "'");
    };
    auto as_int = [&](int& dst) {
      if (!parse_int(val, dst))
        config_fail(lineno, "invalid value for key '" + key + "'");
    };

    if (key == "N") as_int(cfg.model.N);
    else if (key == "epsilon_bar") as_double(cfg.model.epsilon_bar);
    else if (key == "delta") as_double(cfg.model.delta);
    else if (key == "kappa12") as_double(cfg.model.kappa12);
    else if (key == "kappa23") as_double(cfg.model.kappa23);
    else if (key == "zeta") as_double(cfg.model.zeta);
    else if (key == "tol") as_double(cfg.tol);
    else if (key == "v_abs") as_double(cfg.thresholds.v_abs);
    else if (key == "v_rel") as_double(cfg.thresholds.v_rel);
    else if (key == "v_ceil") as_double(cfg.thresholds.v_ceil);
    else if (key == "loc_frac") as_double(cfg.thresholds.loc_frac);
    else if (key == "doublet_eps") as_double(cfg.thresholds.doublet_eps);
    else if (key == "mean_tol") as_double(cfg.thresholds.mean_tol);
    else if (key == "grid_resolution") as_int(cfg.grid_resolution);
    else if (key == "tmax_periods") as_double(cfg.tmax_periods);
    else if (key == "samples") as_int(cfg.samples);
    else if (key == "cache_path") cfg.cache_path = val;
    else if (key == "out_dir") cfg.out_dir = val;
    else config_fail(lineno, "unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string parameter_block(const RunConfig& cfg) {
  std::ostringstream out;
  out << "N=" << cfg.model.N << "\n"
      << "epsilon_bar=" << shortest(cfg.model.epsilon_bar) << "\n"
      << "delta=" << shortest(cfg.model.delta) << "\n"
      << "kappa12=" << shortest(cfg.model.kappa12) << "\n"
      << "kappa23=" << shortest(cfg.model.kappa23) << "\n"
      << "zeta=" << shortest(cfg.model.zeta) << "\n"
      << "tol=" << shortest(cfg.tol) << "\n";
  return out.str();
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << parameter_block(cfg)
      << "v_abs=" << shortest(cfg.thresholds.v_abs) << "\n"
      << "v_rel=" << shortest(cfg.thresholds.v_rel) << "\n"
      << "v_ceil=" << shortest(cfg.thresholds.v_ceil) << "\n"
      << "loc_frac=" << shortest(cfg.thresholds.loc_frac) << "\n"
      << "doublet_eps=" << shortest(cfg.thresholds.doublet_eps) << "\n"
      << "mean_tol=" << shortest(cfg.thresholds.mean_tol) << "\n"
      << "grid_resolution=" << cfg.grid_resolution << "\n"
      << "tmax_periods=" << shortest(cfg.tmax_periods) << "\n"
      << "samples=" << cfg.samples << "\n"
      << "cache_path=" << cfg.cache_path << "\n"
      << "out_dir=" << cfg.out_dir << "\n";
  return out.str();
}

// ---- state specs ----------------------------------------------------------

namespace {

bool nan_equal(double x, double y) {
  return (std::isnan(x) && std::isnan(y)) || x == y;
}

bool label_from_string(const std::string& s, StateLabel& out) {
  if (s == "A") out = StateLabel::A;
  else if (s == "B") out = StateLabel::B;
  else if (s == "C") out = StateLabel::C;
  else if (s == "D") out = StateLabel::D;
  else if (s == "E1") out = StateLabel::E1;
  else return false;
  return true;
}

StateTerm parse_term(const std::string& text) {
  StateTerm term;
  bool have_core = false;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok.rfind("w=", 0) == 0) {
      if (!std::isnan(term.weight))
        throw UsageError("duplicate magnitude in state term '" + text + "'");
      double w;
      if (!parse_double(tok.substr(2), w) || !(w > 0.0))
        throw UsageError("invalid magnitude '" + tok + "'");
      term.weight = w;
    } else if (tok.rfind("g=", 0) == 0) {
      if (!std::isnan(term.phase))
        throw UsageError("duplicate phase in state term '" + text + "'");
      double g;
      if (!parse_double(tok.substr(2), g))
        throw UsageError("invalid phase '" + tok + "'");
      term.phase = g;
    } else if (tok[0] == '#') {
      if (have_core)
        throw UsageError("more than one state in term '" + text + "'");
      int idx;
      if (!parse_int(tok.substr(1), idx) || idx < 0)
        throw UsageError("invalid state index '" + tok + "'");
      term.raw = true;
      term.index = idx;
      have_core = true;
    } else if (tok.find(':') != std::string::npos) {
      if (have_core)
        throw UsageError("more than one state in term '" + text + "'");
      const auto colon = tok.find(':');
      StateLabel label;
      if (!label_from_string(tok.substr(0, colon), label))
        throw UsageError("unknown state class in '" + tok + "'");
      const std::string rest = tok.substr(colon + 1);
      const auto comma = rest.find(',');
      int q1, q2;
      if (comma == std::string::npos || !parse_int(rest.substr(0, comma), q1) ||
          !parse_int(rest.substr(comma + 1), q2))
        throw UsageError("expected two comma-separated integers in '" + tok + "'");
      term.raw = false;
      term.label = label;
      term.qn1 = q1;
      term.qn2 = q2;
      have_core = true;
    } else {
      throw UsageError("unrecognized token '" + tok + "' in state term");
    }
  }
  if (!have_core)
    throw UsageError("state term '" + trim(text) + "' names no state");
  return term;
}

}  // namespace

bool operator==(const StateTerm& x, const StateTerm& y) {
  if (x.raw != y.raw) return false;
  if (x.raw) {
    if (x.index != y.index) return false;
  } else {
    if (x.label != y.label || x.qn1 != y.qn1 || x.qn2 != y.qn2) return false;
  }
  return nan_equal(x.weight, y.weight) && nan_equal(x.phase, y.phase);
}

bool operator==(const StateSpec& x, const StateSpec& y) {
  return x.terms == y.terms;
}

StateSpec parse_state_spec(const std::string& text) {
  // split on '+' term separators; a '+' directly after an exponent marker
  // belongs to a number
  std::vector<std::string> parts;
  std::string cur;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '+' && (cur.empty() || (cur.back() != 'e' && cur.back() != 'E'))) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(text[i]);
    }
  }
  parts.push_back(cur);

  StateSpec spec;
  for (const auto& p : parts) {
    if (trim(p).empty())
      throw UsageError("empty term in state spec '" + text + "'");
    spec.terms.push_back(parse_term(p));
  }
  if (spec.terms.size() > 2)
    throw UsageError("a state spec has at most two terms");
  return spec;
}

std::string serialize_state_spec(const StateSpec& spec) {
  std::string out;
  for (size_t i = 0; i < spec.terms.size(); ++i) {
    const StateTerm& t = spec.terms[i];
    if (i) out += " + ";
    if (!std::isnan(t.weight)) out += "w=" + shortest(t.weight) + " ";
    if (!std::isnan(t.phase)) out += "g=" + shortest(t.phase) + " ";
    if (t.raw) {
      out += "#" + std::to_string(t.index);
    } else {
      out += std::string(label_name(t.label)) + ":" + std::to_string(t.qn1) +
             "," + std::to_string(t.qn2);
    }
  }
  return out;
}

namespace {

std::string term_text(const StateTerm& t) {
  if (t.raw) return "#" + std::to_string(t.index);
  return std::string(label_name(t.label)) + ":" + std::to_string(t.qn1) + "," +
         std::to_string(t.qn2);
}

std::string tau_range(const LadderFamily& f) {
  std::string s;
  for (size_t i = 0; i < f.taus.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(f.taus[i]);
  }
  return s;
}

int resolve_term(const StateTerm& t, const Classification& cls,
                 const EigenSolution& eig) {
  const int L = static_cast<int>(eig.energies.size());
  if (t.raw) {
    if (t.index >= L)
      throw ResolveError("state " + term_text(t) + " is outside 0.." +
                         std::to_string(L - 1));
    return t.index;
  }

  if (t.label == StateLabel::A) {
    std::vector<int> idx;
    for (int k = 0; k < L; ++k)
      if (cls.classes[k].label == StateLabel::A) idx.push_back(k);
    for (int k : idx)
      if (cls.classes[k].qn1 == t.qn1 && cls.classes[k].qn2 == t.qn2) return k;
    std::sort(idx.begin(), idx.end(), [&](int x, int y) {
      const auto d = [&](int k) {
        return std::abs(cls.classes[k].qn1 - t.qn1) +
               std::abs(cls.classes[k].qn2 - t.qn2);
      };
      return d(x) < d(y);
    });
    std::string near;
    for (size_t i = 0; i < idx.size() && i < 3; ++i)
      near += " A:" + std::to_string(cls.classes[idx[i]].qn1) + "," +
              std::to_string(cls.classes[idx[i]].qn2);
    throw ResolveError("no state " + term_text(t) +
                       "; nearest existing:" + (near.empty() ? " none" : near));
  }

  if (t.label == StateLabel::E1) {
    std::vector<int> surv;
    for (int k = 0; k < L; ++k)
      if (cls.classes[k].label == StateLabel::E1 &&
          cls.classes[k].confidence > 0.0)
        surv.push_back(k);
    for (int k : surv)
      if (cls.classes[k].qn1 == t.qn1 && cls.classes[k].qn2 == t.qn2) return k;
    std::sort(surv.begin(), surv.end(), [&](int x, int y) {
      const auto d = [&](int k) {
        return std::abs(cls.classes[k].qn1 - t.qn1) +
               std::abs(cls.classes[k].qn2 - t.qn2);
      };
      return d(x) < d(y);
    });
    std::string near;
    for (size_t i = 0; i < surv.size() && i < 3; ++i)
      near += " E1:" + std::to_string(cls.classes[surv[i]].qn1) + "," +
              std::to_string(cls.classes[surv[i]].qn2);
    throw ResolveError("no state " + term_text(t) +
                       "; nearest existing:" + (near.empty() ? " none" : near));
  }

  // B, C, D: lambda selects the family, the second number is the rung
  const LadderFamily* fam = nullptr;
  for (const auto& f : cls.families)
    if (f.label == t.label && f.axis == 0 && f.lambda == t.qn1) fam = &f;
  if (!fam) {
    std::vector<const LadderFamily*> same;
    for (const auto& f : cls.families)
      if (f.label == t.label && f.axis == 0) same.push_back(&f);
    std::sort(same.begin(), same.end(),
              [&](const LadderFamily* x, const LadderFamily* y) {
                return std::abs(x->lambda - t.qn1) < std::abs(y->lambda - t.qn1);
              });
    std::string near;
    for (size_t i = 0; i < same.size() && i < 3; ++i)
      near += " " + std::string(label_name(t.label)) + ":" +
              std::to_string(same[i]->lambda) + " (tau " + tau_range(*same[i]) +
              ")";
    throw ResolveError("no " + std::string(label_name(t.label)) +
                       " family with lambda=" + std::to_string(t.qn1) +
                       "; nearest existing:" + (near.empty() ? " none" : near));
  }
  for (size_t i = 0; i < fam->taus.size(); ++i)
    if (fam->taus[i] == t.qn2) return fam->members[i];
  throw ResolveError("family " + std::string(label_name(t.label)) + ":" +
                     std::to_string(t.qn1) + " has rungs tau=" +
                     tau_range(*fam) + ", not " + std::to_string(t.qn2));
}

}  // namespace

SuperpositionSpec resolve_state_spec(const StateSpec& spec,
                                     const Classification& cls,
                                     const EigenSolution& eig) {
  if (spec.terms.empty() || spec.terms.size() > 2)
    throw ResolveError("state spec must have one or two terms");
  std::vector<int> idx;
  for (const auto& t : spec.terms) idx.push_back(resolve_term(t, cls, eig));
  if (idx.size() == 2 && idx[0] == idx[1])
    throw ResolveError("both terms resolve to state #" + std::to_string(idx[0]));

  SuperpositionSpec out;
  out.a = idx[0];
  out.gamma_a = std::isnan(spec.terms[0].phase) ? 0.0 : spec.terms[0].phase;
  if (idx.size() == 1) {
    out.b = idx[0];
    out.mag_a = 1.0;
    out.mag_b = 0.0;
    out.gamma_b = 0.0;
    return out;
  }
  out.b = idx[1];
  out.gamma_b = std::isnan(spec.terms[1].phase) ? 0.0 : spec.terms[1].phase;
  const double wa = std::isnan(spec.terms[0].weight) ? 1.0 : spec.terms[0].weight;
  const double wb = std::isnan(spec.terms[1].weight) ? 1.0 : spec.terms[1].weight;
  const double norm = std::sqrt(wa * wa + wb * wb);
  out.mag_a = wa / norm;
  out.mag_b = wb / norm;
  return out;
}

// ---- eigendata cache ------------------------------------------------------

namespace {

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void save_cache(const std::filesystem::path& path, const RunConfig& cfg,
                const EigenSolution& eig) {
  const int L = static_cast<int>(eig.energies.size());
  if (eig.vectors.rows() != L || eig.vectors.cols() != L)
    throw CacheError("save_cache: solution is not a complete eigenbasis");
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw CacheError("cannot open cache file '" + path.string() +
                     "' for writing");
  out.write(kCacheMagic, sizeof(kCacheMagic));
  put(out, kCacheVersion);
  const std::string params = parameter_block(cfg);
  put(out, static_cast<std::uint32_t>(params.size()));
  out.write(params.data(), params.size());
  put(out, static_cast<std::uint32_t>(L));
  out.write(reinterpret_cast<const char*>(eig.energies.data()),
            sizeof(double) * L);
  out.write(reinterpret_cast<const char*>(eig.vectors.data()),
            sizeof(double) * L * L);
  put(out, eig.residual);
  if (!out)
    throw CacheError("failed writing cache file '" + path.string() + "'");
}

EigenSolution load_cache(const std::filesystem::path& path,
                         const RunConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw CacheError("no eigendata cache at '" + path.string() +
                     "'; run the diagonalize command first");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(magic, magic + 8, kCacheMagic))
    throw CacheError("'" + path.string() + "' is not an eigendata cache");
  std::uint32_t version = 0;
  get(in, version);
  if (!in || version != kCacheVersion)
    throw CacheError("unsupported cache version in '" + path.string() + "'");
  std::uint32_t plen = 0;
  get(in, plen);
  if (!in || plen > (1u << 20))
    throw CacheError("corrupt cache file '" + path.string() + "'");
  std::string params(plen, '\0');
  in.read(params.data(), plen);
  if (!in) throw CacheError("truncated cache file '" + path.string() + "'");
  const std::string expected = parameter_block(cfg);
  if (params != expected)
    throw CacheError("cache '" + path.string() +
                     "' was built for different parameters\n--- cache\n" +
                     params + "--- configuration\n" + expected +
                     "re-run the diagonalize command");
  std::uint32_t L = 0;
  get(in, L);
  const auto expect_L =
      static_cast<std::uint32_t>((cfg.model.N + 1) * (cfg.model.N + 2) / 2);
  if (!in || L != expect_L)
    throw CacheError("corrupt cache file '" + path.string() + "'");
  EigenSolution eig;
  eig.energies.resize(L);
  in.read(reinterpret_cast<char*>(eig.energies.data()), sizeof(double) * L);
  eig.vectors.resize(L, L);
  in.read(reinterpret_cast<char*>(eig.vectors.data()),
          sizeof(double) * L * L);
  get(in, eig.residual);
  if (!in) throw CacheError("truncated cache file '" + path.string() + "'");
  if (in.peek() != std::char_traits<char>::eof())
    throw CacheError("trailing bytes in cache file '" + path.string() + "'");
  return eig;
}

// ---- tables ---------------------------------------------------------------

std::string format_sig(double x) {
  char buf[40];
  auto [p, ec] =
      std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 12);
  return std::string(buf, p);
}

void write_classification_csv(std::ostream& out, const Classification& cls,
                              const EigenSolution& eig) {
  out << "index,energy,label,qn1,qn2,confidence\n";
  for (size_t k = 0; k < cls.classes.size(); ++k) {
    const EigenstateClass& c = cls.classes[k];
    out << k << "," << format_sig(eig.energies[k]) << "," << label_name(c.label)
        << ",";
    if (c.label != StateLabel::E2 && c.qn1 >= 0) out << c.qn1;
    out << ",";
    if (c.label != StateLabel::E2 && c.qn2 >= 0) out << c.qn2;
    out << "," << format_sig(c.confidence) << "\n";
  }
}

void write_families_csv(std::ostream& out, const Classification& cls) {
  out << "family,label,lambda,members,omega,m_eff\n";
  for (size_t i = 0; i < cls.families.size(); ++i) {
    const LadderFamily& f = cls.families[i];
    out << i << "," << label_name(f.label);
    if (f.axis) out << f.axis;
    out << "," << f.lambda << ",";
    for (size_t j = 0; j < f.members.size(); ++j) {
      if (j) out << ";";
      out << f.members[j];
    }
    out << ",";
    if (!std::isnan(f.omega)) out << format_sig(f.omega);
    out << ",";
    if (!std::isnan(f.m_eff)) out << format_sig(f.m_eff);
    out << "\n";
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t_over_T,n1,n2,n3\n";
  for (size_t i = 0; i < traj.t_over_T.size(); ++i)
    out << format_sig(traj.t_over_T[i]) << "," << format_sig(traj.n[i][0])
        << "," << format_sig(traj.n[i][1]) << "," << format_sig(traj.n[i][2])
        << "\n";
}

void write_chart_csv(std::ostream& out, const DynRepField& field) {
  out << "u,v,density\n";
  TorusGrid grid{field.resolution};
  for (int iu = 0; iu < field.resolution; ++iu)
    for (int iv = 0; iv < field.resolution; ++iv)
      out << format_sig(grid.node(iu)) << "," << format_sig(grid.node(iv))
          << "," << format_sig(field.density(iu, iv)) << "\n";
}

// ---- driver ---------------------------------------------------------------

namespace {

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

bool spec_is_raw_only(const StateSpec& spec) {
  return std::all_of(spec.terms.begin(), spec.terms.end(),
                     [](const StateTerm& t) { return t.raw; });
}

void print_compare(const SuperpositionSpec& sp, const Classification& cls,
                   const EigenSolution& eig, const FockBasis& basis);

}  // namespace

int run_pipeline(const std::string& command, const RunConfig& cfg,
                 const PipelineArgs& args) {
  cfg.validate();
  const std::filesystem::path out_dir = cfg.out_dir;
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "config_used.cfg", serialize_config(cfg));

  const FockBasis basis(cfg.model.N);

  if (command == "diagonalize") {
    const Eigen::MatrixXd H = build_hamiltonian(basis, cfg.model);
    const EigenSolution eig = diagonalize(H, cfg.tol);
    save_cache(cfg.cache_path, cfg, eig);
    std::cout << "levels=" << basis.size()
              << " E_min=" << format_sig(eig.energies.front())
              << " E_max=" << format_sig(eig.energies.back())
              << " residual=" << format_sig(eig.residual)
              << " cache=" << cfg.cache_path << "\n";
    return 0;
  }

  if (command != "classify" && command != "simulate" && command != "compare" &&
      command != "grid")
    throw UsageError("unknown command '" + command + "'");

  const EigenSolution eig = load_cache(cfg.cache_path, cfg);

  if (command == "grid") {
    if (args.index < 0 || args.index >= basis.size())
      throw UsageError("--index must be in 0.." + std::to_string(basis.size() - 1));
    const DynRepField field = evaluate_dynrep(
        eig.vectors.col(args.index), basis, TorusGrid{cfg.grid_resolution});
    const std::filesystem::path path =
        args.output.empty()
            ? out_dir / ("chart_" + std::to_string(args.index) + ".csv")
            : std::filesystem::path(args.output);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    write_chart_csv(out, field);
    std::cout << "wrote " << path.string()
              << " resolution=" << cfg.grid_resolution
              << " norm=" << format_sig(field.quadrature_norm()) << "\n";
    return 0;
  }

  if (command == "classify") {
    const Classification cls = classify_full(eig, basis, cfg.thresholds);
    int counts[6] = {};
    for (const auto& c : cls.classes) counts[static_cast<int>(c.label)]++;
    {
      std::ofstream out(out_dir / "classification.csv", std::ios::binary);
      if (!out) throw ConfigError("cannot write classification.csv");
      write_classification_csv(out, cls, eig);
    }
    {
      std::ofstream out(out_dir / "families.csv", std::ios::binary);
      if (!out) throw ConfigError("cannot write families.csv");
      write_families_csv(out, cls);
    }
    std::cout << "levels=" << cls.classes.size();
    for (int l = 0; l < 6; ++l)
      std::cout << " " << label_name(static_cast<StateLabel>(l)) << "="
                << counts[l];
    std::cout << " families=" << cls.families.size() << "\n";
    std::cout << "wrote " << (out_dir / "classification.csv").string() << " "
              << (out_dir / "families.csv").string() << "\n";
    return 0;
  }

  // simulate / compare need a state spec; classification only for named terms
  if (args.state.empty())
    throw UsageError(command + " requires --state");
  const StateSpec spec = parse_state_spec(args.state);
  Classification cls;
  if (!spec_is_raw_only(spec)) cls = classify_full(eig, basis, cfg.thresholds);
  else if (command == "compare") cls = classify_full(eig, basis, cfg.thresholds);
  const SuperpositionSpec sp = resolve_state_spec(spec, cls, eig);

  if (command == "simulate") {
    if (cfg.model.delta == 0.0)
      throw UsageError("the trajectory time unit 2*pi/delta needs delta != 0");
    const double T = 2.0 * std::numbers::pi / std::abs(cfg.model.delta);
    double periods = cfg.tmax_periods;
    if (args.tmax_periods >= 0.0) {
      if (!(args.tmax_periods > 0.0))
        throw UsageError("--tmax must be positive");
      periods = args.tmax_periods;
    }
    int samples = cfg.samples;
    if (args.samples >= 0) {
      if (args.samples < 2) throw UsageError("--samples must be at least 2");
      samples = args.samples;
    }
    const Trajectory traj = closed_form_trajectory(
        sp, eig, basis, sample_times(periods * T, samples), T);
    const std::filesystem::path path = args.output.empty()
                                           ? out_dir / "trajectory.csv"
                                           : std::filesystem::path(args.output);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    write_trajectory_csv(out, traj);
    std::cout << "wrote " << path.string() << " states=#" << sp.a << "+#"
              << sp.b << " beat=" << format_sig(traj.beat)
              << " period=" << format_sig(traj.period) << "\n";
    return 0;
  }

  // compare
  if (spec.terms.size() != 2)
    throw UsageError("compare requires a two-term state");
  print_compare(sp, cls, eig, basis);
  return 0;
}

namespace {

void print_compare(const SuperpositionSpec& sp, const Classification& cls,
                   const EigenSolution& eig, const FockBasis& basis) {
  const EigenstateClass& ca = cls.classes[sp.a];
  const EigenstateClass& cb = cls.classes[sp.b];
  std::cout << "pair: #" << sp.a << " " << label_name(ca.label) << "("
            << ca.qn1 << "," << ca.qn2 << ") E=" << format_sig(eig.energies[sp.a])
            << "\n      #" << sp.b << " " << label_name(cb.label) << "("
            << cb.qn1 << "," << cb.qn2 << ") E=" << format_sig(eig.energies[sp.b])
            << "\n";
  std::cout << "beat=" << format_sig(eig.energies[sp.a] - eig.energies[sp.b])
            << "\n";

  // locate the shared ladder family, if any
  const LadderFamily* fam = nullptr;
  int tau_a = -1, tau_b = -1;
  if (ca.label == cb.label) {
    if (ca.label == StateLabel::B || ca.label == StateLabel::C ||
        ca.label == StateLabel::D) {
      if (ca.qn1 == cb.qn1) {
        for (const auto& f : cls.families)
          if (f.label == ca.label && f.axis == 0 && f.lambda == ca.qn1)
            fam = &f;
        tau_a = ca.qn2;
        tau_b = cb.qn2;
      }
    } else if (ca.label == StateLabel::E1 && ca.qn2 == cb.qn2) {
      for (const auto& f : cls.families)
        if (f.label == StateLabel::E1 && f.axis == 'd' && f.lambda == ca.qn2)
          fam = &f;
      tau_a = ca.qn1;
      tau_b = cb.qn1;
    }
  }

  double exact[3], off_exact[3];
  const Eigen::VectorXd va = eig.vectors.col(sp.a);
  const Eigen::VectorXd vb = eig.vectors.col(sp.b);
  for (int s = 0; s < 3; ++s) {
    exact[s] = number_matrix_element(va, vb, basis, s + 1);
    off_exact[s] = sp.mag_a * sp.mag_a *
                       number_matrix_element(va, va, basis, s + 1) +
                   sp.mag_b * sp.mag_b *
                       number_matrix_element(vb, vb, basis, s + 1);
  }

  if (!fam) {
    std::cout << "no shared ladder family; exact elements only\n";
    std::cout << "site exact_elem    exact_amp     offset\n";
    for (int s = 0; s < 3; ++s)
      std::cout << s + 1 << "    " << format_sig(exact[s]) << "  "
                << format_sig(2.0 * sp.mag_a * sp.mag_b * std::abs(exact[s]))
                << "  " << format_sig(off_exact[s]) << "\n";
    return;
  }

  OscillatorFit fit;
  try {
    fit = fit_oscillator(*fam, eig, basis, std::min(tau_a, tau_b));
  } catch (const FitError& e) {
    std::cout << "oscillator fit unavailable (" << e.what()
              << "); exact elements only\n";
    std::cout << "site exact_elem    exact_amp     offset\n";
    for (int s = 0; s < 3; ++s)
      std::cout << s + 1 << "    " << format_sig(exact[s]) << "  "
                << format_sig(2.0 * sp.mag_a * sp.mag_b * std::abs(exact[s]))
                << "  " << format_sig(off_exact[s]) << "\n";
    return;
  }
  std::cout << "fit: branch=" << branch_name(fit.branch)
            << " m_eff=" << format_sig(fit.m_eff)
            << " omega=" << format_sig(fit.omega) << "\n";

  std::cout << "site exact_amp     ideal_amp     rel_err   exact_offset  "
               "ideal_offset  ideal_phase\n";
  for (int s = 0; s < 3; ++s) {
    MatrixElementResult el, da, db;
    switch (fam->label) {
      case StateLabel::C:
        el = ideal_element_C(cb.qn1, tau_b, ca.qn1, tau_a, s + 1, fam->alpha,
                             fit.m_eff, fit.omega);
        da = ideal_element_C(ca.qn1, tau_a, ca.qn1, tau_a, s + 1, fam->alpha,
                             fit.m_eff, fit.omega);
        db = ideal_element_C(cb.qn1, tau_b, cb.qn1, tau_b, s + 1, fam->alpha,
                             fit.m_eff, fit.omega);
        break;
      case StateLabel::B:
        el = ideal_element_B(cb.qn1, tau_b, ca.qn1, tau_a, s + 1, fam->alpha,
                             fit.m_eff, fit.omega);
        da = ideal_element_B(ca.qn1, tau_a, ca.qn1, tau_a, s + 1, fam->alpha,
                             fit.m_eff, fit.omega);
        db = ideal_element_B(cb.qn1, tau_b, cb.qn1, tau_b, s + 1, fam->alpha,
                             fit.m_eff, fit.omega);
        break;
      case StateLabel::D:
        el = ideal_element_D(cb.qn1, tau_b, ca.qn1, tau_a, s + 1, fit.m_eff,
                             fit.omega, basis.N());
        da = ideal_element_D(ca.qn1, tau_a, ca.qn1, tau_a, s + 1, fit.m_eff,
                             fit.omega, basis.N());
        db = ideal_element_D(cb.qn1, tau_b, cb.qn1, tau_b, s + 1, fit.m_eff,
                             fit.omega, basis.N());
        break;
      default:
        el = ideal_element_E1(tau_b, ca.qn2, tau_a, ca.qn2, s + 1, fit.m_eff,
                              fit.omega, basis.N());
        da = ideal_element_E1(tau_a, ca.qn2, tau_a, ca.qn2, s + 1, fit.m_eff,
                              fit.omega, basis.N());
        db = ideal_element_E1(tau_b, cb.qn2, tau_b, cb.qn2, s + 1, fit.m_eff,
                              fit.omega, basis.N());
        break;
    }
    const double amp_exact = 2.0 * sp.mag_a * sp.mag_b * std::abs(exact[s]);
    const double amp_ideal = predicted_amplitude(el, sp.mag_a, sp.mag_b);
    const double off_ideal = sp.mag_a * sp.mag_a * da.value().real() +
                             sp.mag_b * sp.mag_b * db.value().real();
    std::cout << s + 1 << "    " << format_sig(amp_exact) << "  "
              << format_sig(amp_ideal) << "  ";
    if (amp_exact > 1e-12)
      std::cout << format_sig(std::abs(amp_exact - amp_ideal) / amp_exact);
    else
      std::cout << "-";
    std::cout << "  " << format_sig(off_exact[s]) << "  "
              << format_sig(off_ideal) << "  " << phase_name(el.phase) << "\n";
  }
}

}  // namespace

}  // namespace trimer
