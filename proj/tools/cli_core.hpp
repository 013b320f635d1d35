#pragma once

// The command-line tool minus argv plumbing. Option record, file loading
// with line-anchored diagnostics, the subcommand drivers that assemble the
// JSON and CSV documents, and the exit-code policy all live here so the
// test suite can drive each command directly and compare whole documents
// byte for byte. main() stays a thin flag-parsing shell.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rcd/cover.hpp"
#include "rcd/curve.hpp"
#include "rcd/cutoff.hpp"
#include "rcd/envelopes.hpp"
#include "rcd/errors.hpp"
#include "rcd/global_constants.hpp"
#include "rcd/hessian_checks.hpp"
#include "rcd/ledger.hpp"
#include "rcd/local_expansion.hpp"
#include "rcd/log_real.hpp"
#include "rcd/triangular_system.hpp"
#include "rcd/weights.hpp"
#include "rcd/windows.hpp"

namespace rcdcli {

using json = nlohmann::ordered_json;

// Exit codes. Not-regular input deliberately lands on the check-failure
// code: the file parsed fine, the regularity test on it failed, and scripts
// need to tell those two rejections apart.
constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kBadInput = 2;
constexpr int kInternalBug = 3;

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const rcd::NotRegularError*>(&e)) return kCheckFailed;
  if (dynamic_cast<const rcd::InternalError*>(&e) ||
      dynamic_cast<const rcd::ConstructionError*>(&e))
    return kInternalBug;
  if (dynamic_cast<const rcd::Error*>(&e)) return kBadInput;
  return kInternalBug;
}

// ---------------------------------------------------------------- options

struct RunConfig {
  std::string input;       // system file (positional)
  std::string curve_path;  // --curve, contact only
  std::string json_path;   // --json OUT
  std::string csv_path;    // --csv OUT
  std::string point;       // --p, "re[,im]" per coordinate joined by ';'
  std::string ladder;      // --delta-ladder START:COUNT, "" = command default
  double mu = 8.0;
  std::optional<double> delta;  // --delta; default depends on the mode
  unsigned grid = 0;            // --grid, 0 = per-command default
  std::size_t samples = 200;    // --samples per certification sweep
  bool relaxed = false;         // --relaxed; strict is the default
  std::uint64_t seed = 0;       // --seed
};

inline rcd::ScaleMode mode_of(const RunConfig& cfg) {
  return cfg.relaxed ? rcd::ScaleMode::Relaxed : rcd::ScaleMode::Strict;
}

inline const char* mode_name(const RunConfig& cfg) {
  return cfg.relaxed ? "relaxed" : "strict";
}

// ----------------------------------------------------------- small parsers

// Positive decimal scale, parsed straight into the log domain so exponents
// far outside double range survive ("2.5e-2000" is a valid scale).
inline rcd::LogReal parse_scale(const std::string& text) {
  auto fail = [&]() -> void {
    throw rcd::InvalidParameterError("not a positive scale: '" + text + "'");
  };
  auto epos = text.find_first_of("eE");
  std::string mant =
      text.substr(0, epos == std::string::npos ? text.size() : epos);
  double m = 0.0;
  std::size_t used = 0;
  try {
    m = std::stod(mant, &used);
  } catch (...) {
    fail();
  }
  if (used != mant.size() || !(m > 0.0)) fail();
  long long ex = 0;
  if (epos != std::string::npos) {
    std::string tail = text.substr(epos + 1);
    try {
      ex = std::stoll(tail, &used);
    } catch (...) {
      used = 0;
    }
    if (tail.empty() || used != tail.size()) fail();
  }
  return rcd::LogReal::from_log(std::log(m) +
                                static_cast<double>(ex) * std::log(10.0));
}

struct LadderSpec {
  rcd::LogReal start;
  unsigned rungs = 0;
};

inline LadderSpec parse_ladder(const std::string& text) {
  auto colon = text.rfind(':');
  if (colon == std::string::npos)
    throw rcd::InvalidParameterError(
        "ladder must look like START:COUNT, e.g. 1e-4:6");
  LadderSpec spec;
  spec.start = parse_scale(text.substr(0, colon));
  std::string tail = text.substr(colon + 1);
  unsigned long r = 0;
  std::size_t used = 0;
  try {
    r = std::stoul(tail, &used);
  } catch (...) {
    used = 0;
  }
  if (tail.empty() || used != tail.size() || r == 0 || r > 1000)
    throw rcd::InvalidParameterError("ladder rung count must be 1..1000");
  spec.rungs = static_cast<unsigned>(r);
  return spec;
}

// Base point grammar: coordinates joined by ';', each "re" or "re,im".
inline std::vector<rcd::Complex> parse_point(const std::string& text) {
  std::vector<rcd::Complex> out;
  if (text.empty()) return out;
  std::istringstream in(text);
  std::string coord;
  while (std::getline(in, coord, ';')) {
    auto num = [&](const std::string& part) {
      double v = 0.0;
      std::size_t used = 0;
      try {
        v = std::stod(part, &used);
      } catch (...) {
        used = 0;
      }
      if (part.empty() || used != part.size())
        throw rcd::InvalidParameterError("bad coordinate '" + coord +
                                         "' in base point");
      return v;
    };
    auto comma = coord.find(',');
    double re = num(coord.substr(0, comma));
    double im = comma == std::string::npos ? 0.0 : num(coord.substr(comma + 1));
    out.emplace_back(re, im);
  }
  return out;
}

// -------------------------------------------------------------- file input

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rcd::InvalidInputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// System loader that keeps original line numbers, so a bad polynomial is
// reported as "file:line: parse error at column c" instead of pointing into
// the comment-stripped text.
inline rcd::TriangularSystem load_system(const std::string& path) {
  std::string text = slurp(path);
  std::vector<std::pair<std::size_t, std::string>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.emplace_back(no, line);
  }
  if (rows.empty()) throw rcd::InvalidInputError(path + ": no components");
  rcd::TriangularSystem sys;
  sys.n = static_cast<unsigned>(rows.size());
  for (const auto& [lineno, body] : rows) {
    try {
      sys.f.push_back(rcd::parse_poly(body, sys.n, rcd::VarStyle::Z));
    } catch (const rcd::InvalidInputError& e) {
      throw rcd::InvalidInputError(path + ":" + std::to_string(lineno) + ": " +
                                   e.what());
    }
  }
  // full regularity gate, not just shape validation: a missing pure power
  // must surface here with its own exit code, before any command runs
  rcd::multiplicities(sys);
  return sys;
}

inline rcd::Curve load_curve(const std::string& path) {
  try {
    return rcd::parse_curve(slurp(path));
  } catch (const rcd::NotRegularError&) {
    throw;
  } catch (const rcd::Error& e) {
    throw rcd::InvalidInputError(path + ": " + e.what());
  }
}

// ----------------------------------------------------------- JSON assembly

// Scales appear as a decimal string (exact even when the linear value would
// underflow a double) paired with the natural log.
inline json jscale(double lg) {
  json j;
  j["decimal"] = rcd::decimal_from_log(lg);
  j["log"] = std::isfinite(lg) ? json(lg) : json(nullptr);
  return j;
}

inline json jscale(rcd::LogReal v) { return jscale(v.log()); }

inline json jpoint(const std::vector<rcd::Complex>& p) {
  json j = json::array();
  for (const auto& z : p) j.push_back({z.real(), z.imag()});
  return j;
}

inline std::string mixed_str(const rcd::ComplexPoly::Exponents& a) {
  if (std::all_of(a.begin(), a.end(), [](unsigned v) { return v == 0; }))
    return "-";
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(a[i]);
  }
  return s + ")";
}

// -------------------------------------------------------------- CSV output

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void csv_row(std::string& csv,
                    std::initializer_list<std::string> fields) {
  bool first = true;
  for (const auto& f : fields) {
    if (!first) csv += ',';
    csv += csv_field(f);
    first = false;
  }
  csv += '\n';
}

// Shortest round-trip rendering, matching the JSON document.
inline std::string num(double v) { return json(v).dump(); }

// ------------------------------------------------------------ shared setup

struct CmdResult {
  json doc;
  std::string csv;
  int exit = kOk;
};

inline json doc_header(const std::string& command, const RunConfig& cfg) {
  json j;
  j["schema"] = 1;
  j["command"] = command;
  j["input"] = cfg.input;
  return j;
}

// System, ledger, base point, and effective scale: the preamble shared by
// every command that works at a point.
struct Scene {
  rcd::TriangularSystem sys;
  rcd::ConstantsLedger L;
  std::vector<rcd::Complex> p;
  rcd::LogReal delta;
  rcd::ScaleMode mode = rcd::ScaleMode::Strict;
};

inline Scene make_scene(const RunConfig& cfg) {
  Scene sc;
  sc.sys = load_system(cfg.input);
  sc.L = rcd::ledger(sc.sys, rcd::LogReal::from_value(cfg.mu));
  std::vector<rcd::Complex> p = parse_point(cfg.point);
  if (p.empty()) p.assign(sc.sys.n, rcd::Complex(0.0));
  if (p.size() != sc.sys.n)
    throw rcd::InvalidParameterError(
        "base point needs " + std::to_string(sc.sys.n) + " coordinates, got " +
        std::to_string(p.size()));
  sc.p = std::move(p);
  sc.mode = mode_of(cfg);
  if (cfg.delta) {
    if (!(*cfg.delta > 0.0))
      throw rcd::InvalidParameterError("delta must be positive");
    sc.delta = rcd::LogReal::from_value(*cfg.delta);
  } else {
    // strict mode defaults to its own gate; relaxed to a demonstration scale
    sc.delta = cfg.relaxed ? rcd::LogReal::from_value(1e-8) : sc.L.delta_tilde;
  }
  return sc;
}

// ----------------------------------------------------------------- analyze

inline CmdResult cmd_analyze(const RunConfig& cfg) {
  rcd::TriangularSystem sys = load_system(cfg.input);
  rcd::ConstantsLedger L = rcd::ledger(sys, rcd::LogReal::from_value(cfg.mu));
  rcd::GainPrediction gain = rcd::epsilon_prediction(sys);
  rcd::CutoffSpec chi = rcd::make_cutoff(sys.n);
  rcd::GlobalConstants gc = rcd::fix_global_constants(L, chi);
  rcd::OverlapBound mt = rcd::overlap_bound(L);

  CmdResult r;
  r.doc = doc_header("analyze", cfg);
  r.doc["n"] = sys.n;
  r.doc["multiplicities"] = L.m;
  r.doc["m_product"] = gain.m_product.str();
  r.doc["epsilon"] = gain.epsilon.str();
  r.doc["epsilon_decimal"] = gain.epsilon.convert_to<double>();
  r.doc["mu"] = cfg.mu;
  r.doc["N"] = L.N;

  json levels = json::array();
  for (unsigned s = 1; s <= sys.n; ++s) {
    json lev;
    lev["level"] = s;
    lev["m"] = L.m[s - 1];
    lev["B"] = L.B[s - 1];
    lev["C"] = L.C[s - 1];
    lev["P"] = L.P[s - 1];
    lev["M_mu"] = jscale(L.M_mu[s - 1]);
    lev["Delta"] = jscale(L.Delta[s - 1]);
    lev["gap_exponent"] =
        L.A[s - 1] ? json(L.A[s - 1]->str()) : json(nullptr);
    lev["Delta_prime"] = jscale(L.Delta_prime[s - 1]);
    lev["Q"] = jscale(L.Q[s - 1]);
    levels.push_back(lev);
  }
  r.doc["levels"] = levels;
  r.doc["delta_mu"] = jscale(L.delta_mu);
  r.doc["delta_prime"] = jscale(L.delta_prime);
  r.doc["delta_tilde"] = jscale(L.delta_tilde);
  r.doc["d_box"] = jscale(L.d_box);
  r.doc["a"] = L.a;
  r.doc["signature_bound"] = rcd::signature_count_bound(L.m).str();
  r.doc["overlap_bound"] = {{"value", mt.value.str()},
                            {"log", mt.log_value.log()}};
  r.doc["global"] = {{"M", gc.M},
                     {"mu_window", jscale(gc.mu_window)},
                     {"D", jscale(gc.D)},
                     {"eta", jscale(gc.eta)},
                     {"mu_required", jscale(gc.mu_required)},
                     {"c_strip", jscale(gc.c_strip)},
                     {"d_strip", jscale(gc.d_strip)}};
  r.doc["notes"] = {
      {"epsilon", "subelliptic gain, exactly 1/(2 m_1...m_n)"},
      {"B_C", "coefficient sup bounds on the closed unit polydisc"},
      {"M_mu", "growth constants feeding the per-level scale caps"},
      {"Delta", "per-level validity caps; delta_mu is their minimum"},
      {"gap_exponent",
       "least weighted mixed-index sum above 1, exact as a rational"},
      {"delta_tilde",
       "strict-mode gate: at or below it type signatures are stable"},
      {"d_box", "base-point stability box shrink factor"},
      {"Q", "radius comparability bounds under base-point moves"},
      {"signature_bound", "count of admissible type signatures"},
      {"overlap_bound",
       "packing bound on covering boxes sharing a point, exact integer"},
      {"eta", "weight gain 2(M+1)/D^2 against the cutoff curvature budget"},
      {"strips",
       "support and floor strip depths are c_strip*delta and d_strip*delta"}};

  r.csv =
      "level,m,B,C,P,log_M_mu,log_Delta,gap_exponent,log_Delta_prime,log_Q\n";
  for (unsigned s = 1; s <= sys.n; ++s)
    csv_row(r.csv,
            {std::to_string(s), std::to_string(L.m[s - 1]), num(L.B[s - 1]),
             num(L.C[s - 1]), num(L.P[s - 1]), num(L.M_mu[s - 1].log()),
             num(L.Delta[s - 1].log()),
             L.A[s - 1] ? L.A[s - 1]->str() : std::string("-"),
             num(L.Delta_prime[s - 1].log()), num(L.Q[s - 1].log())});
  return r;
}

// --------------------------------------------------------------------- tau

inline CmdResult cmd_tau(const RunConfig& cfg) {
  Scene sc = make_scene(cfg);
  CmdResult r;
  r.doc = doc_header("tau", cfg);
  r.doc["point"] = jpoint(sc.p);
  r.doc["mu"] = cfg.mu;
  r.doc["mode"] = mode_name(cfg);

  if (!cfg.ladder.empty()) {
    // a ladder turns tau into a table of radii per rung plus the fitted
    // slopes of the gain certificate
    LadderSpec ls = parse_ladder(cfg.ladder);
    rcd::GainCertificate cert = rcd::gain_certificate(
        sc.sys, sc.L, sc.p, ls.start, ls.rungs, sc.mode, true);
    r.doc["epsilon"] = cert.epsilon.str();
    json rungs = json::array();
    r.csv = "rung,level,log_delta,log_tau,error\n";
    for (std::size_t k = 0; k < cert.rungs.size(); ++k) {
      const auto& rung = cert.rungs[k];
      json jr;
      jr["delta"] = jscale(rung.log_delta);
      if (rung.feasible()) {
        json taus = json::array();
        for (unsigned s = 0; s < sc.sys.n; ++s)
          taus.push_back(jscale(rung.log_tau[s]));
        jr["tau"] = taus;
        for (unsigned s = 0; s < sc.sys.n; ++s)
          csv_row(r.csv, {std::to_string(k), std::to_string(s + 1),
                          num(rung.log_delta), num(rung.log_tau[s]), ""});
      } else {
        jr["error"] = rung.error;
        csv_row(r.csv, {std::to_string(k), "-", num(rung.log_delta), "-",
                        rung.error});
      }
      rungs.push_back(jr);
    }
    r.doc["rungs"] = rungs;
    r.doc["slope"] = cert.slope;
    r.doc["top_slope"] = cert.top_slope;
    r.doc["pass"] = cert.pass();
    r.exit = cert.pass() ? kOk : kCheckFailed;
    return r;
  }

  rcd::ApproxSystem as =
      rcd::approximate(sc.sys, sc.L, sc.p, sc.delta, sc.mode);
  r.doc["delta"] = jscale(sc.delta);
  json levels = json::array();
  r.csv = "level,tau,sigma,J,K\n";
  for (unsigned s = 1; s <= sc.sys.n; ++s) {
    json lev;
    lev["level"] = s;
    lev["tau"] = jscale(as.tau(s));
    lev["sigma"] = jscale(as.sigma(s));
    lev["J"] = as.sig.J[s - 1];
    lev["K"] = mixed_str(as.sig.K[s - 1]);
    levels.push_back(lev);
    csv_row(r.csv, {std::to_string(s), rcd::decimal_string(as.tau(s)),
                    rcd::decimal_string(as.sigma(s)),
                    std::to_string(as.sig.J[s - 1]),
                    mixed_str(as.sig.K[s - 1])});
  }
  r.doc["levels"] = levels;
  r.doc["signature"] = rcd::to_string(as.sig);
  return r;
}

// ------------------------------------------------------------------- types

inline CmdResult cmd_types(const RunConfig& cfg) {
  Scene sc = make_scene(cfg);
  unsigned count = cfg.grid ? cfg.grid : 11;
  const double half_extent = 0.4;
  std::vector<std::vector<rcd::Complex>> pts = rcd::real_grid(
      sc.p, std::vector<double>(sc.sys.n, half_extent), count);
  std::map<rcd::TypeSignature, std::size_t> strata;
  std::size_t infeasible = 0;
  for (const auto& q : pts) {
    try {
      ++strata[rcd::type_signature(sc.sys, sc.L, q, sc.delta, sc.mode)];
    } catch (const rcd::InfeasibleScaleError&) {
      ++infeasible;  // relaxed mode can lose far corners at coarse delta
    }
  }
  rcd::BigInt bound = rcd::signature_count_bound(sc.L.m);
  bool within = rcd::BigInt(strata.size()) <= bound;

  CmdResult r;
  r.doc = doc_header("types", cfg);
  r.doc["point"] = jpoint(sc.p);
  r.doc["delta"] = jscale(sc.delta);
  r.doc["mode"] = mode_name(cfg);
  r.doc["grid"] = count;
  r.doc["half_extent"] = half_extent;
  r.doc["points"] = pts.size();
  r.doc["infeasible_points"] = infeasible;
  json strata_j = json::array();
  r.csv = "signature,count\n";
  for (const auto& [sig, c] : strata) {
    strata_j.push_back({{"signature", rcd::to_string(sig)}, {"count", c}});
    csv_row(r.csv, {rcd::to_string(sig), std::to_string(c)});
  }
  r.doc["strata"] = strata_j;
  r.doc["distinct"] = strata.size();
  r.doc["signature_bound"] = bound.str();
  r.doc["within_bound"] = within;
  r.exit = within ? kOk : kCheckFailed;
  return r;
}

// ----------------------------------------------------------------- scaling

inline CmdResult cmd_scaling(const RunConfig& cfg) {
  Scene sc = make_scene(cfg);
  rcd::LocalExpansion le = rcd::local_expansion(sc.sys, sc.p);
  CmdResult r;
  r.doc = doc_header("scaling", cfg);
  r.doc["point"] = jpoint(sc.p);
  r.doc["delta"] = jscale(sc.delta);
  r.doc["mode"] = mode_name(cfg);
  const double factors[] = {0.5, 0.25, 0.1};
  bool all = true;
  json rows = json::array();
  r.csv = "factor,level,margin\n";
  for (double f : factors) {
    rcd::ScalingReport rep =
        rcd::scaling_check(sc.sys, sc.L, le, sc.delta, f, sc.mode);
    json jr;
    jr["factor"] = f;
    jr["margins"] = rep.margin;
    jr["pass"] = rep.pass;
    rows.push_back(jr);
    all = all && rep.pass;
    for (std::size_t s = 0; s < rep.margin.size(); ++s)
      csv_row(r.csv,
              {num(f), std::to_string(s + 1), num(rep.margin[s])});
  }
  r.doc["factors"] = rows;
  r.doc["pass"] = all;
  r.exit = all ? kOk : kCheckFailed;
  return r;
}

// --------------------------------------------------------------- stability

inline CmdResult cmd_stability(const RunConfig& cfg) {
  Scene sc = make_scene(cfg);
  rcd::ApproxSystem as =
      rcd::approximate(sc.sys, sc.L, sc.p, sc.delta, sc.mode);
  // deterministic probe: nudge each coordinate by half its stability box,
  // alternating real and imaginary directions
  std::vector<rcd::Complex> q = sc.p;
  for (unsigned s = 0; s < sc.sys.n; ++s) {
    double step = 0.5 * (sc.L.d_box * as.tau(s + 1)).value();
    q[s] += s % 2 ? rcd::Complex(0.0, step) : rcd::Complex(step, 0.0);
  }
  rcd::StabilityReport rep =
      rcd::stability_check(sc.sys, sc.L, sc.p, q, sc.delta, sc.mode);
  bool pass =
      rep.comparable && rep.in_box && rep.ratios_pass && rep.coeffs_pass;

  CmdResult r;
  r.doc = doc_header("stability", cfg);
  r.doc["point"] = jpoint(sc.p);
  r.doc["probe"] = jpoint(q);
  r.doc["delta"] = jscale(sc.delta);
  r.doc["mode"] = mode_name(cfg);
  r.doc["comparable"] = rep.comparable;
  r.doc["in_box"] = rep.in_box;
  r.doc["log_ratios"] = rep.log_ratio;
  r.doc["coeff_drift"] = rep.coeff_drift;
  r.doc["ratios_pass"] = rep.ratios_pass;
  r.doc["coeffs_pass"] = rep.coeffs_pass;
  r.doc["pass"] = pass;
  r.csv = "level,log_ratio,coeff_drift\n";
  for (std::size_t s = 0; s < rep.log_ratio.size(); ++s)
    csv_row(r.csv, {std::to_string(s + 1), num(rep.log_ratio[s]),
                    num(rep.coeff_drift[s])});
  r.exit = pass ? kOk : kCheckFailed;
  return r;
}

// ------------------------------------------------------------------- cover

inline CmdResult cmd_cover(const RunConfig& cfg) {
  Scene sc = make_scene(cfg);
  // box radii at the base point set the micro-grid extent
  rcd::LocalExpansion le = rcd::local_expansion(sc.sys, sc.p);
  rcd::ApproxSystem as = rcd::approximate(sc.sys, sc.L, le, sc.delta, sc.mode);
  std::vector<rcd::DerivativeWindow> win =
      rcd::derivative_windows(le, as, sc.L);
  std::vector<double> ext(sc.sys.n);
  for (unsigned s = 0; s < sc.sys.n; ++s)
    ext[s] = 1.5 * std::exp(win[s].log_ratio + as.log_tau[s]);
  unsigned count = cfg.grid ? cfg.grid : 11;
  std::vector<std::vector<rcd::Complex>> pts =
      rcd::real_grid(sc.p, ext, count);
  rcd::CoveringReport rep =
      rcd::build_covering(sc.sys, sc.L, pts, sc.delta, sc.mode);

  CmdResult r;
  r.doc = doc_header("cover", cfg);
  r.doc["point"] = jpoint(sc.p);
  r.doc["delta"] = jscale(sc.delta);
  r.doc["mode"] = mode_name(cfg);
  r.doc["grid"] = count;
  r.doc["points"] = rep.points;
  r.doc["boxes"] = rep.boxes.size();
  r.doc["covered"] = rep.covered;
  r.doc["separated"] = rep.separated;
  r.doc["max_overlap"] = rep.max_overlap;
  r.doc["overlap_bound"] = {{"value", rep.bound.value.str()},
                            {"log", rep.bound.log_value.log()}};
  json strata = json::array();
  r.csv = "signature,points,boxes\n";
  for (const auto& st : rep.strata) {
    strata.push_back({{"signature", rcd::to_string(st.sig)},
                      {"points", st.points},
                      {"boxes", st.boxes.size()}});
    csv_row(r.csv, {rcd::to_string(st.sig), std::to_string(st.points),
                    std::to_string(st.boxes.size())});
  }
  r.doc["strata"] = strata;
  r.doc["pass"] = rep.pass();
  r.exit = rep.pass() ? kOk : kCheckFailed;
  return r;
}

// ----------------------------------------------------------------- contact

inline CmdResult cmd_contact(const RunConfig& cfg) {
  rcd::TriangularSystem sys = load_system(cfg.input);
  if (cfg.curve_path.empty())
    throw rcd::InvalidParameterError("contact needs --curve FILE");
  rcd::Curve curve = load_curve(cfg.curve_path);
  std::optional<unsigned> order = rcd::contact_order(sys, curve);
  rcd::GainPrediction gain = rcd::epsilon_prediction(sys);
  rcd::BigInt target = 2 * gain.m_product;

  CmdResult r;
  r.doc = doc_header("contact", cfg);
  r.doc["curve"] = cfg.curve_path;
  r.doc["order"] = order ? json(*order) : json(nullptr);
  r.doc["order_text"] = order ? std::to_string(*order) : "infinite";
  r.doc["sharp_target"] = target.str();
  r.doc["attains_target"] = order && rcd::BigInt(*order) == target;
  r.csv = "order,target\n" +
          (order ? std::to_string(*order) : std::string("inf")) + "," +
          target.str() + "\n";
  return r;  // a measurement, not a check: exit 0 unless the input failed
}

// ------------------------------------------------------------------ verify

inline CmdResult cmd_verify(const RunConfig& cfg) {
  Scene sc = make_scene(cfg);
  if (cfg.samples == 0)
    throw rcd::InvalidParameterError("samples must be positive");
  double dval = sc.delta.value();
  if (!(dval > 0.0) || !std::isfinite(dval))
    throw rcd::InvalidParameterError(
        "verify needs a delta inside double range; pass --delta");

  rcd::CutoffSpec chi = rcd::make_cutoff(sc.sys.n);
  rcd::GlobalConstants gc = rcd::fix_global_constants(sc.L, chi);
  rcd::LocalExpansion le = rcd::local_expansion(sc.sys, sc.p);
  rcd::ApproxSystem as = rcd::approximate(sc.sys, sc.L, le, sc.delta, sc.mode);
  std::vector<rcd::DerivativeWindow> win =
      rcd::derivative_windows(le, as, sc.L);
  std::vector<double> A(sc.sys.n), log_a(sc.sys.n);
  for (unsigned s = 0; s < sc.sys.n; ++s) {
    log_a[s] = win[s].log_ratio;
    A[s] = std::exp(win[s].log_ratio + as.log_tau[s]);
  }
  rcd::WeightWorkshop W(sc.sys, sc.p, A, chi, gc.eta, sc.delta);
  double support_depth = (gc.c_strip * sc.delta).value();
  double floor_depth = (gc.d_strip * sc.delta).value();
  std::size_t samples = cfg.samples;

  // the four sampling sweeps are independent; they run concurrently while
  // the covering and the certificate are built here, and the document is
  // assembled in fixed order afterwards
  auto hgf = std::async(std::launch::async, [&] {
    return rcd::verify_hessian_G(W, samples, cfg.seed);
  });
  auto pbf = std::async(std::launch::async, [&] {
    return rcd::verify_partial_bounds(sc.sys, le, as, win, gc, cfg.mu,
                                      samples, cfg.seed);
  });
  auto stf = std::async(std::launch::async, [&] {
    return rcd::verify_hessian_Gt(W, support_depth, samples, cfg.seed);
  });
  auto wgf = std::async(std::launch::async, [&] {
    return rcd::verify_weight_g(W, as.log_tau, log_a, support_depth,
                                floor_depth, dval, samples, cfg.seed);
  });

  unsigned gcount = cfg.grid ? cfg.grid : 7;
  std::vector<double> ext(sc.sys.n);
  for (unsigned s = 0; s < sc.sys.n; ++s) ext[s] = 1.5 * A[s];
  rcd::CoveringReport cov = rcd::build_covering(
      sc.sys, sc.L, rcd::real_grid(sc.p, ext, gcount), sc.delta, sc.mode);
  LadderSpec ls = parse_ladder(cfg.ladder.empty() ? "1e-4:6" : cfg.ladder);
  rcd::GainCertificate cert =
      rcd::gain_certificate(sc.sys, sc.L, sc.p, ls.start, ls.rungs,
                            rcd::ScaleMode::Relaxed, true);

  rcd::FloorCheckReport hgr = hgf.get();
  rcd::PartialBoundsReport pbr = pbf.get();
  rcd::FloorCheckReport str = stf.get();
  rcd::WeightGReport wgr = wgf.get();

  bool pass = hgr.pass() && hgr.min_direction_margin >= -1e-9 && pbr.pass() &&
              str.pass() && wgr.pass() && cov.pass() && cert.pass();

  CmdResult r;
  r.doc = doc_header("verify", cfg);
  r.doc["point"] = jpoint(sc.p);
  r.doc["mu"] = cfg.mu;
  r.doc["delta"] = jscale(sc.delta);
  r.doc["mode"] = mode_name(cfg);
  r.doc["samples"] = samples;
  r.doc["seed"] = cfg.seed;
  json radii = json::array();
  for (unsigned s = 0; s < sc.sys.n; ++s)
    radii.push_back({{"level", s + 1},
                     {"tau", jscale(as.tau(s + 1))},
                     {"box", jscale(win[s].log_ratio + as.log_tau[s])}});
  r.doc["radii"] = radii;
  r.doc["hessian_floor"] = {{"samples", hgr.samples},
                            {"min_margin", hgr.min_margin},
                            {"min_direction_margin", hgr.min_direction_margin},
                            {"pass", hgr.pass()}};
  r.doc["derivative_bounds"] = {{"samples", pbr.samples},
                                {"min_lower_slack", pbr.min_lower_slack},
                                {"min_window_slack", pbr.min_window_slack},
                                {"min_upper_slack", pbr.min_upper_slack},
                                {"pass", pbr.pass()}};
  r.doc["strip_floor"] = {{"samples", str.samples},
                          {"depth", jscale(gc.c_strip * sc.delta)},
                          {"min_margin", str.min_margin},
                          {"min_direction_margin", str.min_direction_margin},
                          {"pass", str.pass()}};
  r.doc["cut_weight"] = {{"samples", wgr.samples},
                         {"floor_samples", wgr.floor_samples},
                         {"max_value", wgr.max_value},
                         {"min_value", wgr.min_value},
                         {"bounds_ok", wgr.bounds_ok},
                         {"support_ok", wgr.support_ok},
                         {"min_psh_margin", wgr.min_psh_margin},
                         {"min_floor_margin", wgr.min_floor_margin},
                         {"pass", wgr.pass()}};
  r.doc["covering"] = {{"points", cov.points},
                       {"boxes", cov.boxes.size()},
                       {"covered", cov.covered},
                       {"separated", cov.separated},
                       {"max_overlap", cov.max_overlap},
                       {"bound_log", cov.bound.log_value.log()},
                       {"pass", cov.pass()}};
  json cert_j;
  cert_j["epsilon"] = cert.epsilon.str();
  json rungs = json::array();
  for (const auto& rung : cert.rungs) {
    json jr;
    jr["delta"] = jscale(rung.log_delta);
    if (rung.feasible())
      jr["log_tau"] = rung.log_tau;
    else
      jr["error"] = rung.error;
    rungs.push_back(jr);
  }
  cert_j["rungs"] = rungs;
  cert_j["slope"] = cert.slope;
  cert_j["top_slope"] = cert.top_slope;
  cert_j["pass"] = cert.pass();
  r.doc["certificate"] = cert_j;
  r.doc["pass"] = pass;

  // plot view: one row per local Hessian floor sample
  r.csv = "sample,whitened_margin\n";
  for (std::size_t i = 0; i < hgr.margins.size(); ++i)
    csv_row(r.csv, {std::to_string(i), num(hgr.margins[i])});
  r.exit = pass ? kOk : kCheckFailed;
  return r;
}

// ---------------------------------------------------------------- dispatch

inline CmdResult dispatch(const std::string& name, const RunConfig& cfg) {
  if (name == "analyze") return cmd_analyze(cfg);
  if (name == "tau") return cmd_tau(cfg);
  if (name == "types") return cmd_types(cfg);
  if (name == "scaling") return cmd_scaling(cfg);
  if (name == "stability") return cmd_stability(cfg);
  if (name == "verify") return cmd_verify(cfg);
  if (name == "cover") return cmd_cover(cfg);
  if (name == "contact") return cmd_contact(cfg);
  throw rcd::InvalidParameterError("unknown command '" + name + "'");
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rcd::InvalidInputError("cannot write " + path);
  out << body;
  if (!out) throw rcd::InvalidInputError("write failed: " + path);
}

inline int run_command(const std::string& name, const RunConfig& cfg,
                       std::ostream& out, std::ostream& err) {
  try {
    CmdResult r = dispatch(name, cfg);
    std::string body = r.doc.dump(2);
    body += '\n';
    if (cfg.json_path.empty()) {
      out << body;
    } else {
      write_text_file(cfg.json_path, body);
      out << name << (r.exit == kOk ? ": pass" : ": FAIL") << "\n";
    }
    if (!cfg.csv_path.empty()) write_text_file(cfg.csv_path, r.csv);
    return r.exit;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace rcdcli
