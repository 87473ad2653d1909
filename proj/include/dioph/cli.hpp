#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dioph/bands.hpp"
#include "dioph/contfrac.hpp"
#include "dioph/dioset.hpp"
#include "dioph/error.hpp"
#include "dioph/quality.hpp"
#include "dioph/report.hpp"
#include "dioph/svg.hpp"
#include "dioph/topology.hpp"

namespace dioph::cli {

using report::Json;

// Exit codes.
inline constexpr int kOk = 0, kUsage = 1, kUnresolved = 2;

struct Flags {
  std::string alpha, gamma, tau, qmax, depth, prec, budget, n, c1, c2, m, nmax, k, eps, lemma8_c, theorem_c;
  std::string format = "json", out, cache_dir, band_variant = "p";
};

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace detail {

inline Rat rat_flag(const std::string& name, const std::string& v) {
  try {
    return Rat::parse(v);
  } catch (const UsageError& e) {
    throw UsageError("--" + name + ": " + e.what());
  }
}

inline Int int_flag(const std::string& name, const std::string& v) {
  Rat r = rat_flag(name, v);
  if (!r.is_integer()) throw UsageError("--" + name + ": expected an integer, got '" + v + "'");
  return r.num();
}

inline std::size_t size_flag(const std::string& name, const std::string& v, std::size_t fallback) {
  if (v.empty()) return fallback;
  Int i = int_flag(name, v);
  if (i < 0 || !i.fits_ulong_p()) throw UsageError("--" + name + ": out of range");
  return i.get_ui();
}

inline AlphaSpec alpha_flag(const std::string& v) {
  try {
    return parse_alpha(v);
  } catch (const UsageError& e) {
    throw UsageError(std::string("--alpha: ") + e.what());
  }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

inline void need(const std::string& name, const std::string& v) {
  if (v.empty()) throw UsageError("--" + name + " is required");
}

inline void allow_formats(const Flags& f, std::initializer_list<const char*> ok) {
  for (const char* s : ok)
    if (f.format == s) return;
  throw UsageError("--format " + f.format + " is not available for this command");
}

}  // namespace detail

// DIOPH_PRECISION_CAP overrides the default cap of 4096 bits.
inline int precision_cap() {
  const char* env = std::getenv("DIOPH_PRECISION_CAP");
  if (!env || !*env) return kDefaultPrecisionCap;
  Int v = detail::int_flag("DIOPH_PRECISION_CAP", env);
  if (v < kLadderStart || v > 1 << 20) throw UsageError("DIOPH_PRECISION_CAP out of range");
  return static_cast<int>(v.get_si());
}

inline int precision(const Flags& f, int cap) {
  if (f.prec.empty()) return std::min(kDefaultPrecision, cap);
  Int v = detail::int_flag("prec", f.prec);
  if (v < 8 || v > cap) throw UsageError("--prec must lie in [8, " + std::to_string(cap) + "]");
  return static_cast<int>(v.get_si());
}

// Truncated-set cache: <dir>/set-<fnv1a64 hex>.json holding key, created_at
// and the IntervalSet. A missing, unreadable or mismatched entry is recomputed.
class SetCache {
 public:
  SetCache(std::string dir, const Rat& gamma, const Rat& tau, const Int& qmax)
      : dir_(std::move(dir)), key_("gamma=" + gamma.str() + ";tau=" + tau.str() + ";qmax=" + qmax.get_str()) {
    std::ostringstream name;
    name << "set-" << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(key_) << ".json";
    path_ = std::filesystem::path(dir_) / name.str();
  }

  const std::string& key() const { return key_; }
  const std::filesystem::path& path() const { return path_; }

  std::optional<IntervalSet> load() const {
    std::ifstream in(path_);
    if (!in) return std::nullopt;
    try {
      Json j = Json::parse(in);
      if (j.at("key").get<std::string>() != key_) return std::nullopt;
      return report::interval_set_from_json(j.at("value"));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  void store(const IntervalSet& s) const {
    std::filesystem::create_directories(dir_);
    Json j;
    j["key"] = key_;
    j["created_at"] = timestamp();
    j["value"] = report::interval_set_json(s);
    auto tmp = path_;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw UsageError("--cache-dir: cannot write " + tmp.string());
      out << j.dump() << '\n';
    }
    std::filesystem::rename(tmp, path_);
  }

 private:
  static std::string timestamp() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
  }

  std::string dir_, key_;
  std::filesystem::path path_;
};

inline IntervalSet cached_set(const std::string& cache_dir, const Rat& gamma, const Rat& tau, const Int& qmax) {
  if (cache_dir.empty()) return truncated_set(gamma, tau, qmax);
  SetCache cache(cache_dir, gamma, tau, qmax);
  if (auto hit = cache.load()) return *hit;
  IntervalSet s = truncated_set(gamma, tau, qmax);
  cache.store(s);
  return s;
}

struct Output {
  std::string text;
  bool unresolved = false;
};

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// Appends the members of `src`, in order.
inline void merge(Json& dst, const Json& src) {
  for (auto it = src.begin(); it != src.end(); ++it) dst[it.key()] = it.value();
}

inline Output cmd_cf(const Flags& f) {
  detail::allow_formats(f, {"json", "csv"});
  detail::need("alpha", f.alpha);
  AlphaSpec a = detail::alpha_flag(f.alpha);
  ContinuedFraction cf(a);
  auto t = cf.convergent_rows(detail::size_flag("depth", f.depth, 20));
  if (f.format == "csv") return {report::convergents_csv(t)};
  return {dump(report::convergents_json(a, cf, t))};
}

inline Output cmd_gamma(const Flags& f, int cap) {
  detail::allow_formats(f, {"json"});
  detail::need("alpha", f.alpha);
  detail::need("tau", f.tau);
  AlphaSpec a = detail::alpha_flag(f.alpha);
  Rat tau = detail::rat_flag("tau", f.tau);
  GammaOptions opt;
  opt.depth = detail::size_flag("depth", f.depth, 40);
  opt.bits = precision(f, cap);
  if (!f.qmax.empty()) opt.max_denominator = detail::int_flag("qmax", f.qmax);
  GammaResult g = gamma_of(a, tau, opt);
  Json j;
  j["alpha"] = format_alpha(a);
  j["tau"] = tau.str();
  j["depth"] = opt.depth;
  merge(j, report::to_json(g));
  return {dump(j), !g.certified};
}

inline Output cmd_member(const Flags& f, int cap) {
  detail::allow_formats(f, {"json"});
  detail::need("alpha", f.alpha);
  detail::need("gamma", f.gamma);
  detail::need("tau", f.tau);
  AlphaSpec a = detail::alpha_flag(f.alpha);
  Rat gamma = detail::rat_flag("gamma", f.gamma), tau = detail::rat_flag("tau", f.tau);
  auto v = membership(a, gamma, tau, detail::size_flag("budget", f.budget, 40), precision(f, cap), cap);
  Json j;
  j["alpha"] = format_alpha(a);
  j["gamma"] = gamma.str();
  j["tau"] = tau.str();
  merge(j, report::to_json(v));
  return {dump(j), std::holds_alternative<MembershipUnknown>(v)};
}

inline Output cmd_set(const Flags& f) {
  detail::allow_formats(f, {"json", "csv", "svg"});
  detail::need("gamma", f.gamma);
  detail::need("tau", f.tau);
  detail::need("qmax", f.qmax);
  Rat gamma = detail::rat_flag("gamma", f.gamma), tau = detail::rat_flag("tau", f.tau);
  Int qmax = detail::int_flag("qmax", f.qmax);
  IntervalSet s = cached_set(f.cache_dir, gamma, tau, qmax);
  if (f.format == "csv") return {report::set_csv(s)};
  if (f.format == "svg") return {render_svg({{"Q=" + qmax.get_str(), s}})};
  return {dump(report::set_json(gamma, tau, qmax, s))};
}

inline Output cmd_census(const Flags& f) {
  detail::allow_formats(f, {"json"});
  for (auto [name, v] : {std::pair{"alpha", &f.alpha}, {"gamma", &f.gamma}, {"tau", &f.tau}, {"n", &f.n}, {"qmax", &f.qmax}})
    detail::need(name, *v);
  AlphaSpec a = detail::alpha_flag(f.alpha);
  Rat gamma = detail::rat_flag("gamma", f.gamma), tau = detail::rat_flag("tau", f.tau);
  CensusRecord c = census(a, gamma, tau, detail::size_flag("n", f.n, 0), detail::int_flag("qmax", f.qmax));
  Json j;
  j["alpha"] = format_alpha(a);
  j["gamma"] = gamma.str();
  j["tau"] = tau.str();
  merge(j, report::to_json(c));
  return {dump(j), c.c_n_margin == Ternary::Unresolved};
}

inline Output cmd_gaps(const Flags& f, int cap) {
  detail::allow_formats(f, {"json", "csv"});
  detail::need("alpha", f.alpha);
  detail::need("gamma", f.gamma);
  detail::need("tau", f.tau);
  AlphaSpec a = detail::alpha_flag(f.alpha);
  Rat gamma = detail::rat_flag("gamma", f.gamma), tau = detail::rat_flag("tau", f.tau);
  int bits = precision(f, cap);
  std::size_t depth = detail::size_flag("depth", f.depth, 12);
  std::optional<std::size_t> n;
  if (!f.n.empty()) n = detail::size_flag("n", f.n, 0);
  if (f.format == "csv") {
    if (!n) throw UsageError("--format csv writes the slack table and needs --n");
    return {report::slack_csv(lemma2_margin(a, gamma, tau, *n))};
  }
  bool unresolved = false;
  auto mark = [&](Ternary t) {
    if (t == Ternary::Unresolved) unresolved = true;
  };
  ContinuedFraction cf(a);
  auto table = cf.convergent_rows(depth);
  Json j;
  j["alpha"] = format_alpha(a);
  j["gamma"] = gamma.str();
  j["tau"] = tau.str();
  j["depth"] = depth;
  Json rows = Json::array();
  for (std::size_t i = 0; i + 2 < table.size(); ++i) {
    GapReport g = gap_report_rows(table, i, gamma, tau, bits, cap);
    mark(g.star);
    mark(g.star_strict);
    rows.push_back(report::to_json(g));
  }
  j["gap_rows"] = rows;
  if (!cf.is_rational()) j["isolation"] = report::to_json(detect_isolation(a, gamma, tau, depth, bits));
  Json l10 = Json::array();
  for (const auto& r : lemma10_scan(a, gamma, tau, depth, bits)) {
    mark(r.reached);
    l10.push_back(report::to_json(r));
  }
  j["lemma10"] = l10;
  if (n) {
    Json sl = Json::array();
    for (const auto& r : lemma2_margin(a, gamma, tau, *n)) sl.push_back(report::to_json(r));
    j["lemma2_slack"] = sl;
  }
  if (!f.eps.empty() || !f.lemma8_c.empty()) {
    detail::need("eps", f.eps);
    detail::need("lemma8-c", f.lemma8_c);
    Json l8 = Json::array();
    for (const auto& r : lemma8_bound_check(a, gamma, tau, depth, detail::rat_flag("eps", f.eps),
                                            detail::rat_flag("lemma8-c", f.lemma8_c), bits)) {
      mark(r.ok);
      l8.push_back(report::to_json(r));
    }
    j["lemma8"] = l8;
  }
  if (!f.qmax.empty()) {
    Json lv = Json::array();
    for (const auto& v : legendre_check(a, detail::int_flag("qmax", f.qmax), bits)) {
      mark(v.violated);
      lv.push_back(report::to_json(v));
    }
    j["legendre_violations"] = lv;
  }
  return {dump(j), unresolved};
}

namespace detail {

// "qsurd:A,B,D" is A + B sqrt(D); anything else is a rational.
inline std::optional<QuadNum> surd_tau(const std::string& v) {
  if (v.rfind("qsurd:", 0) != 0) return std::nullopt;
  auto parts = split(v.substr(6), ',');
  if (parts.size() != 3) throw UsageError("--tau: expected qsurd:A,B,D");
  return QuadNum(rat_flag("tau", parts[0]), rat_flag("tau", parts[1]), int_flag("tau", parts[2]));
}

}  // namespace detail

inline Output cmd_bands(const Flags& f) {
  detail::allow_formats(f, {"json", "csv"});
  detail::need("tau", f.tau);
  if (auto qt = detail::surd_tau(f.tau)) {
    if (f.format != "json") throw UsageError("a surd --tau only supports the exponent report");
    Json j;
    j["series"] = report::to_json(exponents(*qt));
    return {dump(j)};
  }
  Rat tau = detail::rat_flag("tau", f.tau);
  Int M = f.m.empty() ? Int(2) : detail::int_flag("m", f.m);
  Int qmax = f.qmax.empty() ? Int(100) : detail::int_flag("qmax", f.qmax);
  Int nmax = f.nmax.empty() ? Int(100) : detail::int_flag("nmax", f.nmax);
  bool regime = !f.c1.empty() || !f.c2.empty();
  if (regime) {
    detail::need("c1", f.c1);
    detail::need("c2", f.c2);
  }
  if (f.format == "csv") {
    if (!regime) throw UsageError("--format csv writes the band table and needs --c1 and --c2");
    Rat C1 = detail::rat_flag("c1", f.c1), C2 = detail::rat_flag("c2", f.c2);
    constexpr long kMaxRows = 200000;
    long count = 0;
    std::string text = report::band_csv_header();
    for (Int q = M + 1; q <= qmax; ++q) {
      RealEnclosure qt = pow_real(Rat(q), tau, kBandPrecision);
      for (Int p = floor(qt.lo / C2) + 1; p <= ceil(qt.upper() / C1) - 1; ++p)
        for (Int N = 1; N <= nmax; ++N) {
          if (++count > kMaxRows) throw UsageError("band table exceeds " + std::to_string(kMaxRows) + " rows");
          text += report::band_csv_row(gamma_band(q, p, N, tau, C2));
        }
    }
    return {text};
  }
  Json j;
  j["tau"] = tau.str();
  Json series = report::to_json(exponents(tau));
  std::vector<Int> checkpoints;
  for (Int c = 10; c < qmax; c *= 10) checkpoints.push_back(c);
  checkpoints.push_back(qmax);
  auto exps = exponents(tau);
  Json ps = Json::array();
  auto s7 = series_partial_sums(exps.lemma7, Int(1), checkpoints);
  auto sT = series_partial_sums(exps.theorem, Int(1), checkpoints);
  for (std::size_t i = 0; i < checkpoints.size(); ++i)
    ps.push_back(Json{{"q_max", checkpoints[i].get_str()},
                      {"lemma7", report::to_json(s7[i].second)},
                      {"theorem", report::to_json(sT[i].second)}});
  series["partial_sums"] = ps;
  j["series"] = series;
  if (regime) {
    Rat C1 = detail::rat_flag("c1", f.c1), C2 = detail::rat_flag("c2", f.c2);
    j["union_measure"] = report::to_json(bands_union_measure(tau, C1, C2, M, qmax, nmax));
  }
  if (!f.gamma.empty() || !f.k.empty()) {
    detail::need("gamma", f.gamma);
    detail::need("k", f.k);
    j["bck_margin"] = report::to_json(
        bck_margin(detail::rat_flag("gamma", f.gamma), tau, detail::rat_flag("k", f.k), qmax));
  }
  if (!f.theorem_c.empty()) {
    if (!regime) throw UsageError("--theorem-c needs --c1 and --c2 to place p");
    Rat C = detail::rat_flag("theorem-c", f.theorem_c);
    Rat C1 = detail::rat_flag("c1", f.c1), C2 = detail::rat_flag("c2", f.c2);
    BandVariant variant = f.band_variant == "q" ? BandVariant::Q : BandVariant::P;
    Json tb = Json::array();
    // p at the centre of the regime window, N = 1, for the first few q.
    for (Int q = M + 1; q <= qmax && q <= M + 5; ++q) {
      Int p = floor(pow_real(Rat(q), tau, kBandPrecision).lo * (Rat(1) / C1 + Rat(1) / C2) / Rat(2));
      Json row{{"q", q.get_str()}, {"p", p.get_str()}, {"N", "1"}};
      merge(row, report::to_json(theorem_band(q, p, Int(1), tau, C, variant)));
      tb.push_back(row);
    }
    j["theorem_bands"] = tb;
  }
  return {dump(j)};
}

inline Output cmd_sweep(const Flags& f) {
  detail::allow_formats(f, {"json", "svg"});
  detail::need("gamma", f.gamma);
  detail::need("tau", f.tau);
  detail::need("qmax", f.qmax);
  Rat tau = detail::rat_flag("tau", f.tau);
  std::vector<Rat> gammas;
  std::vector<Int> qs;
  for (const auto& g : detail::split(f.gamma, ',')) gammas.push_back(detail::rat_flag("gamma", g));
  for (const auto& q : detail::split(f.qmax, ',')) qs.push_back(detail::int_flag("qmax", q));
  std::vector<std::pair<std::string, IntervalSet>> rows;
  Json jr = Json::array();
  for (const auto& g : gammas)
    for (const auto& q : qs) {
      IntervalSet s = cached_set(f.cache_dir, g, tau, q);
      auto [lo, hi] = measure_bracket(s);
      jr.push_back(Json{{"gamma", g.str()}, {"qmax", q.get_str()}, {"pieces", s.size()},
                        {"measure_lo", lo.str()}, {"measure_hi", hi.str()},
                        {"measure_approx", to_decimal(hi, report::kApproxDigits)}});
      rows.push_back({"g=" + g.str() + " Q=" + q.get_str(), std::move(s)});
    }
  if (f.format == "svg") {
    std::vector<Rat> ticks;
    if (!f.alpha.empty()) {
      ContinuedFraction cf(detail::alpha_flag(f.alpha));
      for (const auto& r : cf.convergent_rows(detail::size_flag("depth", f.depth, 8))) ticks.push_back(Rat(r.p, r.q));
    }
    return {render_svg(rows, ticks)};
  }
  Json j;
  j["tau"] = tau.str();
  j["rows"] = jr;
  return {dump(j)};
}

// Runs one command line (args excludes the program name). Output goes to
// `out` unless --out is given; diagnostics go to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diophantine set toolkit", "dioph"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* s) {
    s->add_option("--format", f.format, "json, csv or svg")->check(CLI::IsMember({"json", "csv", "svg"}));
    s->add_option("--out", f.out, "write to this path instead of stdout");
  };
  auto* cf = app.add_subcommand("cf", "continued fraction and convergents");
  cf->add_option("--alpha", f.alpha, "rat:P/Q | quad:P,D,Q | cf:[a0;a1,...]@lo,hi");
  cf->add_option("--depth", f.depth);
  common(cf);
  auto* gm = app.add_subcommand("gamma", "certified bracket for gamma(alpha, tau)");
  for (auto* s : {gm}) {
    s->add_option("--alpha", f.alpha);
    s->add_option("--tau", f.tau);
    s->add_option("--depth", f.depth);
    s->add_option("--prec", f.prec);
    s->add_option("--qmax", f.qmax, "restrict the infimum to q_n <= qmax");
    common(s);
  }
  auto* mb = app.add_subcommand("member", "membership of alpha in D_{gamma,tau}");
  mb->add_option("--alpha", f.alpha);
  mb->add_option("--gamma", f.gamma);
  mb->add_option("--tau", f.tau);
  mb->add_option("--budget", f.budget, "number of convergents to examine");
  mb->add_option("--prec", f.prec);
  common(mb);
  auto* st = app.add_subcommand("set", "truncated set D^(Q)");
  st->add_option("--gamma", f.gamma);
  st->add_option("--tau", f.tau);
  st->add_option("--qmax", f.qmax);
  st->add_option("--cache-dir", f.cache_dir);
  common(st);
  auto* cs = app.add_subcommand("census", "certified measure of the set inside I_n");
  cs->add_option("--alpha", f.alpha);
  cs->add_option("--gamma", f.gamma);
  cs->add_option("--tau", f.tau);
  cs->add_option("--n", f.n);
  cs->add_option("--qmax", f.qmax);
  common(cs);
  auto* gp = app.add_subcommand("gaps", "gap conditions, isolation and scans along the convergents");
  gp->add_option("--alpha", f.alpha);
  gp->add_option("--gamma", f.gamma);
  gp->add_option("--tau", f.tau);
  gp->add_option("--depth", f.depth);
  gp->add_option("--prec", f.prec);
  gp->add_option("--n", f.n, "index for the slack table");
  gp->add_option("--eps", f.eps);
  gp->add_option("--lemma8-c", f.lemma8_c);
  gp->add_option("--qmax", f.qmax, "Legendre check up to this denominator");
  common(gp);
  auto* bd = app.add_subcommand("bands", "exceptional-gamma bands and series exponents");
  bd->add_option("--tau", f.tau, "rational, or qsurd:A,B,D for A+B*sqrt(D)");
  bd->add_option("--c1", f.c1);
  bd->add_option("--c2", f.c2);
  bd->add_option("--m", f.m);
  bd->add_option("--qmax", f.qmax);
  bd->add_option("--nmax", f.nmax);
  bd->add_option("--gamma", f.gamma, "for the margin of 1/gamma");
  bd->add_option("--k", f.k);
  bd->add_option("--theorem-c", f.theorem_c);
  bd->add_option("--band-variant", f.band_variant)->check(CLI::IsMember({"p", "q"}));
  common(bd);
  auto* sw = app.add_subcommand("sweep", "ladder of truncated sets over gamma and Q");
  sw->add_option("--gamma", f.gamma, "comma-separated list");
  sw->add_option("--tau", f.tau);
  sw->add_option("--qmax", f.qmax, "comma-separated list");
  sw->add_option("--alpha", f.alpha, "draw convergent ticks");
  sw->add_option("--depth", f.depth);
  sw->add_option("--cache-dir", f.cache_dir);
  common(sw);

  std::vector<const char*> argv{"dioph"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    int cap = precision_cap();
    Output o;
    if (*cf) o = cmd_cf(f);
    else if (*gm) o = cmd_gamma(f, cap);
    else if (*mb) o = cmd_member(f, cap);
    else if (*st) o = cmd_set(f);
    else if (*cs) o = cmd_census(f);
    else if (*gp) o = cmd_gaps(f, cap);
    else if (*bd) o = cmd_bands(f);
    else o = cmd_sweep(f);
    if (f.out.empty()) {
      out << o.text;
    } else {
      std::ofstream file(f.out, std::ios::binary | std::ios::trunc);
      if (!file) throw UsageError("--out: cannot write " + f.out);
      file << o.text;
    }
    return o.unresolved ? kUnresolved : kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace dioph::cli
