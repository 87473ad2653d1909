#pragma once

#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dioph/bands.hpp"
#include "dioph/contfrac.hpp"
#include "dioph/dioset.hpp"
#include "dioph/enclosure.hpp"
#include "dioph/interval_set.hpp"
#include "dioph/quality.hpp"
#include "dioph/topology.hpp"

// JSON and CSV views of the result types. Rationals are "num/den" strings,
// arbitrary-size integers are decimal strings, indices and counts are numbers.
namespace dioph::report {

using Json = nlohmann::ordered_json;

inline constexpr unsigned kApproxDigits = 15;

inline Json opt_rat(const std::optional<Rat>& r) { return r ? Json(r->str()) : Json(nullptr); }

inline Json to_json(const RealEnclosure& e) {
  Json j;
  j["lo"] = e.lo.str();
  j["hi"] = opt_rat(e.hi);
  j["approx"] = to_decimal(e.lo, kApproxDigits);
  return j;
}

inline Json to_json(const ConvergentRow& r) {
  return Json{{"n", r.n}, {"a", r.a.get_str()}, {"p", r.p.get_str()}, {"q", r.q.get_str()}};
}

inline Json convergents_json(const AlphaSpec& alpha, const ContinuedFraction& cf, const ConvergentTable& t) {
  Json j;
  j["alpha"] = format_alpha(alpha);
  j["kind"] = cf.is_rational() ? "rational" : (cf.is_quadratic() ? "quadratic" : "prefix");
  if (cf.is_quadratic()) {
    j["preperiod"] = cf.preperiod();
    j["period"] = cf.period();
  }
  Json qs = Json::array(), rows = Json::array();
  for (const auto& r : t) {
    qs.push_back(r.a.get_str());
    rows.push_back(to_json(r));
  }
  j["quotients"] = qs;
  j["convergents"] = rows;
  return j;
}

inline std::string convergents_csv(const ConvergentTable& t) {
  std::ostringstream os;
  os << "n,a,p,q\n";
  for (const auto& r : t) os << r.n << ',' << r.a << ',' << r.p << ',' << r.q << '\n';
  return os.str();
}

inline Json to_json(const GammaResult& g) {
  Json j;
  j["certified"] = g.certified;
  j["lower"] = g.lower.str();
  j["upper"] = g.upper.str();
  j["lower_approx"] = to_decimal(g.lower, kApproxDigits);
  j["upper_approx"] = to_decimal(g.upper, kApproxDigits);
  j["exact"] = g.exact ? Json(g.exact->str()) : Json(nullptr);
  j["argmin_n"] = g.argmin_candidates;
  Json qs = Json::array();
  for (const auto& q : g.argmin_q) qs.push_back(q.get_str());
  j["argmin_q"] = qs;
  j["restricted"] = g.restricted;
  j["depth_used"] = g.depth_used;
  j["deep_bound"] = opt_rat(g.deep_bound);
  Json rows = Json::array();
  for (const auto& r : g.rows) {
    Json row{{"n", r.n}, {"p", r.p.get_str()}, {"q", r.q.get_str()}, {"gamma", to_json(r.gamma)}};
    row["exact"] = r.exact ? Json(r.exact->str()) : Json(nullptr);
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

inline Json to_json(const MembershipVerdict& v) {
  Json j;
  if (const auto* in = std::get_if<MembershipIn>(&v)) {
    j["verdict"] = "in";
    j["certified"] = in->certified;
  } else if (const auto* out = std::get_if<MembershipOut>(&v)) {
    j["verdict"] = "out";
    j["n"] = out->n;
    j["witness_p"] = out->witness_p.get_str();
    j["witness_q"] = out->witness_q.get_str();
  } else {
    const auto& u = std::get<MembershipUnknown>(v);
    j["verdict"] = "unknown";
    j["budget_spent"] = u.budget_spent;
    j["lower"] = u.lower.str();
    j["upper"] = u.upper.str();
    j["unresolved"] = u.unresolved;
  }
  return j;
}

inline Json intervals_json(const std::vector<ClosedInterval>& v) {
  Json a = Json::array();
  for (const auto& iv : v) a.push_back(Json::array({iv.lo.str(), iv.hi.str()}));
  return a;
}

inline std::vector<ClosedInterval> intervals_from_json(const Json& a) {
  std::vector<ClosedInterval> out;
  for (const auto& e : a) out.push_back({Rat::parse(e.at(0).get<std::string>()), Rat::parse(e.at(1).get<std::string>())});
  return out;
}

// Round-trippable IntervalSet form (the cache payload).
inline Json interval_set_json(const IntervalSet& s) {
  Json j;
  j["exact"] = s.exact();
  j["intervals"] = intervals_json(s.intervals());
  if (s.inner()) j["inner"] = intervals_json(*s.inner());
  return j;
}

inline IntervalSet interval_set_from_json(const Json& j) {
  auto outer = intervals_from_json(j.at("intervals"));
  if (j.at("exact").get<bool>()) return IntervalSet(std::move(outer));
  return IntervalSet::with_inner(std::move(outer), intervals_from_json(j.at("inner")));
}

// Set report: gamma, tau, qmax, intervals, measure, tail_bound (+ the bracket
// on the enclosure path).
inline Json set_json(const Rat& gamma, const Rat& tau, const Int& qmax, const IntervalSet& s) {
  Json j;
  j["gamma"] = gamma.str();
  j["tau"] = tau.str();
  j["qmax"] = qmax.fits_slong_p() ? Json(qmax.get_si()) : Json(qmax.get_str());
  j["intervals"] = intervals_json(s.intervals());
  auto [lo, hi] = measure_bracket(s);
  j["measure"] = s.exact() ? Json(lo.str()) : Json(nullptr);
  j["tail_bound"] = Rat(2) < tau ? Json((Rat(2) * gamma * rat_sum_tail_bound(tau, qmax, kSetPrecision)).str()) : Json(nullptr);
  if (!s.exact()) {
    j["measure_bracket"] = Json::array({lo.str(), hi.str()});
    j["inner_intervals"] = intervals_json(s.inner().value_or(std::vector<ClosedInterval>{}));
  }
  return j;
}

inline std::string set_csv(const IntervalSet& s) {
  std::ostringstream os;
  os << "lo,hi\n";
  for (const auto& iv : s.intervals()) os << iv.lo.str() << ',' << iv.hi.str() << '\n';
  return os.str();
}

inline Json to_json(const CensusRecord& c) {
  Json j;
  j["n"] = c.n;
  j["p_n"] = c.p_n.get_str();
  j["q_n"] = c.q_n.get_str();
  j["q_n1"] = c.q_n1.get_str();
  j["p_n2"] = c.p_n2.get_str();
  j["q_n2"] = c.q_n2.get_str();
  j["qmax"] = c.qmax.get_str();
  j["window"] = Json::array({c.window_lo.str(), c.window_hi.str()});
  j["window_measure"] = c.window_measure.str();
  j["complement_measure"] = c.complement_measure_in_window.str();
  j["complement_exact"] = c.complement_exact;
  j["tail_bound"] = c.tail_bound.str();
  j["residual_lower"] = c.residual_lower.str();
  j["residual_approx"] = to_decimal(c.residual_lower, kApproxDigits);
  j["verdict"] = c.verdict;
  j["c_n"] = to_json(c.c_n);
  j["c_n_margin"] = to_string(c.c_n_margin);
  j["fractions_considered"] = c.fractions_considered;
  j["interior_fractions"] = c.interior_fractions;
  j["min_interior_denominator"] = c.min_interior_denominator ? Json(*c.min_interior_denominator) : Json(nullptr);
  return j;
}

inline Json opt_enc(const std::optional<RealEnclosure>& e) { return e ? to_json(*e) : Json(nullptr); }

inline Json to_json(const GapReport& g) {
  Json j;
  j["n"] = g.n;
  j["q_n"] = g.q_n.get_str();
  j["q_n1"] = g.q_n1.get_str();
  j["q_n2"] = g.q_n2.get_str();
  j["a_n2"] = g.a_actual.get_str();
  j["star"] = to_string(g.star);
  j["star_strict"] = to_string(g.star_strict);
  j["a_threshold_star"] = opt_enc(g.a_threshold_star);
  j["a_threshold_strict"] = opt_enc(g.a_threshold_strict);
  j["threshold_agrees"] = g.threshold_agrees;
  return j;
}

inline Json to_json(const IsolationReport& r) {
  Json j;
  j["in_set_possible"] = r.in_set_possible;
  j["gamma_relation"] = to_string(r.gamma_relation);
  Json t1 = Json::array();
  for (auto [a, b] : r.type1_ties) t1.push_back(Json::array({a, b}));
  j["type1_ties"] = t1;
  j["type2_hits"] = r.type2_hits;
  j["boundary_flags"] = r.boundary_flags;
  j["unresolved_candidates"] = r.unresolved_candidates;
  return j;
}

inline Json to_json(const Lemma10Row& r) {
  Json j{{"m", r.m}, {"reached", to_string(r.reached)}};
  j["witness"] = r.witness ? Json(*r.witness) : Json(nullptr);
  return j;
}

inline Json to_json(const Lemma8Row& r) {
  return Json{{"n", r.n}, {"a_n2", r.a_n2.get_str()}, {"bound", to_json(r.bound)}, {"ok", to_string(r.ok)}};
}

inline Json to_json(const SlackRow& r) { return Json{{"p", r.p}, {"q", r.q}, {"slack", to_json(r.slack)}}; }

inline std::string slack_csv(const std::vector<SlackRow>& rows) {
  std::ostringstream os;
  os << "p,q,slack_lo,slack_hi\n";
  for (const auto& r : rows) os << r.p << ',' << r.q << ',' << r.slack.lo.str() << ',' << r.slack.upper().str() << '\n';
  return os.str();
}

inline Json to_json(const LegendreViolation& v) {
  return Json{{"p", v.p.get_str()}, {"q", v.q.get_str()}, {"violated", to_string(v.violated)}};
}

template <class T>
Json to_json(const SeriesExponents<T>& s) {
  Json j;
  j["tau"] = s.tau.str();
  j["exponent_lemma7"] = s.lemma7.str();
  j["exponent_theorem"] = s.theorem.str();
  j["lemma7_converges"] = s.lemma7_converges;
  j["theorem_converges"] = s.theorem_converges;
  j["lemma7_divergent"] = !s.lemma7_converges;
  return j;
}

inline Json to_json(const UnionMeasureReport& r) {
  Json j;
  j["tau"] = r.tau.str();
  j["c1"] = r.C1.str();
  j["c2"] = r.C2.str();
  j["m"] = r.M.get_str();
  j["q_max"] = r.q_max.get_str();
  j["n_max"] = r.N_max.get_str();
  j["finite_sum"] = r.finite_sum.str();
  j["finite_sum_approx"] = to_decimal(r.finite_sum, kApproxDigits);
  j["q_tail"] = opt_rat(r.q_tail);
  j["total"] = opt_rat(r.total);
  j["nonempty_q"] = r.nonempty_q;
  return j;
}

inline Json to_json(const TheoremBand& b) {
  return Json{{"lo", to_json(b.lo)}, {"hi", to_json(b.hi)}, {"width_bound", b.width_bound.str()},
              {"variant", to_string(b.variant)}};
}

inline Json to_json(const BckMargin& m) {
  return Json{{"margin", to_json(m.margin)},
              {"argmin_q", m.argmin_q.get_str()},
              {"argmin_p", m.argmin_p.get_str()},
              {"argmin_certified", m.argmin_certified}};
}

inline std::string band_csv_header() { return "q,p,N,lo,hi,width_bound\n"; }

// Outward: the lower end of lo and the upper end of hi.
inline std::string band_csv_row(const BandRecord& b) {
  std::ostringstream os;
  os << b.q << ',' << b.p << ',' << b.N << ',' << b.lo.lo.str() << ',' << b.hi.upper().str() << ','
     << b.width_bound.str() << '\n';
  return os.str();
}

}  // namespace dioph::report
