#pragma once
// Randomised identity checks with hand-rolled generators. Each check draws its cases from
// one keyed stream, so a (seed, case) pair names a reproducible input.

#include "colcont/encodings.hpp"
#include "colcont/experiments.hpp"
#include "colcont/rng.hpp"
#include "colcont/template.hpp"

#include "oracles.hpp"

#include <functional>
#include <set>
#include <sstream>
#include <string>

namespace props {

using namespace colcont;

struct Outcome {
  std::string name;
  std::uint64_t cases = 0;
  std::uint64_t failures = 0;
  std::string first_failure;

  bool ok() const { return failures == 0 && cases > 0; }
};

class Gen {
 public:
  Gen(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}
  std::uint64_t below(std::uint64_t n) { return rng_.below(n); }
  int range(int lo, int hi) { return lo + static_cast<int>(rng_.below(static_cast<std::uint64_t>(hi - lo + 1))); }
  bool coin() { return rng_.below(2) == 1; }

  Palette palette(int k) { return Palette::from_bits(static_cast<std::uint16_t>(1 + rng_.below((1u << k) - 1))); }

  Template tmpl(HostTerm host, int k) {
    std::vector<Palette> p(host.ground_size());
    for (auto& q : p) q = palette(k);
    return Template(host, k, p);
  }

  // Palettes that all hold `colour`.
  Template tmpl_with(HostTerm host, int k, int colour) {
    std::vector<Palette> p(host.ground_size());
    for (auto& q : p) q = palette(k) | Palette::single(colour);
    return Template(host, k, p);
  }

  HostTerm small_host() {
    switch (rng_.below(4)) {
      case 0: return {HostKind::kn, range(2, 4)};
      case 1: return {HostKind::qn_vertex, range(1, 2)};
      case 2: return {HostKind::qn_edge, range(1, 2)};
      default: return {HostKind::pn, range(2, 7)};
    }
  }

 private:
  KeyedRng rng_;
};

inline void fail(Outcome& o, std::uint64_t i, const std::string& what) {
  if (o.failures++ == 0) o.first_failure = "case " + std::to_string(i) + ": " + what;
}

// Each edge of K_{n+1} lies in exactly n-1 of the n+1 copies of K_n, so the restricted
// histograms sum to (n-1) times the histogram of t.
inline Outcome restriction_averaging(std::uint64_t seed, std::uint64_t cases) {
  Outcome o{"restriction-averaging", 0, 0, ""};
  Gen g(seed, 101);
  for (std::uint64_t i = 0; i < cases; ++i, ++o.cases) {
    int n = g.range(2, 6), k = g.range(2, 4);
    Template t = g.tmpl({HostKind::kn, n + 1}, k);
    EntropyValue whole = entropy(t);
    std::vector<std::uint64_t> sum(whole.histogram.size(), 0);
    BigInt product = 1;
    EmbeddingSet emb(HostKind::kn, n, n + 1);
    for (std::size_t e = 0; e < emb.size(); ++e) {
      EntropyValue part = entropy(restrict(t, emb.at(e)));
      for (std::size_t s = 0; s < part.histogram.size() && s < sum.size(); ++s) sum[s] += part.histogram[s];
      product *= part.weight;
    }
    bool ok = emb.size() == static_cast<std::size_t>(n + 1) && product == big_pow(whole.weight, n - 1);
    for (std::size_t s = 1; s < sum.size(); ++s) ok = ok && sum[s] == static_cast<std::uint64_t>(n - 1) * whole.histogram[s];
    if (!ok) fail(o, i, format_template(t));
  }
  return o;
}

// With T(e) in {[k], {i}} and i in every palette of t, the meet keeps t(e) where T is full
// and collapses to {i} elsewhere.
inline Outcome meet_entropy(std::uint64_t seed, std::uint64_t cases) {
  Outcome o{"meet-entropy", 0, 0, ""};
  Gen g(seed, 102);
  for (std::uint64_t i = 0; i < cases; ++i, ++o.cases) {
    int n = g.range(3, 9), k = g.range(2, 4), colour = g.range(1, k);
    HostTerm host{HostKind::kn, n};
    Template t = g.tmpl_with(host, k, colour);
    Rational p(static_cast<long>(g.below(9)), 8);
    Template T = sample_random_template({host, k, colour, p, g.below(1u << 30)});
    Template m = meet(t, T);
    BigInt expect = 1;
    for (std::size_t e = 0; e < t.size(); ++e)
      if (T[e] == Palette::full(k)) expect *= t[e].size();
    bool ok = weight(m) == expect;
    // commutative, idempotent, no larger than either side
    ok = ok && meet(T, t) == m && meet(t, t) == t && weight(m) <= weight(t) && weight(m) <= weight(T);
    // associative whenever the three-way meet exists
    Template u = g.tmpl_with(host, k, colour);
    ok = ok && meet(meet(t, T), u) == meet(t, meet(T, u));
    if (!ok) fail(o, i, format_template(t) + format_template(T));
  }
  return o;
}

// Enumerated realisations are distinct colourings below t, W(t) of them.
inline Outcome realisation_count(std::uint64_t seed, std::uint64_t cases) {
  Outcome o{"realisation-count", 0, 0, ""};
  Gen g(seed, 103);
  for (std::uint64_t i = 0; i < cases; ++i, ++o.cases) {
    HostTerm host = g.small_host();
    int k = g.range(1, 4);
    if (host.ground_size() > 8) k = std::min(k, 2);
    Template t = g.tmpl(host, k);
    BigInt w = weight(t);
    if (w > 1'000'000) {
      --i;
      --o.cases;
      continue;
    }
    RealisationStream s(t);
    std::set<std::vector<Palette>> seen;
    bool ok = s.count() == w;
    while (auto c = s.next()) {
      ok = ok && c->is_colouring() && pointwise_le(*c, t);
      seen.insert(c->palettes());
    }
    ok = ok && BigInt(seen.size()) == w;
    if (!ok) fail(o, i, format_template(t));
  }
  return o;
}

// t <= t' pointwise implies W(t) <= W(t') and every realisation of t realises t'.
inline Outcome monotonicity(std::uint64_t seed, std::uint64_t cases) {
  Outcome o{"monotonicity", 0, 0, ""};
  Gen g(seed, 104);
  for (std::uint64_t i = 0; i < cases; ++i, ++o.cases) {
    HostTerm host = g.small_host();
    int k = g.range(2, 4);
    Template big = g.tmpl(host, k);
    std::vector<Palette> p = big.palettes();
    for (auto& q : p) {
      Palette sub = q & g.palette(k);
      if (!sub.empty()) q = sub;
    }
    Template small(host, k, p);
    bool ok = pointwise_le(small, big) && is_subtemplate(small, big).has_value() && weight(small) <= weight(big);
    // sampled realisations of the smaller template
    for (int draw = 0; draw < 8; ++draw) {
      std::vector<int> colours;
      for (auto q : small.palettes()) {
        auto m = q.members();
        colours.push_back(m[g.below(m.size())]);
      }
      ok = ok && pointwise_le(Template::colouring(host, k, colours), big);
    }
    if (!ok) fail(o, i, format_template(small) + format_template(big));
  }
  return o;
}

// bad_pairs(t, F) = 0 exactly when no realisation of t contains a member of F.
inline Outcome bad_pairs_oracle(std::uint64_t seed, std::uint64_t cases) {
  Outcome o{"bad-pairs-oracle", 0, 0, ""};
  Gen g(seed, 105);
  const std::vector<std::string> names = registered_families();
  std::vector<ForbiddenFamily> families;
  for (const auto& n : names) families.push_back(forbidden_family_for(n));
  for (std::uint64_t i = 0; i < cases; ++i, ++o.cases) {
    const ForbiddenFamily& F = families[g.below(families.size())];
    HostTerm host{F.term().kind, F.term().n + static_cast<int>(g.below(2))};
    Template t = g.tmpl(host, F.k());
    // shrink palettes until the realisation count is small enough to enumerate
    std::vector<Palette> p = t.palettes();
    for (std::size_t e = 0; weight(Template(host, F.k(), p)) > 100'000; e = (e + 1) % p.size())
      p[e] = Palette::single(p[e].lowest());
    t = Template(host, F.k(), p);
    bool inside = true;
    RealisationStream s(t);
    while (auto c = s.next())
      if (oracle::count_bad(*c, F) != 0) {
        inside = false;
        break;
      }
    if ((bad_pairs(t, F) == 0) != inside) fail(o, i, F.name() + "\n" + format_template(t));
  }
  return o;
}

inline Outcome encoding_round_trips(std::uint64_t seed, std::uint64_t cases) {
  Outcome o{"encoding-round-trips", 0, 0, ""};
  Gen g(seed, 106);
  for (std::uint64_t i = 0; i < cases; ++i, ++o.cases) {
    int n = g.range(2, 8);
    Digraph D{n, {}};
    Digraph O{n, {}};
    Digraph T{n, {}};
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        if (g.coin()) D.arcs.insert({a, b});
        if (g.coin()) D.arcs.insert({b, a});
        switch (g.below(3)) {
          case 0: O.arcs.insert({a, b}); break;
          case 1: O.arcs.insert({b, a}); break;
          default: break;
        }
        if (g.coin())
          T.arcs.insert({a, b});
        else
          T.arcs.insert({b, a});
      }
    int d = g.range(1, 6);
    Multigraph M{n, d, {}};
    for (std::size_t e = 0; e < HostTerm{HostKind::kn, n}.ground_size(); ++e) M.multiplicity.push_back(g.range(0, d));
    bool ok = colouring_to_digraph(digraph_to_colouring(D)) == D && colouring_to_orgraph(orgraph_to_colouring(O)) == O &&
              colouring_to_tournament(tournament_to_colouring(T)) == T &&
              colouring_to_multigraph(multigraph_to_colouring(M)) == M;
    // and the other direction, from a random colouring
    HostTerm host{HostKind::kn, n};
    std::vector<int> colours(host.ground_size());
    for (int& c : colours) c = g.range(1, 4);
    Template c4 = Template::colouring(host, 4, colours);
    ok = ok && digraph_to_colouring(colouring_to_digraph(c4)) == c4;
    if (!ok) fail(o, i, "n=" + std::to_string(n));
  }
  return o;
}

inline Outcome metric_axioms(std::uint64_t seed, std::uint64_t cases) {
  Outcome o{"metric-axioms", 0, 0, ""};
  Gen g(seed, 107);
  for (std::uint64_t i = 0; i < cases; ++i, ++o.cases) {
    HostTerm host = g.small_host();
    int k = g.range(2, 4);
    Template a = g.tmpl(host, k), b = g.tmpl(host, k), c = g.tmpl(host, k);
    if (g.below(4) == 0) b = a;
    std::size_t ab = edit_distance(a, b), ba = edit_distance(b, a), bc = edit_distance(b, c), ac = edit_distance(a, c);
    bool ok = edit_distance(a, a) == 0 && ab == ba && (ab == 0) == (a == b) && ac <= ab + bc && ab <= a.size();
    if (!ok) fail(o, i, format_template(a) + format_template(b) + format_template(c));
  }
  return o;
}

inline std::vector<std::function<Outcome(std::uint64_t, std::uint64_t)>> all() {
  return {restriction_averaging, meet_entropy, realisation_count, monotonicity,
          bad_pairs_oracle,      encoding_round_trips, metric_axioms};
}

}  // namespace props
