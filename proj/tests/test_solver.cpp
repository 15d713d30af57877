#include "colcont/rng.hpp"
#include "colcont/solver.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace colcont;

namespace {

HostTerm K(int n) { return {HostKind::kn, n}; }

std::set<std::vector<Palette>> as_set(const std::vector<Template>& ts) {
  std::set<std::vector<Palette>> out;
  for (const auto& t : ts) out.insert(t.palettes());
  return out;
}

std::set<std::vector<Palette>> two_colour_constants(int n) {
  std::set<std::vector<Palette>> out;
  for (auto p : {Palette::of({1, 2}), Palette::of({1, 3}), Palette::of({2, 3})})
    out.insert(Template::constant(K(n), 3, p).palettes());
  return out;
}

std::uint64_t floor_sq4(int n) { return static_cast<std::uint64_t>(n) * n / 4; }

}  // namespace

TEST(SolveEx, RainbowExamplesAndUniqueness) {
  ForbiddenFamily F = forbidden_family_for("rainbow-k3");
  for (int n = 3; n <= 6; ++n) {
    ExtremalResult r = solve_ex(K(n), F);
    EXPECT_TRUE(r.certified);
    EXPECT_EQ(r.w_star, big_pow(2, n * (n - 1) / 2));
    if (n <= 5) {
      EXPECT_TRUE(r.witnesses_complete);
      EXPECT_EQ(as_set(r.witnesses), two_colour_constants(n));
    }
  }
}

TEST(SolveEx, KnownValues) {
  EXPECT_EQ(solve_ex(K(4), forbidden_family_for("multigraph-3-4")).w_star, 144);
  EXPECT_EQ(solve_ex(K(5), forbidden_family_for("multigraph-3-4")).w_star, 2304);
  EXPECT_EQ(solve_ex(K(3), forbidden_family_for("df-free(K3)")).w_star, 48);
  EXPECT_EQ(solve_ex(K(4), forbidden_family_for("no-increasing-p2")).w_star, 16);
}

TEST(SolveEx, ClosedFormsRecomputedHere) {
  ForbiddenFamily M = forbidden_family_for("multigraph-3-4");
  for (int n = 3; n <= 6; ++n) {
    BigInt w = solve_ex(K(n), M).w_star;
    EXPECT_EQ(w * big_pow(2, n / 2), big_pow(2, n * (n - 1) / 2) * big_pow(3, n / 2)) << n;
  }
  ForbiddenFamily D = forbidden_family_for("df-free(K3)");
  for (int n = 3; n <= 5; ++n) {
    std::uint64_t t = floor_sq4(n), e = n * (n - 1) / 2;
    EXPECT_EQ(solve_ex(K(n), D).w_star, big_pow(4, t) * big_pow(3, e - t)) << n;
  }
  ForbiddenFamily P = forbidden_family_for("path-no-repeat");
  for (int n = 3; n <= 12; ++n) EXPECT_EQ(solve_ex({HostKind::pn, n}, P).w_star, big_pow(2, n / 2)) << n;
}

TEST(SolveEx, CaseStudyCatalogue) {
  auto cases = closed_form_cases();
  EXPECT_EQ(cases.size(), 5u);
  for (const auto& name : cases) {
    int lo = 3, hi = name == "path-no-repeat" ? 12 : 5;
    ClosedFormReport rep = closed_form_check(name, lo, hi);
    EXPECT_TRUE(rep.all_hold) << name;
    EXPECT_EQ(rep.rows.size(), static_cast<std::size_t>(hi - lo + 1));
  }
  EXPECT_THROW(closed_form_check("no-such-case", 3, 4), Error);
}

// The solver's optimum equals the brute-force maximum over every template, and its
// witnesses are maximisers with no bad pair.
TEST(SolveEx, MatchesBruteForceOracle) {
  for (const auto& name : registered_families()) {
    ForbiddenFamily F = forbidden_family_for(name);
    for (int n = 3; n <= 4; ++n) {
      if (name == "q2-free-edge" && n == 4) continue;  // 3^32 templates
      HostTerm host{F.term().kind, n};
      oracle::BruteResult brute = oracle::brute_force_ex(host, F);
      ExtremalResult r = solve_ex(host, F);
      EXPECT_EQ(r.w_star, brute.w_star) << name << " n=" << n;
      EXPECT_TRUE(r.certified);
      std::set<std::vector<Palette>> all(brute.witnesses.begin(), brute.witnesses.end());
      for (const auto& w : r.witnesses) {
        EXPECT_EQ(oracle::count_bad(w, F), 0u) << name;
        EXPECT_EQ(weight(w), r.w_star);
        EXPECT_TRUE(all.count(w.palettes())) << name << " n=" << n;
      }
    }
  }
}

TEST(SolveEx, OptionsDoNotChangeTheOptimum) {
  for (const char* name : {"rainbow-k3", "mono-triangle", "df-free(K3)", "multigraph-3-4"}) {
    ForbiddenFamily F = forbidden_family_for(name);
    ExtremalResult base = solve_ex(K(5), F);
    SolveOptions plain;
    plain.dominance = false;
    plain.symmetry = false;
    plain.chain = false;
    if (std::string(name) != "multigraph-3-4") {
      EXPECT_EQ(solve_ex(K(5), F, plain).w_star, base.w_star) << name;
    }
    SolveOptions threaded;
    threaded.threads = 4;
    ExtremalResult t = solve_ex(K(5), F, threaded);
    EXPECT_EQ(t.w_star, base.w_star);
    if (base.witnesses_complete && t.witnesses_complete) {
      EXPECT_EQ(t.witnesses, base.witnesses) << name;
    }
  }
}

TEST(SolveEx, NodeBudgetGivesUncertifiedBound) {
  SolveOptions o;
  o.node_budget = 5;
  o.chain = false;
  ForbiddenFamily F = forbidden_family_for("df-free(K3)");
  ExtremalResult r = solve_ex(K(6), F, o);
  BigInt truth = solve_ex(K(6), F).w_star;
  EXPECT_FALSE(r.certified);
  EXPECT_LE(r.w_star, truth);
  EXPECT_GE(r.upper_log2 + 1e-9, std::log2(truth.convert_to<double>()));
}

TEST(SolveEx, EntropyHistogramMatchesWitness) {
  ExtremalResult r = solve_ex(K(6), forbidden_family_for("multigraph-3-4"));
  EXPECT_EQ(r.ent, entropy(r.witnesses.front()));
  EXPECT_EQ(r.ent.weight, r.w_star);
}

TEST(SolveEx, HostMismatchIsRejected) {
  EXPECT_THROW(solve_ex({HostKind::qn_vertex, 3}, forbidden_family_for("rainbow-k3")), Error);
  EXPECT_THROW(solve_ex(K(2), forbidden_family_for("rainbow-k3")), Error);
}

TEST(RelativeEx, Examples) {
  ForbiddenFamily mono = forbidden_family_for("mono-triangle");
  Template base = Template::constant(K(4), 2, Palette::of({1, 2}));
  EXPECT_EQ(relative_ex(base, mono).w_star, 16);
  // any member of the property is its own optimum
  Template c = Template::colouring(K(4), 2, {1, 1, 2, 2, 1, 1});
  ASSERT_EQ(oracle::count_bad(c, mono), 0u);
  EXPECT_EQ(relative_ex(c, mono).w_star, 1);
  // full base gives ex(n, P)
  EXPECT_EQ(relative_ex(Template::full(K(6), 2), mono).w_star, solve_ex(K(6), mono).w_star);
}

TEST(RelativeEx, MatchesBruteForceBelowRandomBases) {
  ForbiddenFamily F = forbidden_family_for("rainbow-k3");
  KeyedRng rng(21, 4);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Palette> p(6);
    for (auto& q : p) q = Palette::from_bits(static_cast<std::uint16_t>(1 + rng.below(7)));
    Template base(K(4), 3, p);
    BigInt best = 0;
    // every t' <= base pointwise
    std::vector<std::vector<Palette>> choices(6);
    for (int e = 0; e < 6; ++e)
      for (std::uint16_t b = 1; b < 8; ++b)
        if ((b & ~p[e].bits()) == 0) choices[e].push_back(Palette::from_bits(b));
    std::vector<std::size_t> idx(6, 0);
    for (;;) {
      std::vector<Palette> q(6);
      for (int e = 0; e < 6; ++e) q[e] = choices[e][idx[e]];
      Template t(K(4), 3, q);
      if (oracle::count_bad(t, F) == 0) best = std::max(best, weight(t));
      int e = 0;
      while (e < 6 && ++idx[e] == choices[e].size()) idx[e++] = 0;
      if (e == 6) break;
    }
    EXPECT_EQ(relative_ex(base, F).w_star, best);
  }
}

TEST(Speed, Examples) {
  EXPECT_EQ(speed({HostKind::pn, 5}, forbidden_family_for("path-no-repeat")), 24);
  EXPECT_EQ(speed(K(3), forbidden_family_for("rainbow-k3")), 21);
  ForbiddenFamily mono = forbidden_family_for("mono-triangle");
  // labelled triangle-free graphs on 4 vertices, counted directly
  int triangle_free = 0;
  for (int g = 0; g < 64; ++g) {
    bool tri = false;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        for (int c = b + 1; c < 4; ++c)
          tri = tri || ((g >> kn_edge_index(4, a, b) & 1) && (g >> kn_edge_index(4, a, c) & 1) &&
                        (g >> kn_edge_index(4, b, c) & 1));
    triangle_free += !tri;
  }
  EXPECT_EQ(speed(K(4), mono), triangle_free);
}

TEST(Speed, MatchesEnumerationOracle) {
  for (const auto& name : registered_families()) {
    ForbiddenFamily F = forbidden_family_for(name);
    for (int n = 3; n <= 4; ++n) {
      HostTerm host{F.term().kind, n};
      if (big_pow(F.k(), host.ground_size()) > 2'000'000) continue;
      EXPECT_EQ(speed(host, F), oracle::brute_force_speed(host, F)) << name << " " << n;
    }
  }
}

TEST(Speed, SandwichAndPathGap) {
  ForbiddenFamily R = forbidden_family_for("rainbow-k3");
  for (int n = 3; n <= 6; ++n) EXPECT_LE(solve_ex(K(n), R).w_star, speed(K(n), R));
  ForbiddenFamily M = forbidden_family_for("mono-triangle");
  for (int n = 3; n <= 5; ++n) EXPECT_LE(solve_ex(K(n), M).w_star, speed(K(n), M));
  ForbiddenFamily P = forbidden_family_for("path-no-repeat");
  for (int n = 3; n <= 12; ++n) {
    BigInt s = speed({HostKind::pn, n}, P), w = solve_ex({HostKind::pn, n}, P).w_star;
    EXPECT_EQ(s, 3 * big_pow(2, n - 2));
    EXPECT_LE(w, s);
    if (n >= 4) {
      EXPECT_LT(w, s);
    }
  }
}

TEST(Speed, BudgetExceeded) {
  EXPECT_THROW(speed(K(7), forbidden_family_for("rainbow-k3"), 10), Error);
}

TEST(Density, IntegerComparison) {
  // 2^3 over 3 elements vs 2^5 over 6 elements: 1 > 5/6
  EXPECT_TRUE(density_not_below(8, 3, 32, 6));
  EXPECT_FALSE(density_not_below(32, 6, 8, 3));
  EXPECT_TRUE(density_not_below(8, 3, 64, 6));
}

TEST(Density, SequencesAreNonincreasing) {
  DensitySequence r = density_sequence(HostKind::kn, forbidden_family_for("rainbow-k3"), 3, 6);
  ASSERT_EQ(r.entries.size(), 4u);
  for (bool b : r.step_nonincreasing) EXPECT_TRUE(b);
  EXPECT_NEAR(r.tail_ratio, std::log(2.0) / std::log(3.0), 1e-12);

  DensitySequence q = density_sequence(HostKind::qn_vertex, forbidden_family_for("q2-free-vertex"), 2, 3);
  EXPECT_EQ(q.entries.front().w_star, 8);
  for (bool b : q.step_nonincreasing) EXPECT_TRUE(b);

  DensitySequence p = density_sequence(HostKind::pn, forbidden_family_for("path-no-repeat"), 3, 12);
  for (bool b : p.pair_nonincreasing) EXPECT_TRUE(b);
  bool any_step_up = false;
  for (bool b : p.step_nonincreasing) any_step_up = any_step_up || !b;
  EXPECT_TRUE(any_step_up);
}

// Forbidding only increasing paths leaves far more room than forbidding all paths.
TEST(Density, OrderHereditaryGap) {
  ForbiddenFamily ordered = forbidden_family_for("no-increasing-p2");
  ForbiddenFamily plain = forbidden_family_for("no-p2");
  for (int n = 4; n <= 6; ++n) {
    BigInt a = solve_ex(K(n), ordered).w_star, b = solve_ex(K(n), plain).w_star;
    EXPECT_EQ(a, big_pow(2, floor_sq4(n)));
    EXPECT_EQ(b, big_pow(2, n / 2));
    EXPECT_GE(a, b * big_pow(2, floor_sq4(n) - n / 2));
  }
}
