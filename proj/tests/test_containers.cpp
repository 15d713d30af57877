#include "colcont/containers.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace colcont;

namespace {

HostTerm K(int n) { return {HostKind::kn, n}; }

// A bare hypergraph on `v` vertices with the given r-edges.
ReductionHypergraph bare(std::size_t v, std::size_t r, const std::vector<std::vector<std::uint32_t>>& edges) {
  ReductionHypergraph H;
  H.host = K(3);
  H.k = 1;
  H.N = 3;
  H.r = r;
  H.vertex_count = v;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    H.vertices.insert(H.vertices.end(), edges[i].begin(), edges[i].end());
    H.embedding.push_back(static_cast<std::uint32_t>(i));
    H.member.push_back(0);
  }
  return H;
}

bool in_property(const Template& t, const ForbiddenFamily& F) {
  RealisationStream s(t);
  while (auto c = s.next())
    if (oracle::count_bad(*c, F) != 0) return false;
  return true;
}

}  // namespace

TEST(Reduction, Shape) {
  ForbiddenFamily F = forbidden_family_for("rainbow-k3");
  ReductionHypergraph H = build_reduction_hypergraph(K(4), F);
  EXPECT_EQ(H.r, 3u);
  EXPECT_EQ(H.vertex_count, 18u);
  EXPECT_EQ(H.edge_count(), 24u);
  for (std::size_t i = 0; i < H.edge_count(); ++i) {
    const std::uint32_t* e = H.edge(i);
    EXPECT_NE(e[0] / 3, e[1] / 3);  // distinct elements
  }
}

// <t> lies inside Forb(F) exactly when the vertex set of t is independent in H.
TEST(Reduction, IndependentSetsAreTemplatesInsideTheProperty) {
  for (const char* name : {"mono-triangle", "no-increasing-p2", "rainbow-k3"}) {
    ForbiddenFamily F = forbidden_family_for(name);
    ReductionHypergraph H = build_reduction_hypergraph(K(4), F);
    const int k = F.k();
    std::vector<Palette> p(6);
    std::vector<int> idx(6, 1);
    std::uint64_t checked = 0;
    for (;;) {
      for (int e = 0; e < 6; ++e) p[e] = Palette::from_bits(static_cast<std::uint16_t>(idx[e]));
      Template t(K(4), k, p);
      VertexSet s = template_vertex_set(t);
      EXPECT_EQ(is_independent(H, s), in_property(t, F)) << name;
      EXPECT_EQ(induced_edges(H, s), oracle::count_bad(t, F));
      auto back = vertex_set_template(s, K(4), k);
      ASSERT_TRUE(back);
      EXPECT_EQ(*back, t);
      ++checked;
      int e = 0;
      while (e < 6 && idx[e] == (1 << k) - 1) idx[e++] = 1;
      if (e == 6) break;
      ++idx[e];
    }
    EXPECT_EQ(BigInt(checked), big_pow((1 << k) - 1, 6));
  }
  EXPECT_FALSE(vertex_set_template(VertexSet(12), K(4), 2));
}

TEST(Sparsify, ProbabilityExamples) {
  bool pass = false;
  EXPECT_EQ(sparsification_probability(K(10), 2, 3, Rational(1, 10), pass), Rational(1, 960));
  EXPECT_FALSE(pass);
  EXPECT_EQ(sparsification_probability(K(10), 2, 3, Rational(1000), pass), 1);
  EXPECT_TRUE(pass);
  EXPECT_EQ(sparsification_probability({HostKind::pn, 10}, 3, 3, Rational(1, 10), pass), 1);
  EXPECT_TRUE(pass);
}

TEST(Sparsify, KeepsExactlyTheDrawsBelowP) {
  ForbiddenFamily F = forbidden_family_for("mono-triangle");
  ReductionHypergraph H = build_reduction_hypergraph(K(12), F);
  Sparsified a = sparsify(H, Rational(1, 10), 42, Rational(1, 3));
  Sparsified b = sparsify(H, Rational(1, 10), 42, Rational(1, 3));
  EXPECT_EQ(a.H.vertices, b.H.vertices);
  std::vector<std::uint32_t> expect;
  for (std::size_t i = 0; i < H.edge_count(); ++i)
    if (draw_below(keyed_draw(42, streams::sparsify, i), Rational(1, 3))) expect.push_back(static_cast<std::uint32_t>(i));
  EXPECT_EQ(a.H.embedding.size(), expect.size());
  for (std::size_t j = 0; j < expect.size(); ++j) EXPECT_EQ(a.H.embedding[j], H.embedding[expect[j]]);
  EXPECT_EQ(a.report.e_H, H.edge_count());
  EXPECT_EQ(a.report.e_Hp, expect.size());
  EXPECT_EQ(a.report.Y_Hp, overlapping_pairs(a.H));
  EXPECT_EQ(a.report.F1, 2 * a.report.e_Hp >= a.report.p * a.report.e_H);

  Sparsified all = sparsify(H, Rational(1000), 1);
  EXPECT_TRUE(all.report.pass_through);
  EXPECT_EQ(all.H.edge_count(), H.edge_count());
}

TEST(Linearize, Examples) {
  ReductionHypergraph lin = bare(9, 3, {{0, 1, 2}, {2, 3, 4}, {4, 5, 6}});
  EXPECT_TRUE(is_linear(lin));
  EXPECT_EQ(linearize(lin).vertices, lin.vertices);

  ReductionHypergraph two = bare(4, 3, {{0, 1, 2}, {0, 1, 3}});
  EXPECT_EQ(overlapping_pairs(two), 1);
  ReductionHypergraph l2 = linearize(two);
  EXPECT_EQ(l2.edge_count(), 1u);
  EXPECT_TRUE(is_linear(l2));

  ReductionHypergraph tri = bare(6, 3, {{0, 1, 2}, {1, 2, 3}, {0, 2, 3}});
  EXPECT_EQ(overlapping_pairs(tri), 3);
  ReductionHypergraph l3 = linearize(tri);
  EXPECT_GE(l3.edge_count(), 1u);
  EXPECT_TRUE(is_linear(l3));
}

TEST(Containers, EmptyHypergraphGivesOneContainer) {
  ReductionHypergraph H = bare(5, 3, {});
  auto C = build_containers(H, Rational(1, 10));
  ASSERT_EQ(C.size(), 1u);
  EXPECT_EQ(C[0].count(), 5u);
}

// Perfect matching with delta = 1 / e: every container is itself independent, and every
// independent set lies in one of them.
TEST(Containers, PerfectMatchingCoverIsExhaustive) {
  ReductionHypergraph H = bare(9, 3, {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}});
  auto C = build_containers(H, Rational(1, 3));
  ASSERT_FALSE(C.empty());
  for (const auto& c : C) {
    EXPECT_TRUE(is_independent(H, c));
    for (std::size_t e = 0; e < 3; ++e) {
      int kept = 0;
      for (std::size_t j = 0; j < 3; ++j) kept += c.test(H.edge(e)[j]);
      EXPECT_LE(kept, 2);
    }
  }
  for (std::uint32_t bits = 0; bits < 512; ++bits) {
    VertexSet s(9, bits);
    if (!is_independent(H, s)) continue;
    bool covered = false;
    for (const auto& c : C) covered = covered || s.is_subset_of(c);
    EXPECT_TRUE(covered) << bits;
  }
}

TEST(Containers, RefinementMeetsTheBadLimit) {
  ForbiddenFamily F = forbidden_family_for("rainbow-k3");
  ReductionHypergraph H = build_reduction_hypergraph(K(4), F);
  VertexSet everything(H.vertex_count);
  everything.set();
  auto C = refine_containers(H, {everything}, 2);
  ASSERT_FALSE(C.empty());
  for (const auto& c : C) {
    EXPECT_LE(induced_edges(H, c), 2u);
    EXPECT_TRUE(vertex_set_template(c, K(4), 3).has_value());
  }
}

TEST(Pipeline, ExhaustiveCoverOnFourVertices) {
  ForbiddenFamily F = forbidden_family_for("rainbow-k3");
  PipelineOptions o;
  o.seed = 3;
  o.samples = 2000;
  PipelineReport R = run_container_pipeline(K(4), F, o);
  const auto& V = R.verification;
  EXPECT_TRUE(V.exhaustive);
  EXPECT_EQ(V.exhaustive_checked, 3060u);  // zero-bad templates on K_4
  EXPECT_EQ(V.exhaustive_failures, 0u);
  EXPECT_EQ(V.cover_failures, 0u);
  EXPECT_EQ(V.template_cover_failures, 0u);
  EXPECT_TRUE(V.bad_pairs_ok);
  for (const auto& t : R.family.templates) EXPECT_LE(Rational(oracle::count_bad(t, F)), o.epsilon * 4);
}

TEST(Pipeline, ConstantsLieBelowSomeContainer) {
  ForbiddenFamily F = forbidden_family_for("rainbow-k3");
  PipelineOptions o;
  o.samples = 500;
  o.template_samples = 100;
  PipelineReport R = run_container_pipeline(K(5), F, o);
  for (auto p : {Palette::of({1, 2}), Palette::of({1, 3}), Palette::of({2, 3})}) {
    Template c = Template::constant(K(5), 3, p);
    bool below = false;
    for (const auto& t : R.family.templates) below = below || pointwise_le(c, t);
    EXPECT_TRUE(below) << p.str();
  }
  EXPECT_EQ(R.verification.cover_failures, 0u);
}

TEST(Pipeline, TriangleFreeGraphsAreCovered) {
  ForbiddenFamily F = forbidden_family_for("mono-triangle");
  PipelineOptions o;
  o.epsilon = Rational(1, 4);
  o.samples = 2000;
  o.template_samples = 200;
  PipelineReport R = run_container_pipeline(K(6), F, o);
  EXPECT_EQ(R.verification.cover_failures, 0u);
  EXPECT_EQ(R.verification.template_cover_failures, 0u);
  EXPECT_TRUE(R.verification.bad_pairs_ok);
}

TEST(Pipeline, SameSeedSameFamily) {
  ForbiddenFamily F = forbidden_family_for("rainbow-k3");
  PipelineOptions o;
  o.samples = 200;
  o.template_samples = 50;
  o.p = Rational(1, 2);
  o.seed = 9;
  PipelineReport a = run_container_pipeline(K(5), F, o);
  PipelineReport b = run_container_pipeline(K(5), F, o);
  EXPECT_EQ(a.family.templates, b.family.templates);
  EXPECT_EQ(a.sparsification.e_Hp, b.sparsification.e_Hp);
  EXPECT_TRUE(is_linear(edge_subhypergraph(build_reduction_hypergraph(K(5), F), {})));
}

TEST(Verify, DetectsAFamilyThatMissesMembers) {
  ForbiddenFamily F = forbidden_family_for("rainbow-k3");
  ContainerFamily only;
  only.host = K(4);
  only.k = 3;
  only.templates = {Template::constant(K(4), 3, Palette::of({1, 2}))};
  VerifyOptions v;
  v.samples = 200;
  v.template_samples = 50;
  ContainerVerification R = verify_container_theorem(only, F, Rational(3, 10), v);
  EXPECT_GT(R.cover_failures, 0u);
  EXPECT_GT(R.exhaustive_failures, 0u);

  ContainerFamily loose = only;
  loose.templates = {Template::full(K(4), 3)};
  ContainerVerification L = verify_container_theorem(loose, F, Rational(3, 10), v);
  EXPECT_EQ(L.cover_failures, 0u);
  EXPECT_FALSE(L.bad_pairs_ok);  // 24 bad pairs against a limit of 1.2
  EXPECT_EQ(L.max_bad_pairs, 24u);
}

TEST(Verify, SampledMembersLieInTheProperty) {
  ForbiddenFamily F = forbidden_family_for("mono-triangle");
  KeyedRng rng(4, streams::member_sampling);
  for (int i = 0; i < 200; ++i) {
    auto c = sample_member(K(7), F, rng, 1'000'000);
    EXPECT_EQ(oracle::count_bad(Template::colouring(K(7), 2, c), F), 0u);
  }
}
