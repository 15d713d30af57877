#pragma once

#include "colcont/family.hpp"
#include "colcont/rng.hpp"
#include "colcont/template.hpp"

#include <boost/dynamic_bitset.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace colcont {

using VertexSet = boost::dynamic_bitset<>;

// Vertices are (element, colour) pairs; one r-edge per embedding phi and member c of F,
// holding (phi(j), c_j) for every position j.
struct ReductionHypergraph {
  HostTerm host;
  int k = 0;
  int N = 0;
  std::size_t r = 0;
  std::size_t vertex_count = 0;
  std::vector<std::uint32_t> vertices;  // r per edge
  std::vector<std::uint32_t> embedding;  // source embedding index per edge
  std::vector<std::uint32_t> member;     // source member index per edge

  std::size_t edge_count() const { return embedding.size(); }
  const std::uint32_t* edge(std::size_t i) const { return vertices.data() + i * r; }
};

inline std::uint32_t reduction_vertex(std::size_t element, int colour, int k) {
  return static_cast<std::uint32_t>(element * k + (colour - 1));
}

ReductionHypergraph build_reduction_hypergraph(HostTerm host, const ForbiddenFamily& F);
// Edges listed in `keep`, in that order.
ReductionHypergraph edge_subhypergraph(const ReductionHypergraph& H, const std::vector<std::size_t>& keep);

VertexSet template_vertex_set(const Template& t);
// Palettes read off the vertex set; nullopt when some element gets no colour.
std::optional<Template> vertex_set_template(const VertexSet& s, HostTerm host, int k);

bool is_independent(const ReductionHypergraph& H, const VertexSet& s);
std::uint64_t induced_edges(const ReductionHypergraph& H, const VertexSet& s);
// Unordered pairs of distinct edges sharing at least two vertices.
BigInt overlapping_pairs(const ReductionHypergraph& H);
bool is_linear(const ReductionHypergraph& H);

// Sparsification probability for complete-graph hosts with N >= 3; otherwise 1 and
// pass_through is set. Values above 1 are also clamped to 1 with pass_through set.
Rational sparsification_probability(HostTerm host, int k, int N, const Rational& eps1, bool& pass_through);

struct SparsificationReport {
  Rational p;
  bool pass_through = false;
  std::uint64_t seed = 0;
  std::uint64_t e_H = 0;
  std::uint64_t e_Hp = 0;
  BigInt Y_H;   // unordered
  BigInt Y_Hp;  // unordered
  bool F1 = false;
  bool F2 = false;
  Rational f2_threshold;  // bound on ordered pairs, compared against 2 * Y_Hp
  BigInt y_count_bound;   // counting bound on ordered overlapping pairs in H (K hosts)
};

struct Sparsified {
  ReductionHypergraph H;
  SparsificationReport report;
};

// Keeps edge i iff draw i of the sparsification stream falls below p.
Sparsified sparsify(const ReductionHypergraph& H, const Rational& eps1, std::uint64_t seed,
                    std::optional<Rational> p_override = std::nullopt);

// Greedy in canonical edge order: an edge survives iff it meets every earlier survivor
// in at most one vertex.
ReductionHypergraph linearize(const ReductionHypergraph& H);

// Branches on the maximum residual-degree vertex (in / out); a branch stops once the
// edges induced by its surviving vertices drop below delta * e(H).
std::vector<VertexSet> build_containers(const ReductionHypergraph& H, const Rational& delta,
                                        std::size_t max_containers = 1'000'000);

// Splits each container further against the full hypergraph, restricted to vertex sets
// that keep at least one colour per element, until the induced edge count is at most
// bad_limit. Containers contained in another are dropped.
std::vector<VertexSet> refine_containers(const ReductionHypergraph& H, const std::vector<VertexSet>& containers,
                                         std::uint64_t bad_limit, std::size_t max_containers = 1'000'000);

struct ContainerFamily {
  HostTerm host;
  int k = 0;
  std::vector<Template> templates;
  std::size_t candidates = 0;     // vertex sets offered
  std::size_t dropped_empty = 0;  // discarded for an empty palette
};

ContainerFamily containers_to_templates(const std::vector<VertexSet>& containers, HostTerm host, int k);

struct ContainerVerification {
  std::uint64_t samples = 0;
  std::uint64_t cover_failures = 0;
  std::uint64_t template_samples = 0;
  std::uint64_t template_cover_failures = 0;
  bool exhaustive = false;
  std::uint64_t exhaustive_checked = 0;  // zero-bad templates enumerated
  std::uint64_t exhaustive_failures = 0;
  std::uint64_t max_bad_pairs = 0;
  Rational max_bad_pair_ratio;  // max bad_pairs / embedding count
  bool bad_pairs_ok = true;     // every template within epsilon * embedding count
  double log_k_size = 0.0;      // log_k |T_n|
  double eps_ground = 0.0;      // epsilon * g(n)
};

struct VerifyOptions {
  std::uint64_t samples = 10'000;
  std::uint64_t template_samples = 1'000;
  std::uint64_t seed = 0;
  std::uint64_t exhaustive_budget = 2'000'000;  // templates; exhaustive check when the space fits
  std::uint64_t max_attempts = 2'000'000'000;   // rejection-sampling draws
};

// Uniform member of Forb(F)_n by rejection, element by element in canonical order.
std::vector<int> sample_member(HostTerm host, const ForbiddenFamily& F, KeyedRng& rng,
                               std::uint64_t max_attempts);

ContainerVerification verify_container_theorem(const ContainerFamily& family, const ForbiddenFamily& F,
                                               const Rational& epsilon, const VerifyOptions& options = {});

struct PipelineOptions {
  Rational epsilon{3, 10};
  Rational delta{1, 10};
  std::optional<Rational> eps1;  // default epsilon * k^{-|V_N|}
  std::optional<Rational> p;     // overrides the computed probability
  std::uint64_t seed = 0;
  std::uint64_t samples = 10'000;
  std::uint64_t template_samples = 1'000;
  std::uint64_t exhaustive_budget = 2'000'000;
  std::size_t max_containers = 1'000'000;
};

struct PipelineReport {
  SparsificationReport sparsification;
  Rational eps1;
  std::uint64_t e_Hpp = 0;
  double d = 0.0;
  std::optional<double> beta;
  std::size_t sparse_containers = 0;  // containers of the linear hypergraph
  std::uint64_t f3_checked = 0;       // those with e(H[C]) < eps1 * e(H)
  std::uint64_t f3_failures = 0;
  ContainerFamily family;
  ContainerVerification verification;
};

PipelineReport run_container_pipeline(HostTerm host, const ForbiddenFamily& F, const PipelineOptions& options);

}  // namespace colcont
