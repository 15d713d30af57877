#include "colcont/containers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace colcont {

namespace {

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::vector<std::vector<std::uint32_t>> incidence(const ReductionHypergraph& H) {
  std::vector<std::vector<std::uint32_t>> inc(H.vertex_count);
  for (std::size_t e = 0; e < H.edge_count(); ++e)
    for (std::size_t j = 0; j < H.r; ++j) inc[H.edge(e)[j]].push_back(static_cast<std::uint32_t>(e));
  return inc;
}

// Drops duplicates and sets contained in another; keeps first-seen order. Past
// kMaxPairwise sets only exact duplicates are dropped.
constexpr std::size_t kMaxPairwise = 20'000;

std::vector<VertexSet> maximal_only(std::vector<VertexSet> sets) {
  if (sets.size() > kMaxPairwise) {
    std::vector<VertexSet> out;
    std::set<VertexSet> seen;
    for (auto& s : sets)
      if (seen.insert(s).second) out.push_back(std::move(s));
    return out;
  }
  std::vector<std::size_t> idx(sets.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return sets[a].count() > sets[b].count(); });
  std::vector<bool> keep(sets.size(), false);
  std::vector<std::size_t> kept;
  for (std::size_t i : idx) {
    bool covered = false;
    for (std::size_t j : kept)
      if (sets[i].is_subset_of(sets[j])) {
        covered = true;
        break;
      }
    if (!covered) {
      kept.push_back(i);
      keep[i] = true;
    }
  }
  std::vector<VertexSet> out;
  for (std::size_t i = 0; i < sets.size(); ++i)
    if (keep[i]) out.push_back(std::move(sets[i]));
  return out;
}

// In/out branching over vertex sets. In template mode every element must keep a colour
// and an element down to one colour forces that colour in.
class Brancher {
 public:
  Brancher(const ReductionHypergraph& H, bool templates, std::size_t max_containers)
      : H_(H), inc_(incidence(H)), templates_(templates), max_(max_containers) {}

  struct State {
    VertexSet alive;
    VertexSet in;
    std::vector<std::uint8_t> colours;  // alive colours per element
    std::vector<std::uint8_t> alive_in_edge;
    std::vector<std::uint8_t> in_in_edge;
    std::uint64_t full = 0;  // edges with every vertex alive
  };

  std::optional<State> start(const VertexSet& container) const {
    State s;
    s.alive = container;
    s.in = VertexSet(H_.vertex_count);
    s.alive_in_edge.assign(H_.edge_count(), 0);
    s.in_in_edge.assign(H_.edge_count(), 0);
    for (std::size_t e = 0; e < H_.edge_count(); ++e) {
      for (std::size_t j = 0; j < H_.r; ++j) s.alive_in_edge[e] += container[H_.edge(e)[j]];
      if (s.alive_in_edge[e] == H_.r) ++s.full;
    }
    std::vector<std::pair<bool, std::uint32_t>> work;
    if (templates_) {
      std::size_t g = H_.vertex_count / H_.k;
      s.colours.assign(g, 0);
      for (std::size_t x = 0; x < g; ++x) {
        for (int c = 1; c <= H_.k; ++c) s.colours[x] += container[reduction_vertex(x, c, H_.k)];
        if (s.colours[x] == 0) return std::nullopt;
        if (s.colours[x] == 1) work.push_back({true, lone_colour(s, x)});
      }
    }
    if (!apply(s, std::move(work))) return std::nullopt;
    return s;
  }

  // done(full) decides whether a vertex set with `full` induced edges is a container.
  void run(State s, const std::function<bool(std::uint64_t)>& done, std::vector<VertexSet>& out) const {
    // Everything below is already covered; recent containers are the likely supersets.
    for (std::size_t i = out.size(), seen = 0; i-- > 0 && seen < 64; ++seen)
      if (s.alive.is_subset_of(out[i])) return;
    if (done(s.full)) {
      if (out.size() >= max_) throw Error(ErrorCode::budget_exceeded, "container count exceeds " + std::to_string(max_));
      out.push_back(grow(s, done));
      return;
    }
    std::uint32_t best = 0;
    std::size_t best_degree = 0;
    for (std::uint32_t v = 0; v < H_.vertex_count; ++v) {
      if (!s.alive[v] || s.in[v]) continue;
      std::size_t degree = 0;
      for (auto e : inc_[v]) degree += s.alive_in_edge[e] == H_.r;
      if (degree > best_degree) {
        best_degree = degree;
        best = v;
      }
    }
    if (best_degree == 0) throw Error(ErrorCode::internal, "container branching found no vertex to split");
    {
      State t = s;
      if (apply(t, {{true, best}})) run(std::move(t), done, out);
    }
    if (apply(s, {{false, best}})) run(std::move(s), done, out);
  }

 private:
  // Adds back removed vertices in index order while the set stays a container.
  VertexSet grow(const State& s, const std::function<bool(std::uint64_t)>& done) const {
    VertexSet alive = s.alive;
    std::vector<std::uint8_t> count = s.alive_in_edge;
    std::uint64_t full = s.full;
    for (std::uint32_t v = 0; v < H_.vertex_count; ++v) {
      if (alive[v]) continue;
      std::uint64_t extra = 0;
      for (auto e : inc_[v]) extra += count[e] + 1u == H_.r;
      if (!done(full + extra)) continue;
      alive[v] = true;
      full += extra;
      for (auto e : inc_[v]) ++count[e];
    }
    return alive;
  }

  std::uint32_t lone_colour(const State& s, std::size_t x) const {
    for (int c = 1; c <= H_.k; ++c)
      if (s.alive[reduction_vertex(x, c, H_.k)]) return reduction_vertex(x, c, H_.k);
    return 0;
  }

  bool apply(State& s, std::vector<std::pair<bool, std::uint32_t>> work) const {
    while (!work.empty()) {
      auto [add, v] = work.back();
      work.pop_back();
      if (add) {
        if (s.in[v]) continue;
        if (!s.alive[v]) return false;
        s.in[v] = true;
        for (auto e : inc_[v]) {
          ++s.in_in_edge[e];
          if (s.alive_in_edge[e] != H_.r) continue;
          if (s.in_in_edge[e] == H_.r) return false;
          if (s.in_in_edge[e] + 1u == H_.r) {
            for (std::size_t j = 0; j < H_.r; ++j)
              if (!s.in[H_.edge(e)[j]]) work.push_back({false, H_.edge(e)[j]});
          }
        }
      } else {
        if (!s.alive[v]) continue;
        if (s.in[v]) return false;
        s.alive[v] = false;
        for (auto e : inc_[v]) {
          if (s.alive_in_edge[e] == H_.r) --s.full;
          --s.alive_in_edge[e];
        }
        if (templates_) {
          std::size_t x = v / H_.k;
          if (--s.colours[x] == 0) return false;
          if (s.colours[x] == 1) work.push_back({true, lone_colour(s, x)});
        }
      }
    }
    return true;
  }

  const ReductionHypergraph& H_;
  std::vector<std::vector<std::uint32_t>> inc_;
  bool templates_;
  std::size_t max_;
};

// Closing embeddings per element (the embedding's largest element), for incremental checks.
struct ClosingIndex {
  EmbeddingSet emb;
  std::vector<std::vector<std::uint32_t>> closing;
  std::vector<std::vector<std::uint32_t>> containing;

  ClosingIndex(HostTerm host, const ForbiddenFamily& F) : emb(F.term().kind, F.term().n, host.n) {
    closing.resize(host.ground_size());
    containing.resize(host.ground_size());
    for (std::size_t i = 0; i < emb.size(); ++i) {
      const std::uint32_t* row = emb.row(i);
      closing[*std::max_element(row, row + emb.arity())].push_back(static_cast<std::uint32_t>(i));
      for (std::size_t j = 0; j < emb.arity(); ++j) containing[row[j]].push_back(static_cast<std::uint32_t>(i));
    }
  }
};

bool realisable_member(const ForbiddenFamily& F, const std::uint32_t* row, const std::vector<Palette>& t) {
  for (std::size_t m = 0; m < F.size(); ++m) {
    bool fits = true;
    for (std::size_t j = 0; j < F.arity() && fits; ++j) fits = t[row[j]].contains(F.member(m)[j]);
    if (fits) return true;
  }
  return false;
}

std::vector<int> sample_with(const ClosingIndex& index, HostTerm host, const ForbiddenFamily& F, KeyedRng& rng,
                             std::uint64_t max_attempts, std::uint64_t& attempts) {
  std::size_t g = host.ground_size();
  std::vector<std::uint8_t> c(g);
  std::vector<std::uint8_t> image(F.arity());
  for (;;) {
    bool ok = true;
    for (std::size_t x = 0; x < g && ok; ++x) {
      if (++attempts > max_attempts) throw Error(ErrorCode::budget_exceeded, "member sampling exceeded its draw budget");
      c[x] = static_cast<std::uint8_t>(1 + rng.below(F.k()));
      for (auto e : index.closing[x]) {
        const std::uint32_t* row = index.emb.row(e);
        for (std::size_t j = 0; j < F.arity(); ++j) image[j] = c[row[j]];
        if (F.contains(image.data())) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return std::vector<int>(c.begin(), c.end());
  }
}

bool covered_by(const VertexSet& s, const std::vector<VertexSet>& family) {
  for (const auto& c : family)
    if (s.is_subset_of(c)) return true;
  return false;
}

}  // namespace

ReductionHypergraph build_reduction_hypergraph(HostTerm host, const ForbiddenFamily& F) {
  validate_term(host);
  if (host.kind != F.term().kind) throw Error(ErrorCode::host_mismatch, "family lives on host " + F.term().name());
  if (host.n < F.term().n) throw Error(ErrorCode::invalid_argument, "n must be at least " + std::to_string(F.term().n));
  ReductionHypergraph H;
  H.host = host;
  H.k = F.k();
  H.N = F.term().n;
  H.r = F.arity();
  H.vertex_count = host.ground_size() * F.k();
  BigInt edges = embedding_count(host.kind, H.N, host.n) * F.size();
  if (edges * H.r > BigInt(1) << 31) throw Error(ErrorCode::budget_exceeded, "reduction hypergraph too large");
  std::uint32_t phi = 0;
  for_each_embedding(host.kind, H.N, host.n, [&](const std::uint32_t* row) {
    for (std::size_t m = 0; m < F.size(); ++m) {
      for (std::size_t j = 0; j < H.r; ++j) H.vertices.push_back(reduction_vertex(row[j], F.member(m)[j], H.k));
      H.embedding.push_back(phi);
      H.member.push_back(static_cast<std::uint32_t>(m));
    }
    ++phi;
    return true;
  });
  return H;
}

ReductionHypergraph edge_subhypergraph(const ReductionHypergraph& H, const std::vector<std::size_t>& keep) {
  ReductionHypergraph out = H;
  out.vertices.clear();
  out.embedding.clear();
  out.member.clear();
  for (auto e : keep) {
    out.vertices.insert(out.vertices.end(), H.edge(e), H.edge(e) + H.r);
    out.embedding.push_back(H.embedding[e]);
    out.member.push_back(H.member[e]);
  }
  return out;
}

VertexSet template_vertex_set(const Template& t) {
  VertexSet s(t.size() * t.k());
  for (std::size_t x = 0; x < t.size(); ++x)
    for (int c : t[x].members()) s[reduction_vertex(x, c, t.k())] = true;
  return s;
}

std::optional<Template> vertex_set_template(const VertexSet& s, HostTerm host, int k) {
  std::size_t g = host.ground_size();
  if (s.size() != g * k) throw Error(ErrorCode::invalid_argument, "vertex set has the wrong size");
  std::vector<Palette> p(g);
  for (std::size_t x = 0; x < g; ++x) {
    for (int c = 1; c <= k; ++c)
      if (s[reduction_vertex(x, c, k)]) p[x] = p[x] | Palette::single(c);
    if (p[x].empty()) return std::nullopt;
  }
  return Template(host, k, std::move(p));
}

bool is_independent(const ReductionHypergraph& H, const VertexSet& s) { return induced_edges(H, s) == 0; }

std::uint64_t induced_edges(const ReductionHypergraph& H, const VertexSet& s) {
  std::uint64_t count = 0;
  for (std::size_t e = 0; e < H.edge_count(); ++e) {
    bool inside = true;
    for (std::size_t j = 0; j < H.r && inside; ++j) inside = s[H.edge(e)[j]];
    count += inside;
  }
  return count;
}

BigInt overlapping_pairs(const ReductionHypergraph& H) {
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_pair;
  for (std::size_t e = 0; e < H.edge_count(); ++e)
    for (std::size_t a = 0; a < H.r; ++a)
      for (std::size_t b = a + 1; b < H.r; ++b)
        by_pair[pair_key(H.edge(e)[a], H.edge(e)[b])].push_back(static_cast<std::uint32_t>(e));
  BigInt total = 0;
  std::vector<std::uint32_t> partners;
  for (std::size_t e = 0; e < H.edge_count(); ++e) {
    partners.clear();
    for (std::size_t a = 0; a < H.r; ++a)
      for (std::size_t b = a + 1; b < H.r; ++b)
        for (auto f : by_pair[pair_key(H.edge(e)[a], H.edge(e)[b])])
          if (f > e) partners.push_back(f);
    std::sort(partners.begin(), partners.end());
    total += std::unique(partners.begin(), partners.end()) - partners.begin();
  }
  return total;
}

bool is_linear(const ReductionHypergraph& H) {
  std::unordered_set<std::uint64_t> seen;
  for (std::size_t e = 0; e < H.edge_count(); ++e)
    for (std::size_t a = 0; a < H.r; ++a)
      for (std::size_t b = a + 1; b < H.r; ++b)
        if (!seen.insert(pair_key(H.edge(e)[a], H.edge(e)[b])).second) return false;
  return true;
}

Rational sparsification_probability(HostTerm host, int k, int N, const Rational& eps1, bool& pass_through) {
  if (eps1 <= 0) throw Error(ErrorCode::invalid_argument, "eps1 must be positive");
  pass_through = true;
  if (host.kind != HostKind::kn || N < 3) return Rational(1);
  std::uint64_t pairs = static_cast<std::uint64_t>(N) * (N - 1) / 2;
  BigInt denominator = 12 * big_pow(k, 2 * pairs - 3) * binomial(N, 3) * binomial(host.n - 3, N - 3);
  Rational p = eps1 / Rational(denominator);
  if (p >= 1) return Rational(1);
  pass_through = false;
  return p;
}

Sparsified sparsify(const ReductionHypergraph& H, const Rational& eps1, std::uint64_t seed,
                    std::optional<Rational> p_override) {
  Sparsified out;
  SparsificationReport& R = out.report;
  R.seed = seed;
  if (p_override) {
    if (*p_override <= 0 || *p_override > 1) throw Error(ErrorCode::invalid_argument, "p must lie in (0,1]");
    R.p = *p_override;
    R.pass_through = R.p == 1;
  } else {
    R.p = sparsification_probability(H.host, H.k, H.N, eps1, R.pass_through);
  }
  std::vector<std::size_t> keep;
  for (std::size_t e = 0; e < H.edge_count(); ++e)
    if (draw_below(keyed_draw(seed, streams::sparsify, e), R.p)) keep.push_back(e);
  out.H = edge_subhypergraph(H, keep);
  R.e_H = H.edge_count();
  R.e_Hp = out.H.edge_count();
  R.Y_H = overlapping_pairs(H);
  R.Y_Hp = overlapping_pairs(out.H);
  R.F1 = Rational(2 * R.e_Hp) >= R.p * R.e_H;
  BigInt terms = embedding_count(H.host.kind, H.N, H.host.n);
  if (H.host.kind == HostKind::kn && H.N >= 3) {
    std::uint64_t pairs = static_cast<std::uint64_t>(H.N) * (H.N - 1) / 2;
    R.f2_threshold = eps1 / 4 * R.p * Rational(terms);
    R.y_count_bound = terms * binomial(H.N, 3) * binomial(H.host.n - 3, H.N - 3) * big_pow(H.k, 2 * pairs - 3);
  } else {
    R.f2_threshold = 3 * eps1 * R.p * Rational(terms);
  }
  R.F2 = Rational(2 * R.Y_Hp) <= R.f2_threshold;
  return out;
}

ReductionHypergraph linearize(const ReductionHypergraph& H) {
  std::unordered_set<std::uint64_t> used;
  std::vector<std::size_t> keep;
  std::vector<std::uint64_t> keys;
  for (std::size_t e = 0; e < H.edge_count(); ++e) {
    keys.clear();
    for (std::size_t a = 0; a < H.r; ++a)
      for (std::size_t b = a + 1; b < H.r; ++b) keys.push_back(pair_key(H.edge(e)[a], H.edge(e)[b]));
    bool clash = std::any_of(keys.begin(), keys.end(), [&](std::uint64_t key) { return used.count(key) != 0; });
    if (clash) continue;
    used.insert(keys.begin(), keys.end());
    keep.push_back(e);
  }
  ReductionHypergraph out = edge_subhypergraph(H, keep);
  if (!is_linear(out)) throw Error(ErrorCode::internal, "linearised hypergraph is not linear");
  return out;
}

std::vector<VertexSet> build_containers(const ReductionHypergraph& H, const Rational& delta, std::size_t max_containers) {
  if (delta <= 0) throw Error(ErrorCode::invalid_argument, "delta must be positive");
  VertexSet all(H.vertex_count);
  all.set();
  if (H.edge_count() == 0) return {all};
  Brancher brancher(H, false, max_containers);
  auto state = brancher.start(all);
  std::vector<VertexSet> out;
  const Rational limit = delta * H.edge_count();
  brancher.run(*state, [&](std::uint64_t full) { return Rational(full) < limit; }, out);
  return maximal_only(std::move(out));
}

std::vector<VertexSet> refine_containers(const ReductionHypergraph& H, const std::vector<VertexSet>& containers,
                                         std::uint64_t bad_limit, std::size_t max_containers) {
  Brancher brancher(H, true, max_containers);
  std::vector<VertexSet> out;
  for (const auto& c : containers) {
    auto state = brancher.start(c);
    if (!state) continue;
    brancher.run(std::move(*state), [&](std::uint64_t full) { return full <= bad_limit; }, out);
  }
  return maximal_only(std::move(out));
}

ContainerFamily containers_to_templates(const std::vector<VertexSet>& containers, HostTerm host, int k) {
  ContainerFamily family;
  family.host = host;
  family.k = k;
  family.candidates = containers.size();
  for (const auto& c : containers) {
    auto t = vertex_set_template(c, host, k);
    if (t) family.templates.push_back(std::move(*t));
    else ++family.dropped_empty;
  }
  return family;
}

std::vector<int> sample_member(HostTerm host, const ForbiddenFamily& F, KeyedRng& rng, std::uint64_t max_attempts) {
  ClosingIndex index(host, F);
  std::uint64_t attempts = 0;
  return sample_with(index, host, F, rng, max_attempts, attempts);
}

ContainerVerification verify_container_theorem(const ContainerFamily& family, const ForbiddenFamily& F,
                                               const Rational& epsilon, const VerifyOptions& options) {
  ContainerVerification V;
  const HostTerm host = family.host;
  const int k = F.k();
  const std::size_t g = host.ground_size();
  ClosingIndex index(host, F);
  std::vector<VertexSet> sets;
  for (const auto& t : family.templates) sets.push_back(template_vertex_set(t));

  BigInt terms = index.emb.size();
  for (const auto& t : family.templates) {
    std::uint64_t bad = bad_pairs(t, F);
    V.max_bad_pairs = std::max(V.max_bad_pairs, bad);
    if (Rational(bad) > epsilon * Rational(terms)) V.bad_pairs_ok = false;
  }
  V.max_bad_pair_ratio = terms == 0 ? Rational(0) : Rational(V.max_bad_pairs) / Rational(terms);
  V.log_k_size = family.templates.empty() ? 0.0 : std::log(static_cast<double>(family.templates.size())) / std::log(k);
  V.eps_ground = to_double(epsilon) * static_cast<double>(g);

  KeyedRng rng(options.seed, streams::member_sampling);
  std::uint64_t attempts = 0;
  for (std::uint64_t s = 0; s < options.samples; ++s) {
    std::vector<int> c = sample_with(index, host, F, rng, options.max_attempts, attempts);
    ++V.samples;
    if (!covered_by(template_vertex_set(Template::colouring(host, k, c)), sets)) ++V.cover_failures;
  }

  // Random maximal zero-bad extensions of sampled members.
  for (std::uint64_t s = 0; s < options.template_samples; ++s) {
    std::vector<int> c = sample_with(index, host, F, rng, options.max_attempts, attempts);
    std::vector<Palette> t(g);
    for (std::size_t x = 0; x < g; ++x) t[x] = Palette::single(c[x]);
    std::vector<std::uint32_t> order;
    for (std::size_t x = 0; x < g; ++x)
      for (int colour = 1; colour <= k; ++colour)
        if (colour != c[x]) order.push_back(reduction_vertex(x, colour, k));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (auto v : order) {
      std::size_t x = v / k;
      Palette before = t[x];
      t[x] = before | Palette::single(static_cast<int>(v % k) + 1);
      for (auto e : index.containing[x])
        if (realisable_member(F, index.emb.row(e), t)) {
          t[x] = before;
          break;
        }
    }
    ++V.template_samples;
    if (!covered_by(template_vertex_set(Template(host, k, t)), sets)) ++V.template_cover_failures;
  }

  BigInt space = big_pow((1 << k) - 1, g);
  if (space <= options.exhaustive_budget) {
    V.exhaustive = true;
    std::vector<Palette> t(g);
    std::function<void(std::size_t)> walk = [&](std::size_t x) {
      if (x == g) {
        ++V.exhaustive_checked;
        if (!covered_by(template_vertex_set(Template(host, k, t)), sets)) ++V.exhaustive_failures;
        return;
      }
      for (std::uint32_t bits = 1; bits < (1u << k); ++bits) {
        t[x] = Palette::from_bits(static_cast<std::uint16_t>(bits));
        bool ok = true;
        for (auto e : index.closing[x])
          if (realisable_member(F, index.emb.row(e), t)) {
            ok = false;
            break;
          }
        if (ok) walk(x + 1);
      }
      t[x] = Palette();
    };
    walk(0);
  }
  return V;
}

PipelineReport run_container_pipeline(HostTerm host, const ForbiddenFamily& F, const PipelineOptions& options) {
  if (options.epsilon <= 0) throw Error(ErrorCode::invalid_argument, "epsilon must be positive");
  PipelineReport R;
  ReductionHypergraph H = build_reduction_hypergraph(host, F);
  R.eps1 = options.eps1 ? *options.eps1 : options.epsilon / Rational(big_pow(F.k(), F.arity()));
  Sparsified sp = sparsify(H, R.eps1, options.seed, options.p);
  R.sparsification = sp.report;
  ReductionHypergraph linear = linearize(sp.H);
  R.e_Hpp = linear.edge_count();
  R.d = static_cast<double>(linear.r * linear.edge_count()) / static_cast<double>(linear.vertex_count);
  if (R.d > 0) R.beta = std::pow(1.0 / R.d, 1.0 / static_cast<double>(2 * linear.r - 1));

  std::vector<VertexSet> sparse = build_containers(linear, options.delta, options.max_containers);
  R.sparse_containers = sparse.size();
  for (const auto& c : sparse) {
    ++R.f3_checked;
    if (!(Rational(induced_edges(H, c)) < R.eps1 * H.edge_count())) ++R.f3_failures;
  }

  BigInt terms = embedding_count(host.kind, F.term().n, host.n);
  Rational allowed = options.epsilon * Rational(terms);
  BigInt limit = boost::multiprecision::numerator(allowed) / boost::multiprecision::denominator(allowed);
  std::vector<VertexSet> refined = refine_containers(H, sparse, limit.convert_to<std::uint64_t>(), options.max_containers);
  R.family = containers_to_templates(refined, host, F.k());

  VerifyOptions verify;
  verify.samples = options.samples;
  verify.template_samples = options.template_samples;
  verify.seed = options.seed;
  verify.exhaustive_budget = options.exhaustive_budget;
  R.verification = verify_container_theorem(R.family, F, options.epsilon, verify);
  return R;
}

}  // namespace colcont
