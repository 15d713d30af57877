#include "colcont/host.hpp"

#include <algorithm>
#include <bit>

namespace colcont {

std::string host_kind_name(HostKind kind) {
  switch (kind) {
    case HostKind::kn: return "kn";
    case HostKind::qn_vertex: return "qn-vertex";
    case HostKind::qn_edge: return "qn-edge";
    case HostKind::pn: return "pn";
  }
  return "?";
}

HostKind parse_host_kind(std::string_view name) {
  if (name == "kn") return HostKind::kn;
  if (name == "qn-vertex") return HostKind::qn_vertex;
  if (name == "qn-edge") return HostKind::qn_edge;
  if (name == "pn") return HostKind::pn;
  throw Error(ErrorCode::invalid_argument, "unknown host '" + std::string(name) + "'");
}

namespace {

constexpr int kMaxCubeDim = 24;
constexpr int kMaxCompleteN = 4096;

int min_size(HostKind kind) {
  switch (kind) {
    case HostKind::kn: return 2;
    case HostKind::qn_vertex: return 1;
    case HostKind::qn_edge: return 1;
    case HostKind::pn: return 2;
  }
  return 1;
}

}  // namespace

void validate_term(const HostTerm& term) {
  if (term.n < min_size(term.kind))
    throw Error(ErrorCode::invalid_argument,
                "host " + term.name() + " needs n >= " + std::to_string(min_size(term.kind)));
  bool cube = term.kind == HostKind::qn_vertex || term.kind == HostKind::qn_edge;
  if (cube && term.n > kMaxCubeDim) throw Error(ErrorCode::unsupported, "hypercube dimension too large");
  if (term.kind == HostKind::kn && term.n > kMaxCompleteN) throw Error(ErrorCode::unsupported, "K_n too large");
}

std::size_t HostTerm::ground_size() const {
  std::size_t m = static_cast<std::size_t>(n);
  switch (kind) {
    case HostKind::kn: return m * (m - 1) / 2;
    case HostKind::qn_vertex: return std::size_t{1} << m;
    case HostKind::qn_edge: return m << (m - 1);
    case HostKind::pn: return m - 1;
  }
  return 0;
}

std::uint32_t kn_edge_index(int n, int i, int j) {
  return static_cast<std::uint32_t>(i * (2 * n - i - 1) / 2 + (j - i - 1));
}

std::pair<int, int> kn_edge_endpoints(int n, std::uint32_t index) {
  int i = 0;
  std::uint32_t row = static_cast<std::uint32_t>(n - 1);
  while (index >= row) {
    index -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + static_cast<int>(index)};
}

namespace {

// Number of x in [0, L) with bit b set, summed over all bits below n.
std::uint64_t popcount_prefix(int n, std::uint64_t L) {
  std::uint64_t total = 0;
  for (int b = 0; b < n; ++b) {
    std::uint64_t block = std::uint64_t{1} << (b + 1);
    std::uint64_t half = std::uint64_t{1} << b;
    total += (L / block) * half;
    std::uint64_t rem = L % block;
    if (rem > half) total += rem - half;
  }
  return total;
}

std::uint64_t edges_below(int n, std::uint64_t lo) {
  return static_cast<std::uint64_t>(n) * lo - popcount_prefix(n, lo);
}

}  // namespace

std::uint32_t qn_edge_index(int n, std::uint32_t lo, std::uint32_t hi) {
  std::uint32_t diff = lo ^ hi;
  int b = std::countr_zero(diff);
  std::uint32_t below_mask = (std::uint32_t{1} << b) - 1;
  std::uint32_t zeros_below = static_cast<std::uint32_t>(b - std::popcount(lo & below_mask));
  return static_cast<std::uint32_t>(edges_below(n, lo) + zeros_below);
}

std::pair<std::uint32_t, std::uint32_t> qn_edge_endpoints(int n, std::uint32_t index) {
  std::uint64_t lo = 0, hi = std::uint64_t{1} << n;
  while (hi - lo > 1) {  // largest lo with edges_below(lo) <= index
    std::uint64_t mid = (lo + hi) / 2;
    if (edges_below(n, mid) <= index) lo = mid; else hi = mid;
  }
  std::uint64_t rank = index - edges_below(n, lo);
  for (int b = 0; b < n; ++b) {
    if ((lo >> b) & 1u) continue;
    if (rank == 0) return {static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(lo | (std::uint64_t{1} << b))};
    --rank;
  }
  throw Error(ErrorCode::internal, "qn edge index out of range");
}

Embedding identity_embedding(const HostTerm& term) {
  Embedding e{term, term, {}};
  e.map.resize(term.ground_size());
  for (std::size_t i = 0; i < e.map.size(); ++i) e.map[i] = static_cast<std::uint32_t>(i);
  return e;
}

Embedding compose(const Embedding& outer, const Embedding& inner) {
  if (!(inner.target == outer.source)) throw Error(ErrorCode::host_mismatch, "embeddings do not compose");
  Embedding e{inner.source, outer.target, {}};
  e.map.reserve(inner.map.size());
  for (auto x : inner.map) e.map.push_back(outer.map[x]);
  return e;
}

BigInt embedding_count(HostKind kind, int N, int n) {
  if (N > n) return 0;
  switch (kind) {
    case HostKind::kn: return binomial(n, N);
    case HostKind::qn_vertex:
    case HostKind::qn_edge: return binomial(n, N) << (n - N);
    case HostKind::pn: return n - N + 1;
  }
  return 0;
}

namespace {

void check_pair(HostKind kind, int N, int n) {
  validate_term({kind, N});
  validate_term({kind, n});
  if (N > n) throw Error(ErrorCode::unsupported, "source term larger than target term");
}

// Visits the N-subsets of [0, n) in lexicographic order.
template <typename Fn>
bool for_each_combination(int n, int N, Fn&& fn) {
  std::vector<int> a(N);
  for (int i = 0; i < N; ++i) a[i] = i;
  for (;;) {
    if (!fn(a)) return false;
    int i = N - 1;
    while (i >= 0 && a[i] == n - N + i) --i;
    if (i < 0) return true;
    ++a[i];
    for (int j = i + 1; j < N; ++j) a[j] = a[j - 1] + 1;
  }
}

}  // namespace

void for_each_embedding(HostKind kind, int N, int n, const std::function<bool(const std::uint32_t*)>& fn) {
  check_pair(kind, N, n);
  std::vector<std::uint32_t> row(HostTerm{kind, N}.ground_size());
  switch (kind) {
    case HostKind::kn: {
      for_each_combination(n, N, [&](const std::vector<int>& a) {
        std::size_t idx = 0;
        for (int i = 0; i < N; ++i)
          for (int j = i + 1; j < N; ++j) row[idx++] = kn_edge_index(n, a[i], a[j]);
        return fn(row.data());
      });
      return;
    }
    case HostKind::qn_vertex:
    case HostKind::qn_edge: {
      std::vector<std::pair<std::uint32_t, std::uint32_t>> small_edges;
      if (kind == HostKind::qn_edge) {
        for (std::uint32_t i = 0; i < row.size(); ++i) small_edges.push_back(qn_edge_endpoints(N, i));
      }
      std::vector<std::uint32_t> image(std::size_t{1} << N);
      for_each_combination(n, N, [&](const std::vector<int>& a) {
        std::vector<int> rest;
        for (int c = 0, j = 0; c < n; ++c) {
          if (j < N && a[j] == c) ++j; else rest.push_back(c);
        }
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << (n - N)); ++v) {
          std::uint32_t base = 0;
          for (std::size_t b = 0; b < rest.size(); ++b)
            if ((v >> b) & 1u) base |= std::uint32_t{1} << rest[b];
          for (std::uint32_t x = 0; x < image.size(); ++x) {
            std::uint32_t y = base;
            for (int j = 0; j < N; ++j)
              if ((x >> j) & 1u) y |= std::uint32_t{1} << a[j];
            image[x] = y;
          }
          if (kind == HostKind::qn_vertex) {
            std::copy(image.begin(), image.end(), row.begin());
          } else {
            for (std::size_t i = 0; i < small_edges.size(); ++i)
              row[i] = qn_edge_index(n, image[small_edges[i].first], image[small_edges[i].second]);
          }
          if (!fn(row.data())) return false;
        }
        return true;
      });
      return;
    }
    case HostKind::pn: {
      for (int s = 0; s + N <= n; ++s) {
        for (int i = 0; i + 1 < N; ++i) row[i] = static_cast<std::uint32_t>(s + i);
        if (!fn(row.data())) return;
      }
      return;
    }
  }
}

EmbeddingSet::EmbeddingSet(HostKind kind, int N, int n) : source_{kind, N}, target_{kind, n} {
  check_pair(kind, N, n);
  arity_ = source_.ground_size();
  BigInt total = embedding_count(kind, N, n) * arity_;
  if (total > BigInt(1) << 31) throw Error(ErrorCode::budget_exceeded, "embedding table too large");
  count_ = embedding_count(kind, N, n).convert_to<std::size_t>();
  table_.reserve(count_ * arity_);
  for_each_embedding(kind, N, n, [&](const std::uint32_t* row) {
    table_.insert(table_.end(), row, row + arity_);
    return true;
  });
}

Embedding EmbeddingSet::at(std::size_t i) const {
  Embedding e{source_, target_, {}};
  e.map.assign(row(i), row(i) + arity_);
  return e;
}

namespace {

// Ordered pair counts by number of shared elements, computed per embedding from the
// element incidence lists.
void enumerate_overlaps(HostKind kind, int N, int n, BigInt& overlapping, BigInt& strict) {
  EmbeddingSet set(kind, N, n);
  std::size_t g = set.target().ground_size();
  std::vector<std::vector<std::uint32_t>> incidence(g);
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = 0; j < set.arity(); ++j) incidence[set.row(i)[j]].push_back(static_cast<std::uint32_t>(i));
  std::vector<std::uint32_t> shared(set.size(), 0);
  std::vector<std::uint32_t> touched;
  std::uint64_t over = 0, str = 0;
  std::size_t full = set.arity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    touched.clear();
    for (std::size_t j = 0; j < full; ++j) {
      for (auto other : incidence[set.row(i)[j]]) {
        if (shared[other]++ == 0) touched.push_back(other);
      }
    }
    for (auto other : touched) {
      if (shared[other] >= 2) ++over;
      if (shared[other] >= 2 && shared[other] < full) ++str;
      shared[other] = 0;
    }
  }
  overlapping = over;
  strict = str;
}

void closed_form_overlaps(HostKind kind, int N, int n, BigInt& overlapping, BigInt& strict) {
  BigInt count = embedding_count(kind, N, n);
  BigInt over = 0, str = 0;
  switch (kind) {
    case HostKind::kn:
      for (int j = 3; j <= N; ++j) {
        BigInt c = binomial(N, j) * binomial(n - N, N - j);
        over += c;
        if (j < N) str += c;
      }
      break;
    case HostKind::qn_vertex:
    case HostKind::qn_edge: {
      int lowest = kind == HostKind::qn_vertex ? 1 : 2;
      for (int i = lowest; i <= N; ++i) {
        BigInt c = binomial(N, i) * binomial(n - N, N - i) * (BigInt(1) << (N - i));
        over += c;
        if (i < N) str += c;
      }
      break;
    }
    case HostKind::pn: {
      // windows at distance d share N-1-d edges; the sum is over ordered pairs directly
      BigInt w = n - N + 1;
      BigInt total_over = 0, total_str = 0;
      for (int d = 0; d <= N - 3 && d <= n - N; ++d) {
        BigInt pairs = d == 0 ? w : 2 * (w - d);
        total_over += pairs;
        if (d > 0) total_str += pairs;
      }
      overlapping = total_over;
      strict = total_str;
      return;
    }
  }
  overlapping = count * over;
  strict = count * str;
}

bool enumeration_feasible(HostKind kind, int n) {
  switch (kind) {
    case HostKind::kn: return n <= 12;
    case HostKind::qn_vertex:
    case HostKind::qn_edge: return n <= 6;
    case HostKind::pn: return n <= 64;
  }
  return false;
}

}  // namespace

GoodnessReport goodness_report(HostKind kind, int N, int n) {
  check_pair(kind, N, n);
  GoodnessReport r;
  r.kind = kind;
  r.N = N;
  r.n = n;
  if (HostTerm{kind, N}.ground_size() <= 1)
    throw Error(ErrorCode::invalid_argument, "goodness needs a source term with more than one element");
  r.embeddings = embedding_count(kind, N, n);
  r.ground = HostTerm{kind, n}.ground_size();
  closed_form_overlaps(kind, N, n, r.overlapping_ordered, r.strict_intersecting);
  if (enumeration_feasible(kind, n)) {
    BigInt over, strict;
    enumerate_overlaps(kind, N, n, over, strict);
    r.enumerated = true;
    r.enumeration_agrees = over == r.overlapping_ordered && strict == r.strict_intersecting;
  }
  r.intersecting = Rational(r.overlapping_ordered, 2);
  r.ratio1 = Rational(r.embeddings, r.ground);
  r.ratio2 = Rational(r.ground) * r.intersecting / Rational(r.embeddings * r.embeddings);
  return r;
}

}  // namespace colcont
