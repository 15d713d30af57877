#pragma once

#include "colcont/common.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace colcont {

enum class HostKind { kn, qn_vertex, qn_edge, pn };

std::string host_kind_name(HostKind kind);
HostKind parse_host_kind(std::string_view name);

// One member of a host sequence: the kind plus its size parameter n.
struct HostTerm {
  HostKind kind = HostKind::kn;
  int n = 0;

  std::size_t ground_size() const;
  std::string name() const { return host_kind_name(kind); }
  bool operator==(const HostTerm&) const = default;
};

void validate_term(const HostTerm& term);

// Canonical element <-> structure conversions.
std::uint32_t kn_edge_index(int n, int i, int j);  // 0 <= i < j < n
std::pair<int, int> kn_edge_endpoints(int n, std::uint32_t index);
std::uint32_t qn_edge_index(int n, std::uint32_t lo, std::uint32_t hi);
std::pair<std::uint32_t, std::uint32_t> qn_edge_endpoints(int n, std::uint32_t index);

// An embedding phi of the source term into the target term, recorded as the induced
// injection on ground sets.
struct Embedding {
  HostTerm source;
  HostTerm target;
  std::vector<std::uint32_t> map;

  bool operator==(const Embedding&) const = default;
};

Embedding identity_embedding(const HostTerm& term);
Embedding compose(const Embedding& outer, const Embedding& inner);  // outer after inner

// All embeddings of (kind, N) into (kind, n), materialised in enumeration order.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  EmbeddingSet(HostKind kind, int N, int n);

  const HostTerm& source() const { return source_; }
  const HostTerm& target() const { return target_; }
  std::size_t size() const { return count_; }
  std::size_t arity() const { return arity_; }
  const std::uint32_t* row(std::size_t i) const { return table_.data() + i * arity_; }
  Embedding at(std::size_t i) const;

 private:
  HostTerm source_;
  HostTerm target_;
  std::size_t count_ = 0;
  std::size_t arity_ = 0;
  std::vector<std::uint32_t> table_;
};

BigInt embedding_count(HostKind kind, int N, int n);

// Streams embeddings without materialising them; stops when fn returns false.
void for_each_embedding(HostKind kind, int N, int n,
                        const std::function<bool(const std::uint32_t*)>& fn);

struct GoodnessReport {
  HostKind kind = HostKind::kn;
  int N = 0;
  int n = 0;
  BigInt embeddings;
  BigInt ground;
  // Ordered pairs (phi, psi), phi = psi allowed, whose images share at least two
  // elements; I(N,n) is half of this.
  BigInt overlapping_ordered;
  // Ordered pairs with 1 < |shared| < |V_N|.
  BigInt strict_intersecting;
  Rational intersecting;  // I(N,n)
  Rational ratio1;        // |embeddings| / |V_n|
  Rational ratio2;        // |V_n| * I(N,n) / |embeddings|^2
  bool enumerated = false;
  bool enumeration_agrees = true;
};

GoodnessReport goodness_report(HostKind kind, int N, int n);

}  // namespace colcont
