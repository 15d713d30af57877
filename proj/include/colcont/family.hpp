#pragma once

#include "colcont/host.hpp"
#include "colcont/template.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

namespace colcont {

// A finite set of colourings of one small host term. Forb(F) is the property of
// colourings containing no member along any embedding.
class ForbiddenFamily {
 public:
  ForbiddenFamily(std::string name, HostTerm term, int k, std::vector<std::vector<std::uint8_t>> members,
                  std::vector<int> labels = {});

  const std::string& name() const { return name_; }
  const HostTerm& term() const { return term_; }
  int k() const { return k_; }
  std::size_t arity() const { return arity_; }
  std::size_t size() const { return members_.size() / arity_; }
  const std::uint8_t* member(std::size_t i) const { return members_.data() + i * arity_; }
  bool contains(const std::uint8_t* colours) const;
  Template member_template(std::size_t i) const;

  // labels()[c] is the external name of internal colour c (identity unless an
  // encoding renumbered the source labels).
  const std::vector<int>& labels() const { return labels_; }

 private:
  std::string name_;
  HostTerm term_;
  int k_;
  std::size_t arity_;
  std::vector<std::uint8_t> members_;
  std::unordered_set<std::uint64_t> codes_;
  std::vector<int> labels_;
};

std::uint64_t colouring_code(const std::uint8_t* colours, std::size_t arity);

// Generates F from a predicate over all k-colourings of the term.
ForbiddenFamily family_from_predicate(std::string name, HostTerm term, int k,
                                      const std::function<bool(const std::uint8_t*)>& forbidden);

struct SmallGraph {
  std::string name;
  int v = 0;
  std::vector<std::pair<int, int>> edges;
};

SmallGraph small_graph(std::string_view name);  // K2, K3, K4, P3, C4
// Does the graph on v labelled vertices given by adjacency predicate contain a copy of g?
bool contains_copy(const SmallGraph& g, int v, const std::function<bool(int, int)>& adjacent);

// Names: rainbow-k3, multigraph-3-4, df-free(G), df-free-g, no-increasing-p2, no-p2,
// q2-free-vertex, q2-free-edge, path-no-repeat, mono-triangle, mono-triangle(c),
// mono-free(G). G ranges over small_graph names.
ForbiddenFamily forbidden_family_for(std::string_view name);
std::vector<std::string> registered_families();

// dominated[a][b]: recolouring any occurrence of a to b maps F into F, so a palette
// holding b may also hold a without creating a bad pair.
std::vector<std::vector<bool>> colour_dominance(const ForbiddenFamily& F);

// Colour permutations sigma (sigma[0] unused) with sigma(F) = F, identity first.
std::vector<std::vector<int>> colour_symmetries(const ForbiddenFamily& F);

// Forb(F) is i-monotone at size n: recolouring any element of any member of Forb(F)_n
// to colour i stays in Forb(F)_n. Exhaustive over k^{g(n)} colourings.
bool is_monotone(const ForbiddenFamily& F, int colour, int n);

// c lies in Forb(F): no embedding carries a member of F.
bool colouring_in_property(const Template& c, const ForbiddenFamily& F);

}  // namespace colcont
