#pragma once

#include "colcont/template.hpp"

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace colcont {

// Vertices are 0-based internally; text files are 1-based.
struct Digraph {
  int n = 0;
  std::set<std::pair<int, int>> arcs;
  bool operator==(const Digraph&) const = default;
};

struct Multigraph {
  int n = 0;
  int d = 0;
  std::vector<int> multiplicity;  // indexed by K_n edge index
  bool operator==(const Multigraph&) const = default;
};

// Internal colours 1..4: none, forward (i->j for i<j), backward, both.
Template digraph_to_colouring(const Digraph& D);
Digraph colouring_to_digraph(const Template& c);

// Oriented graphs: k = 3 with the same first three colours.
Template orgraph_to_colouring(const Digraph& D);
Digraph colouring_to_orgraph(const Template& c);

// Tournaments: k = 2; internal 1 = forward, 2 = backward.
Template tournament_to_colouring(const Digraph& D);
Digraph colouring_to_tournament(const Template& c);
// External colour names for the tournament palette.
std::vector<int> tournament_labels();

Template multigraph_to_colouring(const Multigraph& M);
Multigraph colouring_to_multigraph(const Template& c);

// Text formats: first non-comment line is the vertex count, then `u v` (digraph) or
// `u v w` (multigraph) per line, 1-based. '#' starts a comment.
Digraph parse_digraph(std::string_view text);
Multigraph parse_multigraph(std::string_view text, int d);

}  // namespace colcont
