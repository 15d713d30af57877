#include "colcont/encodings.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace colcont {

namespace {

void check_digraph(const Digraph& D) {
  if (D.n < 2) throw Error(ErrorCode::invalid_argument, "digraph needs at least 2 vertices");
  for (auto [u, v] : D.arcs) {
    if (u == v) throw Error(ErrorCode::invalid_argument, "self-loop at vertex " + std::to_string(u + 1));
    if (u < 0 || v < 0 || u >= D.n || v >= D.n) throw Error(ErrorCode::invalid_argument, "arc endpoint out of range");
  }
}

void check_complete_host(const Template& c, int k, const char* what) {
  if (c.host().kind != HostKind::kn) throw Error(ErrorCode::host_mismatch, std::string(what) + " needs a kn colouring");
  if (c.k() != k) throw Error(ErrorCode::invalid_argument, std::string(what) + " needs k = " + std::to_string(k));
  if (!c.is_colouring()) throw Error(ErrorCode::invalid_argument, std::string(what) + " needs a colouring");
}

// Colour 1 + forward + 2*backward for every pair i < j.
std::vector<int> arc_colours(const Digraph& D) {
  std::vector<int> colours;
  for (int i = 0; i < D.n; ++i)
    for (int j = i + 1; j < D.n; ++j)
      colours.push_back(1 + static_cast<int>(D.arcs.count({i, j})) + 2 * static_cast<int>(D.arcs.count({j, i})));
  return colours;
}

Digraph arcs_from(const Template& c, const std::function<int(int)>& to_digraph_colour) {
  Digraph D{c.host().n, {}};
  for (std::size_t e = 0; e < c.size(); ++e) {
    auto [i, j] = kn_edge_endpoints(D.n, static_cast<std::uint32_t>(e));
    int code = to_digraph_colour(c.colour(e)) - 1;
    if (code & 1) D.arcs.insert({i, j});
    if (code & 2) D.arcs.insert({j, i});
  }
  return D;
}

}  // namespace

Template digraph_to_colouring(const Digraph& D) {
  check_digraph(D);
  return Template::colouring({HostKind::kn, D.n}, 4, arc_colours(D));
}

Digraph colouring_to_digraph(const Template& c) {
  check_complete_host(c, 4, "digraph decoding");
  return arcs_from(c, [](int colour) { return colour; });
}

Template orgraph_to_colouring(const Digraph& D) {
  check_digraph(D);
  auto colours = arc_colours(D);
  for (int colour : colours)
    if (colour == 4) throw Error(ErrorCode::invalid_argument, "oriented graph has a double edge");
  return Template::colouring({HostKind::kn, D.n}, 3, colours);
}

Digraph colouring_to_orgraph(const Template& c) {
  check_complete_host(c, 3, "orgraph decoding");
  return arcs_from(c, [](int colour) { return colour; });
}

std::vector<int> tournament_labels() { return {0, 2, 3}; }

Template tournament_to_colouring(const Digraph& D) {
  check_digraph(D);
  auto colours = arc_colours(D);
  for (int& colour : colours) {
    if (colour != 2 && colour != 3) throw Error(ErrorCode::invalid_argument, "not a tournament: each pair needs exactly one arc");
    colour -= 1;
  }
  return Template::colouring({HostKind::kn, D.n}, 2, colours);
}

Digraph colouring_to_tournament(const Template& c) {
  check_complete_host(c, 2, "tournament decoding");
  return arcs_from(c, [](int colour) { return colour + 1; });
}

Template multigraph_to_colouring(const Multigraph& M) {
  if (M.d < 0 || M.d + 1 > kMaxColours) throw Error(ErrorCode::invalid_argument, "multiplicity bound must be in 0..15");
  HostTerm term{HostKind::kn, M.n};
  validate_term(term);
  if (M.multiplicity.size() != term.ground_size()) throw Error(ErrorCode::invalid_argument, "multiplicity vector has the wrong length");
  std::vector<int> colours;
  for (int m : M.multiplicity) {
    if (m < 0 || m > M.d)
      throw Error(ErrorCode::invalid_argument, "multiplicity " + std::to_string(m) + " exceeds bound " + std::to_string(M.d));
    colours.push_back(m + 1);
  }
  return Template::colouring(term, M.d + 1, colours);
}

Multigraph colouring_to_multigraph(const Template& c) {
  if (c.host().kind != HostKind::kn || !c.is_colouring())
    throw Error(ErrorCode::invalid_argument, "multigraph decoding needs a kn colouring");
  Multigraph M{c.host().n, c.k() - 1, {}};
  for (std::size_t e = 0; e < c.size(); ++e) M.multiplicity.push_back(c.colour(e) - 1);
  return M;
}

namespace {

std::vector<std::vector<long>> numeric_lines(std::string_view text) {
  std::vector<std::vector<long>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream row(line);
    std::vector<long> values;
    std::string token;
    while (row >> token) {
      try {
        std::size_t used = 0;
        long v = std::stol(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        values.push_back(v);
      } catch (const std::exception&) {
        throw Error(ErrorCode::parse_error, "bad number '" + token + "'");
      }
    }
    if (!values.empty()) out.push_back(std::move(values));
  }
  if (out.empty() || out[0].size() != 1) throw Error(ErrorCode::parse_error, "first line must hold the vertex count");
  return out;
}

}  // namespace

Digraph parse_digraph(std::string_view text) {
  auto lines = numeric_lines(text);
  Digraph D{static_cast<int>(lines[0][0]), {}};
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].size() != 2) throw Error(ErrorCode::parse_error, "arc lines need two vertices");
    long u = lines[i][0], v = lines[i][1];
    if (u < 1 || v < 1 || u > D.n || v > D.n) throw Error(ErrorCode::parse_error, "vertex out of range 1.." + std::to_string(D.n));
    D.arcs.insert({static_cast<int>(u - 1), static_cast<int>(v - 1)});
  }
  check_digraph(D);
  return D;
}

Multigraph parse_multigraph(std::string_view text, int d) {
  auto lines = numeric_lines(text);
  Multigraph M{static_cast<int>(lines[0][0]), d, {}};
  HostTerm term{HostKind::kn, M.n};
  validate_term(term);
  M.multiplicity.assign(term.ground_size(), 0);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].size() != 3) throw Error(ErrorCode::parse_error, "edge lines need 'u v w'");
    long u = lines[i][0], v = lines[i][1], w = lines[i][2];
    if (u < 1 || v < 1 || u > M.n || v > M.n || u == v) throw Error(ErrorCode::parse_error, "bad edge endpoints");
    if (w < 0 || w > d) throw Error(ErrorCode::invalid_argument, "multiplicity " + std::to_string(w) + " exceeds bound " + std::to_string(d));
    int a = static_cast<int>(std::min(u, v) - 1), b = static_cast<int>(std::max(u, v) - 1);
    M.multiplicity[kn_edge_index(M.n, a, b)] = static_cast<int>(w);
  }
  return M;
}

}  // namespace colcont
