#include "colcont/family.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace colcont {

std::uint64_t colouring_code(const std::uint8_t* colours, std::size_t arity) {
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < arity; ++i) code |= static_cast<std::uint64_t>(colours[i] - 1) << (4 * i);
  return code;
}

ForbiddenFamily::ForbiddenFamily(std::string name, HostTerm term, int k,
                                 std::vector<std::vector<std::uint8_t>> members, std::vector<int> labels)
    : name_(std::move(name)), term_(term), k_(k), arity_(term.ground_size()), labels_(std::move(labels)) {
  validate_colour_count(k);
  validate_term(term);
  if (arity_ > 16) throw Error(ErrorCode::unsupported, "forbidden host term has more than 16 elements");
  if (members.empty()) throw Error(ErrorCode::invalid_argument, "forbidden family '" + name_ + "' is empty");
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  for (const auto& m : members) {
    if (m.size() != arity_) throw Error(ErrorCode::invalid_argument, "member has the wrong number of elements");
    for (auto c : m)
      if (c < 1 || c > k) throw Error(ErrorCode::invalid_argument, "member colour out of range");
    members_.insert(members_.end(), m.begin(), m.end());
    codes_.insert(colouring_code(m.data(), arity_));
  }
  if (labels_.empty()) {
    labels_.resize(static_cast<std::size_t>(k) + 1);
    std::iota(labels_.begin(), labels_.end(), 0);
  }
}

bool ForbiddenFamily::contains(const std::uint8_t* colours) const {
  return codes_.count(colouring_code(colours, arity_)) != 0;
}

Template ForbiddenFamily::member_template(std::size_t i) const {
  std::vector<int> colours(member(i), member(i) + arity_);
  return Template::colouring(term_, k_, colours);
}

ForbiddenFamily family_from_predicate(std::string name, HostTerm term, int k,
                                      const std::function<bool(const std::uint8_t*)>& forbidden) {
  validate_term(term);
  validate_colour_count(k);
  std::size_t r = term.ground_size();
  if (r > 16) throw Error(ErrorCode::unsupported, "forbidden host term has more than 16 elements");
  std::vector<std::vector<std::uint8_t>> members;
  std::vector<std::uint8_t> c(r, 1);
  for (;;) {
    if (forbidden(c.data())) members.push_back(c);
    std::size_t i = r;
    while (i > 0 && c[i - 1] == k) c[--i] = 1;
    if (i == 0) break;
    ++c[i - 1];
  }
  return ForbiddenFamily(std::move(name), term, k, std::move(members));
}

SmallGraph small_graph(std::string_view name) {
  std::string key;
  for (char ch : name) key += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (key == "K2") return {"K2", 2, {{0, 1}}};
  if (key == "K3") return {"K3", 3, {{0, 1}, {0, 2}, {1, 2}}};
  if (key == "K4") return {"K4", 4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  if (key == "P3") return {"P3", 3, {{0, 1}, {1, 2}}};
  if (key == "C4") return {"C4", 4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}};
  throw Error(ErrorCode::unknown_family, "unknown small graph '" + std::string(name) + "'");
}

bool contains_copy(const SmallGraph& g, int v, const std::function<bool(int, int)>& adjacent) {
  if (v < g.v) return false;
  // Injective maps of g's vertices into [v], tried by backtracking.
  std::vector<int> image(g.v, -1);
  std::vector<bool> used(v, false);
  std::function<bool(int)> place = [&](int u) -> bool {
    if (u == g.v) return true;
    for (int x = 0; x < v; ++x) {
      if (used[x]) continue;
      image[u] = x;
      bool ok = true;
      for (auto [a, b] : g.edges) {
        int w = a == u ? b : (b == u ? a : -1);
        if (w < 0 || w > u) continue;
        if (!adjacent(std::min(x, image[w]), std::max(x, image[w]))) { ok = false; break; }
      }
      if (!ok) continue;
      used[x] = true;
      if (place(u + 1)) return true;
      used[x] = false;
    }
    return false;
  };
  return place(0);
}

namespace {

std::string lower(std::string_view s) {
  std::string out;
  for (char ch : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

// "base(arg)" or "base-arg" -> arg, if the name starts with base.
std::optional<std::string> argument_of(const std::string& name, const std::string& base) {
  if (name.rfind(base + "(", 0) == 0 && name.back() == ')')
    return name.substr(base.size() + 1, name.size() - base.size() - 2);
  if (name.rfind(base + "-", 0) == 0) return name.substr(base.size() + 1);
  return std::nullopt;
}

// Colour-`colour` graph of a colouring of K_v contains g.
ForbiddenFamily graph_in_colour(std::string name, const SmallGraph& g, int k, int colour) {
  HostTerm term{HostKind::kn, g.v};
  int v = g.v;
  return family_from_predicate(std::move(name), term, k, [&](const std::uint8_t* c) {
    return contains_copy(g, v, [&](int i, int j) { return c[kn_edge_index(v, i, j)] == colour; });
  });
}

}  // namespace

ForbiddenFamily forbidden_family_for(std::string_view raw) {
  std::string name = lower(raw);
  const HostTerm k3{HostKind::kn, 3};

  if (name == "rainbow-k3") {
    return family_from_predicate("rainbow-k3", k3, 3, [](const std::uint8_t* c) {
      return c[0] != c[1] && c[0] != c[2] && c[1] != c[2];
    });
  }
  if (name == "multigraph-3-4") {
    // colour = multiplicity + 1; no three vertices carry more than 4 edges
    return family_from_predicate("multigraph-3-4", k3, 5, [](const std::uint8_t* c) {
      return (c[0] - 1) + (c[1] - 1) + (c[2] - 1) > 4;
    });
  }
  if (name == "no-increasing-p2") {
    // edges 12 and 23 of K_3 are elements 0 and 2
    return family_from_predicate("no-increasing-p2", k3, 2, [](const std::uint8_t* c) {
      return c[0] == 1 && c[2] == 1;
    });
  }
  if (name == "no-p2") {
    return family_from_predicate("no-p2", k3, 2, [](const std::uint8_t* c) {
      return (c[0] == 1) + (c[1] == 1) + (c[2] == 1) >= 2;
    });
  }
  if (name == "q2-free-vertex") {
    return family_from_predicate("q2-free-vertex", {HostKind::qn_vertex, 2}, 2, [](const std::uint8_t* c) {
      return c[0] == 1 && c[1] == 1 && c[2] == 1 && c[3] == 1;
    });
  }
  if (name == "q2-free-edge") {
    return family_from_predicate("q2-free-edge", {HostKind::qn_edge, 2}, 2, [](const std::uint8_t* c) {
      return c[0] == 1 && c[1] == 1 && c[2] == 1 && c[3] == 1;
    });
  }
  if (name == "path-no-repeat") {
    return family_from_predicate("path-no-repeat", {HostKind::pn, 3}, 3,
                                 [](const std::uint8_t* c) { return c[0] == c[1]; });
  }
  if (name == "mono-triangle") return graph_in_colour("mono-triangle(1)", small_graph("K3"), 2, 1);
  if (auto arg = argument_of(name, "mono-triangle")) {
    int colour = *arg == "1" ? 1 : (*arg == "2" ? 2 : 0);
    if (colour == 0) throw Error(ErrorCode::unknown_family, "mono-triangle colour must be 1 or 2");
    return graph_in_colour("mono-triangle(" + *arg + ")", small_graph("K3"), 2, colour);
  }
  if (auto arg = argument_of(name, "df-free")) {
    SmallGraph g = small_graph(*arg);
    return graph_in_colour("df-free(" + g.name + ")", g, 4, 4);
  }
  if (auto arg = argument_of(name, "mono-free")) {
    SmallGraph g = small_graph(*arg);
    return graph_in_colour("mono-free(" + g.name + ")", g, 2, 1);
  }
  throw Error(ErrorCode::unknown_family, "unknown family '" + std::string(raw) + "'");
}

std::vector<std::string> registered_families() {
  return {"rainbow-k3",     "multigraph-3-4", "df-free(K3)",  "no-increasing-p2", "no-p2",
          "q2-free-vertex", "q2-free-edge",   "path-no-repeat", "mono-triangle"};
}

std::vector<std::vector<bool>> colour_dominance(const ForbiddenFamily& F) {
  int k = F.k();
  std::vector<std::vector<bool>> dom(k + 1, std::vector<bool>(k + 1, false));
  std::vector<std::uint8_t> c(F.arity());
  for (int a = 1; a <= k; ++a) {
    for (int b = 1; b <= k; ++b) {
      if (a == b) continue;
      bool ok = true;
      for (std::size_t m = 0; m < F.size() && ok; ++m) {
        std::copy(F.member(m), F.member(m) + F.arity(), c.begin());
        for (std::size_t x = 0; x < c.size() && ok; ++x) {
          if (c[x] != a) continue;
          c[x] = static_cast<std::uint8_t>(b);
          ok = F.contains(c.data());
          c[x] = static_cast<std::uint8_t>(a);
        }
      }
      dom[a][b] = ok;
    }
  }
  return dom;
}

std::vector<std::vector<int>> colour_symmetries(const ForbiddenFamily& F) {
  int k = F.k();
  std::vector<int> sigma(k + 1);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::vector<std::vector<int>> out{sigma};
  if (k > 8) return out;
  std::vector<std::uint8_t> image(F.arity());
  while (std::next_permutation(sigma.begin() + 1, sigma.end())) {
    bool ok = true;
    for (std::size_t m = 0; m < F.size() && ok; ++m) {
      for (std::size_t x = 0; x < F.arity(); ++x) image[x] = static_cast<std::uint8_t>(sigma[F.member(m)[x]]);
      ok = F.contains(image.data());
    }
    if (ok) out.push_back(sigma);
  }
  return out;
}

bool colouring_in_property(const Template& c, const ForbiddenFamily& F) { return bad_pairs(c, F) == 0; }

bool is_monotone(const ForbiddenFamily& F, int colour, int n) {
  if (colour < 1 || colour > F.k()) throw Error(ErrorCode::invalid_argument, "colour out of range");
  HostTerm term{F.term().kind, n};
  validate_term(term);
  std::size_t g = term.ground_size();
  BigInt space = big_pow(F.k(), g);
  if (space > 4'000'000) throw Error(ErrorCode::budget_exceeded, "monotonicity check space too large");
  std::vector<int> c(g, 1);
  for (;;) {
    Template t = Template::colouring(term, F.k(), c);
    if (colouring_in_property(t, F)) {
      for (std::size_t e = 0; e < g; ++e) {
        if (c[e] == colour) continue;
        if (!colouring_in_property(t.with_palette(e, Palette::single(colour)), F)) return false;
      }
    }
    std::size_t i = g;
    while (i > 0 && c[i - 1] == F.k()) c[--i] = 1;
    if (i == 0) break;
    ++c[i - 1];
  }
  return true;
}

}  // namespace colcont
