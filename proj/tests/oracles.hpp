#pragma once
// Slow reference implementations shared by the unit tests and the acceptance binary.
// They use nothing from the solver: only host enumeration and the family table.

#include "colcont/family.hpp"
#include "colcont/host.hpp"
#include "colcont/template.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace oracle {

using colcont::BigInt;
using colcont::EmbeddingSet;
using colcont::ForbiddenFamily;
using colcont::HostTerm;
using colcont::Palette;

// Embeddings grouped by their largest image element, so a check can run as soon as the
// last element of an embedding is fixed.
inline std::vector<std::vector<std::size_t>> closing_table(const EmbeddingSet& emb, std::size_t g) {
  std::vector<std::vector<std::size_t>> closing(g);
  for (std::size_t i = 0; i < emb.size(); ++i)
    closing[*std::max_element(emb.row(i), emb.row(i) + emb.arity())].push_back(i);
  return closing;
}

inline bool member_fits(const ForbiddenFamily& F, std::size_t m, const std::uint32_t* row,
                        const std::vector<Palette>& t) {
  for (std::size_t j = 0; j < F.arity(); ++j)
    if (!t[row[j]].contains(F.member(m)[j])) return false;
  return true;
}

// Counts (embedding, member) pairs realisable in t, directly from the definition.
inline std::uint64_t count_bad(const colcont::Template& t, const ForbiddenFamily& F) {
  EmbeddingSet emb(F.term().kind, F.term().n, t.host().n);
  std::uint64_t bad = 0;
  for (std::size_t i = 0; i < emb.size(); ++i)
    for (std::size_t m = 0; m < F.size(); ++m) bad += member_fits(F, m, emb.row(i), t.palettes());
  return bad;
}

struct BruteResult {
  BigInt w_star = 0;
  std::vector<std::vector<Palette>> witnesses;  // every maximiser
  std::uint64_t zero_bad = 0;                   // zero-bad templates visited
};

// Maximum weight over all templates with no bad pair. Every nonempty palette is tried at
// every element; the only pruning is rejecting a partial template once it already holds
// a bad pair, which cannot disappear later.
inline BruteResult brute_force_ex(HostTerm host, const ForbiddenFamily& F) {
  const std::size_t g = host.ground_size();
  const int k = F.k();
  EmbeddingSet emb(F.term().kind, F.term().n, host.n);
  auto closing = closing_table(emb, g);
  BruteResult R;
  std::vector<Palette> t(g);
  std::function<void(std::size_t, const BigInt&)> walk = [&](std::size_t x, const BigInt& w) {
    if (x == g) {
      ++R.zero_bad;
      if (w > R.w_star) {
        R.w_star = w;
        R.witnesses.clear();
      }
      if (w == R.w_star) R.witnesses.push_back(t);
      return;
    }
    for (std::uint32_t bits = 1; bits < (1u << k); ++bits) {
      t[x] = Palette::from_bits(static_cast<std::uint16_t>(bits));
      bool ok = true;
      for (auto e : closing[x]) {
        for (std::size_t m = 0; m < F.size() && ok; ++m) ok = !member_fits(F, m, emb.row(e), t);
        if (!ok) break;
      }
      if (ok) walk(x + 1, w * t[x].size());
    }
  };
  walk(0, BigInt(1));
  return R;
}

// |Forb(F)_n| by plain enumeration of all k^g colourings.
inline BigInt brute_force_speed(HostTerm host, const ForbiddenFamily& F) {
  const std::size_t g = host.ground_size();
  const int k = F.k();
  EmbeddingSet emb(F.term().kind, F.term().n, host.n);
  std::vector<int> c(g, 1);
  std::vector<std::uint8_t> window(F.arity());
  BigInt count = 0;
  for (;;) {
    bool in = true;
    for (std::size_t i = 0; i < emb.size() && in; ++i) {
      for (std::size_t j = 0; j < F.arity(); ++j) window[j] = static_cast<std::uint8_t>(c[emb.row(i)[j]]);
      for (std::size_t m = 0; m < F.size() && in; ++m)
        in = !std::equal(window.begin(), window.end(), F.member(m));
    }
    count += in;
    std::size_t x = 0;
    while (x < g && c[x] == k) c[x++] = 1;
    if (x == g) break;
    ++c[x];
  }
  return count;
}

}  // namespace oracle
