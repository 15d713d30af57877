#pragma once

#include "colcont/containers.hpp"
#include "colcont/solver.hpp"

#include <optional>
#include <vector>

namespace colcont {

struct RandomTemplateSpec {
  HostTerm host;
  int k = 2;
  int base_colour = 1;
  Rational p;
  std::uint64_t seed = 0;
};

// Element x gets [k] when draw x of the random-template stream falls below p, else {i}.
Template sample_random_template(const RandomTemplateSpec& spec);

// Recolouring any element of a member of Forb(F) to `colour` stays in Forb(F), checked
// exhaustively at n = N and N + 1.
bool is_i_monotone(const ForbiddenFamily& F, int colour);

struct TransferenceRow {
  std::uint64_t seed = 0;
  std::size_t full_elements = 0;
  BigInt w_T;          // k^{ex(T, P)}
  BigInt meet_weight;  // weight of t* meet T
  bool meet_bound_ok = false;
  bool lower_ok = false;
  bool upper_ok = false;
  bool certified = false;
  double ent = 0.0;
  double margin = 0.0;  // distance to the nearer bound, in entropy units
  std::uint64_t nodes = 0;
  double seconds = 0.0;
};

struct TransferenceReport {
  std::string family;
  int k = 0;
  int colour = 0;
  int n = 0;
  Rational p;
  Rational epsilon;
  BigInt w_star;
  double ex = 0.0;
  double lower_target = 0.0;  // p (ex - eps n^2)
  double upper_target = 0.0;  // p (ex + 2 eps n^2)
  std::vector<TransferenceRow> rows;
  std::size_t passes = 0;
  Rational pass_frequency;
  bool all_meet_bounds = true;
  std::optional<std::uint64_t> worst_seed;
};

TransferenceReport transference_experiment(const ForbiddenFamily& F, int colour, int n, const Rational& p,
                                           const Rational& epsilon, const std::vector<std::uint64_t>& seeds,
                                           const SolveOptions& options = {});

struct StabilityEntry {
  Template t;
  BigInt weight;
  std::uint64_t bad = 0;
  std::size_t distance = 0;
};

struct StabilityScanResult {
  std::string family;
  int n = 0;
  Rational theta;
  std::uint64_t bad_budget = 0;
  BigInt w_star;
  std::vector<Template> reference;
  std::vector<StabilityEntry> entries;
  std::uint64_t scanned = 0;  // templates visited in the space of all nonempty palettes
  std::size_t max_distance = 0;
};

// All templates with W >= theta * W*_n and bad_pairs <= bad, with their edit distance to
// the reference family (default: the extremal witnesses).
StabilityScanResult stability_scan(const ForbiddenFamily& F, int n, const Rational& theta, std::uint64_t bad,
                                   std::optional<std::vector<Template>> reference = std::nullopt,
                                   std::uint64_t budget = 100'000'000, const SolveOptions& options = {});

struct SparsificationRun {
  std::uint64_t seed = 0;
  SparsificationReport report;
  bool markov_ok = false;    // Y_H' <= 3 p^2 Y_H
  bool chernoff_ok = false;  // e(H') / e(H) in [p/2, 3p/2]
};

struct SparsificationStats {
  std::string family;
  HostTerm host;
  Rational eps1;
  Rational p;
  std::uint64_t e_H = 0;
  BigInt Y_H;
  std::vector<SparsificationRun> runs;
  std::size_t f1 = 0;
  std::size_t f2 = 0;
  std::size_t markov = 0;
  std::size_t chernoff = 0;
};

SparsificationStats sparsification_statistics(HostTerm host, const ForbiddenFamily& F, const Rational& eps1,
                                              const std::vector<std::uint64_t>& seeds,
                                              std::optional<Rational> p = std::nullopt);

}  // namespace colcont
