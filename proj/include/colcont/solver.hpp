#pragma once

#include "colcont/family.hpp"
#include "colcont/template.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace colcont {

struct SolveOptions {
  std::uint64_t node_budget = 0;  // 0: unlimited
  int threads = 1;
  std::size_t witness_cap = 64;
  bool dominance = true;  // search only palettes closed under colour dominance
  bool symmetry = true;   // colour symmetries of F at the first element
  bool chain = true;      // K/Q hosts: bound and seed from the solved term n-1
  // Templates whose meet with the base template seeds the incumbent.
  std::vector<Template> seeds;
};

struct ExtremalResult {
  HostTerm host;
  int k = 0;
  std::string family;
  BigInt w_star;
  EntropyValue ent;
  std::vector<Template> witnesses;
  bool witnesses_complete = true;
  std::uint64_t nodes = 0;
  bool certified = true;
  // Valid when !certified: no zero-bad template exceeds 2^upper_log2.
  double upper_log2 = 0.0;
  double seconds = 0.0;
  bool dominance_used = false;
  std::size_t symmetry_order = 1;
};

ExtremalResult solve_ex(HostTerm host, const ForbiddenFamily& F, const SolveOptions& options = {});

// Maximises weight over t' <= base pointwise with bad_pairs(t', F) = 0.
ExtremalResult relative_ex(const Template& base, const ForbiddenFamily& F, const SolveOptions& options = {});

// |Forb(F)_n| by enumeration with incremental rejection.
BigInt speed(HostTerm host, const ForbiddenFamily& F, std::uint64_t node_budget = 0);

// W_a^{g_b} >= W_b^{g_a}, i.e. log W_a / g_a >= log W_b / g_b.
bool density_not_below(const BigInt& w_a, std::uint64_t g_a, const BigInt& w_b, std::uint64_t g_b);

struct DensityEntry {
  int n = 0;
  BigInt w_star;
  std::uint64_t ground = 0;
  bool certified = true;
};

struct DensitySequence {
  HostKind kind = HostKind::kn;
  std::string family;
  int k = 0;
  std::vector<DensityEntry> entries;
  std::vector<bool> step_nonincreasing;  // entry i vs i+1
  std::vector<bool> pair_nonincreasing;  // entry i vs i+2
  double tail_ratio = 0.0;               // upper estimate of the entropy density
};

DensitySequence density_sequence(HostKind kind, const ForbiddenFamily& F, int n_lo, int n_hi,
                                 const SolveOptions& options = {});

struct ClosedFormRow {
  int n = 0;
  BigInt w_star;
  BigInt lhs;
  BigInt rhs;
  bool holds = false;
  std::string note;
};

struct ClosedFormReport {
  std::string case_name;
  std::vector<ClosedFormRow> rows;
  bool all_hold = true;
};

std::vector<std::string> closed_form_cases();
ClosedFormReport closed_form_check(std::string_view case_name, int n_lo, int n_hi,
                                   const SolveOptions& options = {});

}  // namespace colcont
