#pragma once

#include "colcont/common.hpp"
#include "colcont/host.hpp"

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace colcont {

inline constexpr int kMaxColours = 16;

void validate_colour_count(int k);

// A set of colours from 1..16 stored as a bitmask (colour c is bit c-1).
class Palette {
 public:
  constexpr Palette() = default;
  static constexpr Palette from_bits(std::uint16_t bits) { return Palette(bits); }
  static Palette single(int colour);
  static Palette full(int k);
  static Palette of(std::initializer_list<int> colours);
  static Palette parse(std::string_view text, int k);

  constexpr std::uint16_t bits() const { return bits_; }
  int size() const { return std::popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  bool contains(int colour) const { return colour >= 1 && colour <= kMaxColours && (bits_ >> (colour - 1)) & 1u; }
  bool subset_of(Palette other) const { return (bits_ & ~other.bits_) == 0; }
  int lowest() const { return std::countr_zero(bits_) + 1; }
  int highest() const { return 16 - std::countl_zero(bits_); }
  std::vector<int> members() const;
  std::string str() const;

  Palette operator&(Palette o) const { return Palette(bits_ & o.bits_); }
  Palette operator|(Palette o) const { return Palette(bits_ | o.bits_); }
  bool operator==(const Palette&) const = default;
  auto operator<=>(const Palette&) const = default;

 private:
  constexpr explicit Palette(std::uint16_t bits) : bits_(bits) {}
  std::uint16_t bits_ = 0;
};

// Per-element palettes over a host term. Immutable; a colouring is a template whose
// palettes are all singletons.
class Template {
 public:
  Template() = default;
  Template(HostTerm host, int k, std::vector<Palette> palettes);

  static Template full(HostTerm host, int k);
  static Template constant(HostTerm host, int k, Palette palette);
  static Template colouring(HostTerm host, int k, const std::vector<int>& colours);

  const HostTerm& host() const { return host_; }
  int k() const { return k_; }
  std::size_t size() const { return palettes_.size(); }
  Palette operator[](std::size_t i) const { return palettes_[i]; }
  const std::vector<Palette>& palettes() const { return palettes_; }

  bool is_colouring() const;
  int colour(std::size_t i) const;  // requires a singleton palette
  Template with_palette(std::size_t i, Palette p) const;

  bool operator==(const Template&) const = default;

 private:
  HostTerm host_;
  int k_ = 0;
  std::vector<Palette> palettes_;
};

struct EntropyValue {
  int k = 0;
  std::vector<std::uint64_t> histogram;  // histogram[s] = elements with palette size s
  BigInt weight;

  // log_k W, for display only; comparisons go through weight.
  double approx() const;
  bool operator==(const EntropyValue&) const = default;
};

EntropyValue entropy(const Template& t);
BigInt weight(const Template& t);

Template restrict(const Template& t, const Embedding& phi);

// t(e) subset of u(e) for every element (identity embedding, equal terms).
bool pointwise_le(const Template& t, const Template& u);

// Some embedding phi of t's term into u's term has t <= u restricted along phi.
std::optional<Embedding> is_subtemplate(const Template& t, const Template& u);

// Realisations of t in lexicographic order (element 0 most significant, colours
// ascending).
class RealisationStream {
 public:
  explicit RealisationStream(const Template& t, std::optional<BigInt> cap = std::nullopt);
  const BigInt& count() const { return count_; }
  std::optional<Template> next();

 private:
  Template source_;
  BigInt count_;
  std::vector<std::vector<int>> choices_;
  std::vector<std::size_t> position_;
  bool started_ = false;
  bool done_ = false;
};

class EmptyMeet : public Error {
 public:
  explicit EmptyMeet(std::size_t element);
  std::size_t element() const { return element_; }

 private:
  std::size_t element_;
};

Template meet(const Template& a, const Template& b);

std::size_t edit_distance(const Template& a, const Template& b);
std::size_t distance_to_family(const std::vector<Template>& family, const Template& t);

class ForbiddenFamily;

std::uint64_t bad_pairs(const Template& t, const ForbiddenFamily& F);
// Calls fn(embedding index, member index) for each bad pair.
std::uint64_t bad_pairs(const Template& t, const ForbiddenFamily& F,
                        const std::function<void(std::size_t, std::size_t)>& fn);

// Template text format.
std::string format_template(const Template& t);
Template parse_template(std::string_view text);

}  // namespace colcont
