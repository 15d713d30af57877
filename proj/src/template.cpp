#include "colcont/template.hpp"

#include "colcont/family.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace colcont {

void validate_colour_count(int k) {
  if (k < 1 || k > kMaxColours)
    throw Error(ErrorCode::invalid_argument, "colour count k must be in 1..16, got " + std::to_string(k));
}

Palette Palette::single(int colour) {
  if (colour < 1 || colour > kMaxColours) throw Error(ErrorCode::invalid_argument, "colour out of range");
  return Palette(static_cast<std::uint16_t>(1u << (colour - 1)));
}

Palette Palette::full(int k) {
  validate_colour_count(k);
  return Palette(static_cast<std::uint16_t>((1u << k) - 1));
}

Palette Palette::of(std::initializer_list<int> colours) {
  Palette p;
  for (int c : colours) p = p | single(c);
  return p;
}

Palette Palette::parse(std::string_view text, int k) {
  Palette p;
  while (!text.empty()) {
    auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    int c = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), c);
    if (ec != std::errc() || ptr != item.data() + item.size())
      throw Error(ErrorCode::parse_error, "bad palette entry '" + std::string(item) + "'");
    if (c < 1 || c > k) throw Error(ErrorCode::parse_error, "palette colour " + std::to_string(c) + " outside 1.." + std::to_string(k));
    p = p | single(c);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (p.empty()) throw Error(ErrorCode::parse_error, "empty palette");
  return p;
}

std::vector<int> Palette::members() const {
  std::vector<int> out;
  for (int c = 1; c <= kMaxColours; ++c)
    if (contains(c)) out.push_back(c);
  return out;
}

std::string Palette::str() const {
  std::string s;
  for (int c : members()) {
    if (!s.empty()) s += ',';
    s += std::to_string(c);
  }
  return s;
}

Template::Template(HostTerm host, int k, std::vector<Palette> palettes)
    : host_(host), k_(k), palettes_(std::move(palettes)) {
  validate_colour_count(k);
  validate_term(host);
  if (palettes_.size() != host.ground_size())
    throw Error(ErrorCode::invalid_argument, "template has " + std::to_string(palettes_.size()) +
                                                 " palettes for a ground set of " + std::to_string(host.ground_size()));
  Palette all = Palette::full(k);
  for (std::size_t i = 0; i < palettes_.size(); ++i) {
    if (palettes_[i].empty()) throw Error(ErrorCode::invalid_argument, "empty palette at element " + std::to_string(i));
    if (!palettes_[i].subset_of(all)) throw Error(ErrorCode::invalid_argument, "palette colour above k at element " + std::to_string(i));
  }
}

Template Template::full(HostTerm host, int k) {
  validate_term(host);
  return Template(host, k, std::vector<Palette>(host.ground_size(), Palette::full(k)));
}

Template Template::constant(HostTerm host, int k, Palette palette) {
  validate_term(host);
  return Template(host, k, std::vector<Palette>(host.ground_size(), palette));
}

Template Template::colouring(HostTerm host, int k, const std::vector<int>& colours) {
  std::vector<Palette> p;
  p.reserve(colours.size());
  for (int c : colours) p.push_back(Palette::single(c));
  return Template(host, k, std::move(p));
}

bool Template::is_colouring() const {
  for (auto p : palettes_)
    if (p.size() != 1) return false;
  return true;
}

int Template::colour(std::size_t i) const {
  if (palettes_.at(i).size() != 1) throw Error(ErrorCode::invalid_argument, "element is not a single colour");
  return palettes_[i].lowest();
}

Template Template::with_palette(std::size_t i, Palette p) const {
  std::vector<Palette> copy = palettes_;
  copy.at(i) = p;
  return Template(host_, k_, std::move(copy));
}

double EntropyValue::approx() const {
  double total = 0.0;
  for (std::size_t s = 2; s < histogram.size(); ++s)
    total += static_cast<double>(histogram[s]) * std::log(static_cast<double>(s));
  return k > 1 ? total / std::log(static_cast<double>(k)) : 0.0;
}

EntropyValue entropy(const Template& t) {
  EntropyValue v;
  v.k = t.k();
  v.histogram.assign(static_cast<std::size_t>(t.k()) + 1, 0);
  for (auto p : t.palettes()) ++v.histogram[p.size()];
  v.weight = 1;
  for (std::size_t s = 2; s < v.histogram.size(); ++s) v.weight *= big_pow(s, v.histogram[s]);
  return v;
}

BigInt weight(const Template& t) { return entropy(t).weight; }

Template restrict(const Template& t, const Embedding& phi) {
  if (!(phi.target == t.host())) throw Error(ErrorCode::host_mismatch, "embedding does not target the template's host");
  std::vector<Palette> p;
  p.reserve(phi.map.size());
  for (auto x : phi.map) p.push_back(t[x]);
  return Template(phi.source, t.k(), std::move(p));
}

bool pointwise_le(const Template& t, const Template& u) {
  if (!(t.host() == u.host()) || t.k() != u.k()) return false;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!t[i].subset_of(u[i])) return false;
  return true;
}

std::optional<Embedding> is_subtemplate(const Template& t, const Template& u) {
  if (t.k() != u.k() || t.host().kind != u.host().kind || t.host().n > u.host().n) return std::nullopt;
  std::optional<Embedding> found;
  for_each_embedding(t.host().kind, t.host().n, u.host().n, [&](const std::uint32_t* row) {
    for (std::size_t i = 0; i < t.size(); ++i)
      if (!t[i].subset_of(u[row[i]])) return true;
    found = Embedding{t.host(), u.host(), std::vector<std::uint32_t>(row, row + t.size())};
    return false;
  });
  return found;
}

RealisationStream::RealisationStream(const Template& t, std::optional<BigInt> cap) : source_(t) {
  count_ = weight(t);
  if (cap && count_ > *cap)
    throw Error(ErrorCode::budget_exceeded, "template has " + count_.str() + " realisations, cap is " + cap->str());
  choices_.reserve(t.size());
  for (auto p : t.palettes()) choices_.push_back(p.members());
  position_.assign(t.size(), 0);
}

std::optional<Template> RealisationStream::next() {
  if (done_) return std::nullopt;
  if (started_) {
    std::size_t i = position_.size();
    while (i > 0) {
      --i;
      if (++position_[i] < choices_[i].size()) break;
      position_[i] = 0;
      if (i == 0) {
        done_ = true;
        return std::nullopt;
      }
    }
    if (position_.empty()) {
      done_ = true;
      return std::nullopt;
    }
  }
  started_ = true;
  std::vector<int> colours(position_.size());
  for (std::size_t i = 0; i < colours.size(); ++i) colours[i] = choices_[i][position_[i]];
  return Template::colouring(source_.host(), source_.k(), colours);
}

EmptyMeet::EmptyMeet(std::size_t element)
    : Error(ErrorCode::empty_meet, "meet is empty at element " + std::to_string(element)), element_(element) {}

Template meet(const Template& a, const Template& b) {
  if (!(a.host() == b.host()) || a.k() != b.k()) throw Error(ErrorCode::host_mismatch, "meet of templates on different hosts");
  std::vector<Palette> p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    p[i] = a[i] & b[i];
    if (p[i].empty()) throw EmptyMeet(i);
  }
  return Template(a.host(), a.k(), std::move(p));
}

std::size_t edit_distance(const Template& a, const Template& b) {
  if (!(a.host() == b.host()) || a.k() != b.k()) throw Error(ErrorCode::host_mismatch, "edit distance across hosts");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

std::size_t distance_to_family(const std::vector<Template>& family, const Template& t) {
  std::size_t best = t.size();
  for (const auto& s : family) {
    if (!(s.host() == t.host()) || s.k() != t.k()) continue;
    best = std::min(best, edit_distance(s, t));
  }
  return best;
}

std::uint64_t bad_pairs(const Template& t, const ForbiddenFamily& F,
                        const std::function<void(std::size_t, std::size_t)>& fn) {
  if (t.host().kind != F.term().kind || t.k() != F.k())
    throw Error(ErrorCode::host_mismatch, "template and family live on different hosts or colour sets");
  if (t.host().n < F.term().n) return 0;
  std::uint64_t count = 0;
  std::size_t index = 0;
  const std::size_t r = F.arity();
  for_each_embedding(F.term().kind, F.term().n, t.host().n, [&](const std::uint32_t* row) {
    for (std::size_t m = 0; m < F.size(); ++m) {
      const std::uint8_t* c = F.member(m);
      bool realisable = true;
      for (std::size_t j = 0; j < r && realisable; ++j) realisable = t[row[j]].contains(c[j]);
      if (realisable) {
        ++count;
        if (fn) fn(index, m);
      }
    }
    ++index;
    return true;
  });
  return count;
}

std::uint64_t bad_pairs(const Template& t, const ForbiddenFamily& F) { return bad_pairs(t, F, nullptr); }

std::string format_template(const Template& t) {
  std::string out = "host " + t.host().name() + " " + std::to_string(t.host().n) + " " + std::to_string(t.k()) + "\n";
  for (std::size_t i = 0; i < t.size(); ++i) out += std::to_string(i) + " " + t[i].str() + "\n";
  return out;
}

Template parse_template(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw Error(ErrorCode::parse_error, "empty template text");
  std::istringstream header(line);
  std::string word, host;
  int n = 0, k = 0;
  if (!(header >> word >> host >> n >> k) || word != "host")
    throw Error(ErrorCode::parse_error, "expected 'host <name> <n> <k>', got '" + line + "'");
  HostTerm term{parse_host_kind(host), n};
  validate_term(term);
  validate_colour_count(k);
  std::vector<Palette> palettes;
  palettes.reserve(term.ground_size());
  while (next_line()) {
    std::istringstream row(line);
    std::size_t index = 0;
    std::string palette;
    if (!(row >> index >> palette)) throw Error(ErrorCode::parse_error, "bad template line '" + line + "'");
    if (index != palettes.size())
      throw Error(ErrorCode::parse_error, "element " + std::to_string(index) + " out of canonical order");
    palettes.push_back(Palette::parse(palette, k));
  }
  if (palettes.size() != term.ground_size())
    throw Error(ErrorCode::parse_error, "expected " + std::to_string(term.ground_size()) + " elements, got " +
                                            std::to_string(palettes.size()));
  return Template(term, k, std::move(palettes));
}

}  // namespace colcont
