#include "colcont/colcont.h"

#include "colcont/containers.hpp"
#include "colcont/encodings.hpp"
#include "colcont/experiments.hpp"
#include "colcont/solver.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

struct cc_family {
  colcont::ForbiddenFamily F;
};

struct cc_template {
  colcont::Template t;
};

struct cc_report {
  std::string json;
  std::string csv;
  std::vector<std::pair<std::string, std::string>> artifacts;
  int passed = 1;
};

namespace {

using namespace colcont;
using nlohmann::ordered_json;

thread_local std::string last_error;

cc_status to_status(ErrorCode code) { return static_cast<cc_status>(static_cast<int>(code)); }

template <typename Fn>
cc_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return CC_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("bad options: ") + e.what();
    return CC_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return CC_BUDGET_EXCEEDED;
  } catch (const std::exception& e) {
    last_error = e.what();
    return CC_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::invalid_argument, std::string(what) + " is null");
}

// Option reader that rejects keys nobody asked for.
class Options {
 public:
  explicit Options(const char* text) {
    if (text && *text) {
      j_ = nlohmann::json::parse(text);
      if (!j_.is_object()) throw Error(ErrorCode::invalid_argument, "options must be a JSON object");
    }
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    used_.insert(key);
    if (!j_.contains(key)) return fallback;
    return j_.at(key).get<T>();
  }

  std::optional<Rational> rational(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    const auto& v = j_.at(key);
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    throw Error(ErrorCode::invalid_argument, "option '" + key + "' must be an integer or a rational string");
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw Error(ErrorCode::invalid_argument, "unknown option '" + it.key() + "'");
  }

 private:
  nlohmann::json j_ = nlohmann::json::object();
  std::set<std::string> used_;
};

SolveOptions solve_options(Options& o) {
  SolveOptions s;
  s.threads = o.get<int>("threads", 1);
  s.node_budget = o.get<std::uint64_t>("node_budget", 0);
  s.witness_cap = o.get<std::size_t>("witness_cap", 64);
  s.dominance = o.get<bool>("dominance", true);
  s.symmetry = o.get<bool>("symmetry", true);
  s.chain = o.get<bool>("chain", true);
  if (s.threads < 1) throw Error(ErrorCode::invalid_argument, "threads must be at least 1");
  if (s.witness_cap < 1) throw Error(ErrorCode::invalid_argument, "witness_cap must be at least 1");
  return s;
}

// Palettes in element order, separated by spaces: "1,2 2 1,2,3".
std::string palette_strings(const Template& t) {
  std::string out;
  for (auto p : t.palettes()) out += (out.empty() ? "" : " ") + p.str();
  return out;
}

ordered_json histogram_json(const EntropyValue& e) {
  ordered_json h = ordered_json::array();
  for (std::size_t s = 1; s < e.histogram.size(); ++s) h.push_back(e.histogram[s]);
  return h;
}

ordered_json header(const char* command) {
  ordered_json j;
  j["schema"] = 1;
  j["command"] = command;
  return j;
}

ordered_json extremal_json(const char* command, const ExtremalResult& r) {
  ordered_json j = header(command);
  j["host"] = r.host.name();
  j["n"] = r.host.n;
  j["k"] = r.k;
  j["family"] = r.family;
  j["W_star"] = r.w_star.str();
  j["ent_histogram"] = histogram_json(r.ent);
  j["ent"] = r.ent.approx();
  ordered_json w = ordered_json::array();
  for (const auto& t : r.witnesses) w.push_back(palette_strings(t));
  j["witnesses"] = w;
  j["witnesses_complete"] = r.witnesses_complete;
  j["nodes"] = r.nodes;
  j["certified"] = r.certified;
  if (!r.certified) j["upper_log2"] = r.upper_log2;
  j["dominance_used"] = r.dominance_used;
  j["symmetry_order"] = r.symmetry_order;
  j["seconds"] = r.seconds;
  return j;
}

cc_report* make_report(const ordered_json& j, int passed = 1) {
  auto* r = new cc_report;
  r->json = j.dump(2) + "\n";
  r->passed = passed;
  return r;
}

HostTerm term(const char* host, int n) {
  require(host, "host");
  HostTerm t{parse_host_kind(host), n};
  validate_term(t);
  return t;
}

std::string rat(const Rational& q) { return rational_str(q); }

std::vector<std::uint64_t> seed_list(Options& o, std::uint64_t default_count) {
  std::uint64_t count = o.get<std::uint64_t>("seeds", default_count);
  std::uint64_t first = o.get<std::uint64_t>("seed", 0);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < count; ++i) seeds.push_back(first + i);
  return seeds;
}

std::string sha256_hex(std::istream& in) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) throw Error(ErrorCode::internal, "digest init failed");
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char two[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(two, sizeof two, "%02x", md[i]);
    hex += two;
  }
  return hex;
}

}  // namespace

extern "C" {

const char* cc_version(void) { return "1.0.0"; }

const char* cc_status_name(cc_status status) {
  switch (status) {
    case CC_OK: return "ok";
    case CC_INVALID_ARGUMENT: return "invalid_argument";
    case CC_HOST_MISMATCH: return "host_mismatch";
    case CC_UNKNOWN_FAMILY: return "unknown_family";
    case CC_BUDGET_EXCEEDED: return "budget_exceeded";
    case CC_EMPTY_MEET: return "empty_meet";
    case CC_PARSE_ERROR: return "parse_error";
    case CC_IO_ERROR: return "io_error";
    case CC_UNSUPPORTED: return "unsupported";
    case CC_NON_MONOTONE: return "non_monotone";
    case CC_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* cc_last_error(void) { return last_error.c_str(); }

cc_status cc_family_create(const char* name, cc_family** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = new cc_family{forbidden_family_for(name)};
  });
}

void cc_family_free(cc_family* family) { delete family; }

const char* cc_family_registry(void) {
  static const std::string list = [] {
    std::string s;
    for (const auto& name : registered_families()) s += name + "\n";
    return s;
  }();
  return list.c_str();
}

cc_status cc_template_parse(const char* text, cc_template** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new cc_template{parse_template(text)};
  });
}

void cc_template_free(cc_template* t) { delete t; }

cc_status cc_template_bad_pairs(const cc_template* t, const cc_family* family, uint64_t* out) {
  return guarded([&] {
    require(t, "template");
    require(family, "family");
    require(out, "out");
    *out = bad_pairs(t->t, family->F);
  });
}

const char* cc_report_json(const cc_report* report) { return report ? report->json.c_str() : ""; }
const char* cc_report_csv(const cc_report* report) { return report ? report->csv.c_str() : ""; }
size_t cc_report_artifact_count(const cc_report* report) { return report ? report->artifacts.size() : 0; }

cc_status cc_report_artifact(const cc_report* report, size_t index, const char** name, const char** text) {
  return guarded([&] {
    require(report, "report");
    if (index >= report->artifacts.size()) throw Error(ErrorCode::invalid_argument, "artifact index out of range");
    if (name) *name = report->artifacts[index].first.c_str();
    if (text) *text = report->artifacts[index].second.c_str();
  });
}

int cc_report_passed(const cc_report* report) { return report ? report->passed : 0; }
void cc_report_free(cc_report* report) { delete report; }

cc_status cc_solve_ex(const char* host, int n, const cc_family* family, const char* options_json, cc_report** out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    Options o(options_json);
    SolveOptions s = solve_options(o);
    o.finish();
    ExtremalResult r = solve_ex(term(host, n), family->F, s);
    *out = make_report(extremal_json("solve-ex", r));
  });
}

cc_status cc_relative_ex(const cc_template* base, const cc_family* family, const char* options_json, cc_report** out) {
  return guarded([&] {
    require(base, "base");
    require(family, "family");
    require(out, "out");
    Options o(options_json);
    SolveOptions s = solve_options(o);
    o.finish();
    ExtremalResult r = relative_ex(base->t, family->F, s);
    ordered_json j = extremal_json("relative-ex", r);
    j["base"] = palette_strings(base->t);
    *out = make_report(j);
  });
}

cc_status cc_speed(const char* host, int n, const cc_family* family, const char* options_json, cc_report** out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    Options o(options_json);
    std::uint64_t budget = o.get<std::uint64_t>("node_budget", 0);
    o.finish();
    HostTerm t = term(host, n);
    BigInt count = speed(t, family->F, budget);
    ordered_json j = header("speed");
    j["host"] = t.name();
    j["n"] = n;
    j["k"] = family->F.k();
    j["family"] = family->F.name();
    j["speed"] = count.str();
    *out = make_report(j);
  });
}

cc_status cc_density(const char* host, const cc_family* family, int n_lo, int n_hi, const char* options_json,
                     cc_report** out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    Options o(options_json);
    SolveOptions s = solve_options(o);
    o.finish();
    HostKind kind = term(host, n_hi).kind;
    DensitySequence seq = density_sequence(kind, family->F, n_lo, n_hi, s);
    ordered_json j = header("density");
    j["host"] = host_kind_name(kind);
    j["family"] = seq.family;
    j["k"] = seq.k;
    ordered_json entries = ordered_json::array();
    std::string csv = "n,W_star,ground,certified\n";
    for (const auto& e : seq.entries) {
      entries.push_back({{"n", e.n}, {"W_star", e.w_star.str()}, {"ground", e.ground}, {"certified", e.certified}});
      csv += std::to_string(e.n) + "," + e.w_star.str() + "," + std::to_string(e.ground) + "," + (e.certified ? "1" : "0") + "\n";
    }
    j["entries"] = entries;
    bool steps = std::all_of(seq.step_nonincreasing.begin(), seq.step_nonincreasing.end(), [](bool b) { return b; });
    bool pairs = std::all_of(seq.pair_nonincreasing.begin(), seq.pair_nonincreasing.end(), [](bool b) { return b; });
    j["step_nonincreasing"] = seq.step_nonincreasing;
    j["pair_nonincreasing"] = seq.pair_nonincreasing;
    j["monotone_by_steps"] = steps;
    j["monotone_by_pairs"] = pairs;
    j["density_upper_estimate"] = seq.tail_ratio;
    // Path hosts are only monotone in steps of two.
    bool passed = kind == HostKind::pn ? pairs : steps;
    cc_report* r = make_report(j, passed);
    r->csv = csv;
    *out = r;
  });
}

cc_status cc_check_closed_forms(const char* case_name, int n_lo, int n_hi, const char* options_json, cc_report** out) {
  return guarded([&] {
    require(case_name, "case");
    require(out, "out");
    Options o(options_json);
    SolveOptions s = solve_options(o);
    o.finish();
    ClosedFormReport rep = closed_form_check(case_name, n_lo, n_hi, s);
    ordered_json j = header("check-closed-forms");
    j["case"] = rep.case_name;
    ordered_json rows = ordered_json::array();
    for (const auto& row : rep.rows)
      rows.push_back({{"n", row.n}, {"W_star", row.w_star.str()}, {"lhs", row.lhs.str()}, {"rhs", row.rhs.str()},
                      {"holds", row.holds}, {"note", row.note}});
    j["rows"] = rows;
    j["all_hold"] = rep.all_hold;
    *out = make_report(j, rep.all_hold);
  });
}

cc_status cc_containers(const char* host, int n, const cc_family* family, const char* options_json, cc_report** out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    Options o(options_json);
    PipelineOptions p;
    if (auto v = o.rational("epsilon")) p.epsilon = *v;
    if (auto v = o.rational("delta")) p.delta = *v;
    p.eps1 = o.rational("eps1");
    p.p = o.rational("p");
    p.seed = o.get<std::uint64_t>("seed", 0);
    p.samples = o.get<std::uint64_t>("samples", p.samples);
    p.template_samples = o.get<std::uint64_t>("template_samples", p.template_samples);
    p.exhaustive_budget = o.get<std::uint64_t>("exhaustive_budget", p.exhaustive_budget);
    p.max_containers = o.get<std::size_t>("max_containers", p.max_containers);
    std::size_t max_files = o.get<std::size_t>("max_files", 10'000);
    o.finish();
    PipelineReport R = run_container_pipeline(term(host, n), family->F, p);
    const auto& S = R.sparsification;
    const auto& V = R.verification;
    ordered_json j = header("containers");
    j["host"] = R.family.host.name();
    j["n"] = n;
    j["k"] = family->F.k();
    j["family"] = family->F.name();
    j["epsilon"] = rat(p.epsilon);
    j["delta"] = rat(p.delta);
    j["eps1"] = rat(R.eps1);
    j["seed"] = p.seed;
    j["p"] = rat(S.p);
    j["p_pass_through"] = S.pass_through;
    j["e_H"] = S.e_H;
    j["e_Hp"] = S.e_Hp;
    j["e_Hpp"] = R.e_Hpp;
    j["Y"] = {{"H", S.Y_H.str()}, {"Hp", S.Y_Hp.str()}, {"count_bound_ordered", S.y_count_bound.str()},
              {"F2_threshold_ordered", rat(S.f2_threshold)}};
    j["F1"] = S.F1;
    j["F2"] = S.F2;
    j["F3_consequence"] = {{"checked", R.f3_checked}, {"failures", R.f3_failures}};
    j["d"] = R.d;
    j["beta"] = R.beta ? ordered_json(*R.beta) : ordered_json(nullptr);
    j["sparse_containers"] = R.sparse_containers;
    j["n_containers"] = R.family.templates.size();
    j["dropped_empty"] = R.family.dropped_empty;
    j["cover_checked"] = V.samples;
    j["cover_failures"] = V.cover_failures;
    j["template_cover_checked"] = V.template_samples;
    j["template_cover_failures"] = V.template_cover_failures;
    j["exhaustive"] = {{"ran", V.exhaustive}, {"checked", V.exhaustive_checked}, {"failures", V.exhaustive_failures}};
    j["max_bad_pairs"] = V.max_bad_pairs;
    j["max_bad_pair_ratio"] = rat(V.max_bad_pair_ratio);
    j["bad_pairs_within_epsilon"] = V.bad_pairs_ok;
    j["log_k_containers"] = V.log_k_size;
    j["epsilon_ground"] = V.eps_ground;
    bool passed = V.cover_failures == 0 && V.template_cover_failures == 0 && V.exhaustive_failures == 0 && V.bad_pairs_ok;
    j["container_files"] = R.family.templates.size() <= max_files ? "per-container" : "combined";
    cc_report* r = make_report(j, passed);
    const auto& T = R.family.templates;
    if (T.size() <= max_files) {
      char name[32];
      for (std::size_t i = 0; i < T.size(); ++i) {
        std::snprintf(name, sizeof name, "container_%06zu.txt", i);
        r->artifacts.emplace_back(name, format_template(T[i]));
      }
    } else {
      std::string all;
      for (const auto& t : T) all += format_template(t) + "\n";
      r->artifacts.emplace_back("containers.txt", std::move(all));
    }
    *out = r;
  });
}

cc_status cc_sparsify_stats(const char* host, int n, const cc_family* family, const char* options_json, cc_report** out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    Options o(options_json);
    Rational eps1 = o.rational("eps1").value_or(Rational(1, 10));
    std::optional<Rational> p = o.rational("p");
    std::vector<std::uint64_t> seeds = seed_list(o, 50);
    o.finish();
    SparsificationStats S = sparsification_statistics(term(host, n), family->F, eps1, seeds, p);
    ordered_json j = header("sparsify");
    j["host"] = S.host.name();
    j["n"] = n;
    j["family"] = S.family;
    j["eps1"] = rat(S.eps1);
    j["p"] = rat(S.p);
    j["e_H"] = S.e_H;
    j["Y_H"] = S.Y_H.str();
    j["runs"] = S.runs.size();
    j["F1"] = S.f1;
    j["F2"] = S.f2;
    j["markov"] = S.markov;
    j["chernoff"] = S.chernoff;
    std::string csv = "seed,e_Hp,Y_Hp,F1,F2,markov,chernoff\n";
    for (const auto& run : S.runs)
      csv += std::to_string(run.seed) + "," + std::to_string(run.report.e_Hp) + "," + run.report.Y_Hp.str() + "," +
             std::to_string(run.report.F1) + "," + std::to_string(run.report.F2) + "," + std::to_string(run.markov_ok) +
             "," + std::to_string(run.chernoff_ok) + "\n";
    cc_report* r = make_report(j);
    r->csv = csv;
    *out = r;
  });
}

cc_status cc_transfer(const cc_family* family, int colour, int n, const char* p, const char* epsilon,
                      const char* options_json, cc_report** out) {
  return guarded([&] {
    require(family, "family");
    require(p, "p");
    require(epsilon, "epsilon");
    require(out, "out");
    Options o(options_json);
    SolveOptions s = solve_options(o);
    std::vector<std::uint64_t> seeds = seed_list(o, 30);
    Rational threshold = o.rational("threshold").value_or(Rational(4, 5));
    o.finish();
    TransferenceReport R = transference_experiment(family->F, colour, n, parse_rational(p), parse_rational(epsilon), seeds, s);
    ordered_json j = header("transfer");
    j["family"] = R.family;
    j["k"] = R.k;
    j["i"] = R.colour;
    j["n"] = R.n;
    j["p"] = rat(R.p);
    j["epsilon"] = rat(R.epsilon);
    j["W_star"] = R.w_star.str();
    j["ex"] = R.ex;
    j["lower_target"] = R.lower_target;
    j["upper_target"] = R.upper_target;
    j["seeds"] = seeds.size();
    j["passes"] = R.passes;
    j["pass_frequency"] = rat(R.pass_frequency);
    j["threshold"] = rat(threshold);
    j["all_meet_bounds"] = R.all_meet_bounds;
    j["worst_seed"] = R.worst_seed ? ordered_json(*R.worst_seed) : ordered_json(nullptr);
    std::string csv = "seed,full_elements,W_T,ent,lower_ok,upper_ok,meet_weight,meet_bound_ok,certified,nodes\n";
    for (const auto& row : R.rows) {
      std::ostringstream line;
      line << row.seed << "," << row.full_elements << "," << row.w_T.str() << "," << row.ent << "," << row.lower_ok
           << "," << row.upper_ok << "," << row.meet_weight.str() << "," << row.meet_bound_ok << "," << row.certified
           << "," << row.nodes << "\n";
      csv += line.str();
    }
    bool passed = R.pass_frequency >= threshold && R.all_meet_bounds;
    cc_report* r = make_report(j, passed);
    r->csv = csv;
    *out = r;
  });
}

cc_status cc_stability(const cc_family* family, int n, const char* theta, uint64_t bad, const char* options_json,
                       cc_report** out) {
  return guarded([&] {
    require(family, "family");
    require(theta, "theta");
    require(out, "out");
    Options o(options_json);
    std::size_t max_distance = o.get<std::size_t>("max_distance", 2);
    std::uint64_t budget = o.get<std::uint64_t>("budget", 100'000'000);
    SolveOptions s = solve_options(o);
    o.finish();
    StabilityScanResult R = stability_scan(family->F, n, parse_rational(theta), bad, std::nullopt, budget, s);
    ordered_json j = header("stability");
    j["family"] = R.family;
    j["n"] = R.n;
    j["theta"] = rat(R.theta);
    j["bad"] = R.bad_budget;
    j["W_star"] = R.w_star.str();
    ordered_json ref = ordered_json::array();
    for (const auto& t : R.reference) ref.push_back(palette_strings(t));
    j["reference"] = ref;
    j["scanned"] = R.scanned;
    j["templates"] = R.entries.size();
    j["max_distance"] = R.max_distance;
    j["distance_bound"] = max_distance;
    std::string csv = "index,palettes,W,bad_pairs,distance\n";
    for (std::size_t i = 0; i < R.entries.size(); ++i) {
      const auto& e = R.entries[i];
      csv += std::to_string(i) + ",\"" + palette_strings(e.t) + "\"," + e.weight.str() + "," + std::to_string(e.bad) + "," +
             std::to_string(e.distance) + "\n";
    }
    cc_report* r = make_report(j, R.max_distance <= max_distance);
    r->csv = csv;
    *out = r;
  });
}

cc_status cc_encode(const char* kind, const char* text, int d, cc_report** out) {
  return guarded([&] {
    require(kind, "kind");
    require(text, "text");
    require(out, "out");
    std::string k = kind;
    Template c = [&] {
      if (k == "digraph") return digraph_to_colouring(parse_digraph(text));
      if (k == "orgraph") return orgraph_to_colouring(parse_digraph(text));
      if (k == "tournament") return tournament_to_colouring(parse_digraph(text));
      if (k == "multigraph") return multigraph_to_colouring(parse_multigraph(text, d));
      throw Error(ErrorCode::invalid_argument, "unknown encoding '" + k + "'");
    }();
    ordered_json j = header("encode");
    j["kind"] = k;
    j["host"] = c.host().name();
    j["n"] = c.host().n;
    j["k"] = c.k();
    std::vector<int> colours;
    for (std::size_t e = 0; e < c.size(); ++e) colours.push_back(c.colour(e));
    j["colours"] = colours;
    if (k == "tournament") j["labels"] = tournament_labels();
    cc_report* r = make_report(j);
    r->artifacts.emplace_back("colouring.txt", format_template(c));
    *out = r;
  });
}

cc_status cc_file_digest(const char* path, char out[65]) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, std::string("cannot open ") + path);
    std::string hex = sha256_hex(in);
    std::copy(hex.begin(), hex.end(), out);
    out[64] = '\0';
  });
}

}  // extern "C"
