// colcont: command-line front end over the C API.
#include "colcont/colcont.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunError : std::runtime_error {
  RunError(cc_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  cc_status status;
};

void check(cc_status s, const std::string& context) {
  if (s == CC_OK) return;
  std::string msg = context + ": " + cc_status_name(s) + ": " + cc_last_error();
  switch (s) {
    case CC_INVALID_ARGUMENT:
    case CC_UNKNOWN_FAMILY:
    case CC_HOST_MISMATCH:
    case CC_PARSE_ERROR:
    case CC_UNSUPPORTED:
    case CC_NON_MONOTONE:
      throw UsageError(msg);
    default:
      throw RunError(s, msg);
  }
}

struct FamilyDeleter {
  void operator()(cc_family* f) const { cc_family_free(f); }
};
struct TemplateDeleter {
  void operator()(cc_template* t) const { cc_template_free(t); }
};
struct ReportDeleter {
  void operator()(cc_report* r) const { cc_report_free(r); }
};
using FamilyPtr = std::unique_ptr<cc_family, FamilyDeleter>;
using TemplatePtr = std::unique_ptr<cc_template, TemplateDeleter>;
using ReportPtr = std::unique_ptr<cc_report, ReportDeleter>;

FamilyPtr family(const std::string& name) {
  cc_family* f = nullptr;
  check(cc_family_create(name.c_str(), &f), "--family " + name);
  return FamilyPtr(f);
}

std::string read_file(const std::string& path, const std::string& flag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(flag + ": cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Range {
  int lo = 0;
  int hi = 0;
};

// "5" or "3..6"
Range parse_range(const std::string& text, const std::string& flag) {
  try {
    std::size_t dots = text.find("..");
    std::size_t used = 0;
    if (dots == std::string::npos) {
      int v = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {v, v};
    }
    Range r;
    r.lo = std::stoi(text.substr(0, dots), &used);
    if (used != dots) throw std::invalid_argument(text);
    std::string tail = text.substr(dots + 2);
    r.hi = std::stoi(tail, &used);
    if (used != tail.size() || r.hi < r.lo) throw std::invalid_argument(text);
    return r;
  } catch (const std::logic_error&) {
    throw UsageError(flag + ": expected an integer or a range lo..hi, got '" + text + "'");
  }
}

int single_n(const std::string& text) {
  Range r = parse_range(text, "--n");
  if (r.lo != r.hi) throw UsageError("--n: this command takes a single value, got '" + text + "'");
  return r.lo;
}

std::string utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Pipes and other non-regular inputs cannot be re-read, so they get no digest.
std::string digest(const std::string& path) {
  if (!fs::is_regular_file(path)) return "unavailable";
  char hex[65];
  check(cc_file_digest(path.c_str(), hex), "digest " + path);
  return hex;
}

// Flat key=value config; keys are long flag names. Flags given on the command line win.
std::vector<std::string> merge_config(const std::vector<std::string>& args, const std::string& path) {
  std::string text = read_file(path, "--config");
  std::vector<std::string> extra;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("--config: line " + std::to_string(lineno) + " has no '='");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) != 0) key = "--" + key;
    if (key == "--config") continue;
    bool given = false;
    for (const auto& a : args) given = given || a == key || a.rfind(key + "=", 0) == 0;
    if (given) continue;
    if (value == "true") {
      extra.push_back(key);
    } else if (value != "false") {
      extra.push_back(key);
      extra.push_back(value);
    }
  }
  std::vector<std::string> merged = args;
  merged.insert(merged.end(), extra.begin(), extra.end());
  return merged;
}

// Everything a run needs to be repeated: the resolved arguments plus bookkeeping.
struct Manifest {
  std::string command;
  std::vector<std::string> invocation;
  std::vector<std::string> argv;
  ordered_json options = ordered_json::object();
  ordered_json seeds = ordered_json::array();
  ordered_json inputs = ordered_json::object();
  std::string started;
  std::string finished;
};

int emit(const ReportPtr& report, const std::optional<std::string>& out, Manifest& m) {
  std::string json = cc_report_json(report.get());
  std::cout << json;
  m.finished = utc_now();
  if (out) {
    fs::path dir(*out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw RunError(CC_IO_ERROR, "--out: cannot create " + dir.string() + ": " + ec.message());
    auto write = [&](const std::string& name, const std::string& text) {
      std::ofstream f(dir / name, std::ios::binary);
      f << text;
      if (!f) throw RunError(CC_IO_ERROR, "cannot write " + (dir / name).string());
    };
    write("report.json", json);
    std::string csv = cc_report_csv(report.get());
    if (!csv.empty()) write("report.csv", csv);
    for (std::size_t i = 0; i < cc_report_artifact_count(report.get()); ++i) {
      const char* name = nullptr;
      const char* text = nullptr;
      check(cc_report_artifact(report.get(), i, &name, &text), "artifact");
      write(name, text);
    }
    ordered_json man;
    man["schema"] = 1;
    man["command"] = m.command;
    man["version"] = cc_version();
    man["invocation"] = m.invocation;
    man["argv"] = m.argv;
    man["options"] = m.options;
    man["seeds"] = m.seeds;
    man["inputs"] = m.inputs;
    man["started"] = m.started;
    man["finished"] = m.finished;
    man["passed"] = cc_report_passed(report.get()) != 0;
    write("manifest.json", man.dump(2) + "\n");
  }
  return cc_report_passed(report.get()) ? kExitOk : kExitFailed;
}

std::string solve_options(int threads, std::uint64_t node_budget, std::size_t witness_cap, bool no_dominance,
                          bool no_symmetry, bool no_chain) {
  ordered_json o;
  o["threads"] = threads;
  o["node_budget"] = node_budget;
  o["witness_cap"] = witness_cap;
  o["dominance"] = !no_dominance;
  o["symmetry"] = !no_symmetry;
  o["chain"] = !no_chain;
  return o.dump();
}

struct Cli {
  CLI::App app{"Extremal entropy, containers and transference for colouring templates", "colcont"};

  std::optional<std::string> out;
  std::string host = "kn";
  std::string n;
  std::string family_name;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::uint64_t node_budget = 0;
  std::size_t witness_cap = 64;
  bool no_dominance = false, no_symmetry = false, no_chain = false;
  bool cert = false;
  std::uint64_t seed = 0;
  std::string base;
  std::string case_name;
  std::string epsilon = "3/10", delta = "1/10", eps1, p_text;
  std::uint64_t samples = 10'000, template_samples = 1'000, exhaustive_budget = 2'000'000;
  std::size_t max_containers = 1'000'000, max_files = 10'000;
  int colour = 2;
  std::string eps_transfer = "1/20", p_transfer = "1/2", threshold = "4/5";
  std::uint64_t seed_count = 30;
  std::string theta = "1/2";
  std::uint64_t bad = 0;
  std::size_t max_distance = 2;
  std::uint64_t scan_budget = 100'000'000;
  std::string kind, input;
  int multiplicity = 3;
  std::string manifest_path;

  std::map<std::string, CLI::App*> subs;

  void add_solver_flags(CLI::App* s) {
    s->add_option("--threads", threads, "Worker threads");
    s->add_option("--node-budget", node_budget, "Stop after this many search nodes (0 = unlimited)");
    s->add_option("--witness-cap", witness_cap, "Keep at most this many optimal witnesses");
    s->add_flag("--no-dominance", no_dominance, "Search all palettes, not only dominance-closed ones");
    s->add_flag("--no-symmetry", no_symmetry, "Disable colour-symmetry reduction");
    s->add_flag("--no-chain", no_chain, "Disable bounds and seeds from the term n-1");
  }

  Cli() {
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    auto* s = subs["solve-ex"] = app.add_subcommand("solve-ex", "Extremal entropy ex(n, P) with witnesses");
    s->add_option("--host", host)->capture_default_str();
    s->add_option("--n", n)->required();
    s->add_option("--family", family_name)->required();
    s->add_flag("--cert", cert, "Fail unless the optimum is certified");
    add_solver_flags(s);

    s = subs["relative-ex"] = app.add_subcommand("relative-ex", "Relative extremal entropy below a base template");
    s->add_option("--base", base, "Template file")->required();
    s->add_option("--family", family_name)->required();
    s->add_flag("--cert", cert);
    add_solver_flags(s);

    s = subs["speed"] = app.add_subcommand("speed", "Exact |P_n| by enumeration");
    s->add_option("--host", host);
    s->add_option("--n", n)->required();
    s->add_option("--family", family_name)->required();
    s->add_option("--node-budget", node_budget);

    s = subs["density"] = app.add_subcommand("density", "ex(n, P) / g(n) over a range of n");
    s->add_option("--host", host);
    s->add_option("--n", n, "Range lo..hi")->required();
    s->add_option("--family", family_name)->required();
    add_solver_flags(s);

    s = subs["check-closed-forms"] = app.add_subcommand("check-closed-forms", "Compare solver output with closed forms");
    s->add_option("--case", case_name)->required();
    s->add_option("--n", n, "Range lo..hi")->required();
    add_solver_flags(s);

    s = subs["containers"] = app.add_subcommand("containers", "Build and verify a container family");
    s->add_option("--host", host);
    s->add_option("--n", n)->required();
    s->add_option("--family", family_name)->required();
    s->add_option("--epsilon", epsilon);
    s->add_option("--delta", delta);
    s->add_option("--eps1", eps1, "Sparsification epsilon (default epsilon * k^-r)");
    s->add_option("--p", p_text, "Override the sparsification probability");
    s->add_option("--seed", seed);
    s->add_option("--samples", samples);
    s->add_option("--template-samples", template_samples);
    s->add_option("--exhaustive-budget", exhaustive_budget);
    s->add_option("--max-containers", max_containers);
    s->add_option("--max-files", max_files, "Above this many containers write one combined file");

    s = subs["sparsify"] = app.add_subcommand("sparsify", "Sparsification statistics over many seeds");
    s->add_option("--host", host);
    s->add_option("--n", n)->required();
    s->add_option("--family", family_name)->required();
    s->add_option("--eps1", eps1);
    s->add_option("--p", p_text);
    s->add_option("--seed", seed, "First seed");
    s->add_option("--seeds", seed_count, "Number of seeds");

    s = subs["transfer"] = app.add_subcommand("transfer", "Transference experiment on random templates");
    s->add_option("--family", family_name)->required();
    s->add_option("--i", colour, "Monotone colour");
    s->add_option("--n", n)->required();
    s->add_option("--p", p_transfer);
    s->add_option("--eps", eps_transfer);
    s->add_option("--seed", seed, "First seed");
    s->add_option("--seeds", seed_count, "Number of seeds");
    s->add_option("--threshold", threshold, "Required pass frequency");
    add_solver_flags(s);

    s = subs["stability"] = app.add_subcommand("stability", "Exhaustive stability scan");
    s->add_option("--family", family_name)->required();
    s->add_option("--n", n)->required();
    s->add_option("--theta", theta);
    s->add_option("--bad", bad);
    s->add_option("--max-distance", max_distance);
    s->add_option("--budget", scan_budget, "Largest template space to scan");
    add_solver_flags(s);

    s = subs["encode"] = app.add_subcommand("encode", "Encode a digraph or multigraph as a colouring");
    s->add_option("--kind", kind)->required()->check(CLI::IsMember({"digraph", "orgraph", "tournament", "multigraph"}));
    s->add_option("--input", input, "Edge list file")->required();
    s->add_option("--d", multiplicity, "Multiplicity bound");

    s = subs["replay"] = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    s->add_option("--manifest", manifest_path)->required();

    for (auto& [name, sub] : subs)
      if (name != "replay") sub->add_option("--out", out, "Output directory");
    subs["replay"]->add_option("--out", out);
  }

  CLI::App* chosen() const { return app.get_subcommands().front(); }

  void record(Manifest& m) const {
    CLI::App* s = chosen();
    m.command = s->get_name();
    for (const CLI::Option* opt : s->get_options()) {
      std::string name = opt->get_name(false, true);
      if (name.empty() || name == "--help" || name == "--out" || name == "-h,--help") continue;
      if (name.rfind("--", 0) == 0) name = name.substr(2);
      if (opt->get_expected_min() == 0)
        m.options[name] = opt->count() > 0;
      else if (opt->count() > 0)
        m.options[name] = opt->results().front();
      else
        m.options[name] = opt->get_default_str();
    }
  }

  int run(Manifest& m) {
    const std::string cmd = chosen()->get_name();
    std::string so = solve_options(threads, node_budget, witness_cap, no_dominance, no_symmetry, no_chain);
    cc_report* raw = nullptr;

    if (cmd == "solve-ex" || cmd == "relative-ex") {
      FamilyPtr f = family(family_name);
      if (cmd == "solve-ex") {
        check(cc_solve_ex(host.c_str(), single_n(n), f.get(), so.c_str(), &raw), "solve-ex");
      } else {
        std::string text = read_file(base, "--base");
        m.inputs[base] = digest(base);
        cc_template* t = nullptr;
        check(cc_template_parse(text.c_str(), &t), "--base " + base);
        TemplatePtr tp(t);
        check(cc_relative_ex(tp.get(), f.get(), so.c_str(), &raw), "relative-ex");
      }
      ReportPtr r(raw);
      int code = emit(r, out, m);
      if (cert && !nlohmann::json::parse(cc_report_json(r.get())).at("certified").get<bool>()) {
        std::cerr << "colcont: optimum not certified within the node budget\n";
        return kExitFailed;
      }
      return code;
    }
    if (cmd == "speed") {
      FamilyPtr f = family(family_name);
      std::string o = ordered_json{{"node_budget", node_budget}}.dump();
      check(cc_speed(host.c_str(), single_n(n), f.get(), o.c_str(), &raw), "speed");
      return emit(ReportPtr(raw), out, m);
    }
    if (cmd == "density") {
      FamilyPtr f = family(family_name);
      Range r = parse_range(n, "--n");
      check(cc_density(host.c_str(), f.get(), r.lo, r.hi, so.c_str(), &raw), "density");
      return emit(ReportPtr(raw), out, m);
    }
    if (cmd == "check-closed-forms") {
      Range r = parse_range(n, "--n");
      check(cc_check_closed_forms(case_name.c_str(), r.lo, r.hi, so.c_str(), &raw), "check-closed-forms");
      return emit(ReportPtr(raw), out, m);
    }
    if (cmd == "containers") {
      FamilyPtr f = family(family_name);
      ordered_json o{{"epsilon", epsilon},
                     {"delta", delta},
                     {"seed", seed},
                     {"samples", samples},
                     {"template_samples", template_samples},
                     {"exhaustive_budget", exhaustive_budget},
                     {"max_containers", max_containers},
                     {"max_files", max_files}};
      if (!eps1.empty()) o["eps1"] = eps1;
      if (!p_text.empty()) o["p"] = p_text;
      m.seeds.push_back(seed);
      check(cc_containers(host.c_str(), single_n(n), f.get(), o.dump().c_str(), &raw), "containers");
      return emit(ReportPtr(raw), out, m);
    }
    if (cmd == "sparsify") {
      FamilyPtr f = family(family_name);
      ordered_json o{{"seed", seed}, {"seeds", seed_count}};
      if (!eps1.empty()) o["eps1"] = eps1;
      if (!p_text.empty()) o["p"] = p_text;
      for (std::uint64_t i = 0; i < seed_count; ++i) m.seeds.push_back(seed + i);
      check(cc_sparsify_stats(host.c_str(), single_n(n), f.get(), o.dump().c_str(), &raw), "sparsify");
      return emit(ReportPtr(raw), out, m);
    }
    if (cmd == "transfer") {
      FamilyPtr f = family(family_name);
      ordered_json o = ordered_json::parse(so);
      o["seed"] = seed;
      o["seeds"] = seed_count;
      o["threshold"] = threshold;
      for (std::uint64_t i = 0; i < seed_count; ++i) m.seeds.push_back(seed + i);
      check(cc_transfer(f.get(), colour, single_n(n), p_transfer.c_str(), eps_transfer.c_str(), o.dump().c_str(), &raw),
            "transfer");
      return emit(ReportPtr(raw), out, m);
    }
    if (cmd == "stability") {
      FamilyPtr f = family(family_name);
      ordered_json o = ordered_json::parse(so);
      o["max_distance"] = max_distance;
      o["budget"] = scan_budget;
      check(cc_stability(f.get(), single_n(n), theta.c_str(), bad, o.dump().c_str(), &raw), "stability");
      return emit(ReportPtr(raw), out, m);
    }
    if (cmd == "encode") {
      std::string text = read_file(input, "--input");
      m.inputs[input] = digest(input);
      check(cc_encode(kind.c_str(), text.c_str(), multiplicity, &raw), "encode");
      return emit(ReportPtr(raw), out, m);
    }
    throw UsageError("unknown subcommand " + cmd);
  }
};

int dispatch(std::vector<std::string> args, std::optional<std::string> forced_out = std::nullopt);

int replay(const std::string& path, const std::optional<std::string>& out) {
  ordered_json man;
  try {
    man = ordered_json::parse(read_file(path, "--manifest"));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("--manifest: " + std::string(e.what()));
  }
  if (!man.contains("argv") || !man["argv"].is_array()) throw UsageError("--manifest: no argv array");
  if (man.value("version", "") != cc_version())
    std::cerr << "colcont: manifest written by version " << man.value("version", "?") << ", running " << cc_version() << "\n";
  return dispatch(man["argv"].get<std::vector<std::string>>(), out);
}

int dispatch(std::vector<std::string> args, std::optional<std::string> forced_out) {
  Manifest m;
  m.started = utc_now();
  m.invocation = args;

  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      std::string path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      m.inputs[path] = digest(path);
      args = merge_config(args, path);
      break;
    }
  }
  // The recorded argv has no --out so a replay can point elsewhere.
  for (std::size_t i = 0; i < args.size(); ++i) {
    bool has_value = args[i] == "--out" && i + 1 < args.size();
    if (!has_value && args[i].rfind("--out=", 0) != 0) {
      m.argv.push_back(args[i]);
      continue;
    }
    if (!forced_out) forced_out = has_value ? args[i + 1] : args[i].substr(6);
    if (has_value) ++i;
  }
  std::vector<std::string> parse_args = m.argv;
  if (forced_out) {
    parse_args.push_back("--out");
    parse_args.push_back(*forced_out);
  }

  Cli cli;
  if (!m.argv.empty() && m.argv[0].rfind("-", 0) != 0 && !cli.subs.count(m.argv[0])) {
    std::cerr << "colcont: unknown subcommand '" << m.argv[0] << "'\n";
    return kExitUsage;
  }
  std::vector<std::string> reversed(parse_args.rbegin(), parse_args.rend());
  try {
    cli.app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return cli.app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return cli.app.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.app.exit(e);
    return kExitUsage;
  }
  if (cli.chosen()->get_name() == "replay") return replay(cli.manifest_path, cli.out);
  cli.record(m);
  return cli.run(m);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(args);
  } catch (const UsageError& e) {
    std::cerr << "colcont: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RunError& e) {
    std::cerr << "colcont: " << e.what() << "\n";
    return kExitFailed;
  } catch (const std::exception& e) {
    std::cerr << "colcont: " << e.what() << "\n";
    return kExitFailed;
  }
}
