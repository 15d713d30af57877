#include "colcont/experiments.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

namespace colcont {

namespace {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double log_k(const BigInt& w, int k) {
  std::size_t bits = boost::multiprecision::msb(w);
  double l = bits < 60 ? std::log2(w.convert_to<double>())
                       : std::log2(BigInt(w >> (bits - 52)).convert_to<double>()) + static_cast<double>(bits - 52);
  return l / std::log2(static_cast<double>(k));
}

}  // namespace

Template sample_random_template(const RandomTemplateSpec& spec) {
  validate_term(spec.host);
  validate_colour_count(spec.k);
  if (spec.base_colour < 1 || spec.base_colour > spec.k) throw Error(ErrorCode::invalid_argument, "base colour out of range");
  if (spec.p < 0 || spec.p > 1) throw Error(ErrorCode::invalid_argument, "p must lie in [0,1]");
  std::vector<Palette> palettes(spec.host.ground_size());
  for (std::size_t x = 0; x < palettes.size(); ++x)
    palettes[x] = draw_below(keyed_draw(spec.seed, streams::random_template, x), spec.p) ? Palette::full(spec.k)
                                                                                        : Palette::single(spec.base_colour);
  return Template(spec.host, spec.k, std::move(palettes));
}

bool is_i_monotone(const ForbiddenFamily& F, int colour) {
  return is_monotone(F, colour, F.term().n) && is_monotone(F, colour, F.term().n + 1);
}

TransferenceReport transference_experiment(const ForbiddenFamily& F, int colour, int n, const Rational& p,
                                           const Rational& epsilon, const std::vector<std::uint64_t>& seeds,
                                           const SolveOptions& options) {
  if (!is_i_monotone(F, colour))
    throw Error(ErrorCode::non_monotone, F.name() + " is not monotone in colour " + std::to_string(colour));
  if (epsilon <= 0) throw Error(ErrorCode::invalid_argument, "epsilon must be positive");
  HostTerm host{F.term().kind, n};
  TransferenceReport R;
  R.family = F.name();
  R.k = F.k();
  R.colour = colour;
  R.n = n;
  R.p = p;
  R.epsilon = epsilon;

  SolveOptions base = options;
  base.witness_cap = 1;
  ExtremalResult extremal = solve_ex(host, F, base);
  if (!extremal.certified) throw Error(ErrorCode::budget_exceeded, "ex(n, P) was not certified within the budget");
  R.w_star = extremal.w_star;
  const Template& t_star = extremal.witnesses.front();
  R.ex = log_k(R.w_star, F.k());
  Rational slack = epsilon * n * n;  // eps n^2 = c / d
  R.lower_target = to_double(p) * (R.ex - to_double(slack));
  R.upper_target = to_double(p) * (R.ex + 2 * to_double(slack));

  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  const std::uint64_t a = numerator(p).convert_to<std::uint64_t>(), b = denominator(p).convert_to<std::uint64_t>();
  const std::uint64_t c = numerator(slack).convert_to<std::uint64_t>(), d = denominator(slack).convert_to<std::uint64_t>();

  R.rows.resize(seeds.size());
  SolveOptions inner = options;
  inner.threads = 1;
  inner.witness_cap = 1;
  inner.seeds = {t_star};
  parallel_for(seeds.size(), options.threads, [&](std::size_t s) {
    TransferenceRow& row = R.rows[s];
    row.seed = seeds[s];
    Template T = sample_random_template({host, F.k(), colour, p, seeds[s]});
    for (auto palette : T.palettes()) row.full_elements += palette.size() == F.k();
    ExtremalResult rel = relative_ex(T, F, inner);
    row.w_T = rel.w_star;
    row.certified = rel.certified;
    row.nodes = rel.nodes;
    row.seconds = rel.seconds;
    row.meet_weight = weight(meet(t_star, T));
    row.meet_bound_ok = row.w_T >= row.meet_weight;
    // p (ex - c/d) <= ex_T  <=>  W*^{ad} <= W_T^{bd} k^{ac}
    BigInt lhs_T = big_pow(row.w_T, b * d);
    BigInt rhs_star = big_pow(R.w_star, a * d);
    row.lower_ok = rhs_star <= lhs_T * big_pow(F.k(), a * c);
    // ex_T <= p (ex + 2c/d)  <=>  W_T^{bd} <= W*^{ad} k^{2ac}
    row.upper_ok = lhs_T <= rhs_star * big_pow(F.k(), 2 * a * c);
    row.ent = log_k(row.w_T, F.k());
    row.margin = std::min(row.ent - R.lower_target, R.upper_target - row.ent);
  });
  double worst = 0.0;
  for (const auto& row : R.rows) {
    if (row.lower_ok && row.upper_ok) ++R.passes;
    if (!row.meet_bound_ok) R.all_meet_bounds = false;
    if (!R.worst_seed || row.margin < worst) {
      worst = row.margin;
      R.worst_seed = row.seed;
    }
  }
  R.pass_frequency = seeds.empty() ? Rational(0) : Rational(R.passes, seeds.size());
  return R;
}

StabilityScanResult stability_scan(const ForbiddenFamily& F, int n, const Rational& theta, std::uint64_t bad,
                                   std::optional<std::vector<Template>> reference, std::uint64_t budget,
                                   const SolveOptions& options) {
  HostTerm host{F.term().kind, n};
  validate_term(host);
  const int k = F.k();
  const std::size_t g = host.ground_size();
  BigInt space = big_pow((1 << k) - 1, g);
  if (space > budget) throw Error(ErrorCode::budget_exceeded, "template space " + space.str() + " exceeds the scan budget");
  if (theta < 0) throw Error(ErrorCode::invalid_argument, "theta must be nonnegative");

  StabilityScanResult R;
  R.family = F.name();
  R.n = n;
  R.theta = theta;
  R.bad_budget = bad;
  SolveOptions opts = options;
  ExtremalResult extremal = solve_ex(host, F, opts);
  R.w_star = extremal.w_star;
  R.reference = reference ? *reference : extremal.witnesses;

  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  const BigInt num = numerator(theta), den = denominator(theta);
  const BigInt threshold_rhs = num * R.w_star;  // W * den >= num * W*

  EmbeddingSet emb(F.term().kind, F.term().n, n);
  std::vector<std::vector<std::uint32_t>> closing(g);
  for (std::size_t i = 0; i < emb.size(); ++i)
    closing[*std::max_element(emb.row(i), emb.row(i) + emb.arity())].push_back(static_cast<std::uint32_t>(i));
  std::vector<Palette> t(g);
  std::function<void(std::size_t, std::uint64_t)> walk = [&](std::size_t x, std::uint64_t bad_so_far) {
    if (x == g) {
      ++R.scanned;
      Template tt(host, k, t);
      BigInt w = weight(tt);
      if (w * den < threshold_rhs) return;
      StabilityEntry entry{tt, w, bad_so_far, distance_to_family(R.reference, tt)};
      R.max_distance = std::max(R.max_distance, entry.distance);
      R.entries.push_back(std::move(entry));
      return;
    }
    for (std::uint32_t bits = 1; bits < (1u << k); ++bits) {
      t[x] = Palette::from_bits(static_cast<std::uint16_t>(bits));
      std::uint64_t added = 0;
      for (auto e : closing[x]) {
        const std::uint32_t* row = emb.row(e);
        for (std::size_t m = 0; m < F.size(); ++m) {
          bool fits = true;
          for (std::size_t j = 0; j < F.arity() && fits; ++j) fits = t[row[j]].contains(F.member(m)[j]);
          added += fits;
        }
      }
      if (bad_so_far + added <= bad) walk(x + 1, bad_so_far + added);
    }
  };
  walk(0, 0);
  return R;
}

SparsificationStats sparsification_statistics(HostTerm host, const ForbiddenFamily& F, const Rational& eps1,
                                              const std::vector<std::uint64_t>& seeds, std::optional<Rational> p) {
  SparsificationStats S;
  S.family = F.name();
  S.host = host;
  S.eps1 = eps1;
  ReductionHypergraph H = build_reduction_hypergraph(host, F);
  for (auto seed : seeds) {
    Sparsified sp = sparsify(H, eps1, seed, p);
    SparsificationRun run;
    run.seed = seed;
    run.report = sp.report;
    const Rational q = sp.report.p;
    run.markov_ok = Rational(sp.report.Y_Hp) <= 3 * q * q * Rational(sp.report.Y_H);
    Rational kept = Rational(sp.report.e_Hp, std::max<std::uint64_t>(1, sp.report.e_H));
    run.chernoff_ok = kept >= q / 2 && kept <= 3 * q / 2;
    S.p = q;
    S.e_H = sp.report.e_H;
    S.Y_H = sp.report.Y_H;
    S.f1 += run.report.F1;
    S.f2 += run.report.F2;
    S.markov += run.markov_ok;
    S.chernoff += run.chernoff_ok;
    S.runs.push_back(std::move(run));
  }
  return S;
}

}  // namespace colcont
