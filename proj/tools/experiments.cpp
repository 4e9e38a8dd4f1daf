#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <random>
#include <set>
#include <thread>

#include "optstab/errors.hpp"
#include "optstab/instances.hpp"
#include "optstab/ladder.hpp"
#include "optstab/linear.hpp"
#include "optstab/scheme.hpp"

namespace optstab::cli {

namespace {

const std::set<std::string> kCommonKeys = {"kind", "seed", "threads", "output", "description"};

std::uint64_t splitmix(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Checked view of a configuration object with a closed set of keys.
class Cfg {
 public:
  Cfg(const Json& j, std::string where, std::set<std::string> allowed) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(where_ + ": expected an object");
    for (const auto& [key, _] : j.items())
      if (!allowed.count(key)) throw ConfigError(where_ + ": unknown field '" + key + "'");
  }

  [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

  [[nodiscard]] const Json& at(const std::string& key) const {
    if (!has(key)) throw ConfigError(where_ + ": missing field '" + key + "'");
    return j_.at(key);
  }

  [[nodiscard]] double num(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      return at(key).get<double>();
    }
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where_ + ": field '" + key + "' must be a number");
    return v.get<double>();
  }

  [[nodiscard]] long integer(const std::string& key, std::optional<long> fallback = std::nullopt) const {
    if (!has(key) && fallback) return *fallback;
    const auto& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(where_ + ": field '" + key + "' must be an integer");
    return v.get<long>();
  }

  [[nodiscard]] std::string str(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
    if (!has(key) && fallback) return *fallback;
    const auto& v = at(key);
    if (!v.is_string()) throw ConfigError(where_ + ": field '" + key + "' must be a string");
    return v.get<std::string>();
  }

  [[nodiscard]] bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where_ + ": field '" + key + "' must be a boolean");
    return v.get<bool>();
  }

  [[nodiscard]] const std::string& where() const { return where_; }

 private:
  const Json& j_;
  std::string where_;
};

std::set<std::string> keys(std::initializer_list<const char*> extra) {
  auto out = kCommonKeys;
  for (const char* k : extra) out.insert(k);
  return out;
}

std::optional<std::uint64_t> seed_of(const Cfg& c) {
  if (!c.has("seed")) return std::nullopt;
  const auto& v = c.at("seed");
  if (!v.is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::uint64_t require_seed(const Cfg& c, const std::string& why) {
  auto s = seed_of(c);
  if (!s) throw ConfigError("seed is required: " + why);
  return *s;
}

unsigned thread_count(const Cfg& c) {
  const long t = c.integer("threads", 0);
  if (t < 0) throw ConfigError("threads must be nonnegative");
  if (t > 0) return static_cast<unsigned>(t);
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Evaluates fn(0..n-1) on a pool of workers; results are kept in index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, unsigned threads, const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned k = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  for (unsigned i = 0; i + 1 < k; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<long> int_range(const Json& j, const std::string& what) {
  std::vector<long> out;
  if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer() && j[0] <= j[1] &&
      j.size() == 2) {
    for (long v = j[0].get<long>(); v <= j[1].get<long>(); ++v) out.push_back(v);
    return out;
  }
  throw ConfigError(what + ": expected [first, last] integers");
}

std::vector<double> number_list(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ConfigError(what + ": expected a nonempty array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(what + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

PseudoDistance parse_distance(const Json& j) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "euclidean") return euclidean_distance();
    if (name == "absolute") return absolute_distance();
    if (name == "energy_ladder") return energy_ladder_distance();
    throw ConfigError("unknown distance '" + name + "'");
  }
  Cfg c(j, "distance", {"type", "gauge", "reversed"});
  if (c.str("type") != "gauge") throw ConfigError("distance: type must be 'gauge'");
  const GaugeSet g = gauge_from_json(c.at("gauge"));
  if (c.flag("reversed", false)) return reversed_magnitude_distance("gauge", g.as_magnitude(), g.dim());
  return magnitude_distance("gauge", g.as_magnitude(), g.dim());
}

ObjectiveFn parse_objective(const Json& j) {
  Cfg c(j, "objective", {"type", "xs", "ys", "c", "c0", "center", "value", "q", "name", "K", "lambda"});
  const auto type = c.str("type");
  ObjectiveFn f;
  if (type == "piecewise_linear") {
    f = piecewise_linear(number_list(c.at("xs"), "xs"), number_list(c.at("ys"), "ys"));
  } else if (type == "linear") {
    f = linear_objective(vector_from_json(c.at("c")), c.num("c0", 0.0));
  } else if (type == "distance") {
    f = distance_objective(vector_from_json(c.at("center")));
  } else if (type == "constant") {
    f = constant_objective(c.num("value"));
  } else if (type == "quadratic") {
    f = quadratic_objective(matrix_from_json(c.at("q")), vector_from_json(c.at("c")), c.num("c0", 0.0));
  } else if (type == "ce33") {
    f = ce33_objective(static_cast<int>(c.integer("K", 60)));
  } else if (type == "ce34") {
    f = ce34_objective(static_cast<int>(c.integer("K", 60)));
  } else {
    throw ConfigError("unknown objective type '" + type + "'");
  }
  if (c.has("lambda")) f.regularity = Lipschitz{c.num("lambda")};
  return f;
}

bool exact_kind(const SetModel& a) {
  return a.get<FiniteCloud>() || a.get<IntervalUnion>() || a.get<AxisSegments>();
}

// ---------------------------------------------------------------------------

ExperimentResult run_counterexample(const Json& j) {
  Cfg c(j, "counterexample", keys({"instance", "K", "j"}));
  const auto inst = c.str("instance");
  if (inst != "ce33" && inst != "ce34") throw ConfigError("counterexample: instance must be ce33 or ce34");
  const int k_max = static_cast<int>(c.integer("K", 60));
  const bool is33 = inst == "ce33";
  const auto js = c.has("j") ? int_range(c.at("j"), "j") : int_range(Json::array({is33 ? 2 : 1, 50}), "j");
  const auto f = is33 ? ce33_objective(k_max) : ce34_objective(k_max);
  const auto d = is33 ? absolute_distance() : euclidean_distance(k_max);
  const auto a = is33 ? ce33_set(k_max) : ce34_set(k_max);
  const auto inf_a = inf_over(f, a).value, sup_a = sup_over(f, a).value;

  struct Row {
    long j;
    ExtendedReal dh, inf_j, sup_j;
  };
  const auto rows = parallel_map<Row>(js.size(), thread_count(c), [&](std::size_t i) {
    const int jj = static_cast<int>(js[i]);
    const auto aj = is33 ? ce33_perturbed(k_max, jj) : ce34_perturbed(k_max, jj);
    return Row{js[i], hausdorff(d, a, aj).value, inf_over(f, aj).value, sup_over(f, aj).value};
  });

  ExperimentResult r{"counterexample",
                     Table({"j", "D_H", "expected_D_H", "inf_A_j", "sup_A_j", "inf_A", "sup_A", "verdict"}),
                     std::nullopt, Json::object()};
  bool monotone = true;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const double expected = 1.0 / static_cast<double>(row.j);
    const bool ok = row.inf_j == ExtendedReal(-1.0) && row.sup_j == ExtendedReal(1.0) && inf_a == ExtendedReal(0.0) &&
                    sup_a == ExtendedReal(0.0) && std::abs(row.dh.value() - expected) <= 1e-12;
    if (i > 0 && !(row.dh < rows[i - 1].dh)) monotone = false;
    if (!ok) ++failures;
    r.table.add_row({std::to_string(row.j), fmt(row.dh), fmt(expected), fmt(row.inf_j), fmt(row.sup_j), fmt(inf_a),
                     fmt(sup_a), ok ? "pass" : "fail"});
  }
  r.pass = failures == 0 && monotone;
  r.summary = {{"instance", inst}, {"K", k_max}, {"levels", rows.size()}, {"failures", failures},
               {"D_H_strictly_decreasing", monotone}};
  return r;
}

ExperimentResult run_hausdorff(const Json& j) {
  Cfg c(j, "hausdorff", keys({"distance", "a", "b", "budget", "orientation"}));
  const auto d = parse_distance(c.has("distance") ? c.at("distance") : Json("euclidean"));
  const auto a = set_from_json(c.at("a"));
  const auto b = set_from_json(c.at("b"));
  DistanceOptions opt;
  opt.budget = static_cast<std::size_t>(c.integer("budget", 4096));
  if (!exact_kind(a) || !exact_kind(b)) opt.seed = require_seed(c, "a set is sampled");
  else if (auto s = seed_of(c)) opt.seed = *s;
  const auto o = c.str("orientation", "forward");
  if (o != "forward" && o != "reversed") throw ConfigError("orientation must be 'forward' or 'reversed'");
  opt.orientation = o == "forward" ? Orientation::forward : Orientation::reversed;

  const auto dd = set_set_distance(d, a, b, opt);
  const auto ab = asym_hausdorff(d, a, b, opt);
  const auto ba = asym_hausdorff(d, b, a, opt);
  const auto h = hausdorff(d, a, b, opt);
  ExperimentResult r{"hausdorff", Table({"quantity", "value", "mode", "sample_budget"}), std::nullopt, Json::object()};
  auto add = [&](const char* q, const DistanceReport& rep) {
    r.table.add_row({q, fmt(rep.value), to_string(rep.mode), std::to_string(rep.sample_budget)});
  };
  add("d(A,B)", dd);
  add("D_asyH(A,B)", ab);
  add("D_asyH(B,A)", ba);
  add("D_H(A,B)", h);
  r.pass = dd.value <= ab.value && ab.value <= h.value;
  r.summary = {{"distance", d.name()}, {"chain_inequality", r.pass}, {"D_H", to_json(h.value)}};
  return r;
}

// Random Lipschitz piecewise-linear objective on [0, 100] and two clouds.
struct RandomTrial {
  double lambda;
  ObjectiveFn f;
  SetModel a, b;
};

RandomTrial random_trial(std::uint64_t seed, double lmin, double lmax, int max_points, int max_breaks) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lambda = lmin + (lmax - lmin) * unit(rng);
  const int nb = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::max(1, max_breaks - 1)));
  std::vector<double> xs(static_cast<std::size_t>(nb));
  for (auto& x : xs) x = 100.0 * unit(rng);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> ys{100.0 * (unit(rng) - 0.5)};
  for (std::size_t i = 1; i < xs.size(); ++i)
    ys.push_back(ys.back() + lambda * (2.0 * unit(rng) - 1.0) * (xs[i] - xs[i - 1]));
  auto f = piecewise_linear(xs, ys, "random_pl");
  f.regularity = Lipschitz{lambda};
  auto cloud_of = [&] {
    const int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_points));
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i) pts.push_back(pt({100.0 * unit(rng)}));
    return cloud(std::move(pts));
  };
  auto a = cloud_of();
  auto b = cloud_of();
  return {lambda, std::move(f), std::move(a), std::move(b)};
}

ExperimentResult run_stability(const Json& j) {
  Cfg c(j, "stability", keys({"objective", "distance", "pairs", "eps", "diagnostic", "random", "budget", "tolerance"}));
  StabilityOptions opt;
  opt.diagnostic = c.flag("diagnostic", false);
  opt.tol = c.num("tolerance", kOptTolerance);
  opt.distance.budget = static_cast<std::size_t>(c.integer("budget", 4096));
  opt.opt.budget = opt.distance.budget;
  const double eps = c.num("eps", 0.1);

  if (c.has("random")) {
    if (c.has("pairs") || c.has("objective")) throw ConfigError("stability: 'random' excludes 'pairs' and 'objective'");
    const auto seed = require_seed(c, "random stability trials");
    Cfg rc(c.at("random"), "random", {"trials", "lambda_min", "lambda_max", "max_points", "max_breaks"});
    const auto trials = static_cast<std::size_t>(rc.integer("trials", 500));
    const double lmin = rc.num("lambda_min", 0.1), lmax = rc.num("lambda_max", 10.0);
    const int max_points = static_cast<int>(rc.integer("max_points", 30));
    const int max_breaks = static_cast<int>(rc.integer("max_breaks", 20));
    if (!(0 < lmin && lmin <= lmax) || max_points < 1 || max_breaks < 2) throw ConfigError("random: bad ranges");
    const auto d = absolute_distance();
    const auto rows = parallel_map<std::pair<double, StabilityRow>>(trials, thread_count(c), [&](std::size_t i) {
      auto t = random_trial(splitmix(seed, i), lmin, lmax, max_points, max_breaks);
      const std::vector<std::pair<SetModel, SetModel>> pairs{{t.a, t.b}};
      auto rep = check_finite_stability(t.f, d, pairs, eps, opt);
      rep.rows[0].pair_id = i;
      return std::make_pair(t.lambda, rep.rows[0]);
    });
    ExperimentResult r{"stability",
                       Table({"pair_id", "lambda", "D_H", "sup_A", "sup_A'", "inf_A", "inf_A'", "bound", "slack",
                              "verdict"}),
                       std::nullopt, Json::object()};
    std::size_t violations = 0;
    for (const auto& [lambda, row] : rows) {
      if (row.verdict != "pass") ++violations;
      r.table.add_row({std::to_string(row.pair_id), fmt(lambda), fmt(row.d_h), fmt(row.sup_a), fmt(row.sup_b),
                       fmt(row.inf_a), fmt(row.inf_b), fmt(row.bound), fmt(row.slack), row.verdict});
    }
    r.pass = violations == 0;
    r.summary = {{"trials", trials}, {"violations", violations}};
    return r;
  }

  const auto f = parse_objective(c.at("objective"));
  const auto d = parse_distance(c.has("distance") ? c.at("distance") : Json("euclidean"));
  const auto& pj = c.at("pairs");
  if (!pj.is_array() || pj.empty()) throw ConfigError("stability: pairs must be a nonempty array");
  std::vector<std::pair<SetModel, SetModel>> pairs;
  bool sampled = false;
  for (const auto& p : pj) {
    if (!p.is_array() || p.size() != 2) throw ConfigError("stability: each pair is [set, set]");
    pairs.emplace_back(set_from_json(p[0]), set_from_json(p[1]));
    sampled = sampled || !exact_kind(pairs.back().first) || !exact_kind(pairs.back().second);
  }
  if (sampled) opt.distance.seed = opt.opt.seed = require_seed(c, "a set is sampled");
  const auto rep = check_finite_stability(f, d, pairs, eps, opt);
  ExperimentResult r{"stability",
                     Table({"pair_id", "D_H", "D_H_mode", "sup_A", "sup_A'", "inf_A", "inf_A'", "delta_used", "bound",
                            "slack", "verdict"}),
                     std::nullopt, Json::object()};
  for (const auto& row : rep.rows)
    r.table.add_row({std::to_string(row.pair_id), fmt(row.d_h), to_string(row.d_h_mode), fmt(row.sup_a),
                     fmt(row.sup_b), fmt(row.inf_a), fmt(row.inf_b), fmt(row.delta_used), fmt(row.bound),
                     fmt(row.slack), row.verdict});
  r.pass = rep.all_pass;
  r.summary = {{"regularity", rep.regularity}, {"diagnostic", opt.diagnostic}, {"all_pass", rep.all_pass}};
  return r;
}

Json limsup_json(const LimsupReport& l) {
  Json out = {{"eps", l.eps}, {"verdict", l.verdict}};
  out["delta"] = l.delta ? Json(*l.delta) : Json(nullptr);
  if (l.value_jump) out["value_jump"] = to_json(*l.value_jump);
  if (!l.regularity_flag.empty()) out["regularity_flag"] = l.regularity_flag;
  return out;
}

ExperimentResult run_parametric(const Json& j) {
  Cfg c(j, "parametric", keys({"instance", "mode", "t0", "probes", "eps", "pairs", "K", "budget"}));
  const auto inst = c.str("instance");
  if (inst != "affine_whole" && inst != "mixed_box" && inst != "ce33")
    throw ConfigError("parametric: instance must be affine_whole, mixed_box or ce33");
  InstanceParams params;
  if (c.has("K")) params["K"] = static_cast<double>(c.integer("K"));
  const auto entry = build(inst, params);
  const auto mode = c.str("mode", "inf");
  if (mode != "inf" && mode != "sup") throw ConfigError("parametric: mode must be 'inf' or 'sup'");
  const ValueFunction v{mode == "inf" ? ValueMode::inf : ValueMode::sup, *entry.family, *entry.objective};
  DistanceOptions dopt;
  OptOptions oopt;
  dopt.budget = oopt.budget = static_cast<std::size_t>(c.integer("budget", 4096));
  if (auto s = seed_of(c)) dopt.seed = oopt.seed = *s;

  const auto probes_raw = number_list(c.at("probes"), "probes");
  std::vector<Param> probes;
  for (double t : probes_raw) probes.push_back(pt({t}));
  const Param t0 = pt({c.num("t0", 0.0)});
  const double eps = c.num("eps", 0.1);

  ExperimentResult r{"parametric", Table({"t", "phi_value", "mode"}), std::nullopt, Json::object()};
  bool sampled = false;
  for (const auto& t : probes) {
    const auto val = eval_value_function(v, t, oopt);
    sampled = sampled || val.mode == EvalMode::sampled;
    r.table.add_row({fmt(t[0]), fmt(val.value), to_string(val.mode)});
  }
  const auto sets = empirical_hausdorff_limsup(*entry.family, t0, probes, eps, dopt, v);
  const auto values = empirical_value_continuity(v, t0, probes, eps, oopt);
  bool pass = sets.verdict == "holds" && (values.verdict == "holds" || !sets.regularity_flag.empty());
  r.summary = {{"instance", inst}, {"set_continuity", limsup_json(sets)}, {"value_continuity", limsup_json(values)}};
  if (c.has("pairs")) {
    std::vector<std::pair<Param, Param>> pairs;
    for (const auto& p : c.at("pairs")) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw ConfigError("parametric: each pair is [t, s]");
      pairs.emplace_back(pt({p[0].get<double>()}), pt({p[1].get<double>()}));
    }
    const auto lip = certify_value_lipschitz(v, pairs, 1e-9, oopt);
    Table pt_table({"t", "s", "d_I", "bound", "observed", "slack"});
    for (const auto& row : lip.rows)
      pt_table.add_row({fmt(row.t[0]), fmt(row.s[0]), fmt(row.d_i), fmt(row.bound), fmt(row.observed), fmt(row.slack)});
    r.pairs = std::move(pt_table);
    pass = pass && lip.all_pass;
    r.summary["lipschitz"] = {{"all_pass", lip.all_pass}, {"worst_ratio", lip.worst_ratio}};
    if (lip.global_constant) r.summary["lipschitz"]["global_constant"] = *lip.global_constant;
  }
  if (sampled && !seed_of(c)) throw ConfigError("seed is required: value function evaluation was sampled");
  r.pass = pass;
  return r;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, long rows, long cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  const long rank = 1 + static_cast<long>(rng() % static_cast<std::uint64_t>(std::min(rows, cols)));
  Eigen::MatrixXd u(rows, rank), w(rank, cols);
  for (long i = 0; i < rows; ++i)
    for (long k = 0; k < rank; ++k) u(i, k) = g(rng);
  for (long k = 0; k < rank; ++k)
    for (long i = 0; i < cols; ++i) w(k, i) = g(rng);
  return u * w;
}

ExperimentResult run_hoffman(const Json& j) {
  Cfg c(j, "hoffman", keys({"matrix", "pairs", "random", "tolerance"}));
  const double tol = c.num("tolerance", kHoffmanTolerance);
  using Pair = std::pair<Eigen::VectorXd, Eigen::VectorXd>;
  ExperimentResult r{"hoffman",
                     Table({"trial", "rows", "cols", "rank", "s", "t", "D_H", "bound", "slack", "translation_residual",
                            "pass"}),
                     std::nullopt, Json::object()};
  auto emit = [&](std::size_t trial, const LinearMap& lm, const HoffmanRow& row) {
    r.table.add_row({std::to_string(trial), std::to_string(lm.rows()), std::to_string(lm.cols()),
                     std::to_string(lm.rank), fmt(row.s), fmt(row.t), fmt(row.d_h), fmt(row.bound), fmt(row.slack),
                     fmt(row.translation_residual), fmt(row.pass)});
  };
  std::size_t violations = 0;
  if (c.has("random")) {
    if (c.has("matrix") || c.has("pairs")) throw ConfigError("hoffman: 'random' excludes 'matrix' and 'pairs'");
    const auto seed = require_seed(c, "random Hoffman trials");
    Cfg rc(c.at("random"), "random", {"trials", "max_rows", "max_cols"});
    const auto trials = static_cast<std::size_t>(rc.integer("trials", 500));
    const long max_rows = rc.integer("max_rows", 4), max_cols = rc.integer("max_cols", 6);
    if (max_rows < 1 || max_cols < 1) throw ConfigError("random: dimensions must be positive");
    const auto rows = parallel_map<std::pair<LinearMap, HoffmanRow>>(trials, thread_count(c), [&](std::size_t i) {
      std::mt19937_64 rng(splitmix(seed, i));
      const long m = 1 + static_cast<long>(rng() % static_cast<std::uint64_t>(max_rows));
      const long n = 1 + static_cast<long>(rng() % static_cast<std::uint64_t>(max_cols));
      const auto lm = decompose(random_matrix(rng, m, n));
      std::normal_distribution<double> g(0.0, 1.0);
      Eigen::VectorXd x(n), y(n);
      for (long k = 0; k < n; ++k) {
        x[k] = g(rng);
        y[k] = g(rng);
      }
      const AffineFamily fam(lm, pseudo_inverse(lm));
      const std::vector<Pair> pairs{{lm.matrix * x, lm.matrix * y}};
      const auto rep = hoffman_check(fam, euclidean_gauge(), pairs, tol);
      return std::make_pair(lm, rep.rows[0]);
    });
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].second.pass) ++violations;
      emit(i, rows[i].first, rows[i].second);
    }
    r.summary = {{"trials", trials}, {"violations", violations}};
  } else {
    const auto lm = decompose(matrix_from_json(c.at("matrix")));
    std::vector<Pair> pairs;
    for (const auto& p : c.at("pairs")) {
      if (!p.is_array() || p.size() != 2) throw ConfigError("hoffman: each pair is [s, t]");
      pairs.emplace_back(vector_from_json(p[0]), vector_from_json(p[1]));
    }
    const AffineFamily fam(lm, pseudo_inverse(lm));
    const auto rep = hoffman_check(fam, euclidean_gauge(), pairs, tol);
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      if (!rep.rows[i].pass) ++violations;
      emit(i, lm, rep.rows[i]);
    }
    r.summary = {{"alpha", rep.alpha}, {"violations", violations}};
  }
  r.pass = violations == 0;
  return r;
}

GaugeSpec parse_gauge_spec(const Json& j, const std::string& where) {
  if (j.is_string()) {
    if (j.get<std::string>() == "euclidean") return euclidean_gauge();
    throw ConfigError(where + ": unknown gauge '" + j.get<std::string>() + "'");
  }
  Cfg c(j, where, {"type", "gauge", "kappa", "name"});
  if (c.str("type") != "polytope") throw ConfigError(where + ": type must be 'polytope'");
  return polytope_gauge(c.str("name", where), gauge_from_json(c.at("gauge")), c.num("kappa", 1.0));
}

ExperimentResult run_egi(const Json& j) {
  Cfg c(j, "egi", keys({"matrix", "s_x", "s_y", "eta_samples", "inflation", "range_points"}));
  const auto seed = require_seed(c, "eta estimation and range sampling");
  const auto lm = decompose(matrix_from_json(c.at("matrix")));
  const auto s_x = parse_gauge_spec(c.has("s_x") ? c.at("s_x") : Json("euclidean"), "s_x");
  const auto s_y = parse_gauge_spec(c.has("s_y") ? c.at("s_y") : Json("euclidean"), "s_y");
  EgiOptions eo;
  eo.eta_samples = static_cast<std::size_t>(c.integer("eta_samples", 100000));
  eo.inflation = c.num("inflation", 1.1);
  eo.seed = seed;
  const auto pinv = pseudo_inverse(lm);
  const auto egi = restricted_inverse_egi(lm, s_x, s_y, eo);
  const auto pen = penrose_residuals(lm, *pinv.matrix);

  const auto npts = static_cast<std::size_t>(c.integer("range_points", 200));
  std::mt19937_64 rng(splitmix(seed, 1));
  std::normal_distribution<double> g(0.0, 1.0);
  double def_pinv = 0.0, def_egi = 0.0, worst_ratio = 0.0;
  std::vector<Eigen::VectorXd> ts;
  for (std::size_t i = 0; i < npts; ++i) {
    Eigen::VectorXd x(lm.cols());
    for (auto& v : x) v = g(rng);
    ts.push_back(lm.matrix * x);
    def_pinv = std::max(def_pinv, (lm.matrix * pinv.apply(ts.back()) - ts.back()).norm());
    def_egi = std::max(def_egi, (lm.matrix * egi.apply(ts.back()) - ts.back()).norm());
  }
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const auto den = s_y.s(ts[i] - ts[i + 1]);
    if (!(den.value() > 0.0)) continue;
    const auto num = s_x.s(egi.apply(ts[i]) - egi.apply(ts[i + 1]));
    worst_ratio = std::max(worst_ratio, num.value() / den.value());
  }
  const double bound = 1e-9 * (1.0 + lm.norm);
  ExperimentResult r{"egi", Table({"quantity", "value"}), std::nullopt, Json::object()};
  auto add = [&](const char* q, const std::string& v) { r.table.add_row({q, v}); };
  add("rank", std::to_string(lm.rank));
  add("kappa", fmt(egi.cert.kappa));
  add("tau", fmt(egi.cert.tau));
  add("eta", fmt(egi.cert.eta));
  add("sigma", fmt(egi.cert.sigma));
  add("constant", fmt(egi.cert.constant));
  add("eta_mode", egi.cert.eta_mode);
  add("penrose_LPL", fmt(pen.lpl));
  add("penrose_PLP", fmt(pen.plp));
  add("penrose_LP_sym", fmt(pen.lp_sym));
  add("penrose_PL_sym", fmt(pen.pl_sym));
  add("projector", fmt(pen.projector));
  add("defining_residual_pinv", fmt(def_pinv));
  add("defining_residual_egi", fmt(def_egi));
  add("sampled_worst_ratio", fmt(worst_ratio));
  r.pass = pen.worst() < bound && def_pinv < bound && def_egi < bound && egi.cert.constant >= worst_ratio;
  r.summary = {{"certificate", to_json(egi.cert)}, {"penrose_worst", pen.worst()}, {"tolerance", bound}};
  return r;
}

ExperimentResult run_ladder(const Json& j) {
  Cfg c(j, "ladder", keys({"problem", "a", "lambdas", "pairs", "sup_samples", "coverage_probes"}));
  LadderOptions lo;
  lo.seed = require_seed(c, "ladder verification samples pairs");
  lo.pairs = static_cast<std::size_t>(c.integer("pairs", 10000));
  lo.sup_samples = static_cast<std::size_t>(c.integer("sup_samples", 1000));
  lo.coverage_probes = static_cast<std::size_t>(c.integer("coverage_probes", 200));
  const auto name = c.str("problem", "quartic");
  SmoothProblem p;
  if (name == "quartic") p = quartic_problem();
  else if (name == "cosh") p = cosh_problem();
  else if (name == "quadratic") p = quadratic_problem(c.num("a", 3.0));
  else if (name == "quartic_plane") p = quartic_plane_problem(Box{pt({0.5, 0.5}), pt({1.5, 1.5})}, pt({1.0, 1.0}));
  else throw ConfigError("ladder: unknown problem '" + name + "'");
  const auto lambdas = number_list(c.at("lambdas"), "lambdas");
  const auto res = build_ladder(p, lambdas, lo);
  ExperimentResult r{"ladder", Table({"k", "lambda_k", "t_k", "verified", "worst_ratio"}), std::nullopt,
                     Json::object()};
  for (const auto& l : res.levels)
    r.table.add_row({std::to_string(l.k), fmt(l.lambda), fmt(l.t), fmt(l.verified), fmt(l.worst_ratio)});
  r.pass = res.all_verified && res.coverage_hits == res.coverage_probes;
  r.summary = {{"problem", p.name},
               {"s0", res.s0},
               {"mode", to_string(res.mode)},
               {"coverage_probes", res.coverage_probes},
               {"coverage_hits", res.coverage_hits},
               {"all_verified", res.all_verified}};
  r.summary["s"] = res.s ? Json(*res.s) : Json(nullptr);
  return r;
}

ExperimentResult run_scheme_kind(const Json& j) {
  Cfg c(j, "scheme", keys({"family", "m", "orientation", "system", "meshes", "objective", "true_inf"}));
  const auto family = c.str("family", "polygon");
  SchemeInstance s;
  s.inner = true;
  std::optional<double> true_inf;
  if (c.has("true_inf")) true_inf = c.num("true_inf");
  if (family == "polygon") {
    const auto ms = c.has("m") ? int_range(c.at("m"), "m") : int_range(Json::array({3, 256}), "m");
    const auto o = c.str("orientation", "midpoint");
    if (o != "midpoint" && o != "vertex") throw ConfigError("orientation must be 'midpoint' or 'vertex'");
    const std::vector<int> mi(ms.begin(), ms.end());
    s.name = "disk";
    s.levels = build_inner_polygon_family(mi, o == "vertex" ? PolygonOrientation::vertex : PolygonOrientation::midpoint);
    s.f = c.has("objective") ? parse_objective(c.at("objective")) : distance_objective(pt({2.0, 0.0}));
    if (!c.has("objective") && !true_inf) true_inf = 1.0;
  } else if (family == "grid") {
    Cfg sc(c.at("system"), "system", {"halfspaces", "balls", "interior"});
    ConvexSystem sys;
    sys.interior = vector_from_json(sc.at("interior"));
    const auto n = sys.interior.size();
    if (sc.has("halfspaces")) {
      const auto rows = matrix_from_json(sc.at("halfspaces"));
      if (rows.cols() != n + 1) throw ConfigError("system: halfspace rows are [a_1, ..., a_n, b]");
      sys.halfspaces = {rows.leftCols(n), rows.col(n)};
    } else {
      sys.halfspaces = {Eigen::MatrixXd(0, n), Eigen::VectorXd(0)};
    }
    if (sc.has("balls"))
      for (const auto& b : sc.at("balls")) {
        Cfg bc(b, "ball", {"center", "radius"});
        sys.balls.push_back({vector_from_json(bc.at("center")), bc.num("radius")});
      }
    const auto meshes = number_list(c.at("meshes"), "meshes");
    s.name = "grid";
    s.levels = build_inner_grid_family(sys, meshes);
    s.f = parse_objective(c.at("objective"));
  } else {
    throw ConfigError("scheme: family must be 'polygon' or 'grid'");
  }
  const auto cert = run_scheme(s);
  ExperimentResult r{"scheme", Table({"k", "h_k", "sigma_k", "tau_k", "budget_k", "bracket_lo", "bracket_hi"}),
                     std::nullopt, Json::object()};
  bool contains = true;
  for (const auto& row : cert.rows) {
    if (true_inf && !(row.lo <= *true_inf && *true_inf <= row.hi)) contains = false;
    r.table.add_row({std::to_string(row.k), fmt(row.h), fmt(row.sigma), fmt(row.tau), fmt(row.budget), fmt(row.lo),
                     fmt(row.hi)});
  }
  r.pass = contains;
  r.summary = {{"family", family}, {"levels", cert.rows.size()}, {"bracket_lo", cert.lo}, {"bracket_hi", cert.hi},
               {"bracket_width", cert.hi - cert.lo}};
  if (true_inf) {
    r.summary["true_inf"] = *true_inf;
    r.summary["true_inf_in_every_bracket"] = contains;
  }
  return r;
}

struct KindRow {
  const char* name;
  ExperimentResult (*run)(const Json&);
};

constexpr KindRow kKinds[] = {
    {"hausdorff", run_hausdorff}, {"stability", run_stability}, {"parametric", run_parametric},
    {"hoffman", run_hoffman},     {"egi", run_egi},             {"ladder", run_ladder},
    {"scheme", run_scheme_kind},  {"counterexample", run_counterexample},
};

}  // namespace

std::vector<std::string> experiment_kinds() {
  std::vector<std::string> out;
  for (const auto& k : kKinds) out.emplace_back(k.name);
  return out;
}

ExperimentResult run_experiment(const Json& config) {
  if (!config.is_object()) throw ConfigError("configuration must be an object");
  if (!config.contains("kind") || !config["kind"].is_string()) throw ConfigError("missing string field 'kind'");
  const auto kind = config["kind"].get<std::string>();
  for (const auto& k : kKinds) {
    if (kind != k.name) continue;
    try {
      return k.run(config);
    } catch (const InputError& e) {
      throw ConfigError(e.what());
    } catch (const CatalogError& e) {
      throw ConfigError(e.what());
    } catch (const HypothesisError& e) {
      throw ConfigError(std::string("hypotheses not met: ") + e.what());
    } catch (const InvalidGaugeError& e) {
      throw ConfigError(e.what());
    } catch (const RefineFirstError& e) {
      throw ConfigError(e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("unknown experiment kind '" + kind + "'");
}

}  // namespace optstab::cli
