#include "starfv/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include "starfv/eigen.hpp"
#include "starfv/lines.hpp"
#include "starfv/montecarlo.hpp"
#include "starfv/multitype.hpp"
#include "starfv/selection.hpp"
#include "starfv/twotype.hpp"
#include "starfv/verify.hpp"

namespace starfv::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::pair<std::string, Cell>> params;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  // Non-zero when the table reports failed checks.
  int status = kExitOk;
};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

nlohmann::ordered_json json_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_double(*d);
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

void emit(const Table& t, const std::string& format, std::ostream& os) {
  if (format == "json") {
    nlohmann::ordered_json j;
    j["params"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.params) j["params"][k] = json_cell(v);
    j["columns"] = t.columns;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json r = nlohmann::ordered_json::array();
      for (const auto& c : row) r.push_back(json_cell(c));
      j["rows"].push_back(std::move(r));
    }
    os << j.dump(2) << "\n";
    return;
  }
  for (const auto& [k, v] : t.params) os << "# " << k << " = " << csv_cell(v) << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << "\n";
  }
}

double parse_number(const std::string& s) {
  if (s == "inf" || s == "+inf") return kInf;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ",") + format_double(x);
  return out;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  if (out.empty()) throw InvalidArgument("empty list");
  return out;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("STARFV_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidArgument("STARFV_SEED is not an unsigned integer");
  }
  return 42;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Plain numeric text: whitespace-separated numbers, '#' comments.
std::vector<double> read_numbers(const std::string& path) {
  std::stringstream text(read_file(path));
  std::vector<double> out;
  std::string line;
  while (std::getline(text, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::stringstream ls(line);
    std::string tok;
    while (ls >> tok) out.push_back(parse_number(tok));
  }
  if (out.empty()) throw InvalidArgument(path + " holds no numbers");
  return out;
}

struct Options {
  std::string format = "csv";
  std::string output;
  std::uint64_t seed = 42;

  double theta = 2.0;
  double p = 0.5;
  double x = 0.5;
  double t = 1.0;
  double beta = 0.0;
  double horizon = 1.0;
  int n = 4;
  std::size_t n_mc = 1;
  std::string grid = "0:1:0.1";
  std::string t_grid = "1";
  std::string n_grid = "1:4:1";
  std::string p_vec;
  std::string matrix_file;
  std::string drift_file;
  std::string table;
  std::string suite = "all";
};

void add_model(CLI::App* sub, Options& o) {
  sub->add_option("--theta", o.theta, "total mutation rate")->check(CLI::PositiveNumber);
  sub->add_option("--p", o.p, "probability a mutant is type 1")->check(CLI::Range(0.0, 1.0));
}

TwoTypeParams two_type(const Options& o) { return TwoTypeParams(o.theta, o.p); }

void echo_model(Table& tb, const Options& o) {
  tb.params.emplace_back("theta", o.theta);
  tb.params.emplace_back("p", o.p);
}

Table cmd_transition(const Options& o) {
  const TwoTypeParams prm = two_type(o);
  const auto grid = parse_grid(o.grid);
  const MixedLaw law = twotype::transition_law(prm, o.x, o.t);
  Table tb;
  echo_model(tb, o);
  tb.params.emplace_back("x", o.x);
  tb.params.emplace_back("t", o.t);
  for (std::size_t i = 0; i < law.atoms().size(); ++i) {
    tb.params.emplace_back("atom_location", law.atoms()[i].location);
    tb.params.emplace_back("atom_mass", law.atoms()[i].mass);
  }
  tb.columns = {"xi", "density"};
  for (double xi : grid) {
    if (!(xi >= 0.0 && xi <= 1.0)) throw InvalidArgument("grid values must lie in [0,1]");
    tb.rows.push_back({xi, law.density(xi)});
  }
  return tb;
}

selection::DriftSpec drift_from(const Options& o) {
  if (!o.drift_file.empty()) return selection::DriftSpec::custom_polynomial(read_numbers(o.drift_file));
  if (o.beta > 0.0) return selection::DriftSpec::mutation_selection(o.theta, o.p, o.beta);
  return selection::DriftSpec::neutral(o.theta, o.p);
}

Table cmd_stationary(const Options& o) {
  const auto grid = parse_grid(o.grid);
  Table tb;
  echo_model(tb, o);
  if (o.beta > 0.0 || !o.drift_file.empty()) {
    const selection::DriftSpec d = drift_from(o);
    if (o.beta > 0.0) tb.params.emplace_back("beta", o.beta);
    if (!o.drift_file.empty()) tb.params.emplace_back("drift_file", o.drift_file);
    tb.columns = {"xi", "density"};
    for (double xi : grid) {
      if (!(xi >= 0.0 && xi <= 1.0)) throw InvalidArgument("grid values must lie in [0,1]");
      tb.rows.push_back({xi, selection::stationary_density(d, xi)});
    }
    return tb;
  }
  const TwoTypeParams prm = two_type(o);
  tb.columns = {"xi", "density", "cdf"};
  for (double xi : grid) {
    if (!(xi >= 0.0 && xi <= 1.0)) throw InvalidArgument("grid values must lie in [0,1]");
    tb.rows.push_back({xi, twotype::stationary_density(prm, xi), twotype::stationary_cdf(prm, xi)});
  }
  return tb;
}

Table cmd_moments(const Options& o) {
  const TwoTypeParams prm = two_type(o);
  const auto ns = parse_grid(o.n_grid);
  const auto ts = parse_grid(o.t_grid);
  Table tb;
  echo_model(tb, o);
  tb.params.emplace_back("x", o.x);
  tb.columns = {"n", "t", "central", "raw"};
  for (double nd : ns) {
    if (nd < 0.0 || nd != std::floor(nd) || nd > 1000.0)
      throw InvalidArgument("moment orders must be integers in 0..1000");
    const int n = static_cast<int>(nd);
    for (double t : ts) {
      if (std::isinf(t)) {
        const auto m = twotype::stationary_moment(prm, n);
        tb.rows.push_back({static_cast<long long>(n), t, m.central, m.raw});
      } else {
        tb.rows.push_back({static_cast<long long>(n), t, twotype::transition_moment(prm, n, o.x, t),
                           twotype::transition_raw_moment(prm, n, o.x, t)});
      }
    }
  }
  return tb;
}

Table cmd_eigen(const Options& o) {
  const TwoTypeParams prm = two_type(o);
  if (o.n < 0) throw InvalidArgument("--n must be non-negative");
  Table tb;
  echo_model(tb, o);
  tb.columns = {"n", "lambda", "c_n0", "c_n1"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int n = 0; n <= o.n; ++n) {
    const bool has_c = n >= 2;
    tb.rows.push_back({static_cast<long long>(n), eigen::eigenvalue(prm, n),
                       has_c ? eigen::c_n0(prm, n) : nan, has_c ? eigen::c_n1(prm, n) : nan});
  }
  return tb;
}

// Spectral sums lose about log10 C(n, n/2) digits; past this they are noise.
constexpr int kSpectralMaxN = 40;

Table cmd_lines(const Options& o) {
  if (o.n < 1) throw InvalidArgument("--n must be at least 1");
  const auto ts = parse_grid(o.t_grid);
  Table tb;
  tb.params.emplace_back("theta", o.theta);
  tb.params.emplace_back("n", static_cast<long long>(o.n));
  tb.params.emplace_back("mean_absorption_time", lines::mean_absorption_time(o.n, o.theta));
  tb.columns = {"t", "j", "direct", "spectral", "max_abs_diff"};
  const bool spectral = o.n <= kSpectralMaxN;
  std::optional<lines::SpectralCoeffs> sc;
  if (spectral) sc = lines::spectral_coeffs(o.n, o.theta);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double t : ts) {
    const auto d = lines::an_distribution(o.n, o.theta, t);
    std::vector<double> s(d.prob.size(), nan);
    double diff = nan;
    if (spectral && std::isfinite(t)) {
      s = lines::an_distribution_spectral(*sc, t).prob;
      diff = 0.0;
      for (std::size_t j = 0; j < s.size(); ++j) diff = std::max(diff, std::abs(s[j] - d.prob[j]));
    }
    for (std::size_t j = 0; j < d.prob.size(); ++j)
      tb.rows.push_back({t, static_cast<long long>(j), d.prob[j], s[j], diff});
  }
  return tb;
}

Table sim_fv(const Options& o) {
  const bool selective = o.beta > 0.0 || !o.drift_file.empty();
  const selection::DriftSpec drift = drift_from(o);
  const TwoTypeParams prm = two_type(o);
  RngStream rng(o.seed, 0);
  Table tb;
  echo_model(tb, o);
  if (o.beta > 0.0) tb.params.emplace_back("beta", o.beta);
  tb.params.emplace_back("x", o.x);
  tb.params.emplace_back("horizon", o.horizon);
  tb.params.emplace_back("seed", static_cast<long long>(o.seed));
  if (o.n_mc == 1) {
    const auto rec = selective ? selection::simulate_path(drift, o.x, o.horizon, rng)
                               : twotype::simulate_path(prm, o.x, o.horizon, rng);
    tb.columns = {"time", "type", "frequency"};
    tb.rows.push_back({0.0, std::string("start"), rec.initial});
    for (const auto& e : rec.events)
      tb.rows.push_back({e.time, static_cast<long long>(e.type), e.frequency});
    tb.rows.push_back({rec.horizon, std::string("end"), rec.final_frequency});
    return tb;
  }
  tb.params.emplace_back("n_mc", static_cast<long long>(o.n_mc));
  const auto est = mc_estimate(o.n_mc, rng, 4, [&](RngStream& r, std::span<double> out) {
    const double xi = selective ? selection::simulate_path(drift, o.x, o.horizon, r).final_frequency
                                : twotype::sample_transition(prm, o.x, o.horizon, r);
    double pw = 1.0;
    for (int k = 0; k < 4; ++k) out[static_cast<std::size_t>(k)] = pw *= xi;
  });
  tb.columns = {"statistic", "estimate", "se", "exact"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int k = 1; k <= 4; ++k) {
    const double exact = selective ? nan : twotype::transition_raw_moment(prm, k, o.x, o.horizon);
    tb.rows.push_back({"E[xi^" + std::to_string(k) + "]", est[static_cast<std::size_t>(k - 1)].value,
                       est[static_cast<std::size_t>(k - 1)].se, exact});
  }
  return tb;
}

Table sim_lines(const Options& o) {
  if (o.n < 1) throw InvalidArgument("--n must be at least 1");
  RngStream rng(o.seed, 0);
  Table tb;
  tb.params.emplace_back("theta", o.theta);
  tb.params.emplace_back("n", static_cast<long long>(o.n));
  tb.params.emplace_back("horizon", o.horizon);
  tb.params.emplace_back("seed", static_cast<long long>(o.seed));
  if (o.n_mc == 1) {
    const auto path = lines::simulate_lines(o.n, o.theta, rng, o.horizon);
    tb.columns = {"time", "state", "event"};
    tb.rows.push_back({0.0, static_cast<long long>(o.n), std::string("start")});
    for (const auto& e : path.events)
      tb.rows.push_back({e.time, static_cast<long long>(e.state),
                         std::string(e.coalescence ? "coalescence" : "mutation")});
    return tb;
  }
  tb.params.emplace_back("n_mc", static_cast<long long>(o.n_mc));
  const auto emp = lines::empirical_line_dist(o.n, o.theta, o.horizon, o.n_mc, rng);
  const auto exact = lines::an_distribution(o.n, o.theta, o.horizon);
  tb.columns = {"j", "empirical", "se", "exact"};
  for (std::size_t j = 0; j < emp.size(); ++j)
    tb.rows.push_back({static_cast<long long>(j), emp[j].value, emp[j].se, exact.prob[j]});
  return tb;
}

Table sim_asg(const Options& o) {
  if (o.n < 1) throw InvalidArgument("--n must be at least 1");
  if (!(o.beta > 0.0)) throw InvalidArgument("--beta must be positive");
  RngStream rng(o.seed, 0);
  Table tb;
  tb.params.emplace_back("beta", o.beta);
  tb.params.emplace_back("n", static_cast<long long>(o.n));
  tb.params.emplace_back("seed", static_cast<long long>(o.seed));
  if (o.n_mc == 1) {
    const auto path = selection::asg_simulate(o.n, o.beta, rng);
    tb.columns = {"time", "lineages"};
    tb.rows.push_back({0.0, static_cast<long long>(o.n)});
    for (const auto& e : path.events) tb.rows.push_back({e.time, static_cast<long long>(e.state)});
    return tb;
  }
  tb.params.emplace_back("n_mc", static_cast<long long>(o.n_mc));
  const Estimate e = mc_mean(o.n_mc, rng, [&](RngStream& r) {
    return selection::asg_simulate(o.n, o.beta, r).t_ua;
  });
  tb.columns = {"statistic", "estimate", "se", "exact"};
  tb.rows.push_back({std::string("E[T_UA]"), e.value, e.se, 1.0});
  return tb;
}

Table cmd_multitype(const Options& o) {
  const std::string table = o.table.empty() ? "kernel" : o.table;
  Table tb;
  tb.params.emplace_back("theta", o.theta);
  tb.params.emplace_back("table", table);
  if (table == "kernel") {
    tb.params.emplace_back("t", o.t);
    Eigen::MatrixXd k;
    if (!o.matrix_file.empty()) {
      tb.params.emplace_back("matrix_file", o.matrix_file);
      k = multitype::markov_line_kernel(multitype::MutationMatrix::load(o.matrix_file), o.theta, o.t);
    } else {
      if (o.p_vec.empty()) throw InvalidArgument("kernel needs --p-vec or --matrix");
      const auto pv = parse_list(o.p_vec);
      tb.params.emplace_back("p_vec", join(pv));
      k = multitype::pim_line_kernel(multitype::MultiParams(o.theta, pv), o.t);
    }
    tb.columns = {"from", "to", "probability"};
    for (Eigen::Index i = 0; i < k.rows(); ++i)
      for (Eigen::Index j = 0; j < k.cols(); ++j)
        tb.rows.push_back({static_cast<long long>(i + 1), static_cast<long long>(j + 1), k(i, j)});
    return tb;
  }
  if (table == "stationary") {
    if (o.matrix_file.empty()) throw InvalidArgument("stationary needs --matrix");
    tb.params.emplace_back("matrix_file", o.matrix_file);
    const auto g = multitype::markov_stationary_gamma(multitype::MutationMatrix::load(o.matrix_file));
    tb.columns = {"type", "gamma"};
    for (Eigen::Index i = 0; i < g.size(); ++i)
      tb.rows.push_back({static_cast<long long>(i + 1), g(i)});
    return tb;
  }
  if (o.n < 1) throw InvalidArgument("--n must be at least 1");
  tb.params.emplace_back("n", static_cast<long long>(o.n));
  if (table == "sampling") {
    tb.columns = {"j", "probability"};
    for (int j = 0; j <= o.n; ++j)
      tb.rows.push_back({static_cast<long long>(j), multitype::infinite_sampling_prob(o.n, j, o.theta)});
    return tb;
  }
  if (table == "types") {
    tb.columns = {"k", "probability"};
    for (int k = 1; k <= o.n; ++k)
      tb.rows.push_back({static_cast<long long>(k), multitype::num_types_dist(o.n, k, o.theta)});
    return tb;
  }
  throw InvalidArgument("unknown multitype table: " + table);
}

Table cmd_selection(const Options& o) {
  const std::string table = o.table.empty() ? "roots" : o.table;
  Table tb;
  tb.params.emplace_back("table", table);
  if (table == "fixation") {
    if (!(o.beta > 0.0)) throw InvalidArgument("--beta must be positive");
    tb.params.emplace_back("beta", o.beta);
    tb.columns = {"x", "P1", "P2"};
    for (double x : parse_grid(o.grid)) {
      if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("grid values must lie in [0,1]");
      tb.rows.push_back({x, selection::fixation_prob(o.beta, x, 1), selection::fixation_prob(o.beta, x, 2)});
    }
    return tb;
  }
  echo_model(tb, o);
  if (o.drift_file.empty()) {
    if (!(o.beta > 0.0)) throw InvalidArgument("--beta must be positive");
    tb.params.emplace_back("beta", o.beta);
  } else {
    tb.params.emplace_back("drift_file", o.drift_file);
  }
  const selection::DriftSpec d = drift_from(o);
  if (table == "roots") {
    if (!o.drift_file.empty()) throw InvalidArgument("roots need the mutation-selection drift");
    const auto r = selection::roots(o.theta, o.beta, o.p);
    tb.columns = {"r1", "r2", "a", "b", "c"};
    tb.rows.push_back({r.r1, r.r2, r.a(), r.b(), r.c()});
    return tb;
  }
  if (table == "skeleton") {
    const Eigen::Matrix2d m = selection::skeleton_matrix(d);
    const auto pi = selection::replacement_stationary(d);
    tb.columns = {"p11", "p21", "pi1", "pi2"};
    tb.rows.push_back({m(0, 0), m(1, 0), pi.pi1, pi.pi2});
    return tb;
  }
  if (table == "density") {
    tb.columns = {"xi", "density"};
    for (double xi : parse_grid(o.grid)) {
      if (!(xi >= 0.0 && xi <= 1.0)) throw InvalidArgument("grid values must lie in [0,1]");
      tb.rows.push_back({xi, selection::stationary_density(d, xi)});
    }
    return tb;
  }
  if (table == "flow") {
    tb.params.emplace_back("x", o.x);
    tb.columns = {"t", "chi"};
    for (double t : parse_grid(o.t_grid)) tb.rows.push_back({t, selection::flow(d, o.x, t)});
    return tb;
  }
  throw InvalidArgument("unknown selection table: " + table);
}

std::string limit_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Table cmd_verify(const Options& o) {
  const auto ids = verify::suite_criteria(o.suite);
  const auto results = verify::run_suite(ids, o.seed);
  Table tb;
  tb.params.emplace_back("suite", o.suite);
  tb.params.emplace_back("seed", static_cast<long long>(o.seed));
  tb.columns = {"criterion", "name", "check", "observed", "comparator", "limit", "status"};
  int passed = 0;
  for (const auto& r : results) {
    passed += r.passed();
    if (!r.error.empty())
      tb.rows.push_back({static_cast<long long>(r.id), r.name, "error: " + r.error,
                         std::numeric_limits<double>::quiet_NaN(), std::string(""),
                         std::string(""), std::string("FAIL")});
    for (const auto& c : r.checks)
      tb.rows.push_back({static_cast<long long>(r.id), r.name, c.label, c.observed,
                         std::string(c.upper_bound ? "<=" : ">="), limit_text(c.limit),
                         std::string(c.passed() ? "PASS" : "FAIL")});
  }
  tb.params.emplace_back("criteria_passed",
                         std::to_string(passed) + "/" + std::to_string(results.size()));
  tb.status = passed == static_cast<int>(results.size()) ? kExitOk : kExitFailure;
  return tb;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_number(item));
    if (parts.size() != 3) throw InvalidArgument("grid must be lo:hi:step");
    const double lo = parts[0], hi = parts[1], step = parts[2];
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(step > 0.0) || hi < lo)
      throw InvalidArgument("grid needs finite lo <= hi and step > 0");
    const double span = (hi - lo) / step;
    if (span > 1e7) throw InvalidArgument("grid too large");
    const auto count = static_cast<long long>(std::floor(span + 1e-9));
    for (long long i = 0; i <= count; ++i) out.push_back(i == count && std::abs(lo + i * step - hi) < 1e-9 * std::max(1.0, std::abs(hi)) ? hi : lo + static_cast<double>(i) * step);
  } else {
    out = parse_list(spec);
  }
  if (out.empty()) throw InvalidArgument("empty grid");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!(out[i] > out[i - 1])) throw InvalidArgument("grid must be strictly increasing");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Star-shaped Fleming-Viot process: evaluators, samplers and checks", "starfv"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output,-o", o.output, "write the table here instead of stdout");
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "base seed (default $STARFV_SEED or 42)");
  // Options are accepted before or after the subcommand.
  app.fallthrough();

  auto* transition = app.add_subcommand("transition", "law of xi(t) from xi(0) = x");
  add_model(transition, o);
  transition->add_option("--x", o.x)->check(CLI::Range(0.0, 1.0));
  transition->add_option("--t", o.t)->check(CLI::NonNegativeNumber);
  transition->add_option("--grid", o.grid, "xi grid, lo:hi:step or a,b,c");

  auto* stationary = app.add_subcommand("stationary", "stationary density");
  add_model(stationary, o);
  stationary->add_option("--grid", o.grid);
  stationary->add_option("--beta", o.beta, "selection strength (mutation-selection drift)")
      ->check(CLI::PositiveNumber);
  stationary->add_option("--drift-file", o.drift_file, "polynomial drift coefficients c0 c1 ...")
      ->check(CLI::ExistingFile);

  auto* moments = app.add_subcommand("moments", "E_x[(xi(t)-p)^n] and E_x[xi(t)^n]");
  add_model(moments, o);
  moments->add_option("--x", o.x)->check(CLI::Range(0.0, 1.0));
  moments->add_option("--n-grid", o.n_grid);
  moments->add_option("--t-grid", o.t_grid, "times; inf gives stationary moments");

  auto* eig = app.add_subcommand("eigen", "eigenvalues and eigenpolynomial constants");
  add_model(eig, o);
  eig->add_option("--n", o.n, "largest index")->check(CLI::NonNegativeNumber);

  auto* lin = app.add_subcommand("lines", "distribution of the number of non-mutant lines");
  lin->add_option("--theta", o.theta)->check(CLI::PositiveNumber);
  lin->add_option("--n", o.n, "initial number of lines")->check(CLI::PositiveNumber);
  lin->add_option("--t-grid", o.t_grid);

  auto* sim = app.add_subcommand("simulate", "paths and ensembles");
  sim->require_subcommand(1);
  auto* sim_fv_cmd = sim->add_subcommand("fv", "forward frequency process");
  add_model(sim_fv_cmd, o);
  sim_fv_cmd->add_option("--x", o.x)->check(CLI::Range(0.0, 1.0));
  sim_fv_cmd->add_option("--beta", o.beta)->check(CLI::PositiveNumber);
  sim_fv_cmd->add_option("--drift-file", o.drift_file)->check(CLI::ExistingFile);
  sim_fv_cmd->add_option("--horizon", o.horizon)->check(CLI::PositiveNumber);
  sim_fv_cmd->add_option("--n-mc", o.n_mc, "1 prints a path, more an ensemble summary")
      ->check(CLI::PositiveNumber);
  auto* sim_lines_cmd = sim->add_subcommand("lines", "non-mutant line counting chain");
  sim_lines_cmd->add_option("--theta", o.theta)->check(CLI::PositiveNumber);
  sim_lines_cmd->add_option("--n", o.n)->check(CLI::PositiveNumber);
  sim_lines_cmd->add_option("--horizon", o.horizon)->check(CLI::NonNegativeNumber);
  sim_lines_cmd->add_option("--n-mc", o.n_mc)->check(CLI::PositiveNumber);
  auto* sim_asg_cmd = sim->add_subcommand("asg", "lineage counting process with selection");
  sim_asg_cmd->add_option("--beta", o.beta)->check(CLI::PositiveNumber);
  sim_asg_cmd->add_option("--n", o.n)->check(CLI::PositiveNumber);
  sim_asg_cmd->add_option("--n-mc", o.n_mc)->check(CLI::PositiveNumber);

  auto* multi = app.add_subcommand("multitype", "d-type kernels and sampling distributions");
  multi->add_option("--theta", o.theta)->check(CLI::PositiveNumber);
  multi->add_option("--table", o.table)
      ->check(CLI::IsMember({"kernel", "stationary", "sampling", "types"}));
  multi->add_option("--p-vec", o.p_vec, "mutant type probabilities p1,...,pd");
  multi->add_option("--matrix", o.matrix_file, "mutation matrix file")->check(CLI::ExistingFile);
  multi->add_option("--t", o.t)->check(CLI::NonNegativeNumber);
  multi->add_option("--n", o.n, "sample size")->check(CLI::PositiveNumber);

  auto* sel = app.add_subcommand("selection", "selection closed forms");
  add_model(sel, o);
  sel->add_option("--beta", o.beta)->check(CLI::PositiveNumber);
  sel->add_option("--drift-file", o.drift_file)->check(CLI::ExistingFile);
  sel->add_option("--table", o.table)
      ->check(CLI::IsMember({"roots", "skeleton", "density", "fixation", "flow"}));
  sel->add_option("--grid", o.grid);
  sel->add_option("--x", o.x)->check(CLI::Range(0.0, 1.0));
  sel->add_option("--t-grid", o.t_grid);

  auto* ver = app.add_subcommand("verify", "run the cross-check battery");
  ver->add_option("--suite", o.suite, "all, twotype, eigen, lines, multitype, selection or ids");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  Table tb;
  try {
    o.seed = seed_opt->count() ? seed : default_seed();
    if (transition->parsed()) tb = cmd_transition(o);
    else if (stationary->parsed()) tb = cmd_stationary(o);
    else if (moments->parsed()) tb = cmd_moments(o);
    else if (eig->parsed()) tb = cmd_eigen(o);
    else if (lin->parsed()) tb = cmd_lines(o);
    else if (sim_fv_cmd->parsed()) tb = sim_fv(o);
    else if (sim_lines_cmd->parsed()) tb = sim_lines(o);
    else if (sim_asg_cmd->parsed()) tb = sim_asg(o);
    else if (multi->parsed()) tb = cmd_multitype(o);
    else if (sel->parsed()) tb = cmd_selection(o);
    else if (ver->parsed()) tb = cmd_verify(o);
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const QuadratureFailure& e) {
    err << "error: " << e.what() << " (estimate " << format_double(e.estimate()) << ", error bound "
        << format_double(e.error_bound()) << ")\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }

  if (o.output.empty()) {
    emit(tb, o.format, out);
  } else {
    std::ofstream file(o.output);
    if (!file) {
      err << "error: cannot write " << o.output << "\n";
      return kExitFailure;
    }
    emit(tb, o.format, file);
  }
  return tb.status;
}

}  // namespace starfv::cli
