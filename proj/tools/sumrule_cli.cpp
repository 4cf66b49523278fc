// sumrule: tables, verification suites and single queries for the sum-rule engine.

#include "sumrule.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cctype>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace sumrule;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { Text, Json, Csv };

struct RunConfig {
  std::string state;
  std::string potential;
  int nodes = 0;
  int l = 0;
  std::string orders;
  std::string channel;
  int n_max = 2000;
  double tol = 2e-4;
  bool tol_set = false;
  std::string format = "text";
  std::string suite = "all";
  std::string to;
  double q = 0.0;
};

// selectors

std::pair<int, int> parse_state(const std::string &text) {
  static const std::string letters = "spdfghik";
  std::string s;
  for (char c : text)
    s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  int n = 0, l = -1;
  auto comma = s.find(',');
  try {
    if (comma != std::string::npos) {
      n = std::stoi(s.substr(0, comma));
      l = std::stoi(s.substr(comma + 1));
    } else {
      std::size_t used = 0;
      n = std::stoi(s, &used);
      if (used + 1 != s.size() || letters.find(s[used]) == std::string::npos)
        throw UsageError("");
      l = static_cast<int>(letters.find(s[used]));
    }
  } catch (const std::exception &) {
    throw UsageError("state '" + text + "' is not of the form 2p or 2,1");
  }
  if (n < 1 || l < 0 || l >= n)
    throw UsageError("state '" + text + "' needs n >= 1 and 0 <= l < n");
  return {n, l};
}

std::pair<int, int> parse_orders(const std::string &text, std::pair<int, int> fallback) {
  if (text.empty())
    return fallback;
  auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int j = std::stoi(text);
      return {j, j};
    }
    const int a = std::stoi(text.substr(0, dots)), b = std::stoi(text.substr(dots + 2));
    if (a > b)
      throw UsageError("");
    return {a, b};
  } catch (const std::exception &) {
    throw UsageError("orders '" + text + "' is not a nonempty range A..B");
  }
}

Format parse_format(const std::string &f) {
  if (f == "text")
    return Format::Text;
  if (f == "json")
    return Format::Json;
  if (f == "csv")
    return Format::Csv;
  throw UsageError("unknown format '" + f + "'");
}

std::vector<ChannelSel> parse_channels(const std::string &text, int l) {
  if (text.empty() || text == "all") {
    if (l == 0)
      return {ChannelSel::Plus};
    return {ChannelSel::Plus, ChannelSel::Minus, ChannelSel::Total};
  }
  ChannelSel c;
  try {
    c = parse_channel_sel(text);
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
  if (c == ChannelSel::Minus && l == 0)
    throw UsageError("the minus channel needs l >= 1");
  return {c};
}

Potential parse_potential(const std::string &text) {
  try {
    return Potential::parse(text);
  } catch (const std::exception &e) {
    throw UsageError(e.what());
  }
}

QuadratureSpec quadrature(const RunConfig &cfg) {
  if (cfg.n_max < 2)
    throw UsageError("--nmax must be at least 2");
  if (!(cfg.tol > 0))
    throw UsageError("--tol must be positive");
  QuadratureSpec spec;
  spec.n_max = cfg.n_max;
  return spec;
}

// rendering

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string pq(const Rational &r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

json opt_num(const std::optional<double> &x) { return x ? json(*x) : json(nullptr); }
json opt_pq(const std::optional<Rational> &x) { return x ? json(pq(*x)) : json(nullptr); }

json state_json(const StateLabel &s) {
  if (s.n)
    return {{"n", *s.n}, {"l", s.l}};
  return {{"potential", s.potential}, {"nodes", s.nodes}, {"l", s.l}};
}

// text and csv cells: missing values are "div" on divergent rows and "-" (text) or empty (csv) otherwise
std::string cell(const std::optional<double> &x, bool divergent, Format f) {
  if (x)
    return num(*x);
  if (divergent)
    return "div";
  return f == Format::Text ? "-" : "";
}

std::string cell(const std::optional<Rational> &x, bool divergent, Format f) {
  if (x)
    return f == Format::Text ? to_string(*x) : pq(*x);
  if (divergent)
    return "div";
  return f == Format::Text ? "-" : "";
}

struct Row {
  SumRuleValue v;
  std::optional<double> total; // extrapolated for solved states
  std::optional<double> tail;
};

void emit_table(const std::vector<Row> &rows, Format f, const std::string &title) {
  if (f == Format::Json) {
    json out = json::array();
    for (const auto &r : rows) {
      const auto &v = r.v;
      json j;
      j["state"] = state_json(v.state);
      j["J"] = v.J;
      j["channel"] = to_string(v.channel);
      j["discrete"] = opt_num(v.discrete);
      j["continuum"] = opt_num(v.continuum);
      j["total"] = opt_num(r.total);
      j["constructive"] = opt_pq(v.constructive);
      j["closed_form"] = opt_pq(v.closed_form);
      j["pass"] = v.pass;
      if (v.divergent)
        j["divergent"] = true;
      if (!v.state.n) {
        j["reference"] = opt_num(v.reference);
        j["ladder"] = opt_num(v.ladder);
        j["tail"] = opt_num(r.tail);
      }
      out.push_back(j);
    }
    std::cout << out.dump(2) << "\n";
    return;
  }
  if (f == Format::Csv) {
    std::cout << "J,channel,discrete,continuum,total,constructive,closed_form,pass\n";
    for (const auto &r : rows) {
      const auto &v = r.v;
      std::cout << v.J << "," << to_string(v.channel) << "," << cell(v.discrete, v.divergent, f) << ","
                << cell(v.continuum, v.divergent, f) << "," << cell(r.total, v.divergent, f) << ","
                << cell(v.constructive, v.divergent, f) << "," << cell(v.closed_form, v.divergent, f) << ","
                << (v.pass ? "true" : "false") << "\n";
    }
    return;
  }
  std::cout << title << "\n";
  const bool solved = !rows.empty() && !rows.front().v.state.n;
  if (solved)
    std::printf("%4s  %-7s %16s %12s %16s %16s %16s  %s\n", "J", "channel", "discrete", "tail", "total", "reference",
                "ladder", "pass");
  else
    std::printf("%4s  %-7s %16s %16s %16s %14s %14s  %s\n", "J", "channel", "discrete", "continuum", "total",
                "constructive", "closed_form", "pass");
  for (const auto &r : rows) {
    const auto &v = r.v;
    const char *status = v.pass ? "PASS" : "FAIL";
    if (solved)
      std::printf("%4d  %-7s %16s %12s %16s %16s %16s  %s\n", v.J, to_string(v.channel).c_str(),
                  cell(v.discrete, v.divergent, f).c_str(), cell(r.tail, false, f).c_str(),
                  cell(r.total, v.divergent, f).c_str(), cell(v.reference, v.divergent, f).c_str(),
                  cell(v.ladder, false, f).c_str(), status);
    else
      std::printf("%4d  %-7s %16s %16s %16s %14s %14s  %s\n", v.J, to_string(v.channel).c_str(),
                  cell(v.discrete, v.divergent, f).c_str(), cell(v.continuum, v.divergent, f).c_str(),
                  cell(r.total, v.divergent, f).c_str(), cell(v.constructive, v.divergent, f).c_str(),
                  cell(v.closed_form, v.divergent, f).c_str(), status);
  }
}

// subcommands

int cmd_table(const RunConfig &cfg) {
  const Format f = parse_format(cfg.format);
  const QuadratureSpec spec = quadrature(cfg);
  if (cfg.state.empty() == cfg.potential.empty())
    throw UsageError("table needs exactly one of --state or --potential");

  std::optional<Potential> v0;
  int n = 0, l = cfg.l;
  if (!cfg.state.empty()) {
    std::tie(n, l) = parse_state(cfg.state);
  } else {
    v0 = parse_potential(cfg.potential);
    if (cfg.nodes < 0 || cfg.l < 0)
      throw UsageError("--nodes and --l must be nonnegative");
    if (v0->kind == Potential::Kind::Coulomb) {
      // a Coulomb state is a hydrogen state with n = nodes + l + 1
      n = cfg.nodes + cfg.l + 1;
      v0.reset();
    } else if (!(v0->kind == Potential::Kind::Log || v0->gamma > 0)) {
      throw UsageError("spectral sums need a confining potential (gamma > 0 or log)");
    }
  }
  const auto [ja, jb] = parse_orders(cfg.orders, v0 ? std::pair{0, 4} : std::pair{-4, 3});
  const auto channels = parse_channels(cfg.channel, l);
  const double tol = cfg.tol_set ? cfg.tol : (v0 ? 1e-4 : 2e-4);

  Oracle oracle(spec);
  std::vector<Row> rows;
  for (ChannelSel ch : channels)
    for (int J = ja; J <= jb; ++J) {
      Row r;
      if (v0) {
        r.v = oracle.compare_potential(*v0, l, cfg.nodes, ch, J, tol);
        r.tail = r.v.estimated_error;
        r.total = *r.v.discrete + r.v.estimated_error;
      } else {
        r.v = oracle.compare(bound_state(n, l), ch, J, tol);
        r.total = r.v.divergent ? std::nullopt : r.v.total();
      }
      rows.push_back(std::move(r));
    }
  std::ostringstream title;
  if (v0)
    title << v0->name() << " nodes=" << cfg.nodes << " l=" << l << "  states=" << spec.potential_states;
  else
    title << bound_state(n, l).label() << "  n_max=" << spec.n_max;
  title << "  tol=" << tol;
  emit_table(rows, f, title.str());
  for (const auto &r : rows)
    if (!r.v.pass)
      return kExitFail;
  return kExitPass;
}

int cmd_verify(const RunConfig &cfg) {
  const Format f = parse_format(cfg.format);
  const QuadratureSpec spec = quadrature(cfg);
  const auto &names = suite_names();
  if (std::find(names.begin(), names.end(), cfg.suite) == names.end())
    throw UsageError("unknown suite '" + cfg.suite + "'");
  Oracle oracle(spec);
  const VerifyReport rep = run_suite(cfg.suite, oracle, cfg.tol);
  if (f == Format::Json) {
    json out;
    out["suite"] = cfg.suite;
    out["pass"] = rep.pass();
    out["checks"] = json::array();
    for (const auto &c : rep.checks)
      out["checks"].push_back({{"suite", c.suite}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    std::cout << out.dump(2) << "\n";
  } else if (f == Format::Csv) {
    std::cout << "suite,name,pass,detail\n";
    for (const auto &c : rep.checks)
      std::cout << c.suite << ",\"" << c.name << "\"," << (c.pass ? "true" : "false") << ",\"" << c.detail << "\"\n";
  } else {
    for (const auto &c : rep.checks)
      std::cout << (c.pass ? "PASS  " : "FAIL  ") << c.suite << "  " << c.name << (c.detail.empty() ? "" : "  [") << c.detail
                << (c.detail.empty() ? "" : "]") << "\n";
    std::cout << rep.checks.size() << " checks, " << rep.failures() << " failed\n";
  }
  return rep.pass() ? kExitPass : kExitFail;
}

int cmd_matrix(const RunConfig &cfg) {
  const Format f = parse_format(cfg.format);
  if (cfg.state.empty())
    throw UsageError("matrix needs --state");
  const auto [n, l] = parse_state(cfg.state);
  const BoundState from = bound_state(n, l);
  json out;
  out["state"] = {{"n", n}, {"l", l}};
  std::string text;
  if (!cfg.to.empty()) {
    const auto [n2, l2] = parse_state(cfg.to);
    if (std::abs(l2 - l) != 1)
      throw UsageError("dipole transitions need |l' - l| = 1");
    const Channel ch = channel_to(from, l2);
    const Rational z2 = bound_bound_z2(from, n2, ch);
    out["final"] = {{"n", n2}, {"l", l2}};
    out["channel"] = to_string(ch.direction);
    out["z2"] = pq(z2);
    out["value"] = to_double(z2);
    text = "|<" + from.label() + "|z|" + bound_state(n2, l2).label() + ">|^2 = " + to_string(z2) + " = " + num(to_double(z2));
  } else if (cfg.q > 0) {
    const std::string which = cfg.channel.empty() ? "plus" : cfg.channel;
    ChannelSel sel;
    try {
      sel = parse_channel_sel(which);
    } catch (const std::invalid_argument &e) {
      throw UsageError(e.what());
    }
    if (sel == ChannelSel::Total || (sel == ChannelSel::Minus && l == 0))
      throw UsageError("continuum elements need --channel plus or minus (minus needs l >= 1)");
    const Channel ch = sel == ChannelSel::Plus ? Channel::plus(l) : Channel::minus(l);
    const double z2 = bound_free_z2_direct(from, ch, cfg.q);
    out["channel"] = to_string(ch.direction);
    out["q"] = cfg.q;
    out["z2"] = z2;
    text = "|<" + from.label() + "|z|q=" + num(cfg.q) + " l=" + std::to_string(ch.target_l()) + ">|^2 = " + num(z2);
  } else {
    throw UsageError("matrix needs --to <state> or --q <momentum>");
  }
  if (f == Format::Json)
    std::cout << out.dump(2) << "\n";
  else if (f == Format::Csv) {
    std::string header, values;
    for (auto it = out.begin(); it != out.end(); ++it) {
      if (it.key() == "state" || it.key() == "final")
        continue;
      header += (header.empty() ? "" : ",") + it.key();
      values += (values.empty() ? "" : ",") + (it->is_string() ? it->get<std::string>() : it->dump());
    }
    std::cout << header << "\n" << values << "\n";
  } else
    std::cout << text << "\n";
  return kExitPass;
}

struct IdentityLine {
  std::string name;
  std::string residual;
  bool pass = true;
  std::string text; // compact rendering for the text format
};

int cmd_kramers(const RunConfig &cfg) {
  const Format f = parse_format(cfg.format);
  const double tol = cfg.tol_set ? cfg.tol : 1e-6;
  std::vector<IdentityLine> lines;
  json state;
  if (!cfg.state.empty() == !cfg.potential.empty())
    throw UsageError("kramers needs exactly one of --state or --potential");
  if (!cfg.state.empty()) {
    const auto [n, l] = parse_state(cfg.state);
    const BoundState s = bound_state(n, l);
    state = {{"n", n}, {"l", l}};
    auto exact = [&](const std::string &name, const Rational &r) { lines.push_back({name, pq(r), r == 0, to_string(r)}); };
    exact("virial", virial_residual(s));
    exact("force", force_rule_residual(s));
    for (FChoice c : all_f_choices()) {
      try {
        exact("general f=" + to_string(c), kramers_general(s, c));
      } catch (const DivergentExpectation &) {
        lines.push_back({"general f=" + to_string(c), "divergent", true});
      }
    }
    const auto [ja, jb] = parse_orders(cfg.orders, {-2 * l, 3});
    for (int J = ja; J <= jb; ++J) {
      try {
        exact("recurrence J=" + std::to_string(J), kramers_recurrence(s, J));
      } catch (const OutOfValidityRange &) {
        lines.push_back({"recurrence J=" + std::to_string(J), "out of range", true});
      }
    }
  } else {
    const Potential v0 = parse_potential(cfg.potential);
    if (cfg.nodes < 0 || cfg.l < 0)
      throw UsageError("--nodes and --l must be nonnegative");
    const GridFunction g = solve_bound(v0, cfg.l, cfg.nodes);
    state = {{"potential", v0.name()}, {"nodes", cfg.nodes}, {"l", cfg.l}};
    auto numeric = [&](const std::string &name, double r) { lines.push_back({name, num(r), std::abs(r) <= tol}); };
    numeric("virial", virial_residual(g, v0));
    numeric("force", force_rule_residual(g, v0));
    for (FChoice c : all_f_choices()) {
      try {
        numeric("general f=" + to_string(c), kramers_general(g, v0, c));
      } catch (const DivergentExpectation &) {
        lines.push_back({"general f=" + to_string(c), "divergent", true});
      }
    }
  }
  bool ok = true;
  for (const auto &x : lines)
    ok = ok && x.pass;
  if (f == Format::Json) {
    json out = json::array();
    for (const auto &x : lines)
      out.push_back({{"state", state}, {"identity", x.name}, {"residual", x.residual}, {"pass", x.pass}});
    std::cout << out.dump(2) << "\n";
  } else if (f == Format::Csv) {
    std::cout << "identity,residual,pass\n";
    for (const auto &x : lines)
      std::cout << x.name << "," << x.residual << "," << (x.pass ? "true" : "false") << "\n";
  } else {
    for (const auto &x : lines)
      std::printf("%-28s %24s  %s\n", x.name.c_str(), (x.text.empty() ? x.residual : x.text).c_str(), x.pass ? "PASS" : "FAIL");
  }
  return ok ? kExitPass : kExitFail;
}

int cmd_potential(const RunConfig &cfg) {
  const Format f = parse_format(cfg.format);
  if (cfg.potential.empty())
    throw UsageError("potential needs --potential");
  const Potential v0 = parse_potential(cfg.potential);
  if (cfg.nodes < 0 || cfg.l < 0)
    throw UsageError("--nodes and --l must be nonnegative");
  json out = json::array();
  if (f == Format::Csv)
    std::cout << "nodes,l,energy,virial,force,points,rho_max\n";
  else if (f == Format::Text)
    std::printf("%s l=%d\n%5s %20s %12s %12s %8s %10s\n", v0.name().c_str(), cfg.l, "nodes", "energy", "virial", "force",
                "points", "rho_max");
  for (int k = 0; k <= cfg.nodes; ++k) {
    const GridFunction g = solve_bound(v0, cfg.l, k);
    const double vir = virial_residual(g, v0), force = force_rule_residual(g, v0);
    if (f == Format::Json)
      out.push_back({{"potential", v0.name()}, {"nodes", k}, {"l", cfg.l}, {"energy", g.energy}, {"virial", vir},
                     {"force", force}, {"points", g.size()}, {"rho_max", g.rho.back()}});
    else if (f == Format::Csv)
      std::cout << k << "," << cfg.l << "," << num(g.energy) << "," << num(vir) << "," << num(force) << "," << g.size()
                << "," << num(g.rho.back()) << "\n";
    else
      std::printf("%5d %20.12f %12.3e %12.3e %8zu %10.4g\n", k, g.energy, vir, force, g.size(), g.rho.back());
  }
  if (f == Format::Json)
    std::cout << out.dump(2) << "\n";
  return kExitPass;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Spectral sum rules for hydrogenic and power-law radial problems"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file; command-line flags take precedence");

  RunConfig cfg;
  app.add_option("--state", cfg.state, "hydrogen state, e.g. 1s, 2p or 3,2");
  app.add_option("--potential", cfg.potential, "coulomb, log or gamma=<p/q>");
  app.add_option("--nodes", cfg.nodes, "radial nodes of a solved state");
  app.add_option("--l", cfg.l, "angular momentum of a solved state");
  app.add_option("--orders", cfg.orders, "order range A..B");
  app.add_option("--channel", cfg.channel, "plus, minus, total or all");
  app.add_option("--nmax", cfg.n_max, "discrete terms kept");
  auto *tol = app.add_option("--tol", cfg.tol, "pass tolerance");
  app.add_option("--format", cfg.format, "text, json or csv");
  app.add_option("--suite", cfg.suite, "paper-tables, identities, equivalences, contour or all");
  app.add_option("--to", cfg.to, "final bound state for matrix");
  app.add_option("--q", cfg.q, "continuum momentum for matrix");

  auto *table = app.add_subcommand("table", "discrete, continuum and exact values per order");
  auto *verify = app.add_subcommand("verify", "run a verification suite");
  auto *matrix = app.add_subcommand("matrix", "one squared dipole matrix element");
  auto *kramers = app.add_subcommand("kramers", "identity residuals for one state");
  auto *potential = app.add_subcommand("potential", "solver diagnostics");
  for (auto *s : {table, verify, matrix, kramers, potential})
    s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }
  cfg.tol_set = tol->count() > 0;

  try {
    if (table->parsed())
      return cmd_table(cfg);
    if (verify->parsed())
      return cmd_verify(cfg);
    if (matrix->parsed())
      return cmd_matrix(cfg);
    if (kramers->parsed())
      return cmd_kramers(cfg);
    return cmd_potential(cfg);
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidQuantumNumbers &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ChannelMismatch &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NonPositiveQ &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
