#include "payctl/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "payctl/dynamics.hpp"
#include "payctl/error.hpp"
#include "payctl/io.hpp"
#include "payctl/montecarlo.hpp"
#include "payctl/ruling.hpp"
#include "payctl/synthesis.hpp"
#include "payctl/verify.hpp"

namespace payctl {

namespace {

struct Flags {
  std::string game;
  std::string strategy;
  std::optional<std::string> schedule;
  std::string controllers;
  std::string alpha;
  double gamma = 0.0;
  std::size_t samples = 20000;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  std::string mode = "independent";
  std::string out;
  double boundary_fraction = 0.1;
  std::string candidate;
  std::size_t budget = 200;
  std::optional<std::size_t> max_rounds;
};

// Thrown for problems the user can fix on the command line.
struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join(const Vec& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
  return s;
}

std::string relation_text(const PayoffRelation& r) {
  std::ostringstream out;
  out << std::setprecision(12);
  bool first = true;
  for (Eigen::Index i = 0; i < r.alpha.size(); ++i) {
    if (r.alpha[i] == 0.0) continue;
    out << (first ? (r.alpha[i] < 0 ? "-" : "") : (r.alpha[i] < 0 ? " - " : " + "));
    if (std::fabs(std::fabs(r.alpha[i]) - 1.0) > 1e-9) out << std::fabs(r.alpha[i]) << "*";
    out << "u" << i + 1;
    first = false;
  }
  if (r.gamma != 0.0 || first) {
    out << (first ? (r.gamma < 0 ? "-" : "") : (r.gamma < 0 ? " - " : " + ")) << std::fabs(r.gamma);
  }
  out << " = 0";
  return out.str();
}

struct Inputs {
  GameSpec game;
  Document strategies;
  ContinuationSchedule schedule = ContinuationSchedule::infinite();
};

Inputs load(const Flags& f, bool need_strategy) {
  if (f.game.empty()) throw Usage("--game is required");
  Document gdoc = read_document(f.game);
  if (!gdoc.game) throw Usage(f.game + ": no [game] section");
  Inputs in{*gdoc.game, {}, ContinuationSchedule::infinite()};
  in.strategies.strategies = gdoc.strategies;
  in.strategies.joint = gdoc.joint;
  if (!f.strategy.empty()) {
    Document sdoc = read_document(f.strategy, &in.game);
    if (sdoc.game && !(*sdoc.game == in.game)) throw Usage(f.strategy + ": [game] differs from " + f.game);
    for (auto& s : sdoc.strategies) in.strategies.strategies.push_back(std::move(s));
    if (sdoc.joint) in.strategies.joint = sdoc.joint;
    if (sdoc.schedule) gdoc.schedule = sdoc.schedule;
  }
  if (need_strategy && in.strategies.strategies.empty() && !in.strategies.joint) {
    throw Usage("no strategies given (use --strategy)");
  }
  if (f.schedule) in.schedule = parse_schedule_flag(*f.schedule);
  else if (gdoc.schedule) in.schedule = *gdoc.schedule;
  return in;
}

std::vector<std::size_t> parse_players(const std::string& text, const GameSpec& game) {
  std::vector<std::size_t> out;
  for (double x : parse_number_list(text, "--controllers")) {
    if (x < 1 || x != std::floor(x) || x > static_cast<double>(game.player_count())) {
      throw Usage("--controllers: no player " + format_number(x));
    }
    out.push_back(static_cast<std::size_t>(x) - 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// The controlling group: the [joint] block if present, otherwise the listed
// (or all given) single-player strategies acting independently.
GroupStrategy controller_group(const Flags& f, const Inputs& in) {
  if (in.strategies.joint && f.controllers.empty()) return *in.strategies.joint;
  std::vector<MarkovStrategy> members;
  if (f.controllers.empty()) {
    members = in.strategies.strategies;
  } else {
    const auto wanted = parse_players(f.controllers, in.game);
    if (in.strategies.joint && in.strategies.joint->players == wanted) return *in.strategies.joint;
    for (auto p : wanted) {
      auto it = std::find_if(in.strategies.strategies.begin(), in.strategies.strategies.end(),
                             [&](const MarkovStrategy& s) { return s.player == p; });
      if (it == in.strategies.strategies.end()) throw Usage("no strategy for player " + std::to_string(p + 1));
      members.push_back(*it);
    }
  }
  std::sort(members.begin(), members.end(), [](const auto& a, const auto& b) { return a.player < b.player; });
  return product_strategy(in.game, members);
}

PayoffRelation target_relation(const Flags& f, const GameSpec& game) {
  if (f.alpha.empty()) throw Usage("--alpha is required");
  const auto alpha = parse_number_list(f.alpha, "--alpha");
  if (alpha.size() != game.player_count()) {
    throw Usage("--alpha needs " + std::to_string(game.player_count()) + " coefficients");
  }
  return PayoffRelation{Eigen::Map<const Vec>(alpha.data(), static_cast<Eigen::Index>(alpha.size())), f.gamma};
}

void emit(const Flags& f, std::ostream& out, const std::string& text) {
  if (f.out.empty() || f.out == "-") {
    out << text;
  } else {
    write_file(f.out, text);
  }
}

int cmd_synth(const Flags& f, std::ostream& out, std::ostream& err) {
  const Inputs in = load(f, false);
  if (f.controllers.empty()) throw Usage("--controllers is required");
  SynthesisTarget target{target_relation(f, in.game), parse_players(f.controllers, in.game),
                         f.mode == "correlated" ? AllianceMode::Correlated : AllianceMode::Independent};
  const auto outcome = synthesize(in.game, in.schedule, target);
  if (const auto* no = std::get_if<Infeasible>(&outcome)) {
    err << "infeasible (" << to_string(no->kind) << (no->conclusive ? ", proof" : ", inconclusive") << "): "
        << no->detail << '\n';
    return no->conclusive ? kExitInfeasible : kExitInconclusive;
  }
  const auto& r = std::get<SynthesisResult>(outcome);
  std::ostringstream file;
  file << "# enforces " << relation_text(r.relation) << " under " << in.schedule.describe() << '\n';
  file << "# method " << to_string(r.method) << ", margin " << format_number(r.margin) << '\n';
  if (r.mode == AllianceMode::Correlated) {
    file << "# correlated alliance: members share randomness\n";
    file << write_joint(in.game, r.joint);
  } else {
    for (std::size_t k = 0; k < r.members.size(); ++k) {
      if (k) file << '\n';
      file << write_strategy(in.game, r.members[k]);
    }
  }
  emit(f, out, file.str());
  err << "method: " << to_string(r.method) << '\n'
      << "relation: " << relation_text(r.relation) << '\n'
      << "y: " << join(r.y) << '\n'
      << "margin: " << format_number(r.margin) << '\n'
      << "residual: " << format_number(r.residual) << '\n';
  if (r.mode == AllianceMode::Correlated) err << "note: correlated mode assumes shared randomness\n";
  return kExitOk;
}

int cmd_verify(const Flags& f, std::ostream& out, std::ostream&) {
  const Inputs in = load(f, true);
  const GroupStrategy group = controller_group(f, in);
  VerifyOptions opts;
  opts.samples = f.samples;
  opts.tol = f.tol;
  opts.seed = f.seed;
  opts.boundary_fraction = f.boundary_fraction;
  const auto report = verify_relation(in.game, in.schedule, group, target_relation(f, in.game), opts);
  if (!f.out.empty()) {
    std::ofstream csv(f.out, std::ios::binary);
    if (!csv) throw Usage(f.out + ": cannot write");
    write_verify_csv(csv, report, in.game.player_count());
  }
  out << (report.pass ? "PASS" : "FAIL") << " max |violation| " << format_number(report.max_abs_violation)
      << " (interior " << format_number(report.max_interior) << ", boundary "
      << format_number(report.max_boundary) << ") over " << report.records.size() << " samples";
  if (report.skipped) out << ", " << report.skipped << " skipped";
  out << '\n';
  if (!report.pass) {
    out << "worst opponent:\n";
    for (const auto& s : report.worst_opponent) out << write_strategy(in.game, s);
  }
  return report.pass ? kExitOk : kExitVerifyFailed;
}

int cmd_detect(const Flags& f, std::ostream& out, std::ostream&) {
  const Inputs in = load(f, true);
  const auto relations = detect_relations(in.game, controller_group(f, in), in.schedule);
  if (relations.empty()) out << "no relations enforced\n";
  for (const auto& r : relations) {
    out << relation_text(r) << "    # alpha = " << join(r.alpha) << "; gamma = " << format_number(r.gamma) << '\n';
  }
  return kExitOk;
}

int cmd_simulate(const Flags& f, std::ostream& out, std::ostream&) {
  const Inputs in = load(f, true);
  std::vector<GroupStrategy> groups;
  if (in.strategies.joint) groups.push_back(*in.strategies.joint);
  for (const auto& s : in.strategies.strategies) {
    bool inside = in.strategies.joint && std::count(in.strategies.joint->players.begin(),
                                                    in.strategies.joint->players.end(), s.player);
    if (!inside) groups.push_back(product_strategy(in.game, std::span(&s, 1)));
  }
  const StrategyProfile profile = make_profile(in.game, std::move(groups));
  MonteCarloOptions mc;
  mc.episodes = f.samples;
  mc.seed = f.seed;
  mc.round_cap = f.max_rounds;
  const auto sim = monte_carlo_play(in.game, profile, in.schedule, mc);
  std::optional<Vec> exact;
  try {
    exact = effective_payoffs(in.game, profile, in.schedule);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoConvergence) throw;
  }
  std::ostringstream table;
  table << "player,mean,std_error,exact\n";
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::string(buf);
  };
  for (Eigen::Index i = 0; i < sim.mean.size(); ++i) {
    table << i + 1 << ',' << num(sim.mean[i]) << ',' << num(sim.std_error[i]) << ','
          << (exact ? num((*exact)[i]) : std::string("nan")) << '\n';
  }
  out << "episodes " << sim.episodes << ", mean rounds " << num(sim.mean_rounds) << '\n';
  if (!f.out.empty()) write_file(f.out, table.str());
  else out << table.str();
  return kExitOk;
}

int cmd_classify(const Flags& f, std::ostream& out, std::ostream&) {
  if (!f.schedule && f.game.empty()) throw Usage("--schedule is required");
  ContinuationSchedule schedule = ContinuationSchedule::infinite();
  if (f.schedule) schedule = parse_schedule_flag(*f.schedule);
  else {
    const auto doc = read_document(f.game);
    if (!doc.schedule) throw Usage(f.game + ": no [schedule] section");
    schedule = *doc.schedule;
  }
  const auto c = classify_schedule(schedule);
  out << "schedule: " << schedule.describe() << '\n' << "class: " << to_string(c.kind);
  if (c.kind == ScheduleClass::DeltaRepeated) out << " (delta = " << format_number(c.delta) << ")";
  out << '\n';
  const auto rounds = expected_rounds(schedule);
  out << "expected rounds: " << (rounds ? format_number(*rounds) : std::string("infinite")) << '\n';
  out << "strict Markov ruling vectors: "
      << (c.kind == ScheduleClass::Other ? "not available" : "available") << '\n';
  return kExitOk;
}

int cmd_falsify(const Flags& f, std::ostream& out, std::ostream&) {
  const Inputs in = load(f, true);
  const GroupStrategy group = controller_group(f, in);
  Vec candidate;
  if (f.candidate.empty()) {
    // Default: the infinite-form ruling vector of the group's first joint action.
    candidate = ruling_family(in.game, group, RulingForm::infinite()).col(0);
  } else {
    const auto values = parse_number_list(f.candidate, "--candidate");
    candidate = Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
  }
  FalsifyOptions opts;
  opts.budget = f.budget;
  opts.seed = f.seed;
  const auto report = falsify_candidate(in.game, in.schedule, group, candidate, opts);
  std::ostringstream text;
  text << "# candidate = " << join(report.candidate) << '\n'
       << "# schedule = " << in.schedule.describe() << '\n'
       << "# achieved |<candidate, v>| = " << format_number(report.achieved) << '\n'
       << "# evaluations = " << report.evaluations << '\n';
  if (report.counterexample) {
    text << "# counterexample opponents:\n";
    for (const auto& s : *report.counterexample) text << write_strategy(in.game, s);
  } else {
    text << "# no counterexample above " << format_number(opts.threshold) << " (inconclusive)\n";
  }
  emit(f, out, text.str());
  return report.counterexample ? kExitOk : kExitInconclusive;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ruling strategies in generalized repeated games", "payctl"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--game", f.game, "game file ([game] section)");
    sub->add_option("--schedule", f.schedule, "infinite | delta:<x> | horizon:<T> | custom:<file>");
    sub->add_option("--out", f.out, "output file");
    sub->add_option("--seed", f.seed, "random seed");
  };
  auto relation = [&](CLI::App* sub) {
    sub->add_option("--alpha", f.alpha, "comma-separated payoff coefficients");
    sub->add_option("--gamma", f.gamma, "constant term");
  };
  auto strategies = [&](CLI::App* sub) {
    sub->add_option("--strategy", f.strategy, "strategy file");
    sub->add_option("--controllers", f.controllers, "controlling players, 1-based, comma-separated");
  };

  auto* synth = app.add_subcommand("synth", "synthesise a ruling strategy for a target relation");
  common(synth);
  relation(synth);
  synth->add_option("--controllers", f.controllers, "controlling players, 1-based, comma-separated");
  synth->add_option("--mode", f.mode, "independent | correlated")
      ->check(CLI::IsMember({"independent", "correlated"}));

  auto* verify = app.add_subcommand("verify", "check a relation against sampled opponents");
  common(verify);
  relation(verify);
  strategies(verify);
  verify->add_option("--samples", f.samples, "opponent samples")->check(CLI::PositiveNumber);
  verify->add_option("--tol", f.tol, "pass threshold")->check(CLI::PositiveNumber);
  verify->add_option("--boundary-fraction", f.boundary_fraction, "share of boundary opponents")
      ->check(CLI::Range(0.0, 1.0));

  auto* detect = app.add_subcommand("detect", "list relations enforced by the given strategies");
  common(detect);
  strategies(detect);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo play of a full strategy profile");
  common(simulate);
  simulate->add_option("--strategy", f.strategy, "strategy file covering every player");
  simulate->add_option("--samples", f.samples, "episodes")->check(CLI::PositiveNumber);
  simulate->add_option("--max-rounds", f.max_rounds, "round cap per episode");

  auto* classify = app.add_subcommand("classify", "which ruling-vector form a schedule admits");
  common(classify);

  auto* falsify = app.add_subcommand("falsify", "search for opponents breaking a candidate vector");
  common(falsify);
  strategies(falsify);
  falsify->add_option("--candidate", f.candidate, "comma-separated |A|-vector");
  falsify->add_option("--budget", f.budget, "random restarts")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(f, out, err);
    if (verify->parsed()) return cmd_verify(f, out, err);
    if (detect->parsed()) return cmd_detect(f, out, err);
    if (simulate->parsed()) return cmd_simulate(f, out, err);
    if (classify->parsed()) return cmd_classify(f, out, err);
    if (falsify->parsed()) return cmd_falsify(f, out, err);
  } catch (const Usage& e) {
    err << "usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace payctl
