#include "payctl/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "payctl/error.hpp"

namespace payctl {

namespace {

struct Field {
  std::string value;
  std::size_t line = 0;
};

struct Section {
  std::string name;
  std::size_t line = 0;
  std::map<std::string, Field> fields;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::ParseError, source + ":" + std::to_string(line) + ": " + msg);
}

std::vector<Section> split_sections(std::string_view text, const std::string& source) {
  std::vector<Section> sections;
  Field* open = nullptr;  // field accepting continuation lines
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const bool indented = raw.front() == ' ' || raw.front() == '\t';
    if (line.front() == '[') {
      if (line.back() != ']') parse_fail(source, line_no, "unterminated section header");
      sections.push_back({std::string(trim(line.substr(1, line.size() - 2))), line_no, {}});
      open = nullptr;
      continue;
    }
    if (indented && open != nullptr) {
      open->value += '\n';
      open->value += line;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_fail(source, line_no, "expected 'key = value'");
    if (sections.empty()) parse_fail(source, line_no, "field outside any section");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) parse_fail(source, line_no, "empty key");
    auto [it, inserted] = sections.back().fields.emplace(key, Field{std::string(trim(line.substr(eq + 1))), line_no});
    if (!inserted) parse_fail(source, line_no, "duplicate key '" + key + "'");
    open = &it->second;
  }
  return sections;
}

double parse_double(std::string_view token, const std::string& source, std::size_t line) {
  token = trim(token);
  double x = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  if (!token.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, x);
  if (ec != std::errc() || ptr != end || token.empty()) {
    parse_fail(source, line, "not a number: '" + std::string(token) + "'");
  }
  if (!std::isfinite(x)) parse_fail(source, line, "not a finite number: '" + std::string(token) + "'");
  return x;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s = s.substr(pos + 1);
  }
  return out;
}

std::vector<double> numbers(const Field& f, const std::string& source) {
  std::vector<double> out;
  std::size_t line = f.line;
  for (auto row : split(f.value, '\n')) {
    if (!row.empty()) {
      for (auto tok : split(row, ',')) out.push_back(parse_double(tok, source, line));
    }
    ++line;
  }
  return out;
}

// Rows of a multi-line value; a value on the key line counts as the first row.
std::vector<std::vector<double>> rows(const Field& f, const std::string& source) {
  std::vector<std::vector<double>> out;
  std::size_t line = f.line;
  for (auto row : split(f.value, '\n')) {
    if (!row.empty()) {
      std::vector<double> values;
      for (auto tok : split(row, ',')) values.push_back(parse_double(tok, source, line));
      out.push_back(std::move(values));
    }
    ++line;
  }
  return out;
}

std::size_t parse_count(const Field& f, const std::string& source) {
  const double x = parse_double(f.value, source, f.line);
  if (x < 0 || x != std::floor(x) || x > 1e9) parse_fail(source, f.line, "expected a non-negative integer");
  return static_cast<std::size_t>(x);
}

const Field& need(const Section& s, const std::string& key, const std::string& source) {
  const auto it = s.fields.find(key);
  if (it == s.fields.end()) parse_fail(source, s.line, "[" + s.name + "] is missing '" + key + "'");
  return it->second;
}

void reject_unknown(const Section& s, std::initializer_list<std::string_view> allowed, const std::string& source,
                    std::string_view prefix = {}) {
  for (const auto& [key, field] : s.fields) {
    bool ok = !prefix.empty() && key.rfind(prefix, 0) == 0;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) parse_fail(source, field.line, "unknown key '" + key + "' in [" + s.name + "]");
  }
}

// Re-throws library validation errors with file context.
template <typename F>
auto validated(const std::string& source, std::size_t line, const std::string& where, F&& build) {
  try {
    return build();
  } catch (const Error& e) {
    throw Error(ErrorKind::ValidationError,
                source + ":" + std::to_string(line) + ": [" + where + "] " + e.what());
  }
}

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Mat to_table(const std::vector<std::vector<double>>& r, const Field& f, const std::string& source) {
  if (r.empty()) return Mat(0, 0);
  Mat m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r[0].size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i].size() != r[0].size()) parse_fail(source, f.line, "ragged table at row " + std::to_string(i + 1));
    for (std::size_t j = 0; j < r[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[i][j];
  }
  return m;
}

std::vector<std::size_t> player_list(const Field& f, const std::string& source) {
  std::vector<std::size_t> out;
  for (double x : numbers(f, source)) {
    if (x < 1 || x != std::floor(x)) parse_fail(source, f.line, "player numbers start at 1");
    out.push_back(static_cast<std::size_t>(x) - 1);
  }
  return out;
}

GameSpec parse_game(const Section& s, const std::string& source) {
  reject_unknown(s, {"players", "payoffs"}, source, "actions.");
  const std::size_t n = parse_count(need(s, "players", source), source);
  std::vector<std::vector<std::string>> labels;
  for (std::size_t i = 1; i <= n; ++i) {
    const Field& f = need(s, "actions." + std::to_string(i), source);
    std::vector<std::string> names;
    for (auto tok : split(f.value, ',')) names.emplace_back(tok);
    labels.push_back(std::move(names));
  }
  for (const auto& [key, field] : s.fields) {
    if (key.rfind("actions.", 0) == 0 && !labels.empty()) {
      const std::string idx = key.substr(8);
      const bool known = !idx.empty() && idx.find_first_not_of("0123456789") == std::string::npos &&
                         std::stoul(idx) >= 1 && std::stoul(idx) <= n;
      if (!known) parse_fail(source, field.line, "'" + key + "' does not name a player");
    }
  }
  const Field& pay = need(s, "payoffs", source);
  const Eigen::MatrixXd table = to_table(rows(pay, source), pay, source);
  return validated(source, pay.line, s.name, [&] { return build_game(n, labels, table); });
}

ContinuationSchedule parse_schedule_section(const Section& s, const std::string& source) {
  const Field& kind = need(s, "kind", source);
  auto build = [&](auto f) { return validated(source, kind.line, s.name, f); };
  if (kind.value == "infinite") {
    reject_unknown(s, {"kind"}, source);
    return ContinuationSchedule::infinite();
  }
  if (kind.value == "delta") {
    reject_unknown(s, {"kind", "delta"}, source);
    const Field& d = need(s, "delta", source);
    const double delta = parse_double(d.value, source, d.line);
    return build([&] { return ContinuationSchedule::delta(delta); });
  }
  if (kind.value == "horizon") {
    reject_unknown(s, {"kind", "horizon"}, source);
    const std::size_t t = parse_count(need(s, "horizon", source), source);
    return build([&] { return ContinuationSchedule::horizon(t); });
  }
  if (kind.value == "custom") {
    reject_unknown(s, {"kind", "values", "tail"}, source);
    const auto values = numbers(need(s, "values", source), source);
    const Field& t = need(s, "tail", source);
    const double tail = parse_double(t.value, source, t.line);
    return build([&] { return ContinuationSchedule::custom(values, tail); });
  }
  parse_fail(source, kind.line, "unknown schedule kind '" + kind.value + "'");
}

void print_row(std::ostringstream& out, const auto& row) {
  for (Eigen::Index j = 0; j < row.size(); ++j) out << (j ? ", " : "") << format_number(row[j]);
}

void print_table(std::ostringstream& out, const GameSpec& game, const auto& table) {
  for (Eigen::Index a = 0; a < table.rows(); ++a) {
    out << "  ";
    print_row(out, table.row(a));
    out << "  # " << game.profile_name(static_cast<std::size_t>(a)) << '\n';
  }
}

}  // namespace

Document parse_document(std::string_view text, const GameSpec* context, const std::string& source) {
  const auto sections = split_sections(text, source);
  Document doc;
  for (const auto& s : sections) {
    if (s.name == "game") {
      if (doc.game) parse_fail(source, s.line, "second [game] section");
      doc.game = parse_game(s, source);
    }
  }
  const GameSpec* game = doc.game ? &*doc.game : context;
  for (const auto& s : sections) {
    if (s.name == "game") continue;
    if (s.name == "schedule") {
      if (doc.schedule) parse_fail(source, s.line, "second [schedule] section");
      doc.schedule = parse_schedule_section(s, source);
      continue;
    }
    const bool single = s.name.rfind("strategy.", 0) == 0;
    if (!single && s.name != "joint") parse_fail(source, s.line, "unknown section [" + s.name + "]");
    if (game == nullptr) {
      throw Error(ErrorKind::ValidationError,
                  source + ":" + std::to_string(s.line) + ": [" + s.name + "] needs a game to check against");
    }
    const Field& init = need(s, "initial", source);
    const Field& cond = need(s, "conditionals", source);
    const Vec initial = to_vec(numbers(init, source));
    const Mat table = to_table(rows(cond, source), cond, source);
    if (single) {
      reject_unknown(s, {"initial", "conditionals"}, source);
      const std::string idx = s.name.substr(9);
      if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos || std::stoul(idx) == 0) {
        parse_fail(source, s.line, "bad player number in [" + s.name + "]");
      }
      const std::size_t player = std::stoul(idx) - 1;
      for (const auto& other : doc.strategies) {
        if (other.player == player) parse_fail(source, s.line, "second [" + s.name + "] section");
      }
      doc.strategies.push_back(validated(source, s.line, s.name, [&] {
        return make_markov_strategy(*game, player, initial, table);
      }));
    } else {
      reject_unknown(s, {"players", "initial", "conditionals"}, source);
      if (doc.joint) parse_fail(source, s.line, "second [joint] section");
      const auto players = player_list(need(s, "players", source), source);
      doc.joint = validated(source, s.line, s.name, [&] {
        return correlated_strategy(*game, players, initial, table);
      });
    }
  }
  return doc;
}

Document read_document(const std::filesystem::path& path, const GameSpec* context) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str(), context, path.string());
}

std::string format_number(double x) {
  if (x == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

std::string write_game(const GameSpec& game) {
  std::ostringstream out;
  out << "[game]\nplayers = " << game.player_count() << '\n';
  for (std::size_t i = 0; i < game.player_count(); ++i) {
    out << "actions." << i + 1 << " = ";
    const auto& labels = game.action_labels(i);
    for (std::size_t k = 0; k < labels.size(); ++k) out << (k ? ", " : "") << labels[k];
    out << '\n';
  }
  out << "payoffs =\n";
  print_table(out, game, game.payoffs());
  return out.str();
}

std::string write_strategy(const GameSpec& game, const MarkovStrategy& strategy) {
  std::ostringstream out;
  out << "[strategy." << strategy.player + 1 << "]\ninitial = ";
  print_row(out, strategy.initial);
  out << "\nconditionals =\n";
  print_table(out, game, strategy.conditionals);
  return out.str();
}

std::string write_joint(const GameSpec& game, const GroupStrategy& joint) {
  std::ostringstream out;
  out << "[joint]\nplayers = ";
  for (std::size_t k = 0; k < joint.players.size(); ++k) out << (k ? ", " : "") << joint.players[k] + 1;
  out << "\ninitial = ";
  print_row(out, joint.initial);
  out << "\nconditionals =\n";
  print_table(out, game, joint.conditionals);
  return out.str();
}

std::string write_schedule(const ContinuationSchedule& schedule) {
  std::ostringstream out;
  out << "[schedule]\n";
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, InfiniteSchedule>) {
          out << "kind = infinite\n";
        } else if constexpr (std::is_same_v<T, DeltaSchedule>) {
          out << "kind = delta\ndelta = " << format_number(s.delta) << '\n';
        } else if constexpr (std::is_same_v<T, HorizonSchedule>) {
          out << "kind = horizon\nhorizon = " << s.horizon << '\n';
        } else {
          out << "kind = custom\nvalues = ";
          for (std::size_t t = 0; t < s.values.size(); ++t) out << (t ? ", " : "") << format_number(s.values[t]);
          out << "\ntail = " << format_number(s.tail) << '\n';
        }
      },
      schedule.variant());
  return out.str();
}

std::string write_document(const Document& doc) {
  std::string out;
  auto append = [&](const std::string& block) {
    if (!out.empty()) out += '\n';
    out += block;
  };
  if (doc.game) append(write_game(*doc.game));
  if ((!doc.strategies.empty() || doc.joint) && !doc.game) {
    throw Error(ErrorKind::InvalidParams, "writing strategies needs the game for row labels");
  }
  for (const auto& s : doc.strategies) append(write_strategy(*doc.game, s));
  if (doc.joint) append(write_joint(*doc.game, *doc.joint));
  if (doc.schedule) append(write_schedule(*doc.schedule));
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ParseError, path.string() + ": cannot write");
  out << contents;
}

std::vector<double> parse_number_list(std::string_view text, const std::string& what) {
  std::vector<double> out;
  for (auto tok : split(text, ',')) out.push_back(parse_double(tok, what, 1));
  return out;
}

ContinuationSchedule parse_schedule_flag(std::string_view flag) {
  const std::string source = "--schedule";
  if (flag == "infinite") return ContinuationSchedule::infinite();
  const auto colon = flag.find(':');
  if (colon == std::string_view::npos) parse_fail(source, 1, "expected infinite, delta:x, horizon:T or custom:file");
  const std::string_view kind = flag.substr(0, colon);
  const std::string_view arg = flag.substr(colon + 1);
  try {
    if (kind == "delta") return ContinuationSchedule::delta(parse_double(arg, source, 1));
    if (kind == "horizon") {
      const double t = parse_double(arg, source, 1);
      if (t < 0 || t != std::floor(t)) parse_fail(source, 1, "horizon must be a whole number");
      return ContinuationSchedule::horizon(static_cast<std::size_t>(t));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    throw Error(ErrorKind::ValidationError, source + ": " + e.what());
  }
  if (kind == "custom") {
    const auto doc = read_document(std::filesystem::path(std::string(arg)));
    if (!doc.schedule) throw Error(ErrorKind::ParseError, std::string(arg) + ": no [schedule] section");
    return *doc.schedule;
  }
  parse_fail(source, 1, "unknown schedule kind '" + std::string(kind) + "'");
}

void write_verify_csv(std::ostream& out, const VerifyReport& report, std::size_t players) {
  out << "sample";
  for (std::size_t i = 1; i <= players; ++i) out << ",u" << i;
  out << ",residual\n";
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
  };
  for (const auto& r : report.records) {
    out << r.id;
    for (Eigen::Index i = 0; i < r.payoffs.size(); ++i) out << ',' << num(r.payoffs[i]);
    out << ',' << num(r.residual) << '\n';
  }
}

}  // namespace payctl
