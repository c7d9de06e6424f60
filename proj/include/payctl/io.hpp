#pragma once

// Text files for games, strategies and schedules, plus CSV output.
//
// A file is a sequence of sections; '#' starts a comment.
//
//   [game]
//   players = 2
//   actions.1 = C, D
//   actions.2 = C, D
//   payoffs =            # one row per profile, canonical order
//     3, 3
//     0, 5
//     5, 0
//     1, 1
//
//   [strategy.1]         # player numbers are 1-based
//   initial = 1, 0
//   conditionals =
//     1, 0
//     ...
//
//   [joint]              # correlated alliance
//   players = 1, 2
//   initial = ...
//   conditionals = ...
//
//   [schedule]
//   kind = delta         # infinite | delta | horizon | custom
//   delta = 0.9          # horizon = T;  values = ...  tail = x
//
// A value may continue on following indented lines. Numbers are written in
// the shortest form that reads back to the same double.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "payctl/game.hpp"
#include "payctl/schedule.hpp"
#include "payctl/strategy.hpp"
#include "payctl/verify.hpp"

namespace payctl {

struct Document {
  std::optional<GameSpec> game;
  std::vector<MarkovStrategy> strategies;
  std::optional<GroupStrategy> joint;
  std::optional<ContinuationSchedule> schedule;
};

// `context` supplies the game for strategy-only files. Throws ParseError for
// malformed text and ValidationError when the content breaks a game or
// strategy invariant; both name the source and line.
Document parse_document(std::string_view text, const GameSpec* context = nullptr,
                        const std::string& source = "<input>");
Document read_document(const std::filesystem::path& path, const GameSpec* context = nullptr);

std::string format_number(double x);
std::string write_game(const GameSpec& game);
std::string write_strategy(const GameSpec& game, const MarkovStrategy& strategy);
std::string write_joint(const GameSpec& game, const GroupStrategy& joint);
std::string write_schedule(const ContinuationSchedule& schedule);
std::string write_document(const Document& doc);
void write_file(const std::filesystem::path& path, const std::string& contents);

// infinite | delta:<x> | horizon:<T> | custom:<file with a [schedule] section>
ContinuationSchedule parse_schedule_flag(std::string_view flag);

// "0,1,-2" -> numbers; ParseError names `what` on failure.
std::vector<double> parse_number_list(std::string_view text, const std::string& what);

// sample id, u_bar_1..u_bar_n, residual; 12 significant digits.
void write_verify_csv(std::ostream& out, const VerifyReport& report, std::size_t players);

}  // namespace payctl
