// Copyright 2026 The GSG-I Lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gsgi {

inline constexpr const char* kVersion = "0.1.0";

/// Grid coordinate. Row 0 is the top row, column 0 the left column.
struct Cell {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Compass moves plus "stand still". The numeric order is also the order of
/// network outputs and of direction-indexed feature vectors.
enum class Move : std::uint8_t { kUp = 0, kDown = 1, kLeft = 2, kRight = 3, kStay = 4 };

inline constexpr int kNumDirections = 4;
inline constexpr int kNumMoves = 5;
inline constexpr int kNumAttackerActions = 2 * kNumMoves;

enum class Side : std::uint8_t { kDefender = 0, kAttacker = 1 };

inline constexpr int num_actions(Side side) {
  return side == Side::kDefender ? kNumMoves : kNumAttackerActions;
}

inline constexpr Side other(Side side) {
  return side == Side::kDefender ? Side::kAttacker : Side::kDefender;
}

inline const char* to_string(Side side) {
  return side == Side::kDefender ? "defender" : "attacker";
}

inline constexpr Move opposite(Move m) {
  switch (m) {
    case Move::kUp: return Move::kDown;
    case Move::kDown: return Move::kUp;
    case Move::kLeft: return Move::kRight;
    case Move::kRight: return Move::kLeft;
    case Move::kStay: return Move::kStay;
  }
  return Move::kStay;
}

inline constexpr Cell offset(Cell c, Move m) {
  switch (m) {
    case Move::kUp: return {c.row - 1, c.col};
    case Move::kDown: return {c.row + 1, c.col};
    case Move::kLeft: return {c.row, c.col - 1};
    case Move::kRight: return {c.row, c.col + 1};
    case Move::kStay: return c;
  }
  return c;
}

inline constexpr bool on_grid(Cell c, int rows, int cols) {
  return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols;
}

/// Applies a move; off-grid moves resolve to staying put.
inline constexpr Cell apply_move(Cell c, Move m, int rows, int cols) {
  Cell next = offset(c, m);
  return on_grid(next, rows, cols) ? next : c;
}

/// Attacker joint action: index = move + 5 * place.
struct AttackerAction {
  Move move = Move::kStay;
  bool place = false;

  static constexpr AttackerAction decode(int index) {
    return {static_cast<Move>(index % kNumMoves), index >= kNumMoves};
  }
  constexpr int encode() const { return static_cast<int>(move) + (place ? kNumMoves : 0); }
};

/// Malformed configuration or argument. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation would exceed a configured node or memory budget. Exit code 3.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

}  // namespace gsgi
