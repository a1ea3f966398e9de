#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

namespace avsearch {

enum class Action { turn_left, turn_right, move_forward, stay, commit };

// History slot: empty at episode start, filled as actions are taken.
using ActionHistory = std::array<std::optional<Action>, 4>;

inline const char* to_string(Action a) {
  switch (a) {
    case Action::turn_left: return "turn_left";
    case Action::turn_right: return "turn_right";
    case Action::move_forward: return "move_forward";
    case Action::stay: return "stay";
    case Action::commit: return "commit";
  }
  return "?";
}

inline Action action_from_string(const std::string& s) {
  if (s == "turn_left") return Action::turn_left;
  if (s == "turn_right") return Action::turn_right;
  if (s == "move_forward") return Action::move_forward;
  if (s == "stay") return Action::stay;
  if (s == "commit") return Action::commit;
  throw std::invalid_argument("unknown action: " + s);
}

// Wire/log encoding with a dedicated null token: 0 = none, 1..5 = actions.
inline int history_code(const std::optional<Action>& a) {
  return a ? static_cast<int>(*a) + 1 : 0;
}

inline std::optional<Action> history_from_code(int code) {
  if (code == 0) return std::nullopt;
  if (code < 0 || code > 5) throw std::invalid_argument("bad action history code");
  return static_cast<Action>(code - 1);
}

}  // namespace avsearch
