#pragma once

#include <stdexcept>
#include <string>

namespace carleman {

/// Violated precondition on user-supplied data (bad table, bad parameter).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Query outside the range a truncated object can answer honestly
/// (radius beyond the last breakpoint, point outside a grid, tail too large).
class TruncationError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Outcome of a numerical check. `inconclusive` means the grid could not
/// bound a supremum or limit (running extremum still moving at the edge).
enum class Verdict { pass, failed, inconclusive };

inline Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::failed || b == Verdict::failed) return Verdict::failed;
  if (a == Verdict::inconclusive || b == Verdict::inconclusive) return Verdict::inconclusive;
  return Verdict::pass;
}

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::failed: return "failed";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace detail {
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InputError(msg);
}
}  // namespace detail

}  // namespace carleman
