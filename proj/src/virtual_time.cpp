#include "afdo/virtual_time.hpp"

#include <cctype>
#include <stdexcept>
#include <string>

namespace afdo {

namespace {

// Reads a non-negative integer; returns false when the cursor is not on a
// digit.
bool read_number(const std::string& text, std::size_t& pos, long long& value) {
  if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
    return false;
  }
  value = 0;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    value = value * 10 + (text[pos] - '0');
    if (value > 1'000'000'000'000LL) {
      throw std::invalid_argument("duration component too large: " + text);
    }
    ++pos;
  }
  return true;
}

}  // namespace

DurationMs parse_duration(const std::string& text) {
  if (text.empty() || text[0] != 'P') {
    throw std::invalid_argument("duration must start with 'P': " + text);
  }
  std::size_t pos = 1;
  bool in_time = false;
  bool any_component = false;
  bool time_component = false;
  // Each designator appears at most once, in canonical D < H < M < S order.
  int last_rank = -1;
  long long total_ms = 0;
  while (pos < text.size()) {
    if (text[pos] == 'T') {
      if (in_time) {
        throw std::invalid_argument("duplicate 'T' in duration: " + text);
      }
      in_time = true;
      ++pos;
      continue;
    }
    long long value = 0;
    if (!read_number(text, pos, value)) {
      throw std::invalid_argument("expected digit in duration: " + text);
    }
    if (pos >= text.size()) {
      throw std::invalid_argument("missing unit in duration: " + text);
    }
    const char unit = text[pos++];
    int rank = 0;
    if (!in_time) {
      if (unit == 'D') {
        total_ms += value * 86'400'000LL;
        rank = 0;
      } else {
        throw std::invalid_argument("unsupported date unit in duration: " + text);
      }
    } else {
      switch (unit) {
        case 'H': total_ms += value * 3'600'000LL; rank = 1; break;
        case 'M': total_ms += value * 60'000LL; rank = 2; break;
        case 'S': total_ms += value * 1'000LL; rank = 3; break;
        default:
          throw std::invalid_argument("unsupported time unit in duration: " + text);
      }
      time_component = true;
    }
    if (rank <= last_rank) {
      throw std::invalid_argument("repeated or out-of-order unit in duration: " + text);
    }
    last_rank = rank;
    any_component = true;
  }
  if (!any_component) {
    throw std::invalid_argument("empty duration: " + text);
  }
  if (in_time && !time_component) {
    throw std::invalid_argument("dangling 'T' in duration: " + text);
  }
  return DurationMs{total_ms};
}

std::string format_duration(DurationMs duration) {
  long long ms = duration.count();
  if (ms < 0) {
    throw std::invalid_argument("negative duration");
  }
  if (ms == 0) {
    return "PT0S";
  }
  if (ms % 1000 != 0) {
    // Sub-second durations never round-trip through the whole-second text
    // form; callers keep them numeric.
    throw std::invalid_argument("duration is not a whole number of seconds");
  }
  long long seconds = ms / 1000;
  const long long days = seconds / 86'400;
  seconds %= 86'400;
  const long long hours = seconds / 3'600;
  seconds %= 3'600;
  const long long minutes = seconds / 60;
  seconds %= 60;

  std::string out = "P";
  if (days > 0) {
    out += std::to_string(days) + "D";
  }
  if (hours > 0 || minutes > 0 || seconds > 0) {
    out += "T";
    if (hours > 0) out += std::to_string(hours) + "H";
    if (minutes > 0) out += std::to_string(minutes) + "M";
    if (seconds > 0) out += std::to_string(seconds) + "S";
  }
  return out;
}

}  // namespace afdo
