#pragma once

#include <chrono>
#include <cstdint>
#include <string>

namespace afdo {

// Virtual timestamps are plain milliseconds on a simulated clock that starts
// at 0; nothing in the library ever reads the wall clock.
using VirtualTime = std::int64_t;

using DurationMs = std::chrono::milliseconds;

// Parses the ISO-8601 duration subset used by policy duties: days, hours,
// minutes and whole seconds ("P1D", "PT12H30M", "PT60S"). Unsupported
// designators (years, months, fractional seconds) are rejected.
DurationMs parse_duration(const std::string& text);

// Canonical greedy decomposition (days, then hours, minutes, seconds), so
// parse_duration(format_duration(d)) == d and "P1D" round-trips byte-exactly.
std::string format_duration(DurationMs d);

}  // namespace afdo
