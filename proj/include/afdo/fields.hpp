#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace afdo {

// Field values seen by condition and filter clauses. Metadata is stored as
// strings; numeric-looking strings are coerced when a clause compares
// numerically.
using FieldValue = std::variant<double, std::string>;

// Ordered map so iteration (and therefore serialisation) is deterministic.
using FieldMap = std::map<std::string, FieldValue>;

enum class Comparator { LessEqual, GreaterEqual, Less, Greater, Equal, NotEqual };

std::string to_string(Comparator c);

// Full-string numeric parse; returns nullopt for anything else.
std::optional<double> field_as_number(const FieldValue& v);

// Numeric comparison when both sides coerce to numbers, else string equality
// for Equal/NotEqual. Order comparators on non-numeric values are false.
bool compare_fields(const FieldValue& lhs, Comparator cmp, const FieldValue& rhs);

}  // namespace afdo
