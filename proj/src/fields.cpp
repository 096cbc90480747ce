#include "afdo/fields.hpp"

#include <charconv>
#include <stdexcept>

namespace afdo {

std::string to_string(Comparator cmp) {
  switch (cmp) {
    case Comparator::LessEqual: return "<=";
    case Comparator::GreaterEqual: return ">=";
    case Comparator::Less: return "<";
    case Comparator::Greater: return ">";
    case Comparator::Equal: return "==";
    case Comparator::NotEqual: return "!=";
  }
  throw std::invalid_argument("unknown comparator value");
}

std::optional<double> field_as_number(const FieldValue& value) {
  if (const double* d = std::get_if<double>(&value)) {
    return *d;
  }
  const std::string& text = std::get<std::string>(value);
  double parsed = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, parsed);
  if (ec != std::errc{} || ptr != end) {
    return std::nullopt;
  }
  return parsed;
}

bool compare_fields(const FieldValue& lhs, Comparator cmp, const FieldValue& rhs) {
  const std::optional<double> a = field_as_number(lhs);
  const std::optional<double> b = field_as_number(rhs);
  if (a && b) {
    switch (cmp) {
      case Comparator::LessEqual: return *a <= *b;
      case Comparator::GreaterEqual: return *a >= *b;
      case Comparator::Less: return *a < *b;
      case Comparator::Greater: return *a > *b;
      case Comparator::Equal: return *a == *b;
      case Comparator::NotEqual: return *a != *b;
    }
    throw std::invalid_argument("unknown comparator value");
  }
  // Mixed or textual operands: only (in)equality is defined, and a number
  // never equals a non-numeric string.
  const bool both_text = std::holds_alternative<std::string>(lhs) &&
                         std::holds_alternative<std::string>(rhs);
  const bool equal = both_text && std::get<std::string>(lhs) == std::get<std::string>(rhs);
  switch (cmp) {
    case Comparator::Equal: return equal;
    case Comparator::NotEqual: return !equal;
    default: return false;
  }
}

}  // namespace afdo
