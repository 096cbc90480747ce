#include "afdo/policy.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>
#include <utility>

namespace afdo {

namespace {

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

enum class TokenKind {
  PrefixKeyword,  // @prefix
  Name,           // prefixed name, bare 'a', or property path
  Iri,            // <...>
  Number,
  String,  // "..." with optional ^^datatype
  LBracket,
  RBracket,
  LQuote,  // <<
  RQuote,  // >>
  Dot,
  Semicolon,
  Comma,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  double number = 0.0;
  std::string datatype;
  int line = 1;
  int column = 1;
};

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == ':' || c == '/' || c == '.';
}

class Tokenizer {
 public:
  explicit Tokenizer(const std::string& text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (true) {
      skip_space_and_comments();
      Token token;
      token.line = line_;
      token.column = column_;
      if (at_end()) {
        token.kind = TokenKind::End;
        tokens.push_back(token);
        return tokens;
      }
      const char c = peek();
      if (c == '@') {
        token.kind = TokenKind::PrefixKeyword;
        token.text = read_while([](char ch) {
          return std::isalpha(static_cast<unsigned char>(ch)) || ch == '@';
        });
        if (token.text != "@prefix") {
          fail("unknown directive: " + token.text, token);
        }
      } else if (c == '<') {
        advance();
        if (!at_end() && peek() == '<') {
          advance();
          token.kind = TokenKind::LQuote;
        } else {
          token.kind = TokenKind::Iri;
          while (!at_end() && peek() != '>') {
            token.text.push_back(take());
          }
          if (at_end()) {
            fail("unterminated IRI", token);
          }
          advance();  // closing '>'
        }
      } else if (c == '>') {
        advance();
        if (at_end() || peek() != '>') {
          fail("stray '>'", token);
        }
        advance();
        token.kind = TokenKind::RQuote;
      } else if (c == '[') {
        advance();
        token.kind = TokenKind::LBracket;
      } else if (c == ']') {
        advance();
        token.kind = TokenKind::RBracket;
      } else if (c == ';') {
        advance();
        token.kind = TokenKind::Semicolon;
      } else if (c == ',') {
        advance();
        token.kind = TokenKind::Comma;
      } else if (c == '.') {
        advance();
        token.kind = TokenKind::Dot;
      } else if (c == '"') {
        advance();
        token.kind = TokenKind::String;
        while (!at_end() && peek() != '"') {
          char ch = take();
          if (ch == '\\' && !at_end()) {
            const char next = take();
            switch (next) {
              case 'n': ch = '\n'; break;
              case 't': ch = '\t'; break;
              case '"': ch = '"'; break;
              case '\\': ch = '\\'; break;
              default: fail(std::string("unsupported escape \\") + next, token);
            }
          }
          token.text.push_back(ch);
        }
        if (at_end()) {
          fail("unterminated string literal", token);
        }
        advance();  // closing quote
        if (!at_end() && peek() == '^') {
          advance();
          if (at_end() || peek() != '^') {
            fail("expected '^^' after literal", token);
          }
          advance();
          if (at_end() || !is_name_start(peek())) {
            fail("expected datatype name after '^^'", token);
          }
          token.datatype = read_name();
        }
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
        token.kind = TokenKind::Number;
        token.text = read_while([](char ch) {
          return std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' ||
                 ch == '-' || ch == '+' || ch == 'e' || ch == 'E';
        });
        // A trailing dot is the statement terminator, not part of the
        // number.
        if (!token.text.empty() && token.text.back() == '.') {
          token.text.pop_back();
          rewind_one();
        }
        const char* begin = token.text.data();
        const char* end = begin + token.text.size();
        const auto [ptr, ec] = std::from_chars(begin, end, token.number);
        if (ec != std::errc{} || ptr != end) {
          fail("malformed number: " + token.text, token);
        }
      } else if (is_name_start(c)) {
        token.kind = TokenKind::Name;
        token.text = read_name();
      } else {
        fail(std::string("unexpected character '") + c + "'", token);
      }
      tokens.push_back(std::move(token));
    }
  }

 private:
  void skip_space_and_comments() {
    while (!at_end()) {
      const char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') {
          advance();
        }
      } else {
        return;
      }
    }
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  char take() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void advance() { take(); }

  void rewind_one() {
    // Only used for a '.' just consumed by the number scanner; never crosses
    // a newline.
    --pos_;
    --column_;
  }

  template <typename Pred>
  std::string read_while(Pred pred) {
    std::string out;
    while (!at_end() && pred(peek())) {
      out.push_back(take());
    }
    return out;
  }

  std::string read_name() {
    std::string out;
    out.push_back(take());
    while (!at_end() && is_name_char(peek())) {
      out.push_back(take());
    }
    // A trailing dot terminates the statement.
    if (!out.empty() && out.back() == '.') {
      out.pop_back();
      rewind_one();
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& message, const Token& token) const {
    throw ParseError(message, token.line, token.column);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

// ---------------------------------------------------------------------------
// Parser: tokens -> generic statement AST
// ---------------------------------------------------------------------------

struct AstTerm;
using PredicateObjects = std::vector<std::pair<std::string, std::vector<AstTerm>>>;

struct AstTerm {
  enum class Kind { Name, Number, String, Blank, Quoted };

  Kind kind = Kind::Name;
  std::string text;
  double number = 0.0;
  std::string datatype;
  PredicateObjects blank;              // Kind::Blank
  std::vector<std::string> quoted;     // Kind::Quoted, three names
  int line = 1;
  int column = 1;
};

struct Statement {
  AstTerm subject;
  PredicateObjects predicates;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  PolicyDocument run() {
    PolicyDocument doc;
    std::vector<Statement> statements;
    while (peek().kind != TokenKind::End) {
      if (peek().kind == TokenKind::PrefixKeyword) {
        parse_prefix(doc);
      } else {
        statements.push_back(parse_statement());
      }
    }
    for (const Statement& statement : statements) {
      interpret(statement, doc);
    }
    return doc;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }

  const Token& expect(TokenKind kind, const std::string& what) {
    if (peek().kind != kind) {
      throw ParseError("expected " + what, peek().line, peek().column);
    }
    return take();
  }

  void parse_prefix(PolicyDocument& doc) {
    take();  // @prefix
    const Token& name = expect(TokenKind::Name, "prefix name like 'afdo:'");
    if (name.text.empty() || name.text.back() != ':') {
      throw ParseError("prefix name must end with ':'", name.line, name.column);
    }
    const Token& iri = expect(TokenKind::Iri, "prefix IRI");
    expect(TokenKind::Dot, "'.' after prefix declaration");
    doc.prefixes[name.text.substr(0, name.text.size() - 1)] = iri.text;
  }

  Statement parse_statement() {
    Statement statement;
    statement.subject = parse_term();
    if (statement.subject.kind != AstTerm::Kind::Name &&
        statement.subject.kind != AstTerm::Kind::Quoted) {
      throw ParseError("subject must be a name or quoted triple",
                       statement.subject.line, statement.subject.column);
    }
    statement.predicates = parse_predicate_objects();
    expect(TokenKind::Dot, "'.' at end of statement");
    return statement;
  }

  PredicateObjects parse_predicate_objects() {
    PredicateObjects list;
    while (true) {
      const Token& pred = expect(TokenKind::Name, "predicate name");
      std::vector<AstTerm> objects;
      objects.push_back(parse_term());
      while (peek().kind == TokenKind::Comma) {
        take();
        objects.push_back(parse_term());
      }
      list.emplace_back(pred.text, std::move(objects));
      if (peek().kind == TokenKind::Semicolon) {
        take();
        // Trailing semicolon before ']' or '.' is allowed.
        if (peek().kind == TokenKind::RBracket || peek().kind == TokenKind::Dot) {
          break;
        }
        continue;
      }
      break;
    }
    return list;
  }

  AstTerm parse_term() {
    AstTerm term;
    term.line = peek().line;
    term.column = peek().column;
    switch (peek().kind) {
      case TokenKind::Name: {
        const Token& token = take();
        term.kind = AstTerm::Kind::Name;
        term.text = token.text;
        return term;
      }
      case TokenKind::Iri: {
        const Token& token = take();
        term.kind = AstTerm::Kind::Name;
        term.text = "<" + token.text + ">";
        return term;
      }
      case TokenKind::Number: {
        const Token& token = take();
        term.kind = AstTerm::Kind::Number;
        term.number = token.number;
        term.text = token.text;
        return term;
      }
      case TokenKind::String: {
        const Token& token = take();
        term.kind = AstTerm::Kind::String;
        term.text = token.text;
        term.datatype = token.datatype;
        return term;
      }
      case TokenKind::LBracket: {
        take();
        term.kind = AstTerm::Kind::Blank;
        if (peek().kind != TokenKind::RBracket) {
          term.blank = parse_predicate_objects();
        }
        expect(TokenKind::RBracket, "']' closing blank node");
        return term;
      }
      case TokenKind::LQuote: {
        take();
        term.kind = AstTerm::Kind::Quoted;
        for (int i = 0; i < 3; ++i) {
          const Token& part = expect(TokenKind::Name, "name inside quoted triple");
          term.quoted.push_back(part.text);
        }
        expect(TokenKind::RQuote, "'>>' closing quoted triple");
        return term;
      }
      default:
        throw ParseError("expected a term", peek().line, peek().column);
    }
  }

  // ---------------------------------------------------------------------
  // Interpretation: statements -> document model
  // ---------------------------------------------------------------------

  static bool is_policy(const Statement& statement) {
    for (const auto& [pred, objects] : statement.predicates) {
      if (pred == "a") {
        for (const AstTerm& term : objects) {
          if (term.kind == AstTerm::Kind::Name && term.text == "afdo:Policy") {
            return true;
          }
        }
      }
    }
    return false;
  }

  [[noreturn]] static void fail_at(const AstTerm& term, const std::string& message) {
    throw ParseError(message, term.line, term.column);
  }

  static std::string strip_prefix(const AstTerm& term, const std::string& prefix,
                                  const std::string& what) {
    if (term.kind != AstTerm::Kind::Name || term.text.rfind(prefix, 0) != 0) {
      fail_at(term, what + " must be a " + prefix + " name");
    }
    return term.text.substr(prefix.size());
  }

  static const AstTerm& single_object(const std::vector<AstTerm>& objects,
                                      const std::string& what) {
    if (objects.size() != 1) {
      fail_at(objects.front(), what + " takes exactly one object");
    }
    return objects.front();
  }

  static const AstTerm& single_blank(const std::vector<AstTerm>& objects,
                                     const std::string& what) {
    const AstTerm& term = single_object(objects, what);
    if (term.kind != AstTerm::Kind::Blank) {
      fail_at(term, what + " must be a blank node");
    }
    return term;
  }

  static std::string parse_payload_path(const AstTerm& blank) {
    // [ sh:path :announced/afdo:field ]
    if (blank.blank.size() != 1 || blank.blank[0].first != "sh:path") {
      fail_at(blank, "sh:equals expects a blank node with a single sh:path");
    }
    const AstTerm& path = single_object(blank.blank[0].second, "sh:path");
    static const std::string kPrefix = ":announced/afdo:";
    if (path.kind != AstTerm::Kind::Name || path.text.rfind(kPrefix, 0) != 0) {
      fail_at(path, "payload path must start with ':announced/afdo:'");
    }
    return path.text.substr(kPrefix.size());
  }

  // Fills the comparison part of a clause from one constraint predicate.
  static void parse_constraint(ConditionClause& clause, const std::string& pred,
                               const std::vector<AstTerm>& objects) {
    if (pred == "sh:equals") {
      clause.kind = ConditionClause::Kind::PayloadEquals;
      clause.payload_path = parse_payload_path(single_blank(objects, "sh:equals"));
      return;
    }
    clause.kind = ConditionClause::Kind::Threshold;
    const AstTerm& value = single_object(objects, pred);
    if (pred == "sh:hasValue") {
      clause.cmp = Comparator::Equal;
      if (value.kind == AstTerm::Kind::Number) {
        clause.constant = value.number;
      } else if (value.kind == AstTerm::Kind::Name) {
        clause.constant = value.text;
        clause.constant_is_name = true;
      } else if (value.kind == AstTerm::Kind::String) {
        clause.constant = value.text;
      } else {
        fail_at(value, "sh:hasValue expects a literal or name");
      }
      return;
    }
    if (value.kind != AstTerm::Kind::Number) {
      fail_at(value, pred + " expects a numeric literal");
    }
    clause.constant = value.number;
    if (pred == "sh:maxInclusive") {
      clause.cmp = Comparator::LessEqual;
    } else if (pred == "sh:minInclusive") {
      clause.cmp = Comparator::GreaterEqual;
    } else if (pred == "sh:maxExclusive") {
      clause.cmp = Comparator::Less;
    } else if (pred == "sh:minExclusive") {
      clause.cmp = Comparator::Greater;
    } else {
      fail_at(value, "unsupported constraint: " + pred);
    }
  }

  static ConditionClause parse_property(const AstTerm& blank) {
    ConditionClause clause;
    bool have_path = false;
    bool have_constraint = false;
    for (const auto& [pred, objects] : blank.blank) {
      if (pred == "sh:path") {
        clause.path = strip_prefix(single_object(objects, "sh:path"), "afdo:", "sh:path");
        have_path = true;
      } else if (pred == "sh:not") {
        const AstTerm& inner = single_blank(objects, "sh:not");
        if (inner.blank.size() != 1) {
          fail_at(inner, "sh:not expects exactly one wrapped constraint");
        }
        clause.negated = true;
        parse_constraint(clause, inner.blank[0].first, inner.blank[0].second);
        have_constraint = true;
      } else {
        parse_constraint(clause, pred, objects);
        have_constraint = true;
      }
    }
    if (!have_path || !have_constraint) {
      fail_at(blank, "sh:property needs sh:path and one constraint");
    }
    return clause;
  }

  static Condition parse_condition(const AstTerm& blank) {
    Condition condition;
    bool node_shape = false;
    for (const auto& [pred, objects] : blank.blank) {
      if (pred == "a") {
        const AstTerm& type = single_object(objects, "a");
        if (type.kind != AstTerm::Kind::Name || type.text != "sh:NodeShape") {
          fail_at(type, "condition must be a sh:NodeShape");
        }
        node_shape = true;
      } else if (pred == "sh:targetNode") {
        const AstTerm& target = single_object(objects, "sh:targetNode");
        condition.target_kind = TargetKind::Node;
        condition.target = strip_prefix(target, ":", "sh:targetNode");
      } else if (pred == "sh:targetClass") {
        const AstTerm& target = single_object(objects, "sh:targetClass");
        condition.target_kind = TargetKind::Class;
        condition.target = strip_prefix(target, "afdo:", "sh:targetClass");
      } else if (pred == "sh:property") {
        for (const AstTerm& property : objects) {
          if (property.kind != AstTerm::Kind::Blank) {
            fail_at(property, "sh:property must be a blank node");
          }
          condition.clauses.push_back(parse_property(property));
        }
      } else {
        fail_at(blank, "unsupported condition predicate: " + pred);
      }
    }
    if (!node_shape) {
      fail_at(blank, "condition is missing 'a sh:NodeShape'");
    }
    return condition;
  }

  static Obligation parse_duty(const AstTerm& blank) {
    Obligation duty;
    std::string action;
    bool typed = false;
    const AstTerm* constraint = nullptr;
    for (const auto& [pred, objects] : blank.blank) {
      if (pred == "a") {
        const AstTerm& type = single_object(objects, "a");
        if (type.kind != AstTerm::Kind::Name || type.text != "odrl:Duty") {
          fail_at(type, "duty must be an odrl:Duty");
        }
        typed = true;
      } else if (pred == "odrl:action") {
        action = single_object(objects, "odrl:action").text;
      } else if (pred == "odrl:constraint") {
        constraint = &single_blank(objects, "odrl:constraint");
      } else if (pred == "odrl:assignee") {
        const AstTerm& assignee = single_object(objects, "odrl:assignee");
        if (assignee.kind != AstTerm::Kind::Name) {
          fail_at(assignee, "odrl:assignee must be a name");
        }
        duty.assignee = assignee.text;
      } else {
        fail_at(blank, "unsupported duty predicate: " + pred);
      }
    }
    if (!typed) {
      fail_at(blank, "duty is missing 'a odrl:Duty'");
    }
    if (action == "odrl:rateLimit") {
      duty.kind = Obligation::Kind::RateLimit;
      if (constraint == nullptr) {
        fail_at(blank, "rate-limit duty needs an odrl:constraint");
      }
      bool elapsed = false;
      bool gteq = false;
      std::string window_text;
      int window_line = blank.line;
      int window_column = blank.column;
      for (const auto& [pred, objects] : constraint->blank) {
        const AstTerm& value = single_object(objects, pred);
        if (pred == "odrl:leftOperand") {
          elapsed = value.text == "odrl:elapsedTime";
        } else if (pred == "odrl:operator") {
          gteq = value.text == "odrl:gteq";
        } else if (pred == "odrl:rightOperand") {
          if (value.kind != AstTerm::Kind::String || value.datatype != "xsd:duration") {
            fail_at(value, "rate-limit window must be an xsd:duration literal");
          }
          window_text = value.text;
          window_line = value.line;
          window_column = value.column;
        } else {
          fail_at(*constraint, "unsupported constraint predicate: " + pred);
        }
      }
      if (!elapsed || !gteq || window_text.empty()) {
        fail_at(*constraint,
                "rate limit requires odrl:elapsedTime, odrl:gteq and a duration");
      }
      try {
        duty.window = parse_duration(window_text);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), window_line, window_column);
      }
      if (duty.window.count() <= 0) {
        throw ParseError("rate-limit window must be positive", window_line,
                         window_column);
      }
    } else if (action == "odrl:notify") {
      duty.kind = Obligation::Kind::Notify;
      if (duty.assignee.empty()) {
        fail_at(blank, "notify duty needs an odrl:assignee");
      }
    } else {
      fail_at(blank, "unsupported duty action: " + action);
    }
    return duty;
  }

  static Policy parse_policy_statement(const Statement& statement) {
    Policy policy;
    const std::string& subject = statement.subject.text;
    policy.id = subject.rfind(":", 0) == 0 ? subject.substr(1) : subject;
    bool have_condition = false;
    for (const auto& [pred, objects] : statement.predicates) {
      if (pred == "a") {
        continue;
      }
      if (pred == "afdo:condition") {
        policy.condition = parse_condition(single_blank(objects, "afdo:condition"));
        have_condition = true;
      } else if (pred == "afdo:action") {
        policy.action =
            strip_prefix(single_object(objects, "afdo:action"), "afdo:", "afdo:action");
      } else if (pred == "odrl:duty") {
        for (const AstTerm& duty : objects) {
          if (duty.kind != AstTerm::Kind::Blank) {
            fail_at(duty, "odrl:duty must be a blank node");
          }
          policy.obligations.push_back(parse_duty(duty));
        }
      } else if (pred == "afdo:policyVersion") {
        const AstTerm& version = single_object(objects, "afdo:policyVersion");
        if (version.kind != AstTerm::Kind::String) {
          fail_at(version, "afdo:policyVersion must be a string literal");
        }
        policy.version = version.text;
      } else {
        fail_at(statement.subject, "unsupported policy predicate: " + pred);
      }
    }
    if (!have_condition) {
      fail_at(statement.subject, "policy is missing afdo:condition");
    }
    if (policy.action.empty()) {
      fail_at(statement.subject, "policy is missing afdo:action");
    }
    return policy;
  }

  static ObjectTerm to_object_term(const AstTerm& term) {
    ObjectTerm out;
    switch (term.kind) {
      case AstTerm::Kind::Name:
        out.kind = ObjectTerm::Kind::Name;
        out.text = term.text;
        break;
      case AstTerm::Kind::Number:
        out.kind = ObjectTerm::Kind::Number;
        out.number = term.number;
        out.text = term.text;
        break;
      case AstTerm::Kind::String:
        out.kind = ObjectTerm::Kind::String;
        out.text = term.text;
        out.datatype = term.datatype;
        break;
      default:
        fail_at(term, "object descriptions cannot nest blank nodes");
    }
    return out;
  }

  static ObjectNode parse_object_statement(const Statement& statement) {
    ObjectNode node;
    const std::string& subject = statement.subject.text;
    node.name = subject.rfind(":", 0) == 0 ? subject.substr(1) : subject;
    for (const auto& [pred, objects] : statement.predicates) {
      if (pred == "a") {
        node.type = strip_prefix(single_object(objects, "a"), "afdo:", "object type");
        continue;
      }
      ObjectProperty property;
      property.predicate = pred;
      for (const AstTerm& term : objects) {
        property.values.push_back(to_object_term(term));
      }
      node.properties.push_back(std::move(property));
    }
    if (node.type.empty()) {
      fail_at(statement.subject, "object description is missing a type");
    }
    return node;
  }

  static Annotation parse_annotation_statement(const Statement& statement) {
    if (statement.predicates.size() != 1 ||
        statement.predicates[0].second.size() != 1 ||
        statement.predicates[0].second[0].kind != AstTerm::Kind::Name) {
      fail_at(statement.subject,
              "quoted-triple annotation takes one predicate and one name object");
    }
    Annotation annotation;
    annotation.subject = statement.subject.quoted[0];
    annotation.subject_predicate = statement.subject.quoted[1];
    annotation.subject_object = statement.subject.quoted[2];
    annotation.predicate = statement.predicates[0].first;
    annotation.object = statement.predicates[0].second[0].text;
    return annotation;
  }

  static void interpret(const Statement& statement, PolicyDocument& doc) {
    if (statement.subject.kind == AstTerm::Kind::Quoted) {
      doc.annotations.push_back(parse_annotation_statement(statement));
    } else if (is_policy(statement)) {
      doc.policies.push_back(parse_policy_statement(statement));
    } else {
      doc.objects.push_back(parse_object_statement(statement));
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Canonical serialisation
// ---------------------------------------------------------------------------

std::string format_number(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) {
    throw std::invalid_argument("number formatting failed");
  }
  return std::string(buffer, ptr);
}

std::string term_text(const ObjectTerm& term) {
  switch (term.kind) {
    case ObjectTerm::Kind::Name:
      return term.text;
    case ObjectTerm::Kind::Number:
      return format_number(term.number);
    case ObjectTerm::Kind::String: {
      std::string out = "\"" + term.text + "\"";
      if (!term.datatype.empty()) {
        out += "^^" + term.datatype;
      }
      return out;
    }
  }
  throw std::invalid_argument("unknown object term kind");
}

std::string constant_text(const ConditionClause& clause) {
  if (const double* number = std::get_if<double>(&clause.constant)) {
    return format_number(*number);
  }
  const std::string& text = std::get<std::string>(clause.constant);
  return clause.constant_is_name ? text : "\"" + text + "\"";
}

std::string comparator_keyword(Comparator cmp) {
  switch (cmp) {
    case Comparator::LessEqual: return "sh:maxInclusive";
    case Comparator::GreaterEqual: return "sh:minInclusive";
    case Comparator::Less: return "sh:maxExclusive";
    case Comparator::Greater: return "sh:minExclusive";
    case Comparator::Equal: return "sh:hasValue";
    default:
      throw std::invalid_argument("comparator has no constraint keyword");
  }
}

std::string clause_constraint(const ConditionClause& clause) {
  std::string inner;
  if (clause.kind == ConditionClause::Kind::PayloadEquals) {
    inner = "sh:equals [ sh:path :announced/afdo:" + clause.payload_path + " ]";
  } else {
    inner = comparator_keyword(clause.cmp) + " " + constant_text(clause);
  }
  if (clause.negated) {
    return "sh:not [ " + inner + " ]";
  }
  return inner;
}

void serialise_one_policy(const Policy& policy, std::ostringstream& out) {
  std::vector<std::string> parts;

  if (!policy.version.empty()) {
    parts.push_back("  afdo:policyVersion \"" + policy.version + "\"");
  }

  std::string condition = "  afdo:condition [\n    a sh:NodeShape";
  if (policy.condition.target_kind == TargetKind::Node) {
    condition += " ;\n    sh:targetNode :" + policy.condition.target;
  } else if (policy.condition.target_kind == TargetKind::Class) {
    condition += " ;\n    sh:targetClass afdo:" + policy.condition.target;
  }
  for (const ConditionClause& clause : policy.condition.clauses) {
    condition += " ;\n    sh:property [\n      sh:path afdo:" + clause.path +
                 " ;\n      " + clause_constraint(clause) + " ]";
  }
  condition += " ]";
  parts.push_back(condition);

  parts.push_back("  afdo:action afdo:" + policy.action);

  for (const Obligation& duty : policy.obligations) {
    std::string text = "  odrl:duty [\n    a odrl:Duty ;\n";
    if (duty.kind == Obligation::Kind::RateLimit) {
      text += "    odrl:action odrl:rateLimit ;\n";
      text += "    odrl:constraint [\n";
      text += "      odrl:leftOperand odrl:elapsedTime ;\n";
      text += "      odrl:operator odrl:gteq ;\n";
      text += "      odrl:rightOperand \"" + format_duration(duty.window) +
              "\"^^xsd:duration ] ]";
    } else {
      text += "    odrl:action odrl:notify ;\n";
      text += "    odrl:assignee " + duty.assignee + " ]";
    }
    parts.push_back(std::move(text));
  }

  out << ":" << policy.id << " a afdo:Policy";
  for (const std::string& part : parts) {
    out << " ;\n" << part;
  }
  out << " .\n";
}

void collect_prefix(const std::string& name, std::set<std::string>& used) {
  const std::size_t colon = name.find(':');
  if (colon != std::string::npos && name.front() != '<') {
    used.insert(name.substr(0, colon));
  }
}

void collect_clause_prefixes(const ConditionClause& clause, std::set<std::string>& used) {
  used.insert("afdo");
  used.insert("sh");
  if (clause.kind == ConditionClause::Kind::PayloadEquals) {
    used.insert("");
  } else if (clause.constant_is_name) {
    collect_prefix(std::get<std::string>(clause.constant), used);
  }
}

std::map<std::string, std::string> prefix_catalogue() {
  return {
      {"", "http://example.org/afdo/local#"},
      {"afdo", "http://w3id.org/afdo#"},
      {"prov", "http://www.w3.org/ns/prov#"},
      {"sh", "http://www.w3.org/ns/shacl#"},
      {"odrl", "http://www.w3.org/ns/odrl/2/"},
      {"xsd", "http://www.w3.org/2001/XMLSchema#"},
      {"hp", "http://purl.obolibrary.org/obo/HP_"},
  };
}

// Fixed emission order; catalogue entries first, then any extras
// lexicographically.
std::string prefix_block(const PolicyDocument& doc, const std::set<std::string>& used) {
  static const char* kOrder[] = {"", "afdo", "prov", "sh", "odrl", "xsd", "hp"};
  std::map<std::string, std::string> catalogue = prefix_catalogue();
  for (const auto& [prefix, iri] : doc.prefixes) {
    catalogue[prefix] = iri;  // declared IRIs win over catalogue defaults
  }

  std::set<std::string> emit = used;
  // The core block is always present so unrelated documents share a header.
  for (const char* core : {"", "afdo", "prov", "sh", "odrl", "xsd"}) {
    emit.insert(core);
  }

  std::ostringstream out;
  std::set<std::string> done;
  for (const char* prefix : kOrder) {
    if (emit.count(prefix) != 0) {
      out << "@prefix " << prefix << ": <" << catalogue.at(prefix) << "> .\n";
      done.insert(prefix);
    }
  }
  for (const std::string& prefix : emit) {
    if (done.count(prefix) == 0) {
      const auto it = catalogue.find(prefix);
      if (it == catalogue.end()) {
        throw std::invalid_argument("prefix without a declared IRI: " + prefix);
      }
      out << "@prefix " << prefix << ": <" << it->second << "> .\n";
    }
  }
  return out.str();
}

std::set<std::string> used_prefixes(const PolicyDocument& doc) {
  std::set<std::string> used;
  for (const ObjectNode& node : doc.objects) {
    used.insert("");
    used.insert("afdo");
    for (const ObjectProperty& property : node.properties) {
      collect_prefix(property.predicate, used);
      for (const ObjectTerm& term : property.values) {
        if (term.kind == ObjectTerm::Kind::Name) {
          collect_prefix(term.text, used);
        } else if (term.kind == ObjectTerm::Kind::String && !term.datatype.empty()) {
          collect_prefix(term.datatype, used);
        }
      }
    }
  }
  for (const Annotation& annotation : doc.annotations) {
    for (const std::string& name :
         {annotation.subject, annotation.subject_predicate, annotation.subject_object,
          annotation.predicate, annotation.object}) {
      collect_prefix(name, used);
    }
  }
  for (const Policy& policy : doc.policies) {
    used.insert("");
    used.insert("afdo");
    used.insert("sh");
    for (const ConditionClause& clause : policy.condition.clauses) {
      collect_clause_prefixes(clause, used);
    }
    for (const Obligation& duty : policy.obligations) {
      used.insert("odrl");
      if (duty.kind == Obligation::Kind::RateLimit) {
        used.insert("xsd");
      } else {
        collect_prefix(duty.assignee, used);
      }
    }
  }
  return used;
}

}  // namespace

PolicyDocument parse_policy_document(const std::string& text) {
  Tokenizer tokenizer(text);
  Parser parser(tokenizer.run());
  return parser.run();
}

Policy parse_policy(const std::string& text) {
  const PolicyDocument doc = parse_policy_document(text);
  if (doc.policies.empty()) {
    throw ParseError("document contains no policy", 1, 1);
  }
  return doc.policies.front();
}

std::string serialise_policy_document(const PolicyDocument& doc) {
  std::ostringstream body;
  bool first = true;
  for (const ObjectNode& node : doc.objects) {
    if (!first) body << "\n";
    first = false;
    body << ":" << node.name << " a afdo:" << node.type;
    for (const ObjectProperty& property : node.properties) {
      body << " ;\n  " << property.predicate << " ";
      for (std::size_t i = 0; i < property.values.size(); ++i) {
        if (i > 0) body << ", ";
        body << term_text(property.values[i]);
      }
    }
    body << " .\n";
  }
  for (const Annotation& annotation : doc.annotations) {
    if (!first) body << "\n";
    first = false;
    body << "<< " << annotation.subject << " " << annotation.subject_predicate << " "
         << annotation.subject_object << " >>\n  " << annotation.predicate << " "
         << annotation.object << " .\n";
  }
  for (const Policy& policy : doc.policies) {
    if (!first) body << "\n";
    first = false;
    std::ostringstream block;
    serialise_one_policy(policy, block);
    body << block.str();
  }

  return prefix_block(doc, used_prefixes(doc)) + "\n" + body.str();
}

std::string serialise_policy(const Policy& policy) {
  PolicyDocument doc;
  doc.policies.push_back(policy);
  return serialise_policy_document(doc);
}

}  // namespace afdo
