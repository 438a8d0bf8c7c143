#ifndef CHARGENET_LP_READER_HPP
#define CHARGENET_LP_READER_HPP

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "chargenet/errors.hpp"
#include "chargenet/lp_writer.hpp"
#include "chargenet/milp.hpp"

// Grammar checker for the LP subset produced by write_lp. It is strict on
// purpose: anything it cannot place is a ParseError naming the line.

namespace chargenet {

namespace lp_read_detail {

enum class Tok { Name, Number, Op };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  double value = 0.0;
};

inline bool name_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) != 0 ||
         std::string_view("_.!\"#$%&(),;?@`'{}|~").find(ch) != std::string_view::npos;
}

inline void check_name(const std::string& s, std::size_t line) {
  const auto fail = [&](const char* why) {
    throw ParseError("line " + std::to_string(line), "bad name '" + s + "': " + why);
  };
  if (s.empty() || s.size() > kLpMaxLine) {
    fail("length");
  }
  if (std::isdigit(static_cast<unsigned char>(s[0])) != 0 || s[0] == '.') {
    fail("starts with a digit or period");
  }
  if ((s[0] == 'e' || s[0] == 'E') && s.size() > 1 &&
      (std::isdigit(static_cast<unsigned char>(s[1])) != 0 || s[1] == 'e' || s[1] == 'E')) {
    fail("reads as an exponent");
  }
}

inline std::vector<Token> tokenize(const std::string& text, std::size_t line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch)) != 0) {
      ++i;
      continue;
    }
    if (ch == '<' || ch == '>' || ch == '=') {
      std::string op(1, ch);
      if (i + 1 < text.size() && text[i + 1] == '=') {
        op += '=';
        ++i;
      } else if (ch == '=' && i + 1 < text.size() && (text[i + 1] == '<' || text[i + 1] == '>')) {
        op = std::string(1, text[i + 1]) + "=";
        ++i;
      }
      if (op == "<") {
        op = "<=";
      } else if (op == ">") {
        op = ">=";
      }
      out.push_back({Tok::Op, op, line});
      ++i;
      continue;
    }
    if (std::string_view("+-*^[]:/").find(ch) != std::string_view::npos) {
      out.push_back({Tok::Op, std::string(1, ch), line});
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) != 0 || ch == '.') {
      std::size_t j = i;
      while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) != 0 || text[j] == '.')) {
        ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) {
          ++k;
        }
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k])) != 0) {
          j = k;
          while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])) != 0) {
            ++j;
          }
        }
      }
      const std::string num = text.substr(i, j - i);
      double v = 0.0;
      const auto res = std::from_chars(num.data(), num.data() + num.size(), v);
      if (res.ec != std::errc() || res.ptr != num.data() + num.size()) {
        throw ParseError("line " + std::to_string(line), "bad number '" + num + "'");
      }
      out.push_back({Tok::Number, num, line, v});
      i = j;
      continue;
    }
    if (name_char(ch)) {
      std::size_t j = i;
      while (j < text.size() && name_char(text[j])) {
        ++j;
      }
      out.push_back({Tok::Name, text.substr(i, j - i), line});
      i = j;
      continue;
    }
    throw ParseError("line " + std::to_string(line), std::string("unexpected character '") + ch + "'");
  }
  return out;
}

inline std::string lower(std::string s) {
  for (auto& ch : s) {
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  return s;
}

enum class Section { None, Objective, Constraints, Bounds, Binary, End };

inline std::optional<Section> section_of(const std::string& raw) {
  const std::string s = lower(raw);
  if (s == "minimize" || s == "minimise" || s == "min") {
    return Section::Objective;
  }
  if (s == "subject to" || s == "such that" || s == "st" || s == "s.t.") {
    return Section::Constraints;
  }
  if (s == "bounds" || s == "bound") {
    return Section::Bounds;
  }
  if (s == "binary" || s == "binaries" || s == "bin") {
    return Section::Binary;
  }
  if (s == "end") {
    return Section::End;
  }
  return std::nullopt;
}

class Reader {
public:
  MilpModel model;

  std::size_t var(const Token& t) {
    if (t.kind != Tok::Name) {
      throw ParseError("line " + std::to_string(t.line), "expected a variable name, got '" + t.text + "'");
    }
    check_name(t.text, t.line);
    if (auto i = model.find(t.text)) {
      return *i;
    }
    return model.add_variable(t.text, VarKind::Continuous, 0.0,
                              std::numeric_limits<double>::infinity());
  }

  struct Expr {
    std::vector<LinearTerm> linear;
    std::vector<QuadTerm> quadratic;
    double constant = 0.0;
  };

  /// Parses terms from toks[pos] until a sense operator or the end.
  Expr expression(const std::vector<Token>& toks, std::size_t& pos, bool allow_quadratic) {
    Expr e;
    bool need_sign = false;
    while (pos < toks.size()) {
      const Token& t = toks[pos];
      if (t.kind == Tok::Op && (t.text == "<=" || t.text == ">=" || t.text == "=")) {
        break;
      }
      double sign = 1.0;
      bool had_sign = false;
      while (pos < toks.size() && toks[pos].kind == Tok::Op &&
             (toks[pos].text == "+" || toks[pos].text == "-")) {
        sign *= toks[pos].text == "-" ? -1.0 : 1.0;
        had_sign = true;
        ++pos;
      }
      if (need_sign && !had_sign) {
        fail(toks[pos], "missing operator between terms");
      }
      if (pos >= toks.size()) {
        fail(toks.back(), "dangling sign");
      }
      if (toks[pos].kind == Tok::Op && toks[pos].text == "[") {
        if (!allow_quadratic) {
          fail(toks[pos], "quadratic block outside the objective");
        }
        ++pos;
        quadratic_block(toks, pos, sign, e);
        need_sign = true;
        continue;
      }
      double coef = sign;
      if (toks[pos].kind == Tok::Number) {
        coef *= toks[pos].value;
        ++pos;
        if (pos >= toks.size() || toks[pos].kind != Tok::Name) {
          e.constant += coef;
          need_sign = true;
          continue;
        }
      }
      e.linear.push_back({var(toks[pos]), coef});
      ++pos;
      need_sign = true;
    }
    return e;
  }

  void quadratic_block(const std::vector<Token>& toks, std::size_t& pos, double outer, Expr& e) {
    bool need_sign = false;
    while (true) {
      if (pos >= toks.size()) {
        fail(toks.back(), "unterminated quadratic block");
      }
      if (toks[pos].kind == Tok::Op && toks[pos].text == "]") {
        ++pos;
        break;
      }
      double sign = outer;
      bool had_sign = false;
      while (pos < toks.size() && toks[pos].kind == Tok::Op &&
             (toks[pos].text == "+" || toks[pos].text == "-")) {
        sign *= toks[pos].text == "-" ? -1.0 : 1.0;
        had_sign = true;
        ++pos;
      }
      if (need_sign && !had_sign) {
        fail(toks[pos], "missing operator in quadratic block");
      }
      double coef = sign;
      if (pos < toks.size() && toks[pos].kind == Tok::Number) {
        coef *= toks[pos].value;
        ++pos;
      }
      if (pos >= toks.size()) {
        fail(toks.back(), "unterminated quadratic block");
      }
      const std::size_t a = var(toks[pos]);
      ++pos;
      if (pos < toks.size() && toks[pos].kind == Tok::Op && toks[pos].text == "^") {
        ++pos;
        if (pos >= toks.size() || toks[pos].kind != Tok::Number || toks[pos].value != 2.0) {
          fail(toks[pos - 1], "only squares are allowed");
        }
        ++pos;
        e.quadratic.push_back({a, a, coef});
      } else if (pos < toks.size() && toks[pos].kind == Tok::Op && toks[pos].text == "*") {
        ++pos;
        if (pos >= toks.size()) {
          fail(toks.back(), "dangling product");
        }
        e.quadratic.push_back({a, var(toks[pos]), coef});
        ++pos;
      } else {
        fail(toks[pos - 1], "linear term inside quadratic block");
      }
      need_sign = true;
    }
    if (pos + 1 >= toks.size() || toks[pos].text != "/" || toks[pos + 1].kind != Tok::Number ||
        toks[pos + 1].value != 2.0) {
      fail(toks[pos - 1], "quadratic block must be followed by / 2");
    }
    pos += 2;
    for (auto& q : e.quadratic) {
      q.coef /= 2.0;
    }
  }

  void objective(const std::vector<Token>& toks) {
    std::size_t pos = 0;
    if (toks.size() >= 2 && toks[0].kind == Tok::Name && toks[1].text == ":") {
      pos = 2;
    }
    Expr e = expression(toks, pos, true);
    if (pos != toks.size()) {
      fail(toks[pos], "unexpected token in objective");
    }
    model.objective_linear = std::move(e.linear);
    model.objective_quadratic = std::move(e.quadratic);
    model.objective_constant = e.constant;
  }

  void constraints(const std::vector<Token>& toks) {
    std::size_t pos = 0;
    std::size_t counter = 0;
    while (pos < toks.size()) {
      std::string label = "R" + std::to_string(++counter);
      if (pos + 1 < toks.size() && toks[pos].kind == Tok::Name && toks[pos + 1].text == ":") {
        check_name(toks[pos].text, toks[pos].line);
        label = toks[pos].text;
        pos += 2;
      }
      Expr e = expression(toks, pos, false);
      if (pos >= toks.size()) {
        fail(toks.back(), "constraint without a sense");
      }
      const std::string& op = toks[pos].text;
      const Sense sense = op == "<=" ? Sense::LE : op == ">=" ? Sense::GE : Sense::EQ;
      ++pos;
      double sign = 1.0;
      while (pos < toks.size() && (toks[pos].text == "-" || toks[pos].text == "+")) {
        sign *= toks[pos].text == "-" ? -1.0 : 1.0;
        ++pos;
      }
      if (pos >= toks.size() || toks[pos].kind != Tok::Number) {
        fail(toks[pos - 1], "constraint needs a numeric right-hand side");
      }
      const double rhs = sign * toks[pos].value;
      ++pos;
      if (e.linear.empty()) {
        fail(toks[pos - 1], "constraint has no variables");
      }
      model.constraints.push_back(Constraint{label, std::move(e.linear), sense, rhs - e.constant});
    }
  }

  static double bound_value(const std::vector<Token>& toks, std::size_t& pos) {
    double sign = 1.0;
    while (pos < toks.size() && (toks[pos].text == "-" || toks[pos].text == "+")) {
      sign *= toks[pos].text == "-" ? -1.0 : 1.0;
      ++pos;
    }
    if (pos >= toks.size()) {
      fail(toks.back(), "missing bound value");
    }
    const Token& t = toks[pos++];
    if (t.kind == Tok::Number) {
      return sign * t.value;
    }
    const std::string s = lower(t.text);
    if (t.kind == Tok::Name && (s == "inf" || s == "infinity")) {
      return sign * std::numeric_limits<double>::infinity();
    }
    fail(t, "expected a bound value");
    return 0.0;
  }

  static bool is_value_start(const Token& t) {
    const std::string s = lower(t.text);
    return t.kind == Tok::Number || t.text == "-" || t.text == "+" || s == "inf" || s == "infinity";
  }

  void bound_line(const std::vector<Token>& toks) {
    if (toks.empty()) {
      return;
    }
    std::size_t pos = 0;
    if (toks.size() == 2 && toks[1].kind == Tok::Name && lower(toks[1].text) == "free") {
      Variable& v = model.variables[var(toks[0])];
      v.lower = -std::numeric_limits<double>::infinity();
      v.upper = std::numeric_limits<double>::infinity();
      return;
    }
    if (is_value_start(toks[0])) {
      const double lo = bound_value(toks, pos);
      expect(toks, pos, "<=");
      Variable& v = model.variables[var(toks.at(pos++))];
      v.lower = lo;
      if (pos < toks.size()) {
        expect(toks, pos, "<=");
        v.upper = bound_value(toks, pos);
      }
    } else {
      Variable& v = model.variables[var(toks[pos++])];
      if (pos >= toks.size()) {
        fail(toks.back(), "incomplete bound");
      }
      const std::string op = toks[pos++].text;
      const double value = bound_value(toks, pos);
      if (op == "=") {
        v.lower = v.upper = value;
      } else if (op == "<=") {
        v.upper = value;
      } else if (op == ">=") {
        v.lower = value;
      } else {
        fail(toks[pos - 1], "expected <=, >= or =");
      }
    }
    if (pos != toks.size()) {
      fail(toks[pos], "trailing tokens in bound");
    }
  }

  static void expect(const std::vector<Token>& toks, std::size_t& pos, const char* op) {
    if (pos >= toks.size() || toks[pos].text != op) {
      fail(toks[std::min(pos, toks.size() - 1)], std::string("expected ") + op);
    }
    ++pos;
  }

  [[noreturn]] static void fail(const Token& t, const std::string& why) {
    throw ParseError("line " + std::to_string(t.line), why);
  }
};

}  // namespace lp_read_detail

/// Parses LP text back into a model. Variables not listed under Bounds or
/// Binary get the LP default [0, inf).
inline MilpModel parse_lp(const std::string& text) {
  using namespace lp_read_detail;
  Reader r;
  Section section = Section::None;
  std::vector<Token> objective;
  std::vector<Token> rows;
  bool saw_objective = false;
  bool saw_end = false;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  std::vector<std::pair<std::vector<Token>, std::size_t>> bounds;
  std::vector<Token> binaries;
  while (std::getline(in, line)) {
    ++number;
    if (line.size() > kLpMaxLine) {
      throw ParseError("line " + std::to_string(number), "line longer than 255 characters");
    }
    if (const auto cut = line.find('\\'); cut != std::string::npos) {
      line.erase(cut);
    }
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
    trimmed.erase(trimmed.find_last_not_of(" \t\r") + 1);
    if (trimmed.empty()) {
      continue;
    }
    if (saw_end) {
      throw ParseError("line " + std::to_string(number), "content after End");
    }
    if (const auto s = section_of(trimmed)) {
      if (*s <= section && !(section == Section::None)) {
        throw ParseError("line " + std::to_string(number), "section out of order");
      }
      section = *s;
      saw_objective = saw_objective || section == Section::Objective;
      saw_end = section == Section::End;
      continue;
    }
    auto toks = tokenize(trimmed, number);
    switch (section) {
      case Section::None:
        throw ParseError("line " + std::to_string(number), "content before Minimize");
      case Section::Objective:
        objective.insert(objective.end(), toks.begin(), toks.end());
        break;
      case Section::Constraints:
        rows.insert(rows.end(), toks.begin(), toks.end());
        break;
      case Section::Bounds:
        bounds.emplace_back(std::move(toks), number);
        break;
      case Section::Binary:
        binaries.insert(binaries.end(), toks.begin(), toks.end());
        break;
      case Section::End:
        break;
    }
  }
  if (!saw_objective) {
    throw ParseError("line " + std::to_string(number), "missing Minimize section");
  }
  if (!saw_end) {
    throw ParseError("line " + std::to_string(number), "missing End");
  }
  r.objective(objective);
  r.constraints(rows);
  for (const auto& [toks, unused] : bounds) {
    r.bound_line(toks);
  }
  for (const auto& t : binaries) {
    Variable& v = r.model.variables[r.var(t)];
    v.kind = VarKind::Binary;
    v.lower = 0.0;
    v.upper = 1.0;
  }
  for (const auto& v : r.model.variables) {
    if (v.lower > v.upper) {
      throw ParseError(v.name, "lower bound exceeds upper bound");
    }
  }
  return r.model;
}

inline MilpModel read_lp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("read_lp: cannot open " + path);
  }
  return parse_lp(std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()));
}

}  // namespace chargenet

#endif
