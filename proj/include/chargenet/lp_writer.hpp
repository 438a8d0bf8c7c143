#ifndef CHARGENET_LP_WRITER_HPP
#define CHARGENET_LP_WRITER_HPP

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "chargenet/errors.hpp"
#include "chargenet/milp.hpp"

// CPLEX-style LP text. Sections: Minimize, Subject To, Bounds, Binary, End.

namespace chargenet {

inline constexpr std::size_t kLpMaxLine = 255;

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double v) {
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  if (v == 0.0) {
    return "0";
  }
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace lp_detail {

/// Accumulates tokens into lines no longer than kLpMaxLine.
class LineWriter {
public:
  explicit LineWriter(std::ostream& out) : out_(out) {}

  void start(const std::string& head) {
    flush();
    line_ = head;
  }

  void token(const std::string& t) {
    if (line_.size() + 1 + t.size() > kLpMaxLine) {
      out_ << line_ << '\n';
      line_ = "   " + t;
      return;
    }
    line_ += line_.empty() ? t : " " + t;
  }

  void flush() {
    if (!line_.empty()) {
      out_ << line_ << '\n';
      line_.clear();
    }
  }

  void raw(const std::string& text) {
    flush();
    out_ << text << '\n';
  }

private:
  std::ostream& out_;
  std::string line_;
};

inline void signed_term(LineWriter& w, double coef, const std::string& rest, bool first) {
  if (coef < 0) {
    w.token("-");
  } else if (!first) {
    w.token("+");
  }
  w.token(format_number(std::abs(coef)) + " " + rest);
}

}  // namespace lp_detail

inline void write_lp(const MilpModel& model, std::ostream& out) {
  lp_detail::LineWriter w(out);
  w.raw("\\ chargenet schedule model");
  w.raw("\\ " + std::to_string(model.variables.size()) + " variables, " +
        std::to_string(model.binary_count()) + " binary, " +
        std::to_string(model.constraints.size()) + " constraints");
  w.raw("Minimize");
  w.start(" obj:");
  bool first = true;
  for (const auto& t : model.objective_linear) {
    lp_detail::signed_term(w, t.coef, model.variables[t.var].name, first);
    first = false;
  }
  if (model.objective_constant != 0.0 || (first && model.objective_quadratic.empty())) {
    const double c = model.objective_constant;
    if (c < 0) {
      w.token("-");
    } else if (!first) {
      w.token("+");
    }
    w.token(format_number(std::abs(c)));
    first = false;
  }
  if (!model.objective_quadratic.empty()) {
    w.token(first ? "[" : "+ [");
    bool qfirst = true;
    for (const auto& q : model.objective_quadratic) {
      const std::string& a = model.variables[q.a].name;
      const std::string& b = model.variables[q.b].name;
      lp_detail::signed_term(w, 2.0 * q.coef, q.a == q.b ? a + " ^ 2" : a + " * " + b, qfirst);
      qfirst = false;
    }
    w.token("] / 2");
  }
  w.flush();
  if (!model.constraints.empty()) {
    w.raw("Subject To");
    for (const auto& c : model.constraints) {
      w.start(" " + c.name + ":");
      bool cfirst = true;
      for (const auto& t : c.terms) {
        lp_detail::signed_term(w, t.coef, model.variables[t.var].name, cfirst);
        cfirst = false;
      }
      if (cfirst) {
        w.token("0 " + model.variables.front().name);
      }
      w.token(c.sense == Sense::LE ? "<=" : c.sense == Sense::GE ? ">=" : "=");
      w.token(format_number(c.rhs));
      w.flush();
    }
  }
  w.raw("Bounds");
  for (const auto& v : model.variables) {
    if (v.kind != VarKind::Continuous) {
      continue;
    }
    if (v.lower == v.upper) {
      w.raw(" " + v.name + " = " + format_number(v.lower));
    } else if (std::isinf(v.lower) && std::isinf(v.upper)) {
      w.raw(" " + v.name + " free");
    } else {
      w.raw(" " + format_number(v.lower) + " <= " + v.name + " <= " + format_number(v.upper));
    }
  }
  bool any_binary = false;
  for (const auto& v : model.variables) {
    if (v.kind == VarKind::Binary) {
      if (!any_binary) {
        w.raw("Binary");
        any_binary = true;
      }
      w.token(v.name);
    }
  }
  w.flush();
  w.raw("End");
}

inline std::string to_lp_string(const MilpModel& model) {
  std::ostringstream out;
  write_lp(model, out);
  return out.str();
}

inline void write_lp(const MilpModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("write_lp: cannot open " + path);
  }
  write_lp(model, out);
  out.flush();
  if (!out) {
    throw IoError("write_lp: write failed for " + path);
  }
}

}  // namespace chargenet

#endif
