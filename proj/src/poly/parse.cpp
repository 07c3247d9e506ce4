#include "respgames/poly/parse.hpp"

#include <cctype>
#include <stdexcept>

#include "respgames/errors.hpp"

namespace respgames::poly {

namespace {

class ExprParser {
 public:
  ExprParser(std::string_view text, const ParamTable& names, ParamTable* declare,
             const std::string& source)
      : text_(text), names_(names), declare_(declare), source_(source) {}

  RationalFunction parse() {
    RationalFunction value = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return value;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(source_, 1, pos_ + 1, message);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  RationalFunction expr() {
    RationalFunction value = term();
    for (;;) {
      if (accept('+')) {
        value = value + term();
      } else if (accept('-')) {
        value = value - term();
      } else {
        return value;
      }
    }
  }

  RationalFunction term() {
    RationalFunction value = unary();
    for (;;) {
      if (accept('*')) {
        value = value * unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        RationalFunction divisor = unary();
        if (divisor.is_zero()) {
          pos_ = at;
          fail("division by zero");
        }
        value = value / divisor;
      } else {
        return value;
      }
    }
  }

  RationalFunction unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  RationalFunction power() {
    RationalFunction base = primary();
    if (accept('^')) {
      skip_space();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      unsigned long e = std::stoul(std::string(text_.substr(start, pos_ - start)));
      if (e > 1000) fail("exponent too large");
      RationalFunction out(Rational(1));
      for (unsigned long i = 0; i < e; ++i) out = out * base;
      return out;
    }
    return base;
  }

  RationalFunction primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      RationalFunction inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        ++pos_;
      }
      try {
        return RationalFunction(parse_rational(text_.substr(start, pos_ - start)));
      } catch (const std::invalid_argument& e) {
        pos_ = start;
        fail(e.what());
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '_' || text_[pos_] == '.')) {
        ++pos_;
      }
      if (pos_ < text_.size() && text_[pos_] == '[') {
        auto close = text_.find(']', pos_);
        if (close == std::string_view::npos) fail("unterminated '['");
        pos_ = close + 1;
      }
      std::string name(text_.substr(start, pos_ - start));
      std::string compact;
      for (char ch : name) {
        if (!std::isspace(static_cast<unsigned char>(ch))) compact += ch;
      }
      if (auto id = names_.lookup(compact)) return RationalFunction(Polynomial::variable(*id));
      if (declare_ != nullptr) return RationalFunction(Polynomial::variable(declare_->declare(compact)));
      pos_ = start;
      fail("unknown parameter '" + compact + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  const ParamTable& names_;
  ParamTable* declare_;
  const std::string& source_;
  std::size_t pos_ = 0;
};

Polynomial require_polynomial(const RationalFunction& r, const std::string& source) {
  if (!r.is_polynomial()) throw ParseError(source, 1, 1, "expected a polynomial, got a ratio");
  Polynomial p = r.num();
  p *= 1 / r.den().constant_term();
  return p;
}

}  // namespace

RationalFunction parse_rational_function(std::string_view text, ParamTable& names,
                                         bool declare_unknown, const std::string& source) {
  return ExprParser(text, names, declare_unknown ? &names : nullptr, source).parse();
}

RationalFunction parse_rational_function(std::string_view text, const ParamTable& names,
                                         const std::string& source) {
  return ExprParser(text, names, nullptr, source).parse();
}

Polynomial parse_polynomial(std::string_view text, ParamTable& names, bool declare_unknown,
                            const std::string& source) {
  return require_polynomial(parse_rational_function(text, names, declare_unknown, source), source);
}

Polynomial parse_polynomial(std::string_view text, const ParamTable& names,
                            const std::string& source) {
  return require_polynomial(parse_rational_function(text, names, source), source);
}

}  // namespace respgames::poly
