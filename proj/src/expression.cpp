#include "symdyn/expression.hpp"

#include <cctype>
#include <charconv>
#include <numbers>

namespace symdyn {

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  Expression run() {
    Expression e;
    e.source_ = std::string(text_);
    out_ = &e.code_;
    parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    check_depth();
    return e;
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  void emit(Op op, double arg = 0.0) { out_->push_back({op, arg}); }

  void parse_expr() {
    parse_term();
    for (;;) {
      if (accept('+')) {
        parse_term();
        emit(Op::Add);
      } else if (accept('-')) {
        parse_term();
        emit(Op::Sub);
      } else {
        return;
      }
    }
  }
  void parse_term() {
    parse_unary();
    for (;;) {
      if (accept('*')) {
        parse_unary();
        emit(Op::Mul);
      } else if (accept('/')) {
        parse_unary();
        emit(Op::Div);
      } else {
        return;
      }
    }
  }
  void parse_unary() {
    if (accept('-')) {
      parse_unary();
      emit(Op::Neg);
    } else if (accept('+')) {
      parse_unary();
    } else {
      parse_power();
    }
  }
  void parse_power() {
    parse_primary();
    if (accept('^')) {
      skip_ws();
      double sign = 1.0;
      if (accept('-')) sign = -1.0;
      skip_ws();
      if (pos_ >= text_.size() || !(std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
        fail("exponent must be a numeric literal");
      emit(Op::Pow, sign * parse_number());
    }
  }
  double parse_number() {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }
  void parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      emit(Op::Const, parse_number());
      return;
    }
    if (accept('(')) {
      parse_expr();
      expect(')');
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "x") return emit(Op::X);
      if (name == "y") return emit(Op::Y);
      if (name == "r2") return emit(Op::R2);
      if (name == "pi") return emit(Op::Const, std::numbers::pi);
      Op fn;
      if (name == "sin") {
        fn = Op::Sin;
      } else if (name == "cos") {
        fn = Op::Cos;
      } else if (name == "exp") {
        fn = Op::Exp;
      } else {
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
      }
      expect('(');
      parse_expr();
      expect(')');
      emit(fn);
      return;
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  void check_depth() {
    std::size_t depth = 0, max_depth = 0;
    for (const auto& in : *out_) {
      switch (in.op) {
        case Op::Const: case Op::X: case Op::Y: case Op::R2: ++depth; break;
        case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: --depth; break;
        default: break;
      }
      max_depth = std::max(max_depth, depth);
    }
    if (max_depth > Expression::kMaxStack) fail("expression nesting too deep");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Expression::Instr>* out_ = nullptr;
};

Expression Expression::parse(std::string_view text) { return ExpressionParser(text).run(); }

}  // namespace symdyn
