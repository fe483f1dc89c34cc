#include "lklab/expr.hpp"

#include <cctype>
#include <map>

namespace lklab {

namespace {

class Parser {
 public:
  Parser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

  std::vector<Expr::Instr> run() {
    expression();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return out_;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression '" + s_ + "': " + what + " at offset " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void emit(Expr::Op op, double v = 0.0, int var = -1) { out_.push_back({op, v, var}); }

  void expression() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(Expr::Op::Add);
      } else if (accept('-')) {
        term();
        emit(Expr::Op::Sub);
      } else {
        return;
      }
    }
  }
  void term() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        emit(Expr::Op::Mul);
      } else if (accept('/')) {
        unary();
        emit(Expr::Op::Div);
      } else {
        return;
      }
    }
  }
  // unary minus binds looser than ^ so -x^2 = -(x^2)
  void unary() {
    if (accept('-')) {
      unary();
      emit(Expr::Op::Neg);
    } else if (accept('+')) {
      unary();
    } else {
      power();
    }
  }
  void power() {
    primary();
    if (accept('^')) {
      std::size_t mark = out_.size();
      unary();
      if (out_.size() == mark + 1 && out_.back().op == Expr::Op::Const) {
        double p = out_.back().value;
        out_.pop_back();
        emit(Expr::Op::PowConst, p);
      } else {
        emit(Expr::Op::Pow);
      }
    }
  }
  void primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      expression();
      if (!accept(')')) fail("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      emit(Expr::Op::Const, v);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == name) {
          emit(Expr::Op::Var, 0.0, static_cast<int>(i));
          return;
        }
      }
      if (name == "pi") {
        emit(Expr::Op::Const, kPi);
        return;
      }
      if (name == "e") {
        emit(Expr::Op::Const, std::exp(1.0));
        return;
      }
      static const std::map<std::string, Expr::Op> funcs = {
          {"sin", Expr::Op::Sin},   {"cos", Expr::Op::Cos},   {"exp", Expr::Op::Exp},
          {"log", Expr::Op::Log},   {"sqrt", Expr::Op::Sqrt}, {"tanh", Expr::Op::Tanh},
          {"sinh", Expr::Op::Sinh}, {"cosh", Expr::Op::Cosh}};
      auto it = funcs.find(name);
      if (it == funcs.end()) fail("unknown identifier '" + name + "'");
      if (!accept('(')) fail("expected '(' after " + name);
      expression();
      if (!accept(')')) fail("expected ')'");
      emit(it->second);
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
  std::vector<Expr::Instr> out_;
};

}  // namespace

Expr Expr::parse(const std::string& src, const std::vector<std::string>& vars) {
  Expr e;
  e.src_ = src;
  e.prog_ = Parser(src, vars).run();
  return e;
}

bool Expr::is_constant() const {
  for (const auto& in : prog_)
    if (in.op == Op::Var) return false;
  return true;
}

bool Expr::uses(int v) const {
  for (const auto& in : prog_)
    if (in.op == Op::Var && in.var == v) return true;
  return false;
}

}  // namespace lklab
