#pragma once

// Small arithmetic expression language for config-defined coefficients.
// Grammar: + - * / ^, unary minus, parentheses, numbers, named variables,
// constants pi and e, and the functions sin cos exp log sqrt tanh sinh cosh.
// Compiled to a postfix program that evaluates on double or Jet.

#include <cmath>
#include <string>
#include <vector>

#include "lklab/jet.hpp"
#include "lklab/types.hpp"

namespace lklab {

class Expr {
 public:
  enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, PowConst, Sin, Cos, Exp, Log, Sqrt, Tanh, Sinh, Cosh };
  struct Instr {
    Op op;
    double value = 0.0;
    int var = -1;
  };

  Expr() = default;
  /// Throws ConfigError with position information on malformed input.
  static Expr parse(const std::string& src, const std::vector<std::string>& vars);

  const std::string& source() const { return src_; }
  bool is_constant() const;
  /// True when variable `v` appears in the program.
  bool uses(int v) const;

  template <class T>
  T eval(const std::vector<T>& vars) const {
    using std::cos;
    using std::cosh;
    using std::exp;
    using std::log;
    using std::pow;
    using std::sin;
    using std::sinh;
    using std::sqrt;
    using std::tanh;
    std::vector<T> st;
    st.reserve(16);
    for (const auto& in : prog_) {
      switch (in.op) {
        case Op::Const: st.push_back(T(in.value)); break;
        case Op::Var: st.push_back(vars[in.var]); break;
        case Op::Neg: st.back() = -st.back(); break;
        case Op::PowConst: st.back() = int_or_real_pow(st.back(), in.value); break;
        case Op::Sin: st.back() = sin(st.back()); break;
        case Op::Cos: st.back() = cos(st.back()); break;
        case Op::Exp: st.back() = exp(st.back()); break;
        case Op::Log: st.back() = log(st.back()); break;
        case Op::Sqrt: st.back() = sqrt(st.back()); break;
        case Op::Tanh: st.back() = tanh(st.back()); break;
        case Op::Sinh: st.back() = sinh(st.back()); break;
        case Op::Cosh: st.back() = cosh(st.back()); break;
        default: {
          T b = st.back();
          st.pop_back();
          T& a = st.back();
          switch (in.op) {
            case Op::Add: a = a + b; break;
            case Op::Sub: a = a - b; break;
            case Op::Mul: a = a * b; break;
            case Op::Div: a = a / b; break;
            case Op::Pow: a = exp(b * log(a)); break;
            default: throw DomainError("Expr: corrupt program");
          }
        }
      }
    }
    return st.back();
  }

 private:
  template <class T>
  static T int_or_real_pow(const T& x, double p) {
    using std::pow;
    double r = std::round(p);
    if (r == p && std::abs(r) <= 16) {
      int n = static_cast<int>(std::abs(r));
      T acc = T(1.0);
      for (int i = 0; i < n; ++i) acc = acc * x;
      return r < 0 ? T(1.0) / acc : acc;
    }
    return pow(x, p);
  }

  std::string src_;
  std::vector<Instr> prog_;
};

}  // namespace lklab
