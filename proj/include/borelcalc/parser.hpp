#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "borelcalc/errors.hpp"
#include "borelcalc/funcexpr.hpp"

// Text format for Borel functions and Borel sets; the grammar is documented
// in GRAMMAR.md. parse_expr(print_expr(e)) returns a structurally identical
// tree for every parsed e (composites are lowered by substitution when
// printed).

namespace borelcalc {

namespace detail {

enum class Tok {
  Number,  // value in num, is_imag set for a trailing 'i'
  Ident,
  Plus,
  Minus,
  Star,
  Slash,
  Caret,
  LParen,
  RParen,
  Comma,
  Le,
  Lt,
  End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double num = 0.0;
  bool is_imag = false;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    cur_ = Token{};
    cur_.offset = pos_;
    if (pos_ >= src_.size()) {
      cur_.kind = Tok::End;
      return;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_]))))
        ++pos_;
      cur_.kind = Tok::Ident;
      cur_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    switch (c) {
      case '+': cur_.kind = Tok::Plus; break;
      case '-': cur_.kind = Tok::Minus; break;
      case '*': cur_.kind = Tok::Star; break;
      case '/': cur_.kind = Tok::Slash; break;
      case '^': cur_.kind = Tok::Caret; break;
      case '(': cur_.kind = Tok::LParen; break;
      case ')': cur_.kind = Tok::RParen; break;
      case ',': cur_.kind = Tok::Comma; break;
      case '<':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
          cur_.kind = Tok::Le;
          ++pos_;
        } else {
          cur_.kind = Tok::Lt;
        }
        break;
      default:
        throw ParseError("unexpected character '" + std::string(1, c) + "'",
                         pos_);
    }
    ++pos_;
  }

  void lex_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // 'e' belongs to a following identifier
      }
    }
    const std::string_view body = src_.substr(start, pos_ - start);
    double value = 0.0;
    auto res = std::from_chars(body.data(), body.data() + body.size(), value);
    if (res.ec != std::errc{})
      throw ParseError("malformed number literal", start);
    cur_.kind = Tok::Number;
    cur_.num = value;
    if (pos_ < src_.size() && src_[pos_] == 'i') {
      cur_.is_imag = true;
      ++pos_;
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token cur_;
};

class ExprParser {
 public:
  ExprParser(std::string_view src, int arity) : lex_(src), d_(arity) {}

  FuncExpr parse_function() {
    FuncExpr e = parse_sum();
    expect_end();
    return e;
  }

  BorelSetExpr parse_set_expr() {
    BorelSetExpr s = parse_set();
    expect_end();
    return s;
  }

 private:
  [[noreturn]] void fail(const Token& t, std::vector<std::string> expected) {
    std::string got = t.kind == Tok::End ? "end of input" : "'" + describe(t) + "'";
    throw ParseError("unexpected " + got, t.offset, std::move(expected));
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::Number: return t.is_imag ? "imaginary literal" : "number";
      case Tok::Ident: return t.text;
      case Tok::Plus: return "+";
      case Tok::Minus: return "-";
      case Tok::Star: return "*";
      case Tok::Slash: return "/";
      case Tok::Caret: return "^";
      case Tok::LParen: return "(";
      case Tok::RParen: return ")";
      case Tok::Comma: return ",";
      case Tok::Le: return "<=";
      case Tok::Lt: return "<";
      case Tok::End: return "end";
    }
    return "?";
  }

  void expect_end() {
    if (lex_.peek().kind != Tok::End)
      fail(lex_.peek(), {"end of input"});
  }

  void expect(Tok kind, const char* what) {
    if (lex_.peek().kind != kind) fail(lex_.peek(), {what});
    lex_.take();
  }

  FuncExpr parse_sum() {
    FuncExpr acc = parse_product();
    while (true) {
      const Tok k = lex_.peek().kind;
      if (k == Tok::Plus) {
        lex_.take();
        acc = FuncExpr::add(std::move(acc), parse_product());
      } else if (k == Tok::Minus) {
        lex_.take();
        acc = FuncExpr::add(std::move(acc), FuncExpr::neg(parse_product()));
      } else {
        return acc;
      }
    }
  }

  FuncExpr parse_product() {
    FuncExpr acc = parse_unary();
    while (true) {
      const Tok k = lex_.peek().kind;
      if (k == Tok::Star) {
        lex_.take();
        acc = FuncExpr::mul(std::move(acc), parse_unary());
      } else if (k == Tok::Slash) {
        lex_.take();
        acc = FuncExpr::mul(std::move(acc), FuncExpr::inv(parse_unary()));
      } else {
        return acc;
      }
    }
  }

  // unary minus binds weaker than '^': -z1^2 is -(z1^2)
  FuncExpr parse_unary() {
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      return FuncExpr::neg(parse_unary());
    }
    return parse_power();
  }

  FuncExpr parse_power() {
    FuncExpr base = parse_primary();
    if (lex_.peek().kind != Tok::Caret) return base;
    lex_.take();
    const Token t = lex_.peek();
    if (t.kind != Tok::Number || t.is_imag)
      fail(t, {"nonnegative integer exponent"});
    const double v = t.num;
    if (v != std::floor(v) || v < 0.0 || v > 64.0)
      throw ParseError("exponent must be an integer in [0, 64]", t.offset);
    lex_.take();
    return FuncExpr::pow(std::move(base), static_cast<unsigned>(v));
  }

  FuncExpr parse_primary() {
    const Token t = lex_.peek();
    switch (t.kind) {
      case Tok::Number:
        lex_.take();
        return FuncExpr::constant(t.is_imag ? cplx(0.0, t.num) : cplx(t.num, 0.0),
                                  d_);
      case Tok::LParen: {
        lex_.take();
        FuncExpr e = parse_sum();
        expect(Tok::RParen, ")");
        return e;
      }
      case Tok::Ident:
        return parse_ident();
      default:
        fail(t, {"number", "coordinate", "function", "("});
    }
  }

  FuncExpr parse_ident() {
    const Token t = lex_.take();
    const std::string& id = t.text;
    if (id == "i") return FuncExpr::constant(cplx(0.0, 1.0), d_);
    if (auto j = coordinate_index(id)) {
      if (*j < 1 || *j > d_)
        throw ArityError("coordinate z" + std::to_string(*j) +
                         " out of range for arity " + std::to_string(d_));
      return FuncExpr::coord(*j, d_);
    }
    if (id == "conj" || id == "abs" || id == "re" || id == "im" ||
        id == "sqrt" || id == "exp") {
      expect(Tok::LParen, "(");
      FuncExpr a = parse_sum();
      expect(Tok::RParen, ")");
      if (id == "conj") return FuncExpr::conj(std::move(a));
      if (id == "abs") return FuncExpr::abs(std::move(a));
      if (id == "re") return FuncExpr::re(std::move(a));
      if (id == "im") return FuncExpr::im(std::move(a));
      if (id == "sqrt") return FuncExpr::sqrt(std::move(a));
      return FuncExpr::exp(std::move(a));
    }
    if (id == "clamp") {
      expect(Tok::LParen, "(");
      FuncExpr a = parse_sum();
      expect(Tok::Comma, ",");
      const double r = parse_signed_real();
      if (r < 0.0) throw ParseError("clamp radius must be >= 0", t.offset);
      expect(Tok::RParen, ")");
      return FuncExpr::clamp(std::move(a), r);
    }
    if (id == "ind") {
      expect(Tok::LParen, "(");
      BorelSetExpr s = parse_set();
      expect(Tok::RParen, ")");
      return FuncExpr::indicator(std::move(s));
    }
    fail(t, {"coordinate", "conj", "abs", "re", "im", "sqrt", "exp", "clamp",
             "ind"});
  }

  static std::optional<int> coordinate_index(const std::string& id) {
    if (id.empty() || id[0] != 'z') return std::nullopt;
    if (id.size() == 1) return 1;  // bare "z" is shorthand for z1
    int value = 0;
    for (std::size_t k = 1; k < id.size(); ++k) {
      if (!std::isdigit(static_cast<unsigned char>(id[k]))) return std::nullopt;
      value = value * 10 + (id[k] - '0');
      if (value > 4096) return std::nullopt;
    }
    return value;
  }

  double parse_signed_real() {
    bool negate = false;
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      negate = true;
    }
    const Token t = lex_.peek();
    if (t.kind != Tok::Number || t.is_imag) fail(t, {"real number"});
    lex_.take();
    return negate ? -t.num : t.num;
  }

  // a, bi, a+bi, a-bi, i, -i, ... (literal only, used in set arguments)
  cplx parse_complex_literal() {
    bool neg = false;
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      neg = true;
    }
    Token t = lex_.peek();
    cplx first;
    if (t.kind == Tok::Number) {
      lex_.take();
      first = t.is_imag ? cplx(0.0, t.num) : cplx(t.num, 0.0);
    } else if (t.kind == Tok::Ident && t.text == "i") {
      lex_.take();
      first = cplx(0.0, 1.0);
    } else {
      fail(t, {"complex literal"});
    }
    if (neg) first = -first;
    if (first.imag() != 0.0) return first;  // purely imaginary, done
    const Tok k = lex_.peek().kind;
    if (k != Tok::Plus && k != Tok::Minus) return first;
    const bool minus = k == Tok::Minus;
    lex_.take();
    Token u = lex_.peek();
    double imag;
    if (u.kind == Tok::Number && u.is_imag) {
      lex_.take();
      imag = u.num;
    } else if (u.kind == Tok::Ident && u.text == "i") {
      lex_.take();
      imag = 1.0;
    } else {
      fail(u, {"imaginary part"});
    }
    return {first.real(), minus ? -imag : imag};
  }

  BorelSetExpr parse_set() {
    const Token t = lex_.peek();
    if (t.kind != Tok::Ident)
      fail(t, {"ball", "closedball", "union", "inter", "compl", "singleton",
               "preimage", "re", "im", "empty", "full"});
    const std::string id = t.text;
    if (id == "empty") {
      lex_.take();
      return BorelSetExpr::empty(d_);
    }
    if (id == "full") {
      lex_.take();
      return BorelSetExpr::full(d_);
    }
    if (id == "ball" || id == "closedball") {
      lex_.take();
      expect(Tok::LParen, "(");
      std::vector<cplx> args;
      args.push_back(parse_complex_literal());
      while (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        args.push_back(parse_complex_literal());
      }
      expect(Tok::RParen, ")");
      if (static_cast<int>(args.size()) != d_ + 1)
        throw ArityError(id + ": expected " + std::to_string(d_) +
                         " center components and a radius");
      const cplx rtok = args.back();
      args.pop_back();
      if (rtok.imag() != 0.0 || rtok.real() < 0.0)
        throw ParseError(id + ": radius must be a nonnegative real", t.offset);
      return BorelSetExpr::ball(std::move(args), rtok.real(),
                                id == "closedball");
    }
    if (id == "singleton") {
      lex_.take();
      expect(Tok::LParen, "(");
      std::vector<cplx> args;
      args.push_back(parse_complex_literal());
      while (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        args.push_back(parse_complex_literal());
      }
      expect(Tok::RParen, ")");
      if (static_cast<int>(args.size()) != d_)
        throw ArityError("singleton: expected " + std::to_string(d_) +
                         " components");
      return BorelSetExpr::singleton(std::move(args));
    }
    if (id == "union" || id == "inter") {
      lex_.take();
      expect(Tok::LParen, "(");
      std::vector<BorelSetExpr> parts;
      parts.push_back(parse_set());
      while (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        parts.push_back(parse_set());
      }
      expect(Tok::RParen, ")");
      return id == "union" ? BorelSetExpr::set_union(std::move(parts))
                           : BorelSetExpr::set_intersection(std::move(parts));
    }
    if (id == "compl") {
      lex_.take();
      expect(Tok::LParen, "(");
      BorelSetExpr s = parse_set();
      expect(Tok::RParen, ")");
      return BorelSetExpr::complement(std::move(s));
    }
    if (id == "preimage") {
      lex_.take();
      expect(Tok::LParen, "(");
      FuncExpr f = parse_sum();
      expect(Tok::Comma, ",");
      BorelSetExpr target;
      {
        const int saved = d_;
        d_ = 1;
        try {
          target = parse_set();
        } catch (...) {
          d_ = saved;
          throw;
        }
        d_ = saved;
      }
      expect(Tok::RParen, ")");
      return BorelSetExpr::preimage(std::move(f), std::move(target));
    }
    if (id == "re" || id == "im") {
      lex_.take();
      expect(Tok::LParen, "(");
      const Token ct = lex_.peek();
      if (ct.kind != Tok::Ident) fail(ct, {"coordinate"});
      auto j = coordinate_index(ct.text);
      if (!j) fail(ct, {"coordinate"});
      if (*j < 1 || *j > d_)
        throw ArityError("coordinate z" + std::to_string(*j) +
                         " out of range for arity " + std::to_string(d_));
      lex_.take();
      expect(Tok::RParen, ")");
      bool strict;
      if (lex_.peek().kind == Tok::Le) {
        strict = false;
      } else if (lex_.peek().kind == Tok::Lt) {
        strict = true;
      } else {
        fail(lex_.peek(), {"<=", "<"});
      }
      lex_.take();
      const double thr = parse_signed_real();
      return BorelSetExpr::half_plane(*j, id == "re" ? Axis::Re : Axis::Im, thr,
                                      strict, d_);
    }
    fail(t, {"ball", "closedball", "union", "inter", "compl", "singleton",
             "preimage", "re", "im", "empty", "full"});
  }

  Lexer lex_;
  int d_;
};

inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// "3", "2i", "i", "(-3)", "(1+2i)", "(1-2i)" ... negative or mixed values
// are parenthesized so they re-parse as a single folded constant.
inline std::string format_complex(cplx z) {
  const double re = z.real(), im = z.imag();
  if (im == 0.0) {
    if (re >= 0.0) return format_double(re);
    return "(" + format_double(re) + ")";
  }
  if (re == 0.0) {
    if (im == 1.0) return "i";
    if (im == -1.0) return "(-i)";
    if (im > 0.0) return format_double(im) + "i";
    return "(" + format_double(im) + "i)";
  }
  std::string s = "(" + format_double(re);
  if (im > 0.0) {
    s += "+";
    s += im == 1.0 ? "i" : format_double(im) + "i";
  } else {
    s += "-";
    s += im == -1.0 ? "i" : format_double(-im) + "i";
  }
  return s + ")";
}

// bare literal form for set arguments (no parentheses in that context)
inline std::string format_complex_bare(cplx z) {
  const double re = z.real(), im = z.imag();
  if (im == 0.0) return format_double(re);
  if (re == 0.0) {
    if (im == 1.0) return "i";
    if (im == -1.0) return "-i";
    return format_double(im) + "i";
  }
  std::string s = format_double(re);
  if (im > 0.0)
    s += "+" + (im == 1.0 ? std::string("i") : format_double(im) + "i");
  else
    s += "-" + (im == -1.0 ? std::string("i") : format_double(-im) + "i");
  return s;
}

// ctx[j-1], when present, is the printed replacement for coordinate j; it is
// how Compose nodes are lowered to the published grammar.
std::string print_fn(const FuncExpr& e, const std::vector<std::string>& ctx);

inline std::string coord_repr(int j, const std::vector<std::string>& ctx) {
  if (!ctx.empty()) return ctx[static_cast<std::size_t>(j - 1)];
  return "z" + std::to_string(j);
}

inline std::string print_set(const BorelSetExpr& s,
                             const std::vector<std::string>& ctx) {
  const SetNode& n = s.node();
  switch (n.kind) {
    case SetKind::Ball: {
      if (ctx.empty()) {
        std::string out = n.closed ? "closedball(" : "ball(";
        for (const cplx& c : n.center) out += format_complex_bare(c) + ",";
        out += format_double(n.radius) + ")";
        return out;
      }
      // under substitution: distance to the center as a scalar map
      std::string dist2;
      for (std::size_t k = 0; k < n.center.size(); ++k) {
        std::string diff = "(" + coord_repr(static_cast<int>(k) + 1, ctx) + "+" +
                           format_complex(-n.center[k]) + ")";
        std::string term = "(conj" + diff + "*" + diff + ")";
        dist2 = k == 0 ? term : "(" + dist2 + "+" + term + ")";
      }
      return std::string("preimage(sqrt(") + dist2 + ")," +
             (n.closed ? "closedball(0," : "ball(0,") + format_double(n.radius) +
             "))";
    }
    case SetKind::HalfPlane: {
      const char* fn = n.axis == Axis::Re ? "re" : "im";
      const char* cmp = n.strict ? " < " : " <= ";
      if (ctx.empty())
        return std::string(fn) + "(z" + std::to_string(n.coord) + ")" + cmp +
               format_double(n.threshold);
      return "preimage(" + coord_repr(n.coord, ctx) + "," + fn + "(z1)" + cmp +
             format_double(n.threshold) + ")";
    }
    case SetKind::Complement:
      return "compl(" + print_set(n.parts[0], ctx) + ")";
    case SetKind::Union:
    case SetKind::Intersection: {
      std::string out = n.kind == SetKind::Union ? "union(" : "inter(";
      for (std::size_t k = 0; k < n.parts.size(); ++k) {
        if (k) out += ",";
        out += print_set(n.parts[k], ctx);
      }
      return out + ")";
    }
    case SetKind::Preimage:
      return "preimage(" + print_fn(n.fn[0], ctx) + "," +
             print_set(n.parts[0], {}) + ")";
    case SetKind::Singleton: {
      if (ctx.empty()) {
        std::string out = "singleton(";
        for (std::size_t k = 0; k < n.center.size(); ++k) {
          if (k) out += ",";
          out += format_complex_bare(n.center[k]);
        }
        return out + ")";
      }
      std::vector<std::string> parts;
      for (std::size_t k = 0; k < n.center.size(); ++k)
        parts.push_back("preimage(" + coord_repr(static_cast<int>(k) + 1, ctx) +
                        ",singleton(" + format_complex_bare(n.center[k]) + "))");
      if (parts.size() == 1) return parts[0];
      std::string out = "inter(";
      for (std::size_t k = 0; k < parts.size(); ++k) {
        if (k) out += ",";
        out += parts[k];
      }
      return out + ")";
    }
    case SetKind::Empty:
      return "empty";
    case SetKind::Full:
      return "full";
  }
  return "";
}

inline std::string print_fn(const FuncExpr& e,
                            const std::vector<std::string>& ctx) {
  const FnNode& n = e.node();
  switch (n.kind) {
    case FnKind::Const:
      return format_complex(n.value);
    case FnKind::Coord:
      return coord_repr(n.coord, ctx);
    case FnKind::Add:
      return "(" + print_fn(n.args[0], ctx) + "+" + print_fn(n.args[1], ctx) +
             ")";
    case FnKind::Mul:
      if (n.args[1].node().kind == FnKind::Inv)
        return "(" + print_fn(n.args[0], ctx) + "/" +
               print_fn(n.args[1].node().args[0], ctx) + ")";
      return "(" + print_fn(n.args[0], ctx) + "*" + print_fn(n.args[1], ctx) +
             ")";
    case FnKind::Neg:
      return "(-" + print_fn(n.args[0], ctx) + ")";
    case FnKind::Conj:
      return "conj(" + print_fn(n.args[0], ctx) + ")";
    case FnKind::Abs:
      return "abs(" + print_fn(n.args[0], ctx) + ")";
    case FnKind::Re:
      return "re(" + print_fn(n.args[0], ctx) + ")";
    case FnKind::Im:
      return "im(" + print_fn(n.args[0], ctx) + ")";
    case FnKind::Inv:
      return "(1/" + print_fn(n.args[0], ctx) + ")";
    case FnKind::Sqrt:
      return "sqrt(" + print_fn(n.args[0], ctx) + ")";
    case FnKind::Exp:
      return "exp(" + print_fn(n.args[0], ctx) + ")";
    case FnKind::Indicator:
      return "ind(" + print_set(n.set, ctx) + ")";
    case FnKind::Compose: {
      std::vector<std::string> inner;
      for (std::size_t k = 1; k < n.args.size(); ++k)
        inner.push_back(print_fn(n.args[k], ctx));
      return print_fn(n.args[0], inner);
    }
    case FnKind::Clamp:
      return "clamp(" + print_fn(n.args[0], ctx) + "," +
             format_double(n.radius) + ")";
  }
  return "";
}

}  // namespace detail

inline FuncExpr parse_expr(const std::string& text, int arity) {
  detail::ExprParser p(text, arity);
  return p.parse_function();
}

inline BorelSetExpr parse_set_expr(const std::string& text, int arity) {
  detail::ExprParser p(text, arity);
  return p.parse_set_expr();
}

inline std::string print_expr(const FuncExpr& e) { return detail::print_fn(e, {}); }

inline std::string print_set_expr(const BorelSetExpr& s) {
  return detail::print_set(s, {});
}

}  // namespace borelcalc
