#include "multizero/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace multizero {

ParseError::ParseError(const std::string& msg, int line_, int col_)
    : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                         std::to_string(col_) + ": " + msg),
      line(line_),
      col(col_) {}

DomainError::DomainError(const std::string& msg, int equation_)
    : std::runtime_error(equation_ >= 0 ? "equation " +
                                              std::to_string(equation_ + 1) +
                                              ": " + msg
                                        : msg),
      equation(equation_) {}

ExprPtr Expression::constant(Complex value) {
  Expression e;
  e.kind_ = Kind::Constant;
  e.value_ = value;
  return std::make_shared<const Expression>(std::move(e));
}

ExprPtr Expression::variable(int index) {
  if (index < 0) throw std::invalid_argument("negative variable index");
  Expression e;
  e.kind_ = Kind::Variable;
  e.var_ = index;
  return std::make_shared<const Expression>(std::move(e));
}

ExprPtr Expression::unary(UnaryOp op, ExprPtr operand) {
  Expression e;
  e.kind_ = Kind::Unary;
  e.unary_ = op;
  e.lhs_ = std::move(operand);
  return std::make_shared<const Expression>(std::move(e));
}

ExprPtr Expression::binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  Expression e;
  e.kind_ = Kind::Binary;
  e.binary_ = op;
  e.lhs_ = std::move(lhs);
  e.rhs_ = std::move(rhs);
  return std::make_shared<const Expression>(std::move(e));
}

ExprPtr Expression::power(ExprPtr base, int exponent) {
  if (exponent < 0) throw std::invalid_argument("negative exponent");
  Expression e;
  e.kind_ = Kind::Power;
  e.exponent_ = exponent;
  e.lhs_ = std::move(base);
  return std::make_shared<const Expression>(std::move(e));
}

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  int line = 1;
  int col = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  Lexer(std::string_view text, int line) : text_(text), line_(line) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
        continue;
      }
      int col = static_cast<int>(pos_) + 1;
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        out.push_back(number(col));
      } else if (ident_start(c)) {
        size_t begin = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
        out.push_back({Tok::Ident, std::string(text_.substr(begin, pos_ - begin)), 0.0, line_, col});
      } else {
        Tok k;
        switch (c) {
          case '+': k = Tok::Plus; break;
          case '-': k = Tok::Minus; break;
          case '*': k = Tok::Star; break;
          case '/': k = Tok::Slash; break;
          case '^': k = Tok::Caret; break;
          case '(': k = Tok::LParen; break;
          case ')': k = Tok::RParen; break;
          default:
            throw ParseError(std::string("unexpected character '") + c + "'", line_, col);
        }
        out.push_back({k, std::string(1, c), 0.0, line_, col});
        ++pos_;
      }
    }
    out.push_back({Tok::End, "", 0.0, line_, static_cast<int>(text_.size()) + 1});
    return out;
  }

 private:
  Token number(int col) {
    size_t begin = pos_;
    bool any_digit = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
      any_digit = true;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        any_digit = true;
      }
    }
    if (!any_digit) throw ParseError("malformed number", line_, col);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // "2e" is the number 2 followed by identifier "e"
      }
    }
    std::string raw(text_.substr(begin, pos_ - begin));
    double value = 0.0;
    auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc() || p != raw.data() + raw.size())
      throw ParseError("malformed number '" + raw + "'", line_, col);
    return {Tok::Number, raw, value, line_, col};
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_;
};

const std::array<std::pair<std::string_view, UnaryOp>, 6> kFunctions = {{
    {"sin", UnaryOp::Sin},
    {"cos", UnaryOp::Cos},
    {"tan", UnaryOp::Tan},
    {"exp", UnaryOp::Exp},
    {"log", UnaryOp::Log},
    {"sqrt", UnaryOp::Sqrt},
}};

bool lookup_function(std::string_view name, UnaryOp* op) {
  for (const auto& [fname, fop] : kFunctions) {
    if (fname == name) {
      if (op) *op = fop;
      return true;
    }
  }
  return false;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const std::vector<std::string>& variables)
      : toks_(std::move(tokens)), vars_(variables) {}

  ExprPtr run() {
    ExprPtr e = expr();
    expect(Tok::End, "end of expression");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }
  bool accept(Tok k) {
    if (peek().kind == k) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(Tok k, const std::string& what) {
    if (!accept(k))
      throw ParseError("expected " + what + ", got '" + peek().text + "'",
                       peek().line, peek().col);
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      BinaryOp op = advance().kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      lhs = Expression::binary(op, std::move(lhs), term());
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = factor();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      BinaryOp op = advance().kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
      lhs = Expression::binary(op, std::move(lhs), factor());
    }
    return lhs;
  }

  ExprPtr factor() {
    ExprPtr base = atom();
    if (accept(Tok::Caret)) {
      const Token& t = peek();
      if (t.kind != Tok::Number ||
          t.text.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("exponent must be a nonnegative integer", t.line, t.col);
      advance();
      long v = std::strtol(t.text.c_str(), nullptr, 10);
      if (v > 1000000) throw ParseError("exponent too large", t.line, t.col);
      return Expression::power(std::move(base), static_cast<int>(v));
    }
    return base;
  }

  ExprPtr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        advance();
        return Expression::constant(Complex(t.number, 0.0));
      case Tok::Minus:
        advance();
        return Expression::unary(UnaryOp::Neg, atom());
      case Tok::LParen: {
        advance();
        ExprPtr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        advance();
        if (t.text == "i") return Expression::constant(Complex(0.0, 1.0));
        UnaryOp op;
        if (lookup_function(t.text, &op)) {
          expect(Tok::LParen, "'(' after function name");
          ExprPtr arg = expr();
          expect(Tok::RParen, "')'");
          return Expression::unary(op, std::move(arg));
        }
        for (size_t v = 0; v < vars_.size(); ++v)
          if (vars_[v] == t.text) return Expression::variable(static_cast<int>(v));
        throw ParseError("unknown variable '" + t.text + "'", t.line, t.col);
      }
      default:
        throw ParseError("expected a value, got '" + t.text + "'", t.line, t.col);
    }
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  const std::vector<std::string>& vars_;
};

std::string strip_comment(std::string_view line) {
  size_t hash = line.find('#');
  std::string s(hash == std::string_view::npos ? line : line.substr(0, hash));
  return s;
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

namespace {
ExprPtr parse_expression_line(std::string_view text,
                              const std::vector<std::string>& variables,
                              int line) {
  return Parser(Lexer(text, line).run(), variables).run();
}
}  // namespace

ExprPtr parse_expression(std::string_view text,
                         const std::vector<std::string>& variables) {
  return parse_expression_line(text, variables, 1);
}

System parse_system(std::string_view text) {
  System sys;
  bool saw_vars = false;
  int line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    std::string_view raw =
        text.substr(start, end == std::string_view::npos ? text.size() - start
                                                         : end - start);
    ++line_no;
    std::string line = strip_comment(raw);
    if (!blank(line)) {
      if (!saw_vars) {
        std::istringstream is(line);
        std::string kw;
        is >> kw;
        if (kw != "vars")
          throw ParseError("expected 'vars <name>...' before equations",
                           line_no, 1);
        std::string name;
        while (is >> name) {
          if (!ident_start(name[0]) ||
              name.find_first_not_of(
                  "abcdefghijklmnopqrstuvwxyz"
                  "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_") != std::string::npos)
            throw ParseError("bad variable name '" + name + "'", line_no, 1);
          if (name == "i" || lookup_function(name, nullptr))
            throw ParseError("reserved name '" + name + "'", line_no, 1);
          for (const auto& prev : sys.variables)
            if (prev == name)
              throw ParseError("duplicate variable '" + name + "'", line_no, 1);
          sys.variables.push_back(name);
        }
        if (sys.variables.empty())
          throw ParseError("no variables declared", line_no, 1);
        saw_vars = true;
      } else {
        sys.equations.push_back(
            parse_expression_line(line, sys.variables, line_no));
      }
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  if (!saw_vars) throw ParseError("empty system: missing 'vars' line", 1, 1);
  if (sys.equations.empty())
    throw ParseError("system has no equations", line_no, 1);
  return sys;
}

System load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str());
}

namespace {
struct ComplexCtx {
  const Point& at;
  Complex constant(Complex v) const { return v; }
  Complex variable(int idx) const {
    if (idx < 0 || idx >= static_cast<int>(at.size()))
      throw std::invalid_argument("point dimension does not match system");
    return at[static_cast<size_t>(idx)];
  }
};
}  // namespace

Complex eval_expression(const Expression& e, const Point& at) {
  return eval_tree<Complex>(e, ComplexCtx{at});
}

std::vector<Complex> eval_system(const System& sys, const Point& at) {
  if (static_cast<int>(at.size()) != sys.num_vars())
    throw std::invalid_argument("point dimension does not match system");
  std::vector<Complex> out;
  out.reserve(sys.equations.size());
  for (size_t i = 0; i < sys.equations.size(); ++i) {
    try {
      out.push_back(eval_expression(*sys.equations[i], at));
    } catch (const DomainError& err) {
      throw DomainError(err.what(), static_cast<int>(i));
    }
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

namespace {

// Precedence levels for printing: 1 sum, 2 product, 3 power base, 4 atom.
std::string render_node(const Expression& e,
                        const std::vector<std::string>& vars, int level);

std::string parenthesize_if(const std::string& s, bool yes) {
  return yes ? "(" + s + ")" : s;
}

std::string render_constant(Complex v, int level) {
  double re = v.real(), im = v.imag();
  if (im == 0.0) {
    std::string s = format_double(re);
    bool negative = !s.empty() && s[0] == '-';
    return parenthesize_if(s, negative && level >= 3);
  }
  std::string ims = format_double(std::abs(im)) + "*i";
  if (std::abs(im) == 1.0) ims = "i";
  if (re == 0.0) {
    std::string s = (im < 0 ? "-" : "") + ims;
    return parenthesize_if(s, im < 0 ? level >= 3 : level >= 4 && ims != "i");
  }
  return "(" + format_double(re) + (im < 0 ? "-" : "+") + ims + ")";
}

std::string render_node(const Expression& e,
                        const std::vector<std::string>& vars, int level) {
  using K = Expression::Kind;
  switch (e.kind()) {
    case K::Constant:
      return render_constant(e.value(), level);
    case K::Variable: {
      int idx = e.variable_index();
      if (idx < static_cast<int>(vars.size())) return vars[static_cast<size_t>(idx)];
      return "x" + std::to_string(idx + 1);
    }
    case K::Unary: {
      const char* name = nullptr;
      switch (e.unary_op()) {
        case UnaryOp::Neg: {
          std::string inner = render_node(*e.lhs(), vars, 4);
          return parenthesize_if("-" + inner, level >= 3);
        }
        case UnaryOp::Sin: name = "sin"; break;
        case UnaryOp::Cos: name = "cos"; break;
        case UnaryOp::Tan: name = "tan"; break;
        case UnaryOp::Exp: name = "exp"; break;
        case UnaryOp::Log: name = "log"; break;
        case UnaryOp::Sqrt: name = "sqrt"; break;
      }
      return std::string(name) + "(" + render_node(*e.lhs(), vars, 1) + ")";
    }
    case K::Binary: {
      const char* op = nullptr;
      int prec = 1;
      switch (e.binary_op()) {
        case BinaryOp::Add: op = "+"; prec = 1; break;
        case BinaryOp::Sub: op = "-"; prec = 1; break;
        case BinaryOp::Mul: op = "*"; prec = 2; break;
        case BinaryOp::Div: op = "/"; prec = 2; break;
      }
      std::string lhs = render_node(*e.lhs(), vars, prec);
      std::string rhs = render_node(*e.rhs(), vars, prec + 1);
      return parenthesize_if(lhs + op + rhs, level > prec);
    }
    case K::Power:
      return render_node(*e.lhs(), vars, 4) + "^" + std::to_string(e.exponent());
  }
  throw std::logic_error("corrupt expression node");
}

}  // namespace

std::string render(const Expression& e,
                   const std::vector<std::string>& variables) {
  return render_node(e, variables, 1);
}

std::string render(const System& sys) {
  std::string out = "vars";
  for (const auto& v : sys.variables) out += " " + v;
  out += "\n";
  for (const auto& eq : sys.equations) out += render(*eq, sys.variables) + "\n";
  return out;
}

}  // namespace multizero
