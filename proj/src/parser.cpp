#include "sirkit/parser.hpp"

#include <cctype>
#include <sstream>

#include "sirkit/validate.hpp"

namespace sirkit {

namespace {

struct Token {
  enum class Kind { Ident, Number, Punct, AtIdent, PctIdent, Tag, End };
  Kind kind = Kind::End;
  std::string text;
  uint64_t num = 0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_ws_and_comments();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (c == '@' || c == '%') {
      advance();
      t.kind = c == '@' ? Token::Kind::AtIdent : Token::Kind::PctIdent;
      t.text = lex_ident_body();
      if (t.text.empty()) fail(t.line, t.col, "expected identifier after sigil");
      return t;
    }
    if (c == '!') {
      advance();
      t.kind = Token::Kind::Tag;
      t.text = lex_ident_body();
      if (t.text.empty()) fail(t.line, t.col, "expected tag name after '!'");
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      t.kind = Token::Kind::Number;
      t.num = lex_number();
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Token::Kind::Ident;
      t.text = lex_ident_body();
      return t;
    }
    if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      advance();
      advance();
      t.kind = Token::Kind::Punct;
      t.text = "->";
      return t;
    }
    static const std::string punct = ",:=[]{}()";
    if (punct.find(c) != std::string::npos) {
      advance();
      t.kind = Token::Kind::Punct;
      t.text = std::string(1, c);
      return t;
    }
    fail(line_, col_, std::string("unexpected character '") + c + "'");
    return t;  // unreachable
  }

  struct Error {
    int line, col;
    std::string message;
  };

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string lex_ident_body() {
    std::string s;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
        s.push_back(c);
        advance();
      } else {
        break;
      }
    }
    return s;
  }

  uint64_t lex_number() {
    int l = line_, co = col_;
    uint64_t v = 0;
    if (src_[pos_] == '0' && pos_ + 1 < src_.size() &&
        (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X')) {
      advance();
      advance();
      bool any = false;
      while (pos_ < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[pos_]))) {
        char c = src_[pos_];
        uint64_t d = c <= '9' ? c - '0' : (std::tolower(c) - 'a' + 10);
        if (v > (~0ull - d) / 16) fail(l, co, "hex constant overflows 64 bits");
        v = v * 16 + d;
        advance();
        any = true;
      }
      if (!any) fail(l, co, "expected hex digits after 0x");
      return v;
    }
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      uint64_t d = src_[pos_] - '0';
      if (v > (~0ull - d) / 10) fail(l, co, "decimal constant overflows 64 bits");
      v = v * 10 + d;
      advance();
    }
    return v;
  }

  [[noreturn]] void fail(int line, int col, std::string msg) {
    throw Error{line, col, std::move(msg)};
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { bump(); }

  IRModule parse() {
    IRModule m;
    bool entry_seen = false;
    while (cur_.kind != Token::Kind::End) {
      if (cur_.kind != Token::Kind::Ident)
        fail("expected 'entry', 'passes', 'global' or 'fn'");
      if (cur_.text == "entry") {
        bump();
        m.entry_function = expect_at_ident();
        entry_seen = true;
      } else if (cur_.text == "passes") {
        bump();
        parse_passes(m);
      } else if (cur_.text == "global") {
        bump();
        parse_global(m);
      } else if (cur_.text == "fn") {
        bump();
        parse_function(m);
      } else {
        fail("unexpected top-level item '" + cur_.text + "'");
      }
    }
    if (!entry_seen) {
      if (m.functions.size() == 1)
        m.entry_function = m.functions[0].name;
      else
        fail("module with " + std::to_string(m.functions.size()) +
             " functions needs an explicit 'entry @name' directive");
    }
    return m;
  }

  struct Error {
    int line, col;
    std::string message;
  };

 private:
  void bump() { cur_ = lexer_.next(); }

  [[noreturn]] void fail(std::string msg) { throw Error{cur_.line, cur_.col, std::move(msg)}; }

  void expect_punct(const char* p) {
    if (cur_.kind != Token::Kind::Punct || cur_.text != p)
      fail(std::string("expected '") + p + "'");
    bump();
  }

  bool accept_punct(const char* p) {
    if (cur_.kind == Token::Kind::Punct && cur_.text == p) {
      bump();
      return true;
    }
    return false;
  }

  std::string expect_at_ident() {
    if (cur_.kind != Token::Kind::AtIdent) fail("expected '@name'");
    std::string s = cur_.text;
    bump();
    return s;
  }

  std::string expect_pct_ident() {
    if (cur_.kind != Token::Kind::PctIdent) fail("expected '%name'");
    std::string s = cur_.text;
    bump();
    return s;
  }

  std::string expect_ident() {
    if (cur_.kind != Token::Kind::Ident) fail("expected identifier");
    std::string s = cur_.text;
    bump();
    return s;
  }

  uint64_t expect_number() {
    if (cur_.kind != Token::Kind::Number) fail("expected integer constant");
    uint64_t v = cur_.num;
    bump();
    return v;
  }

  Ty expect_type() {
    if (cur_.kind != Token::Kind::Ident) fail("expected type");
    auto t = ty_from_name(cur_.text);
    if (!t) fail("unknown type '" + cur_.text + "'");
    bump();
    return *t;
  }

  void parse_passes(IRModule& m) {
    do {
      std::string n = expect_ident();
      auto p = pass_from_name(n);
      if (!p) fail("unknown pass '" + n + "'");
      m.add_pass(*p);
    } while (accept_punct(","));
  }

  void parse_global(IRModule& m) {
    Global g;
    g.name = expect_at_ident();
    expect_punct(":");
    g.size = expect_number();
    if (accept_punct("=")) {
      expect_punct("[");
      if (!accept_punct("]")) {
        do {
          uint64_t b = expect_number();
          if (b > 0xff) fail("global initializer byte out of range");
          g.init.push_back(static_cast<uint8_t>(b));
        } while (accept_punct(","));
        expect_punct("]");
      }
    }
    if (cur_.kind == Token::Kind::Tag) {
      if (cur_.text != "instr") fail("unknown global attribute '!" + cur_.text + "'");
      g.instr_owned = true;
      bump();
    }
    if (g.init.size() > g.size) fail("global '" + g.name + "' initializer longer than its size");
    m.globals.push_back(std::move(g));
  }

  void parse_function(IRModule& m) {
    Function f;
    f.name = expect_at_ident();
    expect_punct("(");
    if (!accept_punct(")")) {
      do {
        Param p;
        p.name = expect_pct_ident();
        expect_punct(":");
        p.type = expect_type();
        f.params.push_back(std::move(p));
      } while (accept_punct(","));
      expect_punct(")");
    }
    expect_punct("->");
    f.return_type = expect_type();
    expect_punct("{");
    while (!accept_punct("}")) {
      BasicBlock b;
      b.name = expect_ident();
      expect_punct(":");
      // Instructions until the next "label:" or "}".
      while (true) {
        if (cur_.kind == Token::Kind::Punct && cur_.text == "}") break;
        if (cur_.kind == Token::Kind::Ident && peek_is_label()) break;
        b.instructions.push_back(parse_instruction());
      }
      f.blocks.push_back(std::move(b));
    }
    if (f.blocks.empty()) fail("function '@" + f.name + "' has no blocks");
    m.functions.push_back(std::move(f));
  }

  // A bare identifier is a label header only if it is not an opcode mnemonic.
  bool peek_is_label() const { return !opcode_from_name(cur_.text).has_value(); }

  Operand parse_value_operand() {
    if (cur_.kind == Token::Kind::PctIdent) {
      Operand o = Operand::value(cur_.text);
      bump();
      return o;
    }
    if (cur_.kind == Token::Kind::Number) {
      Operand o = Operand::constant(cur_.num);
      bump();
      return o;
    }
    fail("expected value name or constant");
  }

  Operand parse_ptr_operand() {
    if (cur_.kind == Token::Kind::PctIdent) {
      Operand o = Operand::value(cur_.text);
      bump();
      return o;
    }
    if (cur_.kind == Token::Kind::AtIdent) {
      Operand o = Operand::global(cur_.text);
      bump();
      return o;
    }
    fail("expected pointer value or '@global'");
  }

  Operand parse_label_operand() {
    if (cur_.kind == Token::Kind::Ident) {
      Operand o = Operand::label(cur_.text);
      bump();
      return o;
    }
    fail("expected block label");
  }

  Instruction parse_instruction() {
    Instruction ins;
    if (cur_.kind == Token::Kind::PctIdent) {
      ins.result = cur_.text;
      bump();
      expect_punct("=");
    }
    if (cur_.kind != Token::Kind::Ident) fail("expected opcode");
    auto op = opcode_from_name(cur_.text);
    if (!op) fail("unknown opcode '" + cur_.text + "'");
    ins.op = *op;
    bump();
    switch (ins.op) {
      case Opcode::Add:
      case Opcode::Sub:
      case Opcode::Mul:
      case Opcode::Udiv:
      case Opcode::And:
      case Opcode::Or:
      case Opcode::Xor:
      case Opcode::Shl:
      case Opcode::Lshr:
        ins.type = expect_type();
        ins.operands.push_back(parse_value_operand());
        expect_punct(",");
        ins.operands.push_back(parse_value_operand());
        break;
      case Opcode::Icmp: {
        std::string pn = expect_ident();
        auto p = pred_from_name(pn);
        if (!p) fail("unknown icmp predicate '" + pn + "'");
        ins.pred = *p;
        ins.type = expect_type();
        ins.operands.push_back(parse_any_value_or_ptr());
        expect_punct(",");
        ins.operands.push_back(parse_any_value_or_ptr());
        break;
      }
      case Opcode::Select:
        ins.operands.push_back(parse_value_operand());
        expect_punct(",");
        ins.type = expect_type();
        ins.operands.push_back(parse_any_value_or_ptr());
        expect_punct(",");
        ins.operands.push_back(parse_any_value_or_ptr());
        break;
      case Opcode::Trunc:
      case Opcode::Zext:
        ins.ty2 = expect_type();
        ins.operands.push_back(parse_value_operand());
        if (cur_.kind != Token::Kind::Ident || cur_.text != "to") fail("expected 'to'");
        bump();
        ins.type = expect_type();
        break;
      case Opcode::Ptradd:
        ins.type = Ty::Ptr;
        ins.operands.push_back(parse_ptr_operand());
        expect_punct(",");
        ins.operands.push_back(parse_value_operand());
        break;
      case Opcode::Load:
        ins.type = expect_type();
        expect_punct(",");
        ins.operands.push_back(parse_ptr_operand());
        break;
      case Opcode::Store:
        ins.type = expect_type();
        ins.operands.push_back(parse_value_operand());
        expect_punct(",");
        ins.operands.push_back(parse_ptr_operand());
        break;
      case Opcode::Br:
        ins.operands.push_back(parse_label_operand());
        break;
      case Opcode::Condbr:
        ins.operands.push_back(parse_value_operand());
        expect_punct(",");
        ins.operands.push_back(parse_label_operand());
        expect_punct(",");
        ins.operands.push_back(parse_label_operand());
        break;
      case Opcode::Ret:
        ins.operands.push_back(parse_value_operand());
        break;
      case Opcode::Mfence:
        break;
      case Opcode::Clflush:
        ins.operands.push_back(parse_ptr_operand());
        break;
      case Opcode::ReportError:
        ins.operands.push_back(Operand::constant(expect_number()));
        expect_punct(",");
        ins.type = expect_type();
        ins.operands.push_back(parse_any_value_or_ptr());
        expect_punct(",");
        ins.operands.push_back(parse_any_value_or_ptr());
        break;
    }
    if (cur_.kind == Token::Kind::Tag) {
      if (cur_.text == "v") ins.tag = OriginTag::Validation;
      else if (cur_.text == "c") ins.tag = OriginTag::Check;
      else if (cur_.text == "d") ins.tag = OriginTag::Diversity;
      else if (cur_.text == "r") ins.tag = OriginTag::Reporting;
      else fail("unknown instruction tag '!" + cur_.text + "'");
      bump();
    }
    return ins;
  }

  // icmp/select/report_error compare arbitrary values including pointers.
  Operand parse_any_value_or_ptr() {
    if (cur_.kind == Token::Kind::AtIdent) {
      Operand o = Operand::global(cur_.text);
      bump();
      return o;
    }
    return parse_value_operand();
  }

  Lexer lexer_;
  Token cur_;
};

}  // namespace

ParseResult parse_module(std::string_view text) {
  ParseResult r;
  IRModule m;
  try {
    Parser p(text);
    m = p.parse();
  } catch (const Parser::Error& e) {
    r.error = {e.line, e.col, e.message};
    return r;
  } catch (const Lexer::Error& e) {
    r.error = {e.line, e.col, e.message};
    return r;
  }
  auto violations = validate_module(m);
  if (!violations.empty()) {
    std::ostringstream os;
    os << "module does not validate: ";
    for (size_t i = 0; i < violations.size() && i < 3; ++i) {
      if (i) os << "; ";
      os << violations[i].str();
    }
    if (violations.size() > 3) os << "; (+" << violations.size() - 3 << " more)";
    r.error = {0, 0, os.str()};
    return r;
  }
  r.module = std::move(m);
  return r;
}

}  // namespace sirkit
