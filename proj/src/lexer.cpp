#include "sirsql/lexer.hpp"

#include <array>

#include "sirsql/error.hpp"
#include "sirsql/ident.hpp"

namespace sirsql {

namespace {

constexpr std::array kReserved = {
    "ALL",    "ALTER",  "AND",     "AS",    "ASC",   "BETWEEN", "BY",     "CREATE",
    "CROSS",  "DELETE", "DESC",    "DISTINCT", "DROP", "EXISTS", "FROM",  "FULL",
    "GROUP",  "HAVING", "IN",      "INNER", "INSERT", "INTO",   "IS",     "JOIN",
    "LEFT",   "LIKE",   "LIMIT",   "NOT",   "NULL",  "ON",      "OR",     "ORDER",
    "OUTER",  "RIGHT",  "SELECT",  "SET",   "TABLE", "TOP",     "UNION",  "UPDATE",
    "VALUES", "VIEW",   "WHERE",
};

bool is_word_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == '#' ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool is_word_char(char c) {
  return is_word_start(c) || (c >= '0' && c <= '9') || c == '$';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token t;
      t.line = line_;
      t.column = column_;
      t.offset = pos_;
      if (pos_ >= src_.size()) {
        t.kind = TokenKind::End;
        t.end = pos_;
        out.push_back(std::move(t));
        return out;
      }
      char c = src_[pos_];
      if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
        lex_number(t);
      } else if (is_word_start(c)) {
        t.kind = TokenKind::Word;
        while (pos_ < src_.size() && is_word_char(src_[pos_])) advance();
        t.text = std::string(src_.substr(t.offset, pos_ - t.offset));
      } else if (c == '\'') {
        t.kind = TokenKind::String;
        t.text = lex_quoted('\'', '\'', t);
      } else if (c == '"') {
        t.kind = TokenKind::QuotedIdent;
        t.text = lex_quoted('"', '"', t);
      } else if (c == '`') {
        t.kind = TokenKind::QuotedIdent;
        t.text = lex_quoted('`', '`', t);
      } else if (c == '[') {
        t.kind = TokenKind::QuotedIdent;
        t.text = lex_quoted('[', ']', t);
      } else {
        lex_symbol(t);
      }
      t.end = pos_;
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        int line = line_, col = column_;
        advance();
        advance();
        for (;;) {
          if (pos_ >= src_.size())
            throw SyntaxError(Errc::SyntaxError, "unterminated comment", line, col);
          if (src_[pos_] == '*' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
            advance();
            advance();
            break;
          }
          advance();
        }
      } else {
        return;
      }
    }
  }

  void lex_number(Token& t) {
    t.kind = TokenKind::Number;
    while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      int sl = line_, sc = column_;
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
      if (pos_ < src_.size() && is_digit(src_[pos_])) {
        while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
      } else {
        pos_ = save;
        line_ = sl;
        column_ = sc;
      }
    }
    t.text = std::string(src_.substr(t.offset, pos_ - t.offset));
  }

  std::string lex_quoted(char open, char close, const Token& t) {
    advance();  // opening quote
    std::string value;
    for (;;) {
      if (pos_ >= src_.size()) {
        throw SyntaxError(Errc::SyntaxError,
                          open == '\'' ? "unterminated string literal" : "unterminated identifier",
                          t.line, t.column);
      }
      char c = src_[pos_];
      if (c == close) {
        advance();
        if (open == close && pos_ < src_.size() && src_[pos_] == close) {
          value.push_back(close);
          advance();
          continue;
        }
        return value;
      }
      value.push_back(c);
      advance();
    }
  }

  void lex_symbol(Token& t) {
    t.kind = TokenKind::Symbol;
    static constexpr std::string_view two[] = {"<=", ">=", "<>", "!=", "||", "=="};
    for (auto s : two) {
      if (src_.substr(pos_, 2) == s) {
        advance();
        advance();
        t.text = std::string(s == "!=" ? "<>" : s == "==" ? "=" : s);
        return;
      }
    }
    char c = src_[pos_];
    static constexpr std::string_view singles = "(),;.*/+-=<>%";
    if (singles.find(c) == std::string_view::npos) {
      throw SyntaxError(Errc::SyntaxError, std::string("unexpected character '") + c + "'",
                        line_, column_);
    }
    advance();
    t.text = std::string(1, c);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

bool is_reserved_word(std::string_view word) noexcept {
  for (auto r : kReserved)
    if (iequals(word, r)) return true;
  return false;
}

}  // namespace sirsql
