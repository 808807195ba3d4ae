#include "lexer.hpp"

#include <array>
#include <cctype>
#include <limits>

#include "metamorph/syntax.hpp"

namespace metamorph::detail {

namespace {

constexpr std::string_view kKeywords[] = {
    "abstract", "assert",     "boolean",  "break",     "byte",       "case",      "catch",
    "char",     "class",      "const",    "continue",  "default",    "do",        "double",
    "else",     "enum",       "extends",  "final",     "finally",    "float",     "for",
    "goto",     "if",         "implements", "import",  "instanceof", "int",       "interface",
    "long",     "native",     "new",      "package",   "private",    "protected", "public",
    "return",   "short",      "static",   "strictfp",  "super",      "switch",    "synchronized",
    "this",     "throw",      "throws",   "transient", "try",        "void",      "volatile",
    "while",    "true",       "false",
};

// Longest spellings first so the scan below is maximal munch.
constexpr std::string_view kPuncts[] = {
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=",
    "+=",   "-=",  "*=",  "/=",  "%=",  "&=", "|=", "^=", "<<", ">>", "(",  ")",  "{",  "}",  "[",
    "]",    ";",   ",",   ".",   "@",   "=",  ">",  "<",  "!",  "~",  "?",  ":",  "+",  "-",  "*",
    "/",    "&",   "|",  "^",  "%",
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            Token tok;
            tok.line = line_;
            tok.column = column_;
            tok.offset = pos_;
            if (pos_ >= src_.size()) {
                tok.kind = TokenKind::End;
                tok.end_offset = pos_;
                out.push_back(tok);
                return out;
            }
            char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
                lex_word(tok);
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '.' && pos_ + 1 < src_.size() &&
                        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                lex_number(tok);
            } else if (c == '"') {
                lex_string(tok);
            } else if (c == '\'') {
                lex_char(tok);
            } else {
                lex_punct(tok);
            }
            tok.end_offset = pos_;
            out.push_back(std::move(tok));
        }
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, column_, msg); }

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                advance();
                advance();
                for (;;) {
                    if (pos_ >= src_.size()) fail("unterminated block comment");
                    if (src_[pos_] == '*' && peek(1) == '/') {
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

    void lex_word(Token& tok) {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' || src_[pos_] == '$'))
            advance();
        tok.text = std::string(src_.substr(start, pos_ - start));
        if (tok.text.find('$') != std::string::npos) fail("'$' in identifiers is not supported");
        if (tok.text == "null") {
            tok.kind = TokenKind::Keyword;
        } else {
            tok.kind = is_keyword(tok.text) ? TokenKind::Keyword : TokenKind::Identifier;
        }
    }

    void lex_number(Token& tok) {
        std::size_t start = pos_;
        bool is_hex = peek() == '0' && (peek(1) == 'x' || peek(1) == 'X');
        bool is_double = false;
        if (is_hex) {
            advance();
            advance();
            while (std::isxdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
        } else {
            while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
            if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                is_double = true;
                advance();
                while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
            } else if (peek() == '.' && !std::isalpha(static_cast<unsigned char>(peek(1)))) {
                is_double = true;
                advance();
            }
            if (peek() == 'e' || peek() == 'E') {
                is_double = true;
                advance();
                if (peek() == '+' || peek() == '-') advance();
                if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("malformed exponent");
                while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
            }
            if (peek() == 'f' || peek() == 'F' || peek() == 'd' || peek() == 'D') {
                is_double = true;
                advance();
            }
        }
        std::string digits(src_.substr(start, pos_ - start));
        if (is_double) {
            tok.kind = TokenKind::Double;
            tok.text = digits;
            return;
        }
        bool is_long = false;
        if (peek() == 'l' || peek() == 'L') {
            is_long = true;
            advance();
        }
        if (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') fail("malformed number");
        std::string clean;
        for (char ch : digits.substr(is_hex ? 2 : 0))
            if (ch != '_') clean += ch;
        if (clean.empty()) fail("malformed number");
        if (!is_hex && clean.size() > 1 && clean[0] == '0') fail("octal literals are not supported");
        constexpr auto kMax = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
        const std::uint64_t base = is_hex ? 16 : 10;
        std::uint64_t value = 0;
        for (char ch : clean) {
            auto digit = static_cast<std::uint64_t>(
                std::isdigit(static_cast<unsigned char>(ch)) ? ch - '0'
                                                             : std::tolower(static_cast<unsigned char>(ch)) - 'a' + 10);
            if (value > (kMax - digit) / base) fail("integer literal out of range");
            value = value * base + digit;
        }
        tok.kind = is_long ? TokenKind::Long : TokenKind::Int;
        tok.number = value;
        tok.text = std::string(src_.substr(start, pos_ - start));
    }

    static void append_utf8(std::string& out, std::uint32_t cp) {
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }

    void lex_string(Token& tok) {
        advance();
        if (peek() == '"' && peek(1) == '"') fail("text blocks are not supported");
        std::string value;
        for (;;) {
            if (pos_ >= src_.size() || peek() == '\n') fail("unterminated string literal");
            char c = peek();
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                advance();
                char e = peek();
                switch (e) {
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    case 'r': value += '\r'; break;
                    case 'b': value += '\b'; break;
                    case 'f': value += '\f'; break;
                    case '0': value += '\0'; break;
                    case '"': value += '"'; break;
                    case '\'': value += '\''; break;
                    case '\\': value += '\\'; break;
                    case 'u': {
                        while (peek() == 'u') advance();
                        std::uint32_t cp = 0;
                        for (int i = 0; i < 4; ++i) {
                            char h = peek();
                            if (!std::isxdigit(static_cast<unsigned char>(h))) fail("malformed unicode escape");
                            cp = cp * 16 + static_cast<std::uint32_t>(
                                               std::isdigit(static_cast<unsigned char>(h))
                                                   ? h - '0'
                                                   : std::tolower(static_cast<unsigned char>(h)) - 'a' + 10);
                            advance();
                        }
                        append_utf8(value, cp);
                        continue;
                    }
                    default: fail("unsupported escape sequence");
                }
                advance();
                continue;
            }
            value += c;
            advance();
        }
        tok.kind = TokenKind::String;
        tok.text = std::move(value);
    }

    void lex_char(Token& tok) {
        advance();
        std::size_t start = pos_;
        for (;;) {
            if (pos_ >= src_.size() || peek() == '\n') fail("unterminated char literal");
            if (peek() == '\\') {
                advance();
                advance();
                continue;
            }
            if (peek() == '\'') break;
            advance();
        }
        tok.text = std::string(src_.substr(start, pos_ - start));
        advance();
        if (tok.text.empty()) fail("empty char literal");
        tok.kind = TokenKind::Char;
    }

    void lex_punct(Token& tok) {
        for (auto p : kPuncts) {
            if (src_.substr(pos_, p.size()) == p) {
                for (std::size_t i = 0; i < p.size(); ++i) advance();
                tok.kind = TokenKind::Punct;
                tok.text = std::string(p);
                return;
            }
        }
        fail(std::string("unexpected character '") + src_[pos_] + "'");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

}  // namespace

bool is_keyword(std::string_view word) {
    for (auto k : kKeywords)
        if (k == word) return true;
    return word == "null";
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace metamorph::detail
