// Tokenizer shared by the parser. Internal to the library.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace metamorph::detail {

enum class TokenKind { Identifier, Keyword, Int, Long, Double, Char, String, Punct, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;          // identifier/keyword/punct spelling, decoded string, char spelling
    std::uint64_t number = 0;  // Int and Long magnitude
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t offset = 0;
    std::size_t end_offset = 0;

    bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
    bool punct(std::string_view t) const { return is(TokenKind::Punct, t); }
    bool keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
};

/// Throws ParseError on malformed tokens. The returned stream always ends
/// with a single End token.
std::vector<Token> tokenize(std::string_view source);

bool is_keyword(std::string_view word);

}  // namespace metamorph::detail
