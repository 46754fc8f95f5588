#include "shelf/text.hpp"

#include <array>
#include <cstdint>

namespace shelf {

namespace {

// ASCII folding for U+00C0..U+00FF. Empty entries act as separators.
constexpr std::array<const char*, 64> kLatin1Fold = {
    "a", "a", "a", "a", "a", "a", "ae", "c",   // C0-C7
    "e", "e", "e", "e", "i", "i", "i", "i",    // C8-CF
    "d", "n", "o", "o", "o", "o", "o", "",     // D0-D7 (D7 multiplication sign)
    "o", "u", "u", "u", "u", "y", "th", "ss",  // D8-DF
    "a", "a", "a", "a", "a", "a", "ae", "c",   // E0-E7
    "e", "e", "e", "e", "i", "i", "i", "i",    // E8-EF
    "d", "n", "o", "o", "o", "o", "o", "",     // F0-F7 (F7 division sign)
    "o", "u", "u", "u", "u", "y", "th", "y",   // F8-FF
};

struct FoldRange {
    char32_t first;
    char32_t last;
    const char* ascii;
};

// Latin Extended-A, U+0100..U+017F.
constexpr std::array<FoldRange, 23> kLatinExtAFold = {{
    {0x100, 0x105, "a"},  {0x106, 0x10D, "c"},  {0x10E, 0x111, "d"},  {0x112, 0x11B, "e"},
    {0x11C, 0x123, "g"},  {0x124, 0x127, "h"},  {0x128, 0x131, "i"},  {0x132, 0x133, "ij"},
    {0x134, 0x135, "j"},  {0x136, 0x138, "k"},  {0x139, 0x142, "l"},  {0x143, 0x149, "n"},
    {0x14A, 0x14B, "n"},  {0x14C, 0x151, "o"},  {0x152, 0x153, "oe"}, {0x154, 0x159, "r"},
    {0x15A, 0x161, "s"},  {0x162, 0x167, "t"},  {0x168, 0x173, "u"},  {0x174, 0x175, "w"},
    {0x176, 0x178, "y"},  {0x179, 0x17E, "z"},  {0x17F, 0x17F, "s"},
}};

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point starting at text[pos]; advances pos. Malformed
// sequences consume a single byte and yield kInvalid.
char32_t decode(std::string_view text, std::size_t& pos) {
    const auto lead = static_cast<unsigned char>(text[pos]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
        ++pos;
        return lead;
    } else if ((lead & 0xE0) == 0xC0) {
        len = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        len = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        len = 4;
        cp = lead & 0x07;
    } else {
        ++pos;
        return kInvalid;
    }
    if (pos + len > text.size()) {
        ++pos;
        return kInvalid;
    }
    for (std::size_t i = 1; i < len; ++i) {
        const auto byte = static_cast<unsigned char>(text[pos + i]);
        if ((byte & 0xC0) != 0x80) {
            ++pos;
            return kInvalid;
        }
        cp = (cp << 6) | (byte & 0x3F);
    }
    pos += len;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_separator(char32_t cp) {
    return cp == kInvalid || (cp >= 0x80 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7 ||
           (cp >= 0x2000 && cp <= 0x206F && cp != 0x2018 && cp != 0x2019) || cp == 0x3000 ||
           cp == 0xFEFF;
}

bool is_dropped(char32_t cp) {
    return cp == '\'' || cp == 0x2018 || cp == 0x2019 || (cp >= 0x300 && cp <= 0x36F);
}

}  // namespace

std::string normalize(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    auto emit = [&](std::string_view piece) {
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.append(piece);
    };

    std::size_t pos = 0;
    while (pos < text.size()) {
        const char32_t cp = decode(text, pos);
        if (is_dropped(cp)) continue;
        if (cp < 0x80) {
            const char c = static_cast<char>(cp);
            if (c >= 'A' && c <= 'Z') {
                const char lower = static_cast<char>(c - 'A' + 'a');
                emit(std::string_view(&lower, 1));
            } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
                emit(std::string_view(&c, 1));
            } else {
                pending_space = true;
            }
            continue;
        }
        if (is_separator(cp)) {
            pending_space = true;
            continue;
        }
        if (cp >= 0xC0 && cp <= 0xFF) {
            const char* folded = kLatin1Fold[cp - 0xC0];
            if (*folded == '\0') {
                pending_space = true;
            } else {
                emit(folded);
            }
            continue;
        }
        if (cp >= 0x100 && cp <= 0x17F) {
            for (const auto& range : kLatinExtAFold) {
                if (cp >= range.first && cp <= range.last) {
                    emit(range.ascii);
                    break;
                }
            }
            continue;
        }
        std::string encoded;
        append_utf8(encoded, cp);
        emit(encoded);
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view normalized) {
    std::vector<std::string> tokens;
    std::size_t start = 0;
    while (start < normalized.size()) {
        auto end = normalized.find(' ', start);
        if (end == std::string_view::npos) end = normalized.size();
        if (end > start) tokens.emplace_back(normalized.substr(start, end - start));
        start = end + 1;
    }
    return tokens;
}

std::vector<std::string> normalize_tokens(std::string_view text) { return tokenize(normalize(text)); }

std::size_t char_count(std::string_view text) {
    std::size_t n = 0;
    for (const char c : text) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    }
    return n;
}

std::string_view char_prefix(std::string_view text, std::size_t chars) {
    std::size_t seen = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
            if (seen == chars) return text.substr(0, i);
            ++seen;
        }
    }
    return text;
}

}  // namespace shelf
