#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "module.hpp"

namespace abmod {

namespace detail {

/// Cursor over a coefficient or series string. Errors carry the
/// 1-based column so a bad character in a long matrix entry is findable.
struct Scanner {
    std::string_view s;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what + " at column " + std::to_string(pos + 1));
    }
    bool done() const { return pos >= s.size(); }
    char peek() const { return pos < s.size() ? s[pos] : '\0'; }
    void skip_ws() {
        while (!done() && s[pos] == ' ') ++pos;
    }
    bool eat(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    std::string digits() {
        std::size_t start = pos;
        while (!done() && s[pos] >= '0' && s[pos] <= '9') ++pos;
        if (pos == start) fail("expected digits");
        return std::string(s.substr(start, pos - start));
    }

    Rational unsigned_rational() {
        Integer num(digits());
        if (!eat('/')) return Rational(num);
        std::size_t at = pos;
        Integer den(digits());
        if (den == 0) {
            pos = at;
            fail("zero denominator");
        }
        return make_rational(num, den);
    }

    std::size_t exponent() {
        std::string d = digits();
        std::size_t k = 0;
        auto r = std::from_chars(d.data(), d.data() + d.size(), k);
        if (r.ec != std::errc()) fail("exponent out of range");
        return k;
    }

    /// One coefficient. The canonical forms are "0", "-3", "1/2", "i",
    /// "-3/4i" and "(1/2+3/4i)": a sum of real and imaginary part is only
    /// read bare when allow_bare_sum holds, since inside a series string
    /// "1+2i*b^0" must stay two tokens apart from "(1+2i)*b^0".
    G coeff(bool allow_bare_sum) {
        if (eat('(')) {
            G z = coeff(true);
            expect(')');
            return z;
        }
        bool neg = eat('-');
        if (eat('i')) return G(Rational(0), Rational(neg ? -1 : 1));
        Rational r = unsigned_rational();
        if (eat('i')) return G(Rational(0), neg ? Rational(-r) : r);
        Rational re = neg ? Rational(-r) : r;
        if (allow_bare_sum && (peek() == '+' || peek() == '-')) {
            bool ineg = s[pos] == '-';
            ++pos;
            Rational iv(1);
            if (peek() != 'i') iv = unsigned_rational();
            expect('i');
            return G(re, ineg ? Rational(-iv) : iv);
        }
        return G(re);
    }
};

}  // namespace detail

/// Canonical coefficient text, the exact syntax parse_coeff reads back.
inline std::string format_coeff(const G& z) { return to_string(z); }

inline G parse_coeff(const std::string& text) {
    detail::Scanner sc{text};
    sc.skip_ws();
    G z = sc.coeff(true);
    sc.skip_ws();
    if (!sc.done()) sc.fail("trailing characters");
    return z;
}

/// Canonical series text: nonzero terms "coeff*b^k" in increasing k,
/// joined by " + ", or "0" when every coefficient vanishes. The known
/// order is not part of the text; module files carry it separately.
inline std::string format_series(const Series& s) {
    std::string out;
    for (std::size_t k = 0; k < s.known_order(); ++k) {
        if (s[k].is_zero()) continue;
        if (!out.empty()) out += " + ";
        out += to_string(s[k]) + "*b^" + std::to_string(k);
    }
    return out.empty() ? "0" : out;
}

/// Read a series known mod b^order. The text is a sum of terms
/// "coeff*b^k" with k < order; repeated k add up; a bare "0" is the zero
/// series.
inline Series parse_series(const std::string& text, std::size_t order) {
    if (order == 0) throw BadParameter("series needs a positive order");
    detail::Scanner sc{text};
    Series out(order);
    sc.skip_ws();
    if (sc.done()) sc.fail("empty series");
    for (;;) {
        G c = sc.coeff(false);
        sc.skip_ws();
        if (sc.eat('*')) {
            sc.expect('b');
            sc.expect('^');
            std::size_t k = sc.exponent();
            if (k >= order)
                sc.fail("term b^" + std::to_string(k) + " outside precision " +
                        std::to_string(order));
            out.set(k, out[k] + c);
        } else if (!c.is_zero()) {
            sc.fail("expected '*b^k' after coefficient");
        }
        sc.skip_ws();
        if (sc.done()) break;
        sc.expect('+');
        sc.skip_ws();
    }
    return out;
}

namespace detail {

using Json = nlohmann::ordered_json;

inline const Json& json_field(const Json& j, const std::string& name) {
    auto it = j.find(name);
    if (it == j.end()) throw ParseError("missing field '" + name + "'");
    return *it;
}

inline std::size_t uint_field(const Json& j, const std::string& name) {
    const Json& v = json_field(j, name);
    if (!v.is_number_unsigned())
        throw ParseError("field '" + name + "' must be a nonnegative integer");
    return v.get<std::size_t>();
}

inline std::string string_field(const Json& j, const std::string& name) {
    const Json& v = json_field(j, name);
    if (!v.is_string()) throw ParseError("field '" + name + "' must be a string");
    return v.get<std::string>();
}

inline G coeff_field(const Json& j, const std::string& name) {
    try {
        return parse_coeff(string_field(j, name));
    } catch (const ParseError& ex) {
        throw ParseError("field '" + name + "': " + ex.what());
    }
}

inline void reject_unknown(const Json& j, const std::set<std::string>& allowed) {
    for (const auto& item : j.items())
        if (!allowed.count(item.key())) throw ParseError("unknown field '" + item.key() + "'");
}

inline std::size_t precision_field(const Json& j, std::size_t rank) {
    if (!j.contains("precision")) return 2 * rank + 6;
    std::size_t n = uint_field(j, "precision");
    if (n == 0) throw ParseError("precision must be positive");
    return n;
}

using Precision = std::optional<std::size_t>;

/// Working precision of a form whose stated rank is known: an explicit
/// request wins for constructor forms, the file value is next, and the
/// fallback is 2*rank + 6. Matrix forms cannot be extended past the
/// coefficients the file carries.
inline std::size_t pick_precision(const Json& j, std::size_t rank, Precision want,
                                  bool extendable) {
    std::size_t file = precision_field(j, rank);
    if (!want) return file;
    if (*want == 0) throw BadParameter("precision must be positive");
    if (*want > file && !extendable)
        throw InsufficientPrecision("matrix form file carries fewer coefficients", file, *want);
    return *want;
}

inline AbModule parse_matrix_form(const Json& j, Precision want) {
    reject_unknown(j, {"rank", "precision", "matrix"});
    std::size_t p = uint_field(j, "rank");
    if (p == 0) throw ParseError("rank must be positive");
    std::size_t n = precision_field(j, p);
    std::size_t use = pick_precision(j, p, want, false);
    const Json& rows = json_field(j, "matrix");
    if (!rows.is_array() || rows.size() != p)
        throw ParseError("matrix must be an array of " + std::to_string(p) + " rows");
    SMat m(p, p, use);
    for (std::size_t r = 0; r < p; ++r) {
        const Json& row = rows[r];
        if (!row.is_array() || row.size() != p)
            throw ParseError("matrix row " + std::to_string(r) + " must have " +
                             std::to_string(p) + " entries");
        for (std::size_t c = 0; c < p; ++c) {
            if (!row[c].is_string())
                throw ParseError("matrix entry must be a series string");
            try {
                m.set(r, c, parse_series(row[c].get<std::string>(), n).truncated(use));
            } catch (const ParseError& ex) {
                throw ParseError("matrix[" + std::to_string(r) + "][" + std::to_string(c) +
                                 "]: " + ex.what());
            }
        }
    }
    return AbModule(m);
}

inline AbModule parse_construct_form(const Json& j, Precision want) {
    std::string name = string_field(j, "construct");
    auto with = [&](std::set<std::string> params) {
        params.insert("construct");
        params.insert("precision");
        reject_unknown(j, params);
    };
    auto prec = [&](std::size_t rank) { return pick_precision(j, rank, want, true); };
    if (name == "E") {
        with({"lambda"});
        return make_rank1(coeff_field(j, "lambda"), prec(1));
    }
    if (name == "Elog") {
        with({"lambda", "n"});
        return make_log(coeff_field(j, "lambda"), uint_field(j, "n"), prec(2));
    }
    if (name == "Epair") {
        with({"lambda", "mu"});
        return make_pair(coeff_field(j, "lambda"), coeff_field(j, "mu"), prec(2));
    }
    if (name == "Ealpha") {
        with({"lambda", "n", "alpha"});
        return make_alpha(coeff_field(j, "lambda"), uint_field(j, "n"),
                          coeff_field(j, "alpha"), prec(2));
    }
    if (name == "J") {
        with({"k", "lambda"});
        std::size_t k = uint_field(j, "k");
        if (k == 0) throw ParseError("rank must be positive");
        return make_jordan(k, coeff_field(j, "lambda"), prec(k));
    }
    if (name == "F") {
        with({"k", "lambda", "rho"});
        std::size_t k = uint_field(j, "k");
        if (k == 0) throw ParseError("rank must be positive");
        return make_final(k, coeff_field(j, "lambda"), coeff_field(j, "rho"), prec(k));
    }
    if (name == "Rank3Example") {
        with({});
        return make_rank3_example(prec(3));
    }
    throw ParseError("unknown construct '" + name + "'");
}

}  // namespace detail

/// Canonical module file: always the explicit matrix form, fields in the
/// order rank, precision, matrix, two-space indent, trailing newline.
/// Reparsing the output and formatting again is the identity.
inline std::string format_module(const AbModule& e) {
    detail::Json j;
    j["rank"] = e.rank();
    j["precision"] = e.order();
    detail::Json rows = detail::Json::array();
    for (std::size_t r = 0; r < e.rank(); ++r) {
        detail::Json row = detail::Json::array();
        for (std::size_t c = 0; c < e.rank(); ++c) row.push_back(format_series(e.matrix()(r, c)));
        rows.push_back(row);
    }
    j["matrix"] = rows;
    return j.dump(2) + "\n";
}

/// Read a module from JSON text: either the matrix form
/// {"rank", "precision", "matrix"} or a constructor form
/// {"construct", ...params, "precision"} over the model families
/// E, Elog, Epair, Ealpha, J, F and Rank3Example. Scalar parameters are
/// coefficient strings; precision defaults to 2*rank + 6 when absent;
/// unknown fields are rejected. A precision request overrides the file
/// value; matrix forms can only be lowered, constructor forms rebuild at
/// any precision.
inline AbModule parse_module(const std::string& text,
                             std::optional<std::size_t> precision = std::nullopt) {
    detail::Json j;
    try {
        j = detail::Json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw ParseError(ex.what());
    }
    if (!j.is_object()) throw ParseError("module file must be a JSON object");
    if (j.contains("construct")) {
        if (j.contains("matrix")) throw ParseError("file mixes matrix and construct forms");
        return detail::parse_construct_form(j, precision);
    }
    if (j.contains("matrix")) return detail::parse_matrix_form(j, precision);
    throw ParseError("module file needs a 'matrix' or a 'construct' field");
}

inline AbModule load_module(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_module(buf.str());
    } catch (const ParseError& ex) {
        throw ParseError(path + ": " + ex.what());
    }
}

inline void save_module(const AbModule& e, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << format_module(e);
    if (!out) throw Error("cannot write file: " + path);
}

}  // namespace abmod
