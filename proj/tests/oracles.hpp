#pragma once

// Independent re-derivations used by the unit and acceptance tests. They work on
// words of base transitions and exact rationals and avoid the library's search code.

#include "fdyn/cantor.hpp"
#include "fdyn/models.hpp"
#include "fdyn/py_scheme.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using fdyn::AffinePiece;
using fdyn::Horseshoe;
using fdyn::Rational;

inline const fdyn::Transition& letter(const Horseshoe& h, const std::string& label)
{
    for (const auto& t : h.transitions)
        if (t.label == label)
            return t;
    throw std::runtime_error("unknown letter " + label);
}

// Axis-aligned pieces compose coordinate by coordinate:
// x0 = a0 + a1 (a0' + a1' x2), y2 = b0' + b2' (b0 + b2 y0).
inline AffinePiece chain(const AffinePiece& f, const AffinePiece& g)
{
    return AffinePiece{f.a0 + f.a1 * g.a0, f.a1 * g.a1, 0, g.b0 + g.b2 * f.b0, 0, f.b2 * g.b2};
}

inline AffinePiece word_piece(const Horseshoe& h, const std::vector<std::string>& word)
{
    AffinePiece p = letter(h, word.front()).piece;
    for (std::size_t i = 1; i < word.size(); ++i)
        p = chain(p, letter(h, word[i]).piece);
    return p;
}

// All admissible affine words of length 1..n_max, in lexicographic DFS order.
inline std::vector<std::vector<std::string>> affine_words(const Horseshoe& h, int n_max)
{
    std::vector<std::vector<std::string>> out;
    std::vector<std::string> w;
    std::function<void(const std::string&)> grow = [&](const std::string& at) {
        if (static_cast<int>(w.size()) == n_max)
            return;
        for (const auto& t : h.transitions) {
            if (!at.empty() && t.from != at)
                continue;
            w.push_back(t.label);
            out.push_back(w);
            grow(t.to);
            w.pop_back();
        }
    };
    grow("");
    return out;
}

inline double lo_of(const Rational& c, const Rational& k)
{
    return fdyn::to_double(k < 0 ? c + k : c);
}

inline double hi_of(const Rational& c, const Rational& k)
{
    return fdyn::to_double(k > 0 ? c + k : c);
}

inline double gap_between(double a_lo, double a_hi, double b_lo, double b_hi)
{
    return std::max({0.0, b_lo - a_hi, a_lo - b_hi});
}

// Criticality of the axis-aligned strips of an affine word, straight from the
// geometry: the tongue tip sits at x = t + tip0 in the fold target and at
// y = (t + tip0) / b in the fold source.
struct Criticality {
    bool p = false;
    bool q = false;
};

inline Criticality criticality(const Horseshoe& h, const std::vector<std::string>& word, const fdyn::ParameterInterval& I,
                               double eta)
{
    Criticality c;
    if (!h.fold)
        return c;
    const auto& g = *h.fold;
    const AffinePiece p = word_piece(h, word);
    const double t_lo = fdyn::to_double(I.lo) + g.tip0, t_hi = fdyn::to_double(I.hi) + g.tip0;
    const std::string& src = letter(h, word.front()).from;
    const std::string& dst = letter(h, word.back()).to;
    if (src == g.to) {
        const double d = gap_between(lo_of(p.a0, p.a1), hi_of(p.a0, p.a1), t_lo, t_hi);
        c.p = d < std::pow(std::fabs(fdyn::to_double(p.a1)), 1.0 - eta);
    }
    if (dst == g.from) {
        const double d = gap_between(lo_of(p.b0, p.b2), hi_of(p.b0, p.b2), t_lo / g.b, t_hi / g.b);
        c.q = d < std::pow(std::fabs(fdyn::to_double(p.b2)), 1.0 - eta);
    }
    return c;
}

inline std::vector<std::string> split_word(const std::string& key)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : key) {
        if (ch == ' ') {
            if (!cur.empty())
                out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

inline bool is_fold_marker(const std::string& s)
{
    return s == "G-" || s == "G+";
}

// Catalog word keys by direct enumeration. Affine words are all admissible paths
// with max width >= w_min. A folded word X G Y is present when some suffix of X and
// prefix of Y form a transversal pair whose composition exists, and the full
// composite keeps the cone condition and the width floor.
inline std::set<std::string> catalog_words(const Horseshoe& h, const fdyn::ParameterInterval& I, double eta, int n_max,
                                           double w_min)
{
    std::set<std::string> out;
    const auto words = affine_words(h, n_max);
    for (const auto& w : words) {
        const AffinePiece p = word_piece(h, w);
        const double width = std::max(std::fabs(fdyn::to_double(p.a1)), std::fabs(fdyn::to_double(p.b2)));
        if (width >= w_min)
            out.insert(fdyn::word_key(w));
    }
    if (!h.fold)
        return out;
    fdyn::FoldingModel g = *h.fold;
    g.t = I.enclosure();
    const double len = fdyn::to_double_up(I.length());
    auto element = [&](const std::vector<std::string>& w) {
        const auto& first = letter(h, w.front());
        const auto& last = letter(h, w.back());
        return fdyn::make_affine_element(word_piece(h, w), first.from, last.to, static_cast<int>(w.size()), w, h.cone);
    };
    std::map<std::string, bool> pair_ok;
    auto core = [&](const std::vector<std::string>& x, const std::vector<std::string>& y) {
        const std::string key = fdyn::word_key(x) + "|" + fdyn::word_key(y);
        if (auto it = pair_ok.find(key); it != pair_ok.end())
            return it->second;
        bool ok = false;
        const auto f0 = element(x), f1 = element(y);
        if (std::max(fdyn::widths(f0).first, fdyn::widths(f0).second) >= w_min &&
            std::max(fdyn::widths(f1).first, fdyn::widths(f1).second) >= w_min &&
            fdyn::transversality_ok(f0, g, f1, len, eta)) {
            try {
                ok = fdyn::parabolic_compose(f0, g, f1, h.cone).possible;
            } catch (const fdyn::CompositionError&) {
            }
        }
        pair_ok[key] = ok;
        return ok;
    };
    for (const auto& x : words) {
        if (letter(h, x.back()).to != g.from)
            continue;
        for (const auto& y : words) {
            if (letter(h, y.front()).from != g.to)
                continue;
            if (static_cast<int>(x.size() + y.size()) + g.n0 > n_max)
                continue;
            bool ok = false;
            for (std::size_t i = 0; i < x.size() && !ok; ++i)
                for (std::size_t j = 1; j <= y.size() && !ok; ++j)
                    ok = core({x.begin() + static_cast<long>(i), x.end()}, {y.begin(), y.begin() + static_cast<long>(j)});
            if (!ok)
                continue;
            for (int sigma : {-1, 1}) {
                fdyn::AffineLikeElement e;
                e.P.rect = letter(h, x.front()).from;
                e.Q.rect = letter(h, y.back()).to;
                e.n = static_cast<int>(x.size() + y.size()) + g.n0;
                e.rep.form = fdyn::FoldComposite{word_piece(h, x), word_piece(h, y), g, sigma, false};
                fdyn::finish_element(e, h.cone);
                const auto [wp, wq] = fdyn::widths(e);
                if (!e.cone_ok || std::max(wp, wq) < w_min)
                    continue;
                std::vector<std::string> full = x;
                full.push_back(sigma < 0 ? "G-" : "G+");
                full.insert(full.end(), y.begin(), y.end());
                out.insert(fdyn::word_key(full));
            }
        }
    }
    return out;
}

// Re-verifies a Bad witness from its word alone: widths from the exact composed
// piece, bicriticality from the strip geometry, and the width floor |I|^beta.
// Only affine witnesses are supported; anything else reports false.
inline bool witness_holds(const Horseshoe& h, const fdyn::AffineLikeElement& e, const fdyn::ParameterInterval& I,
                          double beta, double eta)
{
    for (const auto& s : e.word)
        if (is_fold_marker(s))
            return false;
    const AffinePiece p = word_piece(h, e.word);
    const double width = std::max(std::fabs(fdyn::to_double(p.a1)), std::fabs(fdyn::to_double(p.b2)));
    const auto c = criticality(h, e.word, I, eta);
    return c.p && c.q && width >= std::pow(fdyn::to_double(I.length()), beta);
}

} // namespace oracle
