#include "etm/symbolic.hpp"

#include <algorithm>
#include <cmath>

namespace etm {

TransitionMatrix build_transition(const SubdivisionRule& rule) {
    TransitionMatrix m;
    m.states = rule.tile_count();
    m.entries.assign(static_cast<size_t>(m.states) * m.states, 0);
    for (int x = 0; x < m.states; ++x)
        for (int y = 0; y < m.states; ++y)
            m.entries[static_cast<size_t>(x) * m.states + y] = rule.admissible(x, y);
    // Every 1-tile lies in exactly one 0-tile and each face has deg preimage
    // tiles, so columns are always deg-regular.
    for (int y = 0; y < m.states; ++y) {
        int col = 0;
        for (int x = 0; x < m.states; ++x) col += m.at(x, y);
        if (col != rule.degree)
            fail(ErrorKind::validation, "transition matrix column sum differs from the degree");
    }
    return m;
}

long TransitionMatrix::trace_power(int n) const {
    // Count closed walks by iterating rows; fine for the small alphabets here.
    std::vector<std::vector<long>> p(states, std::vector<long>(states, 0));
    for (int i = 0; i < states; ++i) p[i][i] = 1;
    for (int step = 0; step < n; ++step) {
        std::vector<std::vector<long>> q(states, std::vector<long>(states, 0));
        for (int i = 0; i < states; ++i)
            for (int k = 0; k < states; ++k) {
                if (!p[i][k]) continue;
                for (int j = 0; j < states; ++j)
                    if (at(k, j)) q[i][j] += p[i][k];
            }
        p = std::move(q);
    }
    long tr = 0;
    for (int i = 0; i < states; ++i) tr += p[i][i];
    return tr;
}

std::vector<Word> enumerate_words(const SubdivisionRule& rule, int n) {
    if (n < 1) fail(ErrorKind::contract, "word length must be positive");
    double count = 2.0 * std::pow(rule.degree, n);
    if (count > static_cast<double>(rule.tile_budget))
        fail(ErrorKind::resource, "word budget exceeded");
    std::vector<Word> out;
    Word w;
    auto rec = [&](auto&& self, int depth) -> void {
        if (depth == n) {
            out.push_back(w);
            return;
        }
        for (int a = 0; a < rule.tile_count(); ++a) {
            if (depth > 0 && !rule.admissible(w.back(), a)) continue;
            w.push_back(static_cast<uint8_t>(a));
            self(self, depth + 1);
            w.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

Word CylinderGraph::word(int i) const {
    auto it = words.begin() + static_cast<size_t>(i) * level;
    return Word(it, it + level);
}

int CylinderGraph::index_of(const Word& w) const {
    if (static_cast<int>(w.size()) != level)
        fail(ErrorKind::contract, "word length does not match graph level");
    int lo = 0, hi = node_count();
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        auto it = words.begin() + static_cast<size_t>(mid) * level;
        if (std::lexicographical_compare(it, it + level, w.begin(), w.end()))
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo == node_count()) return -1;
    auto it = words.begin() + static_cast<size_t>(lo) * level;
    return std::equal(it, it + level, w.begin()) ? lo : -1;
}

std::vector<int> CylinderGraph::successors(int node) const {
    Word w(words.begin() + static_cast<size_t>(node) * level + 1,
           words.begin() + static_cast<size_t>(node + 1) * level);
    w.push_back(0);
    std::vector<int> out;
    uint8_t last = symbol(node, level - 1);
    for (int a = 0; a < rule->tile_count(); ++a) {
        if (!rule->admissible(last, a)) continue;
        w.back() = static_cast<uint8_t>(a);
        int idx = index_of(w);
        if (idx < 0) fail(ErrorKind::contract, "admissible extension missing from graph");
        out.push_back(idx);
    }
    return out;
}

std::vector<int> CylinderGraph::predecessors(int node) const {
    Word w(1, 0);
    w.insert(w.end(), words.begin() + static_cast<size_t>(node) * level,
             words.begin() + static_cast<size_t>(node + 1) * level - 1);
    std::vector<int> out;
    uint8_t first = symbol(node, 0);
    for (int b = 0; b < rule->tile_count(); ++b) {
        if (!rule->admissible(b, first)) continue;
        w[0] = static_cast<uint8_t>(b);
        int idx = index_of(w);
        if (idx < 0) fail(ErrorKind::contract, "admissible predecessor missing from graph");
        out.push_back(idx);
    }
    return out;
}

CylinderGraph cylinder_graph(const std::shared_ptr<const SubdivisionRule>& rule, int n) {
    CylinderGraph g;
    g.rule = rule;
    g.level = n;
    for (const Word& w : enumerate_words(*rule, n))
        g.words.insert(g.words.end(), w.begin(), w.end());
    return g;
}

double theta_distance(const Word& a, const Word& b, double theta) {
    if (theta <= 0 || theta >= 1) fail(ErrorKind::contract, "theta must lie in (0,1)");
    size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i)
        if (a[i] != b[i]) return std::pow(theta, static_cast<double>(i));
    return 0.0;
}

int primitive_period(const Word& w) {
    int n = static_cast<int>(w.size());
    for (int p = 1; p <= n; ++p) {
        if (n % p) continue;
        bool ok = true;
        for (int i = p; i < n && ok; ++i) ok = w[i] == w[i - p];
        if (ok) return p;
    }
    return n;
}

Word min_rotation(const Word& w) {
    int n = static_cast<int>(w.size());
    Word best = w;
    Word cur = w;
    for (int r = 1; r < n; ++r) {
        std::rotate(cur.begin(), cur.begin() + 1, cur.end());
        if (std::lexicographical_compare(cur.begin(), cur.end(), best.begin(), best.end()))
            best = cur;
    }
    return best;
}

}  // namespace etm
