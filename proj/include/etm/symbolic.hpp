#pragma once

#include <memory>
#include <vector>

#include "etm/rule.hpp"

namespace etm {

/// 0/1 matrix A(X, X') = 1 iff f(X) contains X'. Columns always sum to deg f;
/// rows sum to the number of 1-tiles in the face X maps onto (which equals
/// deg f only when both faces hold the same number of tiles).
struct TransitionMatrix {
    int states = 0;
    std::vector<uint8_t> entries;  // states x states, row-major

    bool at(int x, int y) const { return entries[static_cast<size_t>(x) * states + y] != 0; }
    long trace_power(int n) const;  // trace of A^n = closed walks of length n
};

TransitionMatrix build_transition(const SubdivisionRule& rule);

/// All admissible words of length n, lexicographic. Indices agree with the
/// tile ids of refine(rule, n).
std::vector<Word> enumerate_words(const SubdivisionRule& rule, int n);

/// The shift graph on n-cylinders: node = admissible word w, arcs
/// w -> shift(w)·a for every admissible extension a.
struct CylinderGraph {
    std::shared_ptr<const SubdivisionRule> rule;
    int level = 0;
    std::vector<uint8_t> words;  // flattened, level bytes per node, sorted

    int node_count() const { return level ? static_cast<int>(words.size()) / level : 0; }
    Word word(int i) const;
    int index_of(const Word& w) const;  // -1 if not present
    uint8_t symbol(int node, int pos) const {
        return words[static_cast<size_t>(node) * level + pos];
    }
    std::vector<int> successors(int node) const;
    std::vector<int> predecessors(int node) const;
};

CylinderGraph cylinder_graph(const std::shared_ptr<const SubdivisionRule>& rule, int n);

/// theta^N where N is the first index at which the words disagree; 0 if they
/// agree on the full compared length.
double theta_distance(const Word& a, const Word& b, double theta);

/// Smallest p with w = rotation of itself by p (the primitive period).
int primitive_period(const Word& w);
/// Lexicographically least rotation (canonical form of a cycle word).
Word min_rotation(const Word& w);

}  // namespace etm
