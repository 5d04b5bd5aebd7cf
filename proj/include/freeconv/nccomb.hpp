#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "freeconv/ncpoly.hpp"

namespace freeconv {

/// Set partition of {1..n}; blocks are sorted and ordered by minimum.
struct Partition {
    int n = 0;
    std::vector<std::vector<int>> blocks;

    bool operator==(const Partition& rhs) const = default;
    std::string to_string() const;  // {{1,10},{2,5,9},...}
};

/// One-indexed finite prefix m_1..m_n of a moment sequence.
using MomentSequence = std::vector<Complex>;
/// One-indexed finite prefix kappa_1..kappa_n of a cumulant sequence.
using CumulantSequence = std::vector<Complex>;

/// Forest over the blocks of a non-crossing partition; children are
/// blocks lying strictly between two consecutive legs of the parent.
struct NestingTree {
    struct Node {
        std::vector<int> block;
        std::vector<int> children;  // indices into nodes
    };
    std::vector<Node> nodes;
    std::vector<int> roots;

    Partition flatten(int n) const;
};

/// All of P(n) in canonical order. 1 <= n <= 12.
std::vector<Partition> enumerate_partitions(int n);

/// True iff no p1 < q1 < p2 < q2 with p1,p2 and q1,q2 in distinct blocks.
bool is_noncrossing(const Partition& pi);

/// All of NC(n) in canonical order. 1 <= n <= 14.
std::vector<Partition> enumerate_nc(int n);

long long catalan_number(int n);

/// Solves m_k = sum over NC(k) of products of block cumulants, by
/// peeling the full-block term.
CumulantSequence moments_to_free_cumulants(const MomentSequence& m);

/// Recursive inverse, m_n = sum_s kappa_s sum m_{i_1}...m_{i_s};
/// polynomial cost, no partition enumeration.
MomentSequence free_cumulants_to_moments(const CumulantSequence& kappa);

/// Classical analogue over all of P(k).
CumulantSequence moments_to_classical_cumulants(const MomentSequence& m);
MomentSequence classical_cumulants_to_moments(const CumulantSequence& c);

/// Mixed moment of a word in free variables: sum over non-crossing
/// partitions whose blocks are single-variable, of block cumulant
/// products.
Complex free_mixed_moment(const Word& word, const std::map<int, MomentSequence>& moments);

/// Non-crossing pairings of the word matching only equal letters.
long long gaussian_pairing_count(const Word& word);

/// Requires is_noncrossing(pi).
NestingTree nesting_tree(const Partition& pi);

}  // namespace freeconv
