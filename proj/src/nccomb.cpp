#include "freeconv/nccomb.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace freeconv {

std::string Partition::to_string() const {
    std::ostringstream os;
    os << "{";
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (b > 0) os << ",";
        os << "{";
        for (std::size_t i = 0; i < blocks[b].size(); ++i) {
            if (i > 0) os << ",";
            os << blocks[b][i];
        }
        os << "}";
    }
    os << "}";
    return os.str();
}

namespace {

void canonicalize(Partition& pi) {
    for (auto& b : pi.blocks) std::sort(b.begin(), b.end());
    std::sort(pi.blocks.begin(), pi.blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

Partition from_rgs(const std::vector<int>& rgs) {
    Partition pi;
    pi.n = static_cast<int>(rgs.size());
    int nblocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
    pi.blocks.assign(nblocks, {});
    for (int i = 0; i < pi.n; ++i) pi.blocks[rgs[i]].push_back(i + 1);
    return pi;  // RGS order is already canonical
}

// Non-crossing partitions of the index list `ground` (ascending), by
// recursing on the block of the first element; non-crossing forces the
// remaining blocks to live inside single gaps of that block.
void nc_generate(const std::vector<int>& ground,
                 const std::function<void(std::vector<std::vector<int>>&&)>& emit) {
    if (ground.empty()) {
        emit({});
        return;
    }
    std::size_t n = ground.size();
    // Enumerate increasing subsets of ground[1..] joining ground[0].
    std::vector<std::size_t> legs;  // positions in `ground` of the first block, excluding 0
    std::function<void(std::size_t)> choose = [&](std::size_t next) {
        // Current first block: positions {0} + legs. Partition each gap
        // and the tail independently.
        std::vector<std::vector<int>> segments;
        std::size_t prev = 0;
        for (std::size_t leg : legs) {
            segments.emplace_back(ground.begin() + prev + 1, ground.begin() + leg);
            prev = leg;
        }
        segments.emplace_back(ground.begin() + prev + 1, ground.end());

        std::vector<int> first_block{ground[0]};
        for (std::size_t leg : legs) first_block.push_back(ground[leg]);

        // Cartesian product of the segments' NC partitions.
        std::vector<std::vector<std::vector<int>>> per_segment(segments.size());
        std::function<void(std::size_t, std::vector<std::vector<int>>&)> combine =
            [&](std::size_t seg, std::vector<std::vector<int>>& acc) {
                if (seg == segments.size()) {
                    std::vector<std::vector<int>> blocks;
                    blocks.push_back(first_block);
                    blocks.insert(blocks.end(), acc.begin(), acc.end());
                    emit(std::move(blocks));
                    return;
                }
                nc_generate(segments[seg], [&](std::vector<std::vector<int>>&& sub) {
                    std::size_t mark = acc.size();
                    for (auto& b : sub) acc.push_back(std::move(b));
                    combine(seg + 1, acc);
                    acc.resize(mark);
                });
            };
        std::vector<std::vector<int>> acc;
        combine(0, acc);

        for (std::size_t leg = next; leg < n; ++leg) {
            legs.push_back(leg);
            choose(leg + 1);
            legs.pop_back();
        }
    };
    choose(1);
}

}  // namespace

std::vector<Partition> enumerate_partitions(int n) {
    if (n < 1 || n > 12) throw std::invalid_argument("enumerate_partitions: n must be in [1,12]");
    std::vector<Partition> out;
    std::vector<int> rgs(static_cast<std::size_t>(n), 0);
    // Restricted growth: rgs[0]=0, rgs[i] <= 1 + max(rgs[0..i-1]).
    std::function<void(int, int)> rec = [&](int i, int maxv) {
        if (i == n) {
            out.push_back(from_rgs(rgs));
            return;
        }
        for (int v = 0; v <= maxv + 1; ++v) {
            rgs[static_cast<std::size_t>(i)] = v;
            rec(i + 1, std::max(maxv, v));
        }
    };
    rec(1, 0);
    return out;
}

bool is_noncrossing(const Partition& pi) {
    std::vector<int> block_of(static_cast<std::size_t>(pi.n) + 1, -1);
    for (std::size_t b = 0; b < pi.blocks.size(); ++b)
        for (int i : pi.blocks[b]) block_of[static_cast<std::size_t>(i)] = static_cast<int>(b);
    // Stack scan: a crossing exists iff some block must close while a
    // later-opened block is still open beneath it.
    std::vector<int> last(pi.blocks.size());
    for (std::size_t b = 0; b < pi.blocks.size(); ++b) last[b] = pi.blocks[b].back();
    std::vector<int> stack;
    for (int i = 1; i <= pi.n; ++i) {
        int b = block_of[static_cast<std::size_t>(i)];
        if (stack.empty() || stack.back() != b) {
            if (std::find(stack.begin(), stack.end(), b) != stack.end()) return false;
            if (pi.blocks[static_cast<std::size_t>(b)].front() != i) return false;
            stack.push_back(b);
        }
        if (last[static_cast<std::size_t>(b)] == i) {
            if (stack.back() != b) return false;
            stack.pop_back();
        }
    }
    return true;
}

std::vector<Partition> enumerate_nc(int n) {
    if (n < 1 || n > 14) throw std::invalid_argument("enumerate_nc: n must be in [1,14]");
    std::vector<Partition> out;
    if (n < 10) {
        // Brute-force path doubles as the oracle for the generator below.
        for (auto& pi : enumerate_partitions(n))
            if (is_noncrossing(pi)) out.push_back(std::move(pi));
        return out;
    }
    std::vector<int> ground(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ground[static_cast<std::size_t>(i)] = i + 1;
    nc_generate(ground, [&](std::vector<std::vector<int>>&& blocks) {
        Partition pi;
        pi.n = n;
        pi.blocks = std::move(blocks);
        canonicalize(pi);
        out.push_back(std::move(pi));
    });
    std::sort(out.begin(), out.end(), [](const Partition& a, const Partition& b) {
        return a.blocks < b.blocks;
    });
    return out;
}

long long catalan_number(int n) {
    // C_n = sum_k C_k C_{n-1-k}
    std::vector<long long> c(static_cast<std::size_t>(n) + 1, 0);
    c[0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int k = 0; k < i; ++k)
            c[static_cast<std::size_t>(i)] +=
                c[static_cast<std::size_t>(k)] * c[static_cast<std::size_t>(i - 1 - k)];
    return c[static_cast<std::size_t>(n)];
}

namespace {

Complex partition_product(const Partition& pi, const CumulantSequence& kappa) {
    Complex prod{1.0};
    for (const auto& b : pi.blocks) prod *= kappa[b.size() - 1];
    return prod;
}

}  // namespace

CumulantSequence moments_to_free_cumulants(const MomentSequence& m) {
    int n = static_cast<int>(m.size());
    if (n > 14) throw std::invalid_argument("moments_to_free_cumulants: n must be <= 14");
    CumulantSequence kappa(m.size());
    for (int k = 1; k <= n; ++k) {
        Complex lower{0.0};
        for (const auto& pi : enumerate_nc(k))
            if (pi.blocks.size() > 1) lower += partition_product(pi, kappa);
        kappa[static_cast<std::size_t>(k - 1)] = m[static_cast<std::size_t>(k - 1)] - lower;
    }
    return kappa;
}

MomentSequence free_cumulants_to_moments(const CumulantSequence& kappa) {
    int n = static_cast<int>(kappa.size());
    if (n > 30) throw std::invalid_argument("free_cumulants_to_moments: n must be <= 30");
    // m_n = sum_{s=1}^{n} kappa_s sum_{i_1+...+i_s = n-s, i_j >= 0} m_{i_1}...m_{i_s}
    // with m_0 = 1; inner sums are convolution powers of the m-prefix.
    std::vector<Complex> m0(static_cast<std::size_t>(n) + 1);  // m0[k] = m_k, m0[0] = 1
    m0[0] = Complex{1.0};
    for (int k = 1; k <= n; ++k) {
        Complex acc{0.0};
        for (int s = 1; s <= k; ++s) {
            // sum over compositions of k-s into s nonnegative parts
            int rest = k - s;
            std::vector<Complex> conv(static_cast<std::size_t>(rest) + 1, Complex{0.0});
            conv[0] = Complex{1.0};
            for (int j = 0; j < s; ++j) {
                std::vector<Complex> next(static_cast<std::size_t>(rest) + 1, Complex{0.0});
                for (int a = 0; a <= rest; ++a)
                    for (int b = 0; a + b <= rest; ++b)
                        next[static_cast<std::size_t>(a + b)] +=
                            conv[static_cast<std::size_t>(a)] * m0[static_cast<std::size_t>(b)];
                conv = std::move(next);
            }
            acc += kappa[static_cast<std::size_t>(s - 1)] * conv[static_cast<std::size_t>(rest)];
        }
        m0[static_cast<std::size_t>(k)] = acc;
    }
    return MomentSequence(m0.begin() + 1, m0.end());
}

CumulantSequence moments_to_classical_cumulants(const MomentSequence& m) {
    int n = static_cast<int>(m.size());
    if (n > 12) throw std::invalid_argument("moments_to_classical_cumulants: n must be <= 12");
    CumulantSequence c(m.size());
    for (int k = 1; k <= n; ++k) {
        Complex lower{0.0};
        for (const auto& pi : enumerate_partitions(k))
            if (pi.blocks.size() > 1) lower += partition_product(pi, c);
        c[static_cast<std::size_t>(k - 1)] = m[static_cast<std::size_t>(k - 1)] - lower;
    }
    return c;
}

MomentSequence classical_cumulants_to_moments(const CumulantSequence& c) {
    int n = static_cast<int>(c.size());
    if (n > 12) throw std::invalid_argument("classical_cumulants_to_moments: n must be <= 12");
    MomentSequence m(c.size());
    for (int k = 1; k <= n; ++k) {
        Complex acc{0.0};
        for (const auto& pi : enumerate_partitions(k)) acc += partition_product(pi, c);
        m[static_cast<std::size_t>(k - 1)] = acc;
    }
    return m;
}

Complex free_mixed_moment(const Word& word, const std::map<int, MomentSequence>& moments) {
    int n = static_cast<int>(word.size());
    if (n == 0) return Complex{1.0};
    if (n > 12) throw std::invalid_argument("free_mixed_moment: word length must be <= 12");
    // Per-variable free cumulants up to the word length.
    std::map<int, CumulantSequence> kappa;
    for (int v : word) {
        if (kappa.count(v)) continue;
        auto it = moments.find(v);
        if (it == moments.end() || static_cast<int>(it->second.size()) < n)
            throw std::invalid_argument("free_mixed_moment: missing moments for a variable");
        kappa[v] = moments_to_free_cumulants(
            MomentSequence(it->second.begin(), it->second.begin() + n));
    }
    // Vanishing of mixed cumulants: only partitions whose blocks stay
    // within one letter contribute.
    Complex sum{0.0};
    for (const auto& pi : enumerate_nc(n)) {
        Complex prod{1.0};
        bool ok = true;
        for (const auto& b : pi.blocks) {
            int v = word[static_cast<std::size_t>(b.front() - 1)];
            for (int i : b)
                if (word[static_cast<std::size_t>(i - 1)] != v) {
                    ok = false;
                    break;
                }
            if (!ok) break;
            prod *= kappa[v][b.size() - 1];
        }
        if (ok) sum += prod;
    }
    return sum;
}

namespace {

long long pairing_count(const Word& w, int lo, int hi,
                        std::map<std::pair<int, int>, long long>& memo) {
    if (lo >= hi) return 1;  // empty interval
    if ((hi - lo) % 2 != 0) return 0;
    auto key = std::make_pair(lo, hi);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    long long count = 0;
    // Pair position lo with a matching letter; non-crossing splits the
    // interval into an inside and an outside part.
    for (int j = lo + 1; j < hi; ++j) {
        if (w[static_cast<std::size_t>(j)] != w[static_cast<std::size_t>(lo)]) continue;
        count += pairing_count(w, lo + 1, j, memo) * pairing_count(w, j + 1, hi, memo);
    }
    memo[key] = count;
    return count;
}

}  // namespace

long long gaussian_pairing_count(const Word& word) {
    if (word.size() % 2 != 0) return 0;
    if (word.size() > 24) throw std::invalid_argument("gaussian_pairing_count: word too long");
    std::map<std::pair<int, int>, long long> memo;
    return pairing_count(word, 0, static_cast<int>(word.size()), memo);
}

NestingTree nesting_tree(const Partition& pi) {
    if (!is_noncrossing(pi)) throw std::invalid_argument("nesting_tree: partition is crossing");
    std::vector<int> block_of(static_cast<std::size_t>(pi.n) + 1, -1);
    for (std::size_t b = 0; b < pi.blocks.size(); ++b)
        for (int i : pi.blocks[b]) block_of[static_cast<std::size_t>(i)] = static_cast<int>(b);

    NestingTree tree;
    tree.nodes.resize(pi.blocks.size());
    for (std::size_t b = 0; b < pi.blocks.size(); ++b) tree.nodes[b].block = pi.blocks[b];

    std::vector<int> stack;  // open blocks, outermost first
    std::vector<bool> opened(pi.blocks.size(), false);
    for (int i = 1; i <= pi.n; ++i) {
        int b = block_of[static_cast<std::size_t>(i)];
        if (!opened[static_cast<std::size_t>(b)]) {
            opened[static_cast<std::size_t>(b)] = true;
            if (stack.empty())
                tree.roots.push_back(b);
            else
                tree.nodes[static_cast<std::size_t>(stack.back())].children.push_back(b);
            stack.push_back(b);
        }
        if (pi.blocks[static_cast<std::size_t>(b)].back() == i) stack.pop_back();
    }
    return tree;
}

Partition NestingTree::flatten(int n) const {
    Partition pi;
    pi.n = n;
    for (const auto& node : nodes) pi.blocks.push_back(node.block);
    std::sort(pi.blocks.begin(), pi.blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return pi;
}

}  // namespace freeconv
