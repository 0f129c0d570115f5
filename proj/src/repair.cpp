#include "hrdc/repair.hpp"

#include <absl/container/btree_set.h>
#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <cassert>
#include <limits>

#include "hrdc/error.hpp"

namespace hrdc {

namespace {

using u32 = std::uint32_t;
using u64 = std::uint64_t;

constexpr u32 kNil = std::numeric_limits<u32>::max();
constexpr u32 kUncounted = kNil - 1;
constexpr u32 kHole = kNil;

u64 pair_key(u32 l, u32 r) { return (u64{l} << 32) | r; }

struct PairRec {
    u32 count = 0;
    u32 head = kNil;
};

struct Rank {
    u32 count;
    u32 left;
    u32 right;
};

struct RankOrder {
    bool operator()(const Rank& a, const Rank& b) const {
        if (a.count != b.count) return a.count > b.count;
        if (a.left != b.left) return a.left < b.left;
        return a.right < b.right;
    }
};

// Position i stands for the pair (sym[i], sym[nxt[i]]). Counted positions are
// threaded on their pair's occurrence list; inside a run x x x ... only every
// other position is counted, so counts are non-overlapping.
class Engine {
public:
    Engine(std::vector<u32> symbols, const RePairOptions& o)
        : opt_(o), sym_(std::move(symbols)), n_(sym_.size()), m_(sym_.size()) {
        require(n_ < kUncounted, ErrorCode::InvalidArgument, "sequence too long for Re-Pair");
        nxt_.resize(n_);
        prv_.resize(n_);
        occ_next_.assign(n_, kNil);
        occ_prev_.assign(n_, kUncounted);
        for (u32 i = 0; i < n_; ++i) {
            nxt_[i] = i + 1 < n_ ? i + 1 : kNil;
            prv_[i] = i > 0 ? i - 1 : kNil;
        }
        for (u32 i = 0; i + 1 < n_; ++i) {
            if (!pairable(sym_[i]) || !pairable(sym_[i + 1])) continue;
            if (i > 0 && sym_[i - 1] == sym_[i] && sym_[i] == sym_[i + 1] && counted(i - 1)) continue;
            add(i);
        }
    }

    RePairResult run() {
        RePairResult res;
        res.original_length = n_;
        double prev_ratio = n_ == 0 ? 0.0 : 100.0;
        u32 next_id = opt_.first_rule;
        while (!ranks_.empty()) {
            const Rank top = *ranks_.begin();
            require(next_id != kHole, ErrorCode::InvalidArgument, "rule id space exhausted");
            replace(top.left, top.right, next_id++);
            res.lefts.push_back(top.left);
            res.rights.push_back(top.right);
            const double ratio = 100.0 * static_cast<double>(m_) / static_cast<double>(n_);
            if (prev_ratio - ratio < opt_.repair_break) break;
            prev_ratio = ratio;
        }
        res.sequence.reserve(m_);
        for (u32 i = n_ == 0 ? kNil : 0; i != kNil; i = nxt_[i]) res.sequence.push_back(sym_[i]);
        return res;
    }

private:
    bool pairable(u32 s) const { return !(opt_.zero_separator && s == 0); }
    bool counted(u32 i) const { return occ_prev_[i] != kUncounted; }

    void add(u32 i) {
        const u32 l = sym_[i], r = sym_[nxt_[i]];
        PairRec& p = pairs_[pair_key(l, r)];
        if (p.count >= 2) ranks_.erase(Rank{p.count, l, r});
        occ_next_[i] = p.head;
        occ_prev_[i] = kNil;
        if (p.head != kNil) occ_prev_[p.head] = i;
        p.head = i;
        ++p.count;
        if (p.count >= 2) ranks_.insert(Rank{p.count, l, r});
    }

    void remove(u32 i) {
        if (!counted(i)) return;
        const u32 l = sym_[i], r = sym_[nxt_[i]];
        auto it = pairs_.find(pair_key(l, r));
        assert(it != pairs_.end());
        PairRec& p = it->second;
        if (p.count >= 2) ranks_.erase(Rank{p.count, l, r});
        if (occ_prev_[i] == kNil)
            p.head = occ_next_[i];
        else
            occ_next_[occ_prev_[i]] = occ_next_[i];
        if (occ_next_[i] != kNil) occ_prev_[occ_next_[i]] = occ_prev_[i];
        occ_prev_[i] = kUncounted;
        occ_next_[i] = kNil;
        --p.count;
        if (p.count >= 2) ranks_.insert(Rank{p.count, l, r});
        if (p.count == 0) pairs_.erase(it);
    }

    // k has just become the first position of a run; restore the alternation.
    void recount_run(u32 k) {
        const u32 s = sym_[k];
        if (!pairable(s)) return;
        bool want = true;
        for (u32 p = k;; want = !want) {
            const u32 q = nxt_[p];
            if (q == kNil || sym_[q] != s || counted(p) == want) return;
            if (want)
                add(p);
            else
                remove(p);
            p = q;
        }
    }

    void replace(u32 a, u32 b, u32 z) {
        auto it = pairs_.find(pair_key(a, b));
        std::vector<u32> where;
        where.reserve(it->second.count);
        for (u32 i = it->second.head; i != kNil; i = occ_next_[i]) where.push_back(i);
        std::sort(where.begin(), where.end());
        for (u32 i : where) {
            if (!counted(i) || sym_[i] != a) continue;
            const u32 j = nxt_[i];
            if (j == kNil || sym_[j] != b) continue;
            const u32 h = prv_[i];
            const u32 k = nxt_[j];
            if (h != kNil) remove(h);
            remove(i);
            if (k != kNil) remove(j);
            sym_[i] = z;
            sym_[j] = kHole;
            nxt_[i] = k;
            if (k != kNil) prv_[k] = i;
            --m_;
            if (h != kNil && pairable(sym_[h])) {
                const u32 g = prv_[h];
                const bool overlap = sym_[h] == z && g != kNil && sym_[g] == z && counted(g);
                if (!overlap) add(h);
            }
            if (k != kNil && pairable(sym_[k])) {
                add(i);
                if (sym_[k] == b) recount_run(k);
            }
        }
        assert(pairs_.find(pair_key(a, b)) == pairs_.end());
    }

    RePairOptions opt_;
    std::vector<u32> sym_;
    u32 n_;
    u32 m_;
    std::vector<u32> nxt_, prv_, occ_next_, occ_prev_;
    absl::flat_hash_map<u64, PairRec> pairs_;
    absl::btree_set<Rank, RankOrder> ranks_;
};

}  // namespace

RePairResult repair_compress(std::vector<std::uint32_t> symbols, const RePairOptions& options) {
    require(options.repair_break >= 0.0, ErrorCode::InvalidArgument, "repairBreak must be >= 0");
    Engine engine(std::move(symbols), options);
    return engine.run();
}

std::size_t max_pair_frequency(const std::vector<std::uint32_t>& seq, bool zero_separator) {
    struct Tally {
        std::size_t count = 0;
        std::size_t last = 0;
    };
    absl::flat_hash_map<u64, Tally> tally;
    std::size_t best = 0;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        if (zero_separator && (seq[i] == 0 || seq[i + 1] == 0)) continue;
        auto [it, fresh] = tally.try_emplace(pair_key(seq[i], seq[i + 1]));
        Tally& t = it->second;
        if (!fresh && seq[i] == seq[i + 1] && t.last + 1 == i) continue;
        ++t.count;
        t.last = i;
        best = std::max(best, t.count);
    }
    return best;
}

}  // namespace hrdc
